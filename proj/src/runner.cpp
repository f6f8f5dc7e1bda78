#include "ihmm/runner.hpp"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ihmm/checkpoint.hpp"
#include "ihmm/error.hpp"

namespace ihmm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

json overrides_json(const ExperimentConfig& cfg) {
  json o = json::object();
  for (const auto& [k, v] : cfg.overrides) o[k] = v;
  return o;
}

void write_run_json(const fs::path& dir, const ExperimentConfig& cfg, std::uint64_t seed,
                    const std::string& status, std::int64_t last_iteration,
                    const std::optional<std::string>& resume) {
  json run = {
      {"schema", "ihmm-run/1"},
      {"config_digest", config_digest(cfg)},
      {"seed", seed},
      {"sampler", std::string(to_string(cfg.sampler.id))},
      {"overrides", overrides_json(cfg)},
      {"config", json::parse(config_to_json(cfg))},
      {"status", status},
      {"last_iteration", last_iteration},
      {"trace", {{"schema", kTraceSchema}, {"columns", kTraceHeader}}},
  };
  if (resume) run["resumed_from"] = *resume;
  write_text(dir / "run.json", run.dump(1) + "\n");
}

std::string sample_name(std::int64_t iteration) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "sample-%06lld.json", static_cast<long long>(iteration));
  return buf;
}

}  // namespace

void cmd_generate(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const auto data = load_data(cfg.data);
  const fs::path dir(out_dir);
  write_series((dir / "observations.txt").string(), data.train);
  if (!data.states.empty()) write_states((dir / "states.txt").string(), data.states);
  if (!data.test.empty()) write_series((dir / "test.txt").string(), data.test);
  json meta = {{"schema", "ihmm-data/1"},
               {"config_digest", config_digest(cfg)},
               {"overrides", overrides_json(cfg)},
               {"train_length", data.train.size()},
               {"test_length", data.test.size()},
               {"files", {{"observations", "observations.txt"}}}};
  if (!data.states.empty()) meta["files"]["states"] = "states.txt";
  if (!data.test.empty()) meta["files"]["test"] = "test.txt";
  if (!data.alphabet.empty()) meta["alphabet"] = data.alphabet;
  write_text(dir / "data.json", meta.dump(1) + "\n");
}

FitSummary cmd_fit(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                   const std::optional<std::string>& resume) {
  using clock = std::chrono::steady_clock;
  const auto data = load_data(cfg.data);
  const BaseMeasure base = make_base(cfg.model, data);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  ensure_dir((dir / "samples").string());

  ChainState chain;
  Rng rng(seed);
  std::vector<TraceRow> kept;
  if (resume) {
    auto loaded = load_checkpoint(*resume);
    chain = std::move(loaded.chain);
    if (!loaded.rng) throw DataError("checkpoint " + *resume + " carries no generator state");
    rng = *loaded.rng;
    if (chain.trajectory.size() != data.train.size()) {
      throw DataError("checkpoint trajectory has length " + std::to_string(chain.trajectory.size()) +
                      " but the data has " + std::to_string(data.train.size()));
    }
    if (chain.emissions.base.index() != base.index()) {
      throw DataError("checkpoint emission family differs from the configured one");
    }
    std::ifstream old(dir / "trace.csv");
    if (old) {
      for (const auto& row : read_trace(old)) {
        if (row.iteration <= chain.iteration) kept.push_back(row);
      }
    }
  } else {
    chain = initialize_chain(base, cfg.model.hyper, cfg.model.initial_states, data.train, rng);
  }
  for (double v : data.train) {
    if (const auto* d = std::get_if<DirichletParams>(&base)) symbol_index(v, d->concentrations.size());
  }

  std::ofstream trace(dir / "trace.csv", std::ios::trunc);
  if (!trace) throw DataError("cannot write " + (dir / "trace.csv").string());
  write_trace_header(trace);
  for (const auto& row : kept) write_trace_row(trace, row);
  trace.flush();
  write_run_json(dir, cfg, seed, "running", chain.iteration, resume);

  FitSummary summary;
  summary.first_iteration = chain.iteration + 1;
  const double offset = kept.empty() ? 0.0 : kept.back().seconds;
  const auto start = clock::now();
  const std::string checkpoint_path = (dir / "checkpoint.json").string();
  while (chain.iteration < cfg.run.iterations) {
    full_sweep(chain, data.train, cfg.sampler, rng);
    const auto d = diagnostics(chain, data.train);
    TraceRow row;
    row.iteration = chain.iteration;
    row.active_states = d.active_states;
    row.jll = d.joint_log_likelihood;
    row.seconds = offset + std::chrono::duration<double>(clock::now() - start).count();
    write_trace_row(trace, row);
    trace.flush();
    if (chain.iteration > cfg.run.burn_in && chain.iteration % cfg.run.thin == 0) {
      save_checkpoint((dir / "samples" / sample_name(chain.iteration)).string(), chain);
      ++summary.samples_written;
    }
    if (chain.iteration % cfg.run.checkpoint_every == 0) save_checkpoint(checkpoint_path, chain, &rng);
  }
  save_checkpoint(checkpoint_path, chain, &rng);
  summary.last_iteration = chain.iteration;
  write_run_json(dir, cfg, seed, "complete", chain.iteration, resume);
  return summary;
}

BenchReport cmd_bench(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto& b = cfg.bench;
  BenchReport report;
  const std::uint64_t seed = cfg.run.seed;
  for (const auto& id : b.samplers) {
    SamplerConfig sc = cfg.sampler;
    sc.id = *parse_sampler(id);
    sc.particles = b.particles;
    std::vector<double> ks, secs;
    for (int k : b.states) {
      const auto model = make_bench_model(k, b.length, seed + static_cast<std::uint64_t>(k));
      const double s = time_sweeps(model, sc, b.sweeps, 0.2, seed);
      report.points.push_back({id, k, b.length, s});
      ks.push_back(k);
      secs.push_back(s);
    }
    report.slopes.emplace_back(id, loglog_slope(ks, secs));
    const int k_mid = b.states[b.states.size() / 2];
    const auto single = make_bench_model(k_mid, b.length, seed + 7);
    const auto twice = make_bench_model(k_mid, 2 * b.length, seed + 7);
    const double t1 = time_sweeps(single, sc, b.sweeps, 0.2, seed);
    const double t2 = time_sweeps(twice, sc, b.sweeps, 0.2, seed);
    report.points.push_back({id, k_mid, 2 * b.length, t2});
    report.doubling_ratios.emplace_back(id, t2 / t1);
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    std::ostringstream csv;
    csv << "# schema=" << kBenchSchema << '\n' << kBenchHeader << '\n';
    char buf[64];
    for (const auto& p : report.points) {
      std::snprintf(buf, sizeof buf, "%.9g", p.seconds);
      csv << p.sampler << ',' << p.num_states << ',' << p.length << ',' << buf << '\n';
    }
    write_text(dir / "bench.csv", csv.str());
    json summary = {{"schema", kBenchSchema},
                    {"config_digest", config_digest(cfg)},
                    {"slopes", json::object()},
                    {"doubling_ratios", json::object()}};
    for (const auto& [id, v] : report.slopes) summary["slopes"][id] = v;
    for (const auto& [id, v] : report.doubling_ratios) summary["doubling_ratios"][id] = v;
    write_text(dir / "bench.json", summary.dump(1) + "\n");
  }
  return report;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw DataError("cannot expand pattern " + pattern);
  std::sort(out.begin(), out.end());
  return out;
}

PredictiveReport cmd_eval(const ExperimentConfig& cfg, const std::string& pattern,
                          const std::string& test_path) {
  const auto paths = expand_glob(pattern);
  if (paths.empty()) throw DataError("no checkpoints match " + pattern);
  std::vector<double> test;
  if (!test_path.empty()) {
    test = read_series(test_path);
  } else {
    test = load_data(cfg.data).test;
  }
  if (test.empty()) throw DataError("no held-out test data (set data.test_length or pass --test)");
  std::vector<ChainState> samples;
  samples.reserve(paths.size());
  for (const auto& p : paths) samples.push_back(load_checkpoint(p).chain);
  return predictive_log_likelihood(samples, test);
}

std::string report_to_json(const PredictiveReport& report) {
  json doc = {{"schema", "ihmm-eval/1"},
              {"mean", report.mean},
              {"std", report.stddev},
              {"samples", report.samples}};
  return doc.dump(1);
}

}  // namespace ihmm
