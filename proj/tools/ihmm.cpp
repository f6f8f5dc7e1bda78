// Command-line front end: generate, fit, bench, eval.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ihmm/error.hpp"
#include "ihmm/runner.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kNumerical = 4 };

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ihmm::ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const ihmm::ParameterError*>(&e)) return kConfig;
  if (dynamic_cast<const ihmm::DataError*>(&e)) return kData;
  if (dynamic_cast<const ihmm::DomainError*>(&e)) return kData;
  if (dynamic_cast<const ihmm::ConsistencyError*>(&e)) return kData;
  if (dynamic_cast<const ihmm::NumericalError*>(&e)) return kNumerical;
  return kFailure;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string sampler;
  std::optional<std::int64_t> iterations;
};

ihmm::ExperimentConfig resolve(const Common& c) {
  auto cfg = c.config.empty() ? ihmm::parse_config("{}") : ihmm::load_config(c.config);
  if (c.seed) ihmm::apply_seed(cfg, *c.seed);
  if (!c.out.empty()) ihmm::apply_out(cfg, c.out);
  if (!c.sampler.empty()) ihmm::apply_sampler(cfg, c.sampler);
  if (c.iterations) ihmm::apply_iterations(cfg, *c.iterations);
  return cfg;
}

unsigned worker_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IHMM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) cap = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed IHMM_THREADS='" << env << "'\n";
    }
  }
  return cap;
}

// One run per seed, at most worker_cap() at a time; each run owns its
// output directory.
int fit_grid(const ihmm::ExperimentConfig& cfg, const std::optional<std::string>& resume) {
  if (cfg.run.seeds.empty()) {
    const auto s = ihmm::cmd_fit(cfg, cfg.run.seed, cfg.run.out, resume);
    std::cout << "iterations " << s.first_iteration << ".." << s.last_iteration << ", "
              << s.samples_written << " samples, output in " << cfg.run.out << '\n';
    return kOk;
  }
  if (resume) throw ihmm::ConfigError("--resume needs a single seed, not a seed grid");
  std::mutex lock;
  int worst = kOk;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> g(lock);
        if (next >= cfg.run.seeds.size()) return;
        i = next++;
      }
      const auto seed = cfg.run.seeds[i];
      const std::string dir = cfg.run.out + "/seed-" + std::to_string(seed);
      try {
        ihmm::cmd_fit(cfg, seed, dir);
        std::lock_guard<std::mutex> g(lock);
        std::cout << "seed " << seed << " done, output in " << dir << '\n';
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> g(lock);
        std::cerr << "seed " << seed << ": " << e.what() << '\n';
        worst = std::max(worst, exit_code_for(e));
      }
    }
  };
  const unsigned n = std::min<std::size_t>(worker_cap(), cfg.run.seeds.size());
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (JSON)");
  cmd->add_option("--seed", c.seed, "seed override");
  cmd->add_option("--out", c.out, "output directory override");
  cmd->add_option("--sampler", c.sampler, "sampler override: pg, pg-as, beam, gibbs");
  cmd->add_option("--iterations", c.iterations, "iteration count override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinite HMM inference: particle Gibbs, beam and Gibbs samplers"};
  app.require_subcommand(1);
  Common common;
  std::string resume, checkpoints, test_path;

  auto* gen = app.add_subcommand("generate", "write observations (and true states) to --out");
  add_common(gen, common);
  auto* fit = app.add_subcommand("fit", "run a sampler, writing trace, checkpoints and samples");
  add_common(fit, common);
  fit->add_option("--resume", resume, "checkpoint to continue from");
  auto* bench = app.add_subcommand("bench", "time sweeps over a grid of state counts");
  add_common(bench, common);
  auto* eval = app.add_subcommand("eval", "predictive log-likelihood over posterior samples");
  add_common(eval, common);
  eval->add_option("--checkpoints", checkpoints, "glob of sample checkpoints")->required();
  eval->add_option("--test", test_path, "held-out series (defaults to the config's held-out block)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    auto cfg = resolve(common);
    if (gen->parsed()) {
      if (common.seed && cfg.data.synthetic) cfg.data.synthetic->seed = *common.seed;
      ihmm::cmd_generate(cfg, cfg.run.out);
      std::cout << "data written to " << cfg.run.out << '\n';
      return kOk;
    }
    if (fit->parsed()) {
      return fit_grid(cfg, resume.empty() ? std::nullopt : std::optional<std::string>(resume));
    }
    if (bench->parsed()) {
      const auto report = ihmm::cmd_bench(cfg, cfg.run.out);
      for (const auto& [id, slope] : report.slopes) {
        std::cout << id << ": log-log slope " << slope << '\n';
      }
      for (const auto& [id, ratio] : report.doubling_ratios) {
        std::cout << id << ": time(2T)/time(T) " << ratio << '\n';
      }
      return kOk;
    }
    if (eval->parsed()) {
      const auto report = ihmm::cmd_eval(cfg, checkpoints, test_path);
      std::cout << ihmm::report_to_json(report) << '\n';
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kFailure;
}
