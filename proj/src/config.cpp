#include "ihmm/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ihmm/error.hpp"

namespace ihmm {

using nlohmann::json;

namespace {

// Walks one JSON object, handing out typed fields and rejecting any key that
// was never asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), field(key));
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(field(item.key().c_str()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

void parse_model(Section s, ModelSection& m) {
  std::string family = m.family == Family::gaussian ? "gaussian" : "discrete";
  s.get("family", family);
  if (family == "gaussian") {
    m.family = Family::gaussian;
  } else if (family == "discrete") {
    m.family = Family::discrete;
  } else {
    throw ConfigError(s.field("family") + ": expected 'gaussian' or 'discrete'");
  }
  if (auto nig = s.child("nig")) {
    nig->get("mean_loc", m.nig.mean_loc);
    nig->get("precision_scale", m.nig.precision_scale);
    nig->get("shape", m.nig.shape);
    nig->get("rate", m.nig.rate);
    nig->finish();
    try {
      validate(m.nig);
    } catch (const ParameterError& e) {
      throw ConfigError(s.field("nig") + ": " + e.what());
    }
  }
  s.get("dirichlet", m.dirichlet);
  require(m.dirichlet > 0.0, s.field("dirichlet"), "must be positive");
  s.get("alphabet_size", m.alphabet_size);
  s.get("initial_states", m.initial_states);
  require(m.initial_states >= 1, s.field("initial_states"), "must be >= 1");
  auto& h = m.hyper;
  s.get("sticky", h.sticky);
  if (auto hs = s.child("hyper")) {
    hs->get("alpha", h.alpha);
    hs->get("gamma", h.gamma);
    hs->get("kappa", h.kappa);
    hs->get("a_gamma", h.a_gamma);
    hs->get("b_gamma", h.b_gamma);
    hs->get("a_s", h.a_s);
    hs->get("b_s", h.b_s);
    hs->get("a_kappa", h.a_kappa);
    hs->get("b_kappa", h.b_kappa);
    hs->finish();
    for (auto [name, v] : {std::pair{"alpha", h.alpha}, {"gamma", h.gamma}, {"a_gamma", h.a_gamma},
                           {"b_gamma", h.b_gamma}, {"a_s", h.a_s}, {"b_s", h.b_s},
                           {"a_kappa", h.a_kappa}, {"b_kappa", h.b_kappa}}) {
      require(v > 0.0, hs->field(name), "must be positive");
    }
    require(h.kappa >= 0.0, hs->field("kappa"), "must be non-negative");
  }
  if (!h.sticky) h.kappa = 0.0;
  s.finish();
}

void parse_sampler(Section s, SamplerConfig& c) {
  std::string id(to_string(c.id));
  s.get("id", id);
  auto parsed = ihmm::parse_sampler(id);
  require(parsed.has_value(), s.field("id"), "expected one of pg, pg-as, beam, gibbs");
  c.id = *parsed;
  s.get("particles", c.particles);
  require(c.particles >= 2, s.field("particles"), "must be >= 2");
  std::string proposal = c.proposal == Proposal::prior ? "prior" : "posterior";
  s.get("proposal", proposal);
  if (proposal == "prior") {
    c.proposal = Proposal::prior;
  } else if (proposal == "posterior") {
    c.proposal = Proposal::posterior;
  } else {
    throw ConfigError(s.field("proposal") + ": expected 'prior' or 'posterior'");
  }
  s.get("resample_hyperparameters", c.resample_hyperparameters);
  s.finish();
}

void parse_data(Section s, DataSection& d) {
  if (auto syn = s.child("synthetic")) {
    SyntheticSpec spec;
    std::string preset;
    syn->get("preset", preset);
    if (preset == "four_state") {
      spec = four_state_spec(0);
    } else if (preset == "ten_state") {
      spec = ten_state_spec(0);
    } else if (!preset.empty()) {
      throw ConfigError(syn->field("preset") + ": expected 'four_state' or 'ten_state'");
    }
    syn->get("K_true", spec.num_states);
    syn->get("T", spec.length);
    syn->get("self_prob", spec.self_prob);
    syn->get("means", spec.means);
    syn->get("stddev", spec.stddev);
    syn->get("emission_probs", spec.emission_probs);
    syn->get("seed", spec.seed);
    syn->finish();
    require(spec.num_states >= 2, syn->field("K_true"),
            "must be >= 2 (a single state cannot have self_prob < 1)");
    try {
      validate(spec);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("data.synthetic: ") + e.what());
    }
    d.synthetic = spec;
  }
  s.get("path", d.path);
  s.get("format", d.format);
  require(d.format == "series" || d.format == "text", s.field("format"),
          "expected 'series' or 'text'");
  s.get("subsample", d.subsample);
  require(d.subsample >= 1, s.field("subsample"), "must be >= 1");
  s.get("truncate", d.truncate);
  s.get("test_length", d.test_length);
  s.finish();
  require(d.synthetic.has_value() != !d.path.empty(), s.field("synthetic"),
          "exactly one of 'synthetic' and 'path' is required");
  if (!d.path.empty()) {
    require(std::filesystem::exists(d.path), s.field("path"), "file '" + d.path + "' not found");
  }
}

void parse_run(Section s, RunSection& r) {
  s.get("iterations", r.iterations);
  require(r.iterations >= 1, s.field("iterations"), "must be >= 1");
  s.get("burn_in", r.burn_in);
  require(r.burn_in >= 0, s.field("burn_in"), "must be >= 0");
  s.get("thin", r.thin);
  require(r.thin >= 1, s.field("thin"), "must be >= 1");
  s.get("seed", r.seed);
  s.get("seeds", r.seeds);
  s.get("out", r.out);
  require(!r.out.empty(), s.field("out"), "must not be empty");
  s.get("checkpoint_every", r.checkpoint_every);
  require(r.checkpoint_every >= 1, s.field("checkpoint_every"), "must be >= 1");
  s.finish();
}

void parse_bench(Section s, BenchSection& b) {
  s.get("K", b.states);
  require(b.states.size() >= 2, s.field("K"), "needs at least two sizes");
  for (int k : b.states) require(k >= 1, s.field("K"), "sizes must be >= 1");
  s.get("T", b.length);
  require(b.length >= 1, s.field("T"), "must be >= 1");
  s.get("particles", b.particles);
  require(b.particles >= 2, s.field("particles"), "must be >= 2");
  s.get("sweeps", b.sweeps);
  require(b.sweeps >= 1, s.field("sweeps"), "must be >= 1");
  s.get("samplers", b.samplers);
  for (const auto& id : b.samplers) {
    require(ihmm::parse_sampler(id).has_value(), s.field("samplers"), "unknown sampler '" + id + "'");
  }
  s.finish();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Section root(doc, "");
  std::string schema = "ihmm-config/1";
  root.get("schema", schema);
  require(schema == "ihmm-config/1", "schema", "expected 'ihmm-config/1'");
  if (auto s = root.child("model")) parse_model(*s, cfg.model);
  if (auto s = root.child("sampler")) parse_sampler(*s, cfg.sampler);
  if (auto s = root.child("data")) {
    parse_data(*s, cfg.data);
  } else {
    cfg.data.synthetic = four_state_spec(1);
  }
  if (auto s = root.child("run")) parse_run(*s, cfg.run);
  if (auto s = root.child("bench")) parse_bench(*s, cfg.bench);
  root.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const auto& m = cfg.model;
  const auto& h = m.hyper;
  json data = json::object();
  if (cfg.data.synthetic) {
    const auto& s = *cfg.data.synthetic;
    data["synthetic"] = {{"K_true", s.num_states}, {"T", s.length},
                         {"self_prob", s.self_prob}, {"means", s.means},
                         {"stddev", s.stddev},       {"emission_probs", s.emission_probs},
                         {"seed", s.seed}};
  } else {
    data["path"] = cfg.data.path;
    data["format"] = cfg.data.format;
    data["subsample"] = cfg.data.subsample;
    data["truncate"] = cfg.data.truncate ? json(*cfg.data.truncate) : json(nullptr);
  }
  data["test_length"] = cfg.data.test_length;
  json doc = {
      {"schema", "ihmm-config/1"},
      {"model",
       {{"family", m.family == Family::gaussian ? "gaussian" : "discrete"},
        {"nig",
         {{"mean_loc", m.nig.mean_loc},
          {"precision_scale", m.nig.precision_scale},
          {"shape", m.nig.shape},
          {"rate", m.nig.rate}}},
        {"dirichlet", m.dirichlet},
        {"alphabet_size", m.alphabet_size},
        {"initial_states", m.initial_states},
        {"sticky", h.sticky},
        {"hyper",
         {{"alpha", h.alpha},
          {"gamma", h.gamma},
          {"kappa", h.kappa},
          {"a_gamma", h.a_gamma},
          {"b_gamma", h.b_gamma},
          {"a_s", h.a_s},
          {"b_s", h.b_s},
          {"a_kappa", h.a_kappa},
          {"b_kappa", h.b_kappa}}}}},
      {"sampler",
       {{"id", std::string(to_string(cfg.sampler.id))},
        {"particles", cfg.sampler.particles},
        {"proposal", cfg.sampler.proposal == Proposal::prior ? "prior" : "posterior"},
        {"resample_hyperparameters", cfg.sampler.resample_hyperparameters}}},
      {"data", data},
      {"run",
       {{"iterations", cfg.run.iterations},
        {"burn_in", cfg.run.burn_in},
        {"thin", cfg.run.thin},
        {"seed", cfg.run.seed},
        {"seeds", cfg.run.seeds},
        {"out", cfg.run.out},
        {"checkpoint_every", cfg.run.checkpoint_every}}},
      {"bench",
       {{"K", cfg.bench.states},
        {"T", cfg.bench.length},
        {"particles", cfg.bench.particles},
        {"sweeps", cfg.bench.sweeps},
        {"samplers", cfg.bench.samplers}}},
  };
  return doc.dump();
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config_to_json(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void apply_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.run.seed = seed;
  cfg.run.seeds.clear();
  cfg.overrides["run.seed"] = std::to_string(seed);
}

void apply_out(ExperimentConfig& cfg, const std::string& out) {
  if (out.empty()) throw ConfigError("--out must not be empty");
  cfg.run.out = out;
  cfg.overrides["run.out"] = out;
}

void apply_sampler(ExperimentConfig& cfg, const std::string& id) {
  auto parsed = parse_sampler(id);
  if (!parsed) throw ConfigError("--sampler: expected one of pg, pg-as, beam, gibbs");
  cfg.sampler.id = *parsed;
  cfg.overrides["sampler.id"] = id;
}

void apply_iterations(ExperimentConfig& cfg, std::int64_t iterations) {
  if (iterations < 1) throw ConfigError("--iterations must be >= 1");
  cfg.run.iterations = iterations;
  cfg.overrides["run.iterations"] = std::to_string(iterations);
}

LoadedData load_data(const DataSection& data) {
  LoadedData out;
  if (data.synthetic) {
    const auto generated = generate_synthetic(*data.synthetic);
    if (data.test_length >= generated.observations.size()) {
      throw DataError("test_length leaves no training data");
    }
    const std::size_t split = generated.observations.size() - data.test_length;
    out.train.assign(generated.observations.begin(), generated.observations.begin() + split);
    out.test.assign(generated.observations.begin() + split, generated.observations.end());
    out.states.assign(generated.states.begin(), generated.states.begin() + split);
    return out;
  }
  if (data.format == "text") {
    std::ifstream in(data.path);
    if (!in) throw DataError("cannot open " + data.path);
    std::ostringstream text;
    text << in.rdbuf();
    const std::string all = text.str();
    const std::size_t train_len =
        data.truncate.value_or(all.size() > data.test_length ? all.size() - data.test_length : 0);
    auto parsed = ingest_text(all, train_len, data.test_length);
    out.train = std::move(parsed.train);
    out.test = std::move(parsed.test);
    out.alphabet = std::move(parsed.alphabet);
    return out;
  }
  const auto raw = read_series(data.path);
  std::optional<std::size_t> keep;
  if (data.truncate) keep = *data.truncate + data.test_length;
  auto series = ingest_timeseries(raw, data.subsample, keep);
  if (data.test_length >= series.size()) throw DataError("test_length leaves no training data");
  const std::size_t split = series.size() - data.test_length;
  out.train.assign(series.begin(), series.begin() + split);
  out.test.assign(series.begin() + split, series.end());
  return out;
}

BaseMeasure make_base(const ModelSection& model, const LoadedData& data) {
  if (model.family == Family::gaussian) return model.nig;
  std::size_t v = model.alphabet_size;
  if (v == 0) v = data.alphabet.size();
  if (v == 0) {
    double top = 0.0;
    for (const auto* part : {&data.train, &data.test}) {
      for (double y : *part) top = std::max(top, y);
    }
    v = static_cast<std::size_t>(top) + 1;
  }
  if (v < 1) throw ConfigError("model.alphabet_size: could not determine the alphabet");
  return DirichletParams{std::vector<double>(v, model.dirichlet)};
}

}  // namespace ihmm
