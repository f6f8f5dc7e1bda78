#include "ihmm/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ihmm/error.hpp"

namespace ihmm {

using nlohmann::json;

namespace {

json base_to_json(const BaseMeasure& base) {
  if (const auto* nig = std::get_if<NigParams>(&base)) {
    return {{"family", "gaussian"},
            {"mean_loc", nig->mean_loc},
            {"precision_scale", nig->precision_scale},
            {"shape", nig->shape},
            {"rate", nig->rate}};
  }
  return {{"family", "discrete"},
          {"concentrations", std::get<DirichletParams>(base).concentrations}};
}

BaseMeasure base_from_json(const json& j) {
  const auto family = j.at("family").get<std::string>();
  if (family == "gaussian") {
    return NigParams{j.at("mean_loc").get<double>(), j.at("precision_scale").get<double>(),
                     j.at("shape").get<double>(), j.at("rate").get<double>()};
  }
  if (family == "discrete") {
    return DirichletParams{j.at("concentrations").get<std::vector<double>>()};
  }
  throw DataError("unknown emission family '" + family + "'");
}

json phi_to_json(const EmissionParam& phi) {
  if (const auto* g = std::get_if<GaussianParam>(&phi)) {
    return {{"mean", g->mean}, {"variance", g->variance}};
  }
  return {{"probs", std::get<CategoricalParam>(phi).probs}};
}

EmissionParam phi_from_json(const json& j) {
  if (j.contains("probs")) return CategoricalParam{j.at("probs").get<std::vector<double>>()};
  return GaussianParam{j.at("mean").get<double>(), j.at("variance").get<double>()};
}

}  // namespace

std::string chain_to_json(const ChainState& chain, const Rng* rng) {
  json phi = json::array();
  for (const auto& p : chain.emissions.phi) phi.push_back(phi_to_json(p));
  const auto& h = chain.hyper;
  json doc = {
      {"schema", kChainSchema},
      {"iteration", chain.iteration},
      {"finite", chain.finite},
      {"trajectory", chain.trajectory},
      {"beta", chain.shared.beta},
      {"beta_remainder", chain.shared.remainder},
      {"rows", chain.transitions.rows},
      {"base", base_to_json(chain.emissions.base)},
      {"phi", phi},
      {"hyper",
       {{"alpha", h.alpha},
        {"gamma", h.gamma},
        {"kappa", h.kappa},
        {"a_gamma", h.a_gamma},
        {"b_gamma", h.b_gamma},
        {"a_s", h.a_s},
        {"b_s", h.b_s},
        {"a_kappa", h.a_kappa},
        {"b_kappa", h.b_kappa},
        {"sticky", h.sticky}}},
  };
  if (rng) {
    std::ostringstream state;
    state << *rng;
    doc["rng"] = state.str();
  }
  // Doubles are written in shortest round-trip form.
  return doc.dump(1);
}

LoadedChain chain_from_json(std::string_view text) {
  LoadedChain out;
  try {
    const json doc = json::parse(text);
    if (doc.value("schema", std::string()) != kChainSchema) {
      throw DataError("checkpoint schema is not " + std::string(kChainSchema));
    }
    auto& c = out.chain;
    c.iteration = doc.at("iteration").get<std::int64_t>();
    c.finite = doc.value("finite", false);
    c.trajectory = doc.at("trajectory").get<std::vector<int>>();
    c.shared.beta = doc.at("beta").get<std::vector<double>>();
    c.shared.remainder = doc.at("beta_remainder").get<double>();
    c.transitions.rows = doc.at("rows").get<std::vector<std::vector<double>>>();
    c.emissions.base = base_from_json(doc.at("base"));
    for (const auto& p : doc.at("phi")) c.emissions.phi.push_back(phi_from_json(p));
    const auto& h = doc.at("hyper");
    c.hyper.alpha = h.at("alpha").get<double>();
    c.hyper.gamma = h.at("gamma").get<double>();
    c.hyper.kappa = h.at("kappa").get<double>();
    c.hyper.a_gamma = h.at("a_gamma").get<double>();
    c.hyper.b_gamma = h.at("b_gamma").get<double>();
    c.hyper.a_s = h.at("a_s").get<double>();
    c.hyper.b_s = h.at("b_s").get<double>();
    c.hyper.a_kappa = h.at("a_kappa").get<double>();
    c.hyper.b_kappa = h.at("b_kappa").get<double>();
    c.hyper.sticky = h.at("sticky").get<bool>();
    if (doc.contains("rng")) {
      Rng rng;
      std::istringstream state(doc.at("rng").get<std::string>());
      state >> rng;
      if (!state) throw DataError("checkpoint rng state is malformed");
      out.rng = rng;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    validate(out.chain.emissions.base);
    check_invariants(out.chain, 1e-9);
  } catch (const std::exception& e) {
    throw DataError(std::string("inconsistent checkpoint: ") + e.what());
  }
  return out;
}

void save_checkpoint(const std::string& path, const ChainState& chain, const Rng* rng) {
  // Write-then-rename so a crash never leaves a truncated checkpoint.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot write " + tmp);
    out << chain_to_json(chain, rng) << '\n';
    if (!out) throw DataError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

LoadedChain load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return chain_from_json(text.str());
}

}  // namespace ihmm
