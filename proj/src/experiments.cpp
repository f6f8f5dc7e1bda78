#include "ihmm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "ihmm/error.hpp"

namespace ihmm {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.num_states < 1) throw ParameterError("num_states must be >= 1");
  if (spec.length < 1) throw ParameterError("length must be >= 1");
  if (!(spec.self_prob > 0.0 && spec.self_prob < 1.0)) {
    throw ParameterError("self_prob must lie strictly between 0 and 1");
  }
  if (spec.num_states == 1) {
    throw ParameterError("num_states = 1 cannot have self_prob < 1");
  }
  if (spec.emission_probs.empty()) {
    if (static_cast<int>(spec.means.size()) != spec.num_states) {
      throw ParameterError("means must have one entry per state");
    }
    if (!(spec.stddev > 0.0)) throw ParameterError("stddev must be positive");
  } else {
    if (static_cast<int>(spec.emission_probs.size()) != spec.num_states) {
      throw ParameterError("emission_probs must have one row per state");
    }
    const std::size_t v = spec.emission_probs.front().size();
    for (const auto& row : spec.emission_probs) {
      if (row.size() != v || v == 0) throw ParameterError("emission_probs rows differ in length");
      const double total = std::accumulate(row.begin(), row.end(), 0.0);
      if (std::abs(total - 1.0) > 1e-9) throw ParameterError("emission_probs rows must sum to 1");
      for (double p : row) {
        if (p < 0.0) throw ParameterError("emission_probs entries must be non-negative");
      }
    }
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const int k = spec.num_states;
  const double off = (1.0 - spec.self_prob) / (k - 1);
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, off));
  for (int j = 0; j < k; ++j) rows[j][j] = spec.self_prob;

  SyntheticData data;
  data.states.resize(spec.length);
  data.observations.resize(spec.length);
  std::uniform_int_distribution<int> first(0, k - 1);
  std::normal_distribution<double> noise(0.0, spec.stddev);
  int s = first(rng);
  for (int t = 0; t < spec.length; ++t) {
    if (t > 0) s = static_cast<int>(sample_categorical(rows[s], rng));
    data.states[t] = s;
    if (spec.emission_probs.empty()) {
      data.observations[t] = spec.means[s] + noise(rng);
    } else {
      data.observations[t] = static_cast<double>(sample_categorical(spec.emission_probs[s], rng));
    }
  }
  return data;
}

SyntheticSpec four_state_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_states = 4;
  spec.length = 4000;
  spec.self_prob = 0.75;
  spec.means = {-2.0, -0.5, 1.0, 4.0};
  spec.stddev = 0.5;
  spec.seed = seed;
  return spec;
}

SyntheticSpec ten_state_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_states = 10;
  spec.length = 4000;
  spec.self_prob = 0.75;
  for (int i = 0; i < 10; ++i) spec.means.push_back(-9.0 + 2.0 * i);
  spec.stddev = 0.5;
  spec.seed = seed;
  return spec;
}

std::vector<double> ingest_timeseries(std::span<const double> raw, std::size_t subsample,
                                      std::optional<std::size_t> truncate) {
  if (subsample < 1) throw ParameterError("subsample factor must be >= 1");
  std::vector<double> out;
  for (std::size_t i = 0; i < raw.size(); i += subsample) {
    if (truncate && out.size() >= *truncate) break;
    const double v = raw[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError("value " + format_double(v) + " at index " + std::to_string(i) +
                      " is not positive; cannot take its log");
    }
    out.push_back(std::log(v));
  }
  if (out.size() < 2) throw DataError("time series needs at least two retained points");
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / out.size();
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  var /= out.size();
  if (!(std::sqrt(var) > 1e-12 * (1.0 + std::abs(mean)))) throw DataError("time series has zero variance; cannot standardize");
  const double sd = std::sqrt(var);
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

std::string TextData::decode(std::span<const double> symbols) const {
  std::string out;
  out.reserve(symbols.size());
  for (double s : symbols) out.push_back(alphabet.at(symbol_index(s, alphabet.size())));
  return out;
}

TextData ingest_text(std::string_view text, std::size_t train_len, std::size_t test_len) {
  if (text.size() < train_len + test_len) {
    throw DataError("text has " + std::to_string(text.size()) + " characters; need " +
                    std::to_string(train_len + test_len));
  }
  std::set<char> distinct(text.begin(), text.end());
  TextData data;
  data.alphabet.assign(distinct.begin(), distinct.end());
  auto encode = [&](char c) {
    return static_cast<double>(std::lower_bound(data.alphabet.begin(), data.alphabet.end(), c) -
                               data.alphabet.begin());
  };
  for (std::size_t i = 0; i < train_len; ++i) data.train.push_back(encode(text[i]));
  for (std::size_t i = train_len; i < train_len + test_len; ++i) data.test.push_back(encode(text[i]));
  return data;
}

double log_predictive(const ChainState& sample, std::span<const double> y) {
  if (y.empty()) throw DataError("empty test sequence");
  const int k = sample.num_states();
  const int pseudo = k;
  std::vector<double> lf(k + 1), msg(k + 1), next(k + 1);
  auto emissions = [&](double obs) {
    for (int j = 0; j < k; ++j) lf[j] = log_likelihood(sample.emissions.phi[j], obs);
    lf[pseudo] = prior_predictive(sample.emissions.base, obs);
    return *std::max_element(lf.begin(), lf.end());
  };

  double log_total = 0.0;
  auto absorb = [&](std::vector<double>& v, double shift) {
    double z = 0.0;
    for (double x : v) z += x;
    if (!(z > 0.0)) throw NumericalError("forward filter lost all mass");
    for (double& x : v) x /= z;
    log_total += std::log(z) + shift;
  };

  double shift = emissions(y[0]);
  for (int j = 0; j < k; ++j) msg[j] = sample.shared.beta[j] * std::exp(lf[j] - shift);
  msg[pseudo] = (sample.finite ? 0.0 : sample.shared.remainder) * std::exp(lf[pseudo] - shift);
  absorb(msg, shift);

  for (std::size_t t = 1; t < y.size(); ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < k; ++i) {
      const double a = msg[i];
      if (a == 0.0) continue;
      const auto& row = sample.transitions.rows[i];
      for (int j = 0; j < k; ++j) next[j] += a * row[j];
      if (!sample.finite) next[pseudo] += a * row[k];
    }
    next[pseudo] += msg[pseudo];
    shift = emissions(y[t]);
    for (int j = 0; j <= k; ++j) next[j] *= std::exp(lf[j] - shift);
    msg.swap(next);
    absorb(msg, shift);
  }
  return log_total;
}

PredictiveReport predictive_log_likelihood(std::span<const ChainState> samples,
                                           std::span<const double> y_test) {
  if (samples.empty()) throw DataError("no posterior samples");
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(log_predictive(s, y_test));
  PredictiveReport report;
  report.samples = values.size();
  report.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double var = 0.0;
  for (double v : values) var += (v - report.mean) * (v - report.mean);
  report.stddev = std::sqrt(var / values.size());
  return report;
}

Diagnostics diagnostics(const ChainState& chain, std::span<const double> y) {
  Diagnostics d;
  std::vector<char> seen(chain.num_states(), 0);
  for (int s : chain.trajectory) {
    if (s >= 0 && s < chain.num_states() && !seen[s]) {
      seen[s] = 1;
      ++d.active_states;
    }
  }
  d.joint_log_likelihood = joint_log_likelihood(chain, y);
  return d;
}

void write_trace_header(std::ostream& out) {
  out << "# schema=" << kTraceSchema << '\n' << kTraceHeader << '\n';
}

void write_trace_row(std::ostream& out, const TraceRow& row) {
  out << row.iteration << ',' << row.active_states << ',' << format_double(row.jll) << ','
      << format_double(row.seconds) << '\n';
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::vector<TraceRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kTraceHeader) throw DataError("unexpected trace header: " + line);
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(fields, c, ',')) throw DataError("short trace row: " + line);
    }
    TraceRow r;
    r.iteration = std::stoll(cell[0]);
    r.active_states = std::stoi(cell[1]);
    r.jll = std::stod(cell[2]);
    r.seconds = std::stod(cell[3]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(line.substr(first), &used));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return values;
}

void write_series(const std::string& path, std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (double v : values) out << format_double(v) << '\n';
}

void write_states(const std::string& path, std::span<const int> states) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (int s : states) out << s << '\n';
}

}  // namespace ihmm
