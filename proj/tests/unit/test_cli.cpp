#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ihmm/experiments.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("ihmm_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const auto log = scratch() / "last.log";
  const std::string cmd = std::string(IHMM_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream s;
  s << in.rdbuf();
  r.output = s.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

// Trace rows without the wall-clock column.
std::vector<std::string> trace_core(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> rows;
  for (const auto& r : ihmm::read_trace(in)) {
    std::ostringstream s;
    s.precision(17);
    s << r.iteration << ',' << r.active_states << ',' << r.jll;
    rows.push_back(s.str());
  }
  return rows;
}

const char* kSmallFit = R"({
  "data": {"synthetic": {"preset": "four_state", "T": 200, "seed": 3}, "test_length": 50},
  "model": {"initial_states": 4},
  "run": {"iterations": 20, "burn_in": 10, "thin": 5, "checkpoint_every": 10}
})";

}  // namespace

TEST_CASE("generate writes the four-state series reproducibly") {
  const auto a = scratch() / "gen-a";
  const auto b = scratch() / "gen-b";
  REQUIRE(run("generate --seed 7 --out " + a.string()).code == 0);
  REQUIRE(run("generate --seed 7 --out " + b.string()).code == 0);
  const auto obs = slurp(a / "observations.txt");
  CHECK(count_lines(obs) == 4000);
  CHECK(obs == slurp(b / "observations.txt"));
  CHECK(count_lines(slurp(a / "states.txt")) == 4000);
  CHECK(slurp(a / "data.json").find("ihmm-data/1") != std::string::npos);
  REQUIRE(run("generate --seed 8 --out " + b.string()).code == 0);
  CHECK(obs != slurp(b / "observations.txt"));
}

TEST_CASE("configuration errors exit with code 2 and name the field") {
  const auto cfg = write_config("k1.json", R"({"data": {"synthetic": {"preset": "four_state", "K_true": 1}}})");
  const auto r = run("generate --config " + cfg.string() + " --out " + (scratch() / "never").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("data.synthetic.K_true") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch() / "never"));
  CHECK(run("fit --sampler smc --out " + (scratch() / "never").string()).code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("fit, resume and eval") {
  const auto cfg = write_config("small.json", kSmallFit);
  const auto full = scratch() / "fit-full";
  const auto part = scratch() / "fit-part";
  REQUIRE(run("fit --config " + cfg.string() + " --seed 5 --out " + full.string()).code == 0);
  const auto trace = slurp(full / "trace.csv");
  CHECK(trace.rfind("# schema=ihmm-trace/1\niteration,K_active,jll,seconds\n", 0) == 0);
  CHECK(count_lines(trace) == 22);
  CHECK(fs::exists(full / "samples" / "sample-000015.json"));
  CHECK(fs::exists(full / "samples" / "sample-000020.json"));
  CHECK_FALSE(fs::exists(full / "samples" / "sample-000010.json"));
  const auto run_json = slurp(full / "run.json");
  CHECK(run_json.find("\"complete\"") != std::string::npos);
  CHECK(run_json.find("\"pg-as\"") != std::string::npos);

  // Stop at 10, then resume to 20: same trace apart from the timing column.
  REQUIRE(run("fit --config " + cfg.string() + " --seed 5 --iterations 10 --out " + part.string()).code == 0);
  const auto ckpt = part / "checkpoint.json";
  REQUIRE(fs::exists(ckpt));
  fs::copy_file(ckpt, scratch() / "at10.json", fs::copy_options::overwrite_existing);
  REQUIRE(run("fit --config " + cfg.string() + " --seed 5 --out " + part.string() + " --resume " +
              (scratch() / "at10.json").string())
              .code == 0);
  const auto a = trace_core(full / "trace.csv");
  const auto b = trace_core(part / "trace.csv");
  REQUIRE(b.size() == 20);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i].rfind(std::to_string(i + 1) + ",", 0) == 0);
  CHECK(a == b);

  const auto e = run("eval --config " + cfg.string() + " --checkpoints '" + (full / "samples" / "*.json").string() + "'");
  CHECK(e.code == 0);
  CHECK(e.output.find("ihmm-eval/1") != std::string::npos);
  CHECK(e.output.find("\"samples\": 2") != std::string::npos);
  const auto none = run("eval --config " + cfg.string() + " --checkpoints '" + (scratch() / "nothing-*.json").string() + "'");
  CHECK(none.code == 3);
}

TEST_CASE("the beam sampler is selectable and recorded") {
  const auto cfg = write_config("beam.json", kSmallFit);
  const auto out = scratch() / "fit-beam";
  REQUIRE(run("fit --config " + cfg.string() + " --sampler beam --iterations 5 --out " + out.string()).code == 0);
  const auto run_json = slurp(out / "run.json");
  CHECK(run_json.find("\"sampler\": \"beam\"") != std::string::npos);
  CHECK(run_json.find("sampler.id") != std::string::npos);
}

TEST_CASE("resume rejects a checkpoint for different data") {
  const auto cfg = write_config("small2.json", kSmallFit);
  const auto other = write_config("other.json", R"({
    "data": {"synthetic": {"preset": "four_state", "T": 120, "seed": 3}},
    "model": {"initial_states": 4}, "run": {"iterations": 3}})");
  const auto out = scratch() / "fit-other";
  REQUIRE(run("fit --config " + other.string() + " --out " + out.string()).code == 0);
  const auto r = run("fit --config " + cfg.string() + " --out " + (scratch() / "fit-mismatch").string() +
                     " --resume " + (out / "checkpoint.json").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("length") != std::string::npos);
}
