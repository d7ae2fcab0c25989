#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "elca/cli.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = elca::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("elca_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

fs::path simulated(const fs::path& dir) {
  const Outcome o = run({"simulate", "--vertices", "8", "--clusters", "2", "--extra", "2", "--edges", "120", "--seed",
                         "5", "--out", dir.string()});
  REQUIRE(o.code == 0);
  return dir / "hypergraph.txt";
}

}  // namespace

TEST_CASE("version, help and usage errors") {
  CHECK(run({"--version"}).out == std::string(elca::cli::kVersion) + "\n");
  CHECK(run({"--help"}).code == 0);
  const Outcome none = run({});
  CHECK(none.code == 2);
  CHECK(none.err.rfind("error: ", 0) == 0);
  CHECK(run({"fit"}).code == 2);
  CHECK(run({"fit", "--input", "x", "--clusters", "2", "--format", "xml"}).code == 2);
}

TEST_CASE("select rejects a split probability outside (0,1)") {
  const Outcome o = run({"select", "--input", "whatever.txt", "--q", "1.5"});
  CHECK(o.code == 2);
  CHECK(o.err.find("error:") == 0);
  CHECK(o.err.find('\n') == o.err.size() - 1);
}

TEST_CASE("simulate writes a consistent sample and rejects zero hyperedges") {
  const fs::path dir = scratch("simulate");
  simulated(dir);
  for (const char* f : {"hypergraph.txt", "incidence.csv", "labels.csv", "params.json", "manifest.json"})
    CHECK(fs::exists(dir / f));
  const Json params = read_json(dir / "params.json");
  CHECK(params["pi"].size() == 2);
  CHECK(params["a"].back().get<double>() == 1.0);
  const Json manifest = read_json(dir / "manifest.json");
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["artifact_version"] == elca::cli::kVersion);

  const fs::path again = scratch("simulate_again");
  REQUIRE(run({"simulate", "--vertices", "8", "--clusters", "2", "--extra", "2", "--edges", "120", "--seed", "5",
               "--out", again.string()})
              .code == 0);
  CHECK(slurp(dir / "incidence.csv") == slurp(again / "incidence.csv"));

  const Outcome zero = run({"simulate", "--vertices", "8", "--clusters", "2", "--edges", "0", "--out", dir.string()});
  CHECK(zero.code != 0);
  CHECK(zero.err.find("error:") == 0);

  // Sampling from a parameter file.
  const fs::path from_file = scratch("simulate_params");
  REQUIRE(run({"simulate", "--params", (dir / "params.json").string(), "--edges", "10", "--out",
               from_file.string()})
              .code == 0);
  CHECK(fs::exists(from_file / "incidence.csv"));
}

TEST_CASE("fit writes parameters, traces and assignments") {
  const fs::path dir = scratch("fit");
  const fs::path input = simulated(dir / "data");
  const fs::path out = dir / "fit";
  const Outcome o = run({"fit", "--input", input.string(), "--clusters", "2", "--extra", "2", "--restarts", "2",
                         "--resp", "--out", out.string()});
  REQUIRE(o.code == 0);
  const Json fit = read_json(out / "fit.json");
  CHECK(fit["pi"].size() == 2);
  CHECK(fit["a"].size() == 2);
  CHECK(fit["a"][1].get<double>() == 1.0);
  CHECK(fit["phi"].size() == 8);
  CHECK(fit["loglik_trace"].size() == fit["n_iter"].get<std::size_t>() + 1);
  CHECK(fit["responsibilities"].size() == 120);
  CHECK(fit["z1"].size() == 120);
  const std::string trace = slurp(out / "loglik_trace.csv");
  CHECK(trace.rfind("iteration,loglik\n", 0) == 0);
  const std::string assign = slurp(out / "assignments.csv");
  CHECK(assign.rfind("edge,label,cluster,extra\n", 0) == 0);
  CHECK(std::count(assign.begin(), assign.end(), '\n') == 121);
  CHECK(slurp(out / "cluster_probs.csv").rfind("edge,label,cluster_1,cluster_2,extra_1,extra_2\n", 0) == 0);
}

TEST_CASE("fit with one additional cluster reports a = [1]") {
  const fs::path dir = scratch("fit_k1");
  const fs::path input = simulated(dir / "data");
  REQUIRE(run({"fit", "--input", input.string(), "--clusters", "2", "--restarts", "1", "--out", (dir / "o").string()})
              .code == 0);
  const Json fit = read_json(dir / "o" / "fit.json");
  REQUIRE(fit["a"].size() == 1);
  CHECK(fit["a"][0].get<double>() == 1.0);
}

TEST_CASE("fit reports missing input files and bad cells") {
  const fs::path dir = scratch("fit_errors");
  const Outcome missing = run({"fit", "--input", (dir / "nope.txt").string(), "--clusters", "1", "--out", dir.string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error:") == 0);

  std::ofstream(dir / "bad.csv") << "1,0\n0,2\n";
  const Outcome bad = run({"fit", "--input", (dir / "bad.csv").string(), "--format", "csv", "--clusters", "1",
                           "--out", dir.string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 2") != std::string::npos);
}

TEST_CASE("sizedist reports observed and model size distributions") {
  const fs::path dir = scratch("sizedist");
  const fs::path input = simulated(dir / "data");
  REQUIRE(run({"sizedist", "--input", input.string(), "--params", (dir / "data" / "params.json").string(), "--out",
               (dir / "o").string()})
              .code == 0);
  const Json report = read_json(dir / "o" / "moments.json");
  CHECK(report["n_edges"] == 120);
  CHECK(report.contains("tv_elca"));
  CHECK(report["moments"].is_object());

  std::ifstream csv(dir / "o" / "sizes.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "size,observed_count,observed,elca");
  long count_sum = 0;
  double observed_sum = 0.0, model_sum = 0.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    count_sum += std::stol(cell);
    std::getline(row, cell, ',');
    observed_sum += std::stod(cell);
    std::getline(row, cell, ',');
    model_sum += std::stod(cell);
    ++rows;
  }
  CHECK(rows == 9);
  CHECK(count_sum == 120);
  CHECK(observed_sum == doctest::Approx(1.0));
  CHECK(model_sum == doctest::Approx(1.0));
}

TEST_CASE("replay reproduces fit and select outputs byte for byte") {
  const fs::path dir = scratch("replay");
  const fs::path input = simulated(dir / "data");
  const fs::path first = dir / "first";
  REQUIRE(run({"fit", "--input", input.string(), "--clusters", "2", "--extra", "2", "--restarts", "2", "--out",
               first.string()})
              .code == 0);
  REQUIRE(run({"replay", "--manifest", (first / "manifest.json").string(), "--out", (dir / "second").string(),
               "--threads", "2"})
              .code == 0);
  for (const char* f : {"fit.json", "loglik_trace.csv", "assignments.csv", "cluster_probs.csv"})
    CHECK(slurp(first / f) == slurp(dir / "second" / f));

  const fs::path sel = dir / "sel";
  REQUIRE(run({"select", "--input", input.string(), "--ncv", "2", "--restarts", "1", "--max-clusters", "2",
               "--max-extra", "2", "--out", sel.string()})
              .code == 0);
  REQUIRE(run({"replay", "--manifest", (sel / "manifest.json").string(), "--out", (dir / "sel2").string()}).code == 0);
  for (const char* f : {"cv_table.csv", "selection.json"}) CHECK(slurp(sel / f) == slurp(dir / "sel2" / f));
}

TEST_CASE("the installed binary returns the documented exit codes") {
  const std::string bin = ELCA_CLI_PATH;
  CHECK(WEXITSTATUS(std::system((bin + " --version > /dev/null").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system((bin + " select --input x --q 1.5 2> /dev/null").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system((bin + " fit --input /nonexistent --clusters 1 2> /dev/null").c_str())) == 1);
}
