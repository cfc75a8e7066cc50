#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
  if (const char* p = std::getenv("LEOFL_CLI_PATH")) return p;
#ifdef LEOFL_CLI_PATH
  return LEOFL_CLI_PATH;
#else
  return "leofl";
#endif
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("leofl_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + cli() + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows of a CSV file, split on ',', skipping the schema comment and header.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(p));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("visibility writes one row per architecture with a versioned header") {
  const auto dir = scratch("vis");
  REQUIRE(run("--out-dir " + dir.string() + " visibility --inclination 70 --nsats 50") == 0);
  const auto text = slurp(dir / "visibility.csv");
  CHECK(text.rfind("# schema: leofl.topology v1\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto r = rows(dir / "visibility.csv");
  REQUIRE(r.size() == 2);
  // integrated architecture never shortens the window
  CHECK(std::stod(r[1][4]) >= std::stod(r[0][4]));
}

TEST_CASE("invalid architecture is a usage error") {
  const auto dir = scratch("vis_bad");
  CHECK(run("--out-dir " + dir.string() + " visibility --architecture sat-moon") != 0);
}

TEST_CASE("capacity sweep is monotone in distance and in transmit power") {
  const auto dir = scratch("cap");
  REQUIRE(run("--out-dir " + dir.string() + " capacity --power-dbm 20") == 0);
  const auto r = rows(dir / "capacity.csv");
  REQUIRE(r.size() == 15);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::stod(r[i][2]) < std::stod(r[i - 1][2]));
  REQUIRE(run("capacity --power-dbm 0 --out " + (dir / "zero.csv").string(), "LEOFL_OUT_DIR=" + dir.string()) == 0);
  const auto low = rows(dir / "zero.csv");
  REQUIRE(low.size() == r.size());
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::stod(low[i][2]) < std::stod(r[i][2]));
}

TEST_CASE("flags are settable from the environment") {
  const auto dir = scratch("env");
  REQUIRE(run("capacity", "LEOFL_OUT_DIR=" + dir.string() + " LEOFL_DISTANCE_KM=250") == 0);
  const auto r = rows(dir / "capacity.csv");
  REQUIRE(r.size() == 3);  // one row per default power
  for (const auto& row : r) CHECK(std::stod(row[1]) == 250e3);
}

TEST_CASE("bound report mirrors the closed form") {
  const auto dir = scratch("bound");
  REQUIRE(run("--out-dir " + dir.string() + " bound --L 1 --sigma 0 --eta 0.1 --tau-max 3 --K 50 --seeds 2 --dim 1") ==
          0);
  std::ifstream in(dir / "bound.json");
  const json j = json::parse(in);
  CHECK(j.at("schema") == "leofl.bound v1");
  // sigma = 0: bound = 2 (F1 - F*) / (eta K) with F1 = 1/2 * 0.1 * 1^2 for the single eigenvalue 0.1 L
  CHECK(j.at("bound").get<double>() == doctest::Approx(2.0 * 0.05 / (0.1 * 50)));
  CHECK(j.at("theorem_holds").get<bool>());
}

TEST_CASE("bound rejects a step above 1/(2L)") {
  const auto dir = scratch("bound_bad");
  CHECK(run("--out-dir " + dir.string() + " bound --L 4 --eta 0.2") != 0);
}

TEST_CASE("train is reproducible and rejects unknown schemes") {
  const auto a = scratch("train_a");
  const auto b = scratch("train_b");
  const std::string args = " train --preset zenith --horizon 3600 --scheme proposed";
  REQUIRE(run("--seed 3 --out-dir " + a.string() + args) == 0);
  REQUIRE(run("--seed 3 --out-dir " + b.string() + args) == 0);
  for (const char* f : {"events.csv", "aggregation_trace.csv", "accuracy.csv", "summary.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  CHECK(run("--out-dir " + a.string() + " train --preset zenith --scheme fedprox") != 0);
  CHECK(run("--out-dir " + a.string() + " train --preset nowhere") != 0);
}

TEST_CASE("missing subcommand is an error") { CHECK(run("") != 0); }
