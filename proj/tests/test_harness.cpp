#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "oracles.hpp"
#include "sslab/config.hpp"
#include "sslab/harness.hpp"

using namespace sslab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("sslab_test_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

json minimal_bands() { return json::parse(R"({"kind": "bands", "lattice": {"a": 1.0, "cells": 3, "cutoff": 4}})"); }

std::string error_pointer(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig cfg = parse_config_json(minimal_bands());
  CHECK(cfg.kind == ScenarioKind::bands);
  CHECK(cfg.lattice.cells == 3);
  CHECK(cfg.lattice.cutoff == 4);
  CHECK(cfg.potential.harmonics().empty());

  json doc = minimal_bands();
  doc["lattice"]["cells"] = 1;
  CHECK(error_pointer(doc) == "/lattice/cells");

  doc = minimal_bands();
  doc["potental"] = json::object();
  CHECK(error_pointer(doc) == "/potental");
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("potental") != std::string::npos);
  }

  doc = minimal_bands();
  doc["lattice"]["cells"] = 4;
  CHECK(error_pointer(doc) == "/lattice/cutoff");
  doc["lattice"]["pad_basis"] = true;
  CHECK(error_pointer(doc) == "<none>");

  doc = minimal_bands();
  doc["lattice"]["cells"] = "three";
  CHECK(error_pointer(doc) == "/lattice/cells");
  doc = minimal_bands();
  doc["tolerances"] = {{"structral", 1e-9}};
  CHECK(error_pointer(doc) == "/tolerances/structral");
  doc = minimal_bands();
  doc["potential"] = {{"harmonics", json::array({{{"j", 1}, {"re", 0.2}, {"img", 0.0}}})}};
  CHECK(error_pointer(doc) == "/potential/harmonics/0/img");
  doc = minimal_bands();
  doc["kind"] = "spectrum";
  CHECK(error_pointer(doc) == "/kind");
  CHECK(error_pointer(json::parse(R"({"kind": "floquet"})")) == "/drive");
  CHECK(error_pointer(json::parse(R"({"kind": "floquet", "drive": {"h0": [[1, 0], [0.5, -1]]}})")) == "/drive/h0");

  TempDir tmp;
  std::ofstream(tmp.path / "broken.json") << "{\"kind\": ";
  CHECK_THROWS_AS(parse_config(tmp.path / "broken.json"), ConfigError);
  CHECK_THROWS_AS(parse_config(tmp.path / "missing.json"), ConfigError);
}

TEST_CASE("bands scenario writes the table") {
  TempDir tmp;
  ScenarioConfig cfg = parse_config_json(minimal_bands());
  cfg.csv_path = (tmp.path / "bands.csv").string();
  const RunResult r = run_scenario(cfg);
  CHECK(r.exit_code == kExitPass);
  const auto rows = read_csv(cfg.csv_path);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"l", "k", "band", "energy"});
  CHECK(rows[1] == std::vector<std::string>{"0", "0", "0", "0"});
  CHECK(std::stod(rows[4][3]) == doctest::Approx(2.1932454224643).epsilon(1e-15));
  CHECK(rows[4][3].size() >= 17);
  CHECK_FALSE(fs::exists(cfg.csv_path + ".tmp"));
  CHECK(r.report["checks"]["free_particle_closed_form"] == true);
}

TEST_CASE("superselect scenario on the free lattice") {
  TempDir tmp;
  json doc = json::parse(R"({"kind": "superselect", "lattice": {"cells": 3, "cutoff": 4},
                             "superselect": {"fringe_points": 8}, "battery": {"breaking": [1]}})");
  ScenarioConfig cfg = parse_config_json(doc);
  cfg.report_path = (tmp.path / "report.json").string();
  cfg.fringe_prefix = (tmp.path / "fringe_").string();
  const RunResult r = run_scenario(cfg);
  CHECK(r.exit_code == kExitPass);
  const json report = json::parse(slurp(cfg.report_path));
  CHECK(report["passed"] == true);
  CHECK(report["version"] == kToolVersion);
  CHECK(report["config"] == doc);
  CHECK(report["tolerances"]["structural"] == 1e-12);
  for (const json& row : report["results"]["sector_leakage"])
    for (const json& v : row)
      if (!v.is_null()) CHECK(v.get<double>() < 1e-12);

  // Fringe series: cross-sector flat, within-sector one cycle per 2π.
  const auto cross = read_csv(tmp.path / "fringe_0.csv");
  REQUIRE(cross.size() == 9);
  CHECK(cross[0] == std::vector<std::string>{"lambda", "average"});
  for (std::size_t i = 2; i < cross.size(); ++i) CHECK(std::abs(std::stod(cross[i][1]) - std::stod(cross[1][1])) < 1e-10);
  const auto within = read_csv(tmp.path / "fringe_1.csv");
  std::vector<double> series;
  for (std::size_t i = 1; i < within.size(); ++i) series.push_back(std::stod(within[i][1]));
  const std::vector<double> mags = oracle::dft_magnitudes(series);
  std::size_t peak = 1;
  for (std::size_t k = 1; k < mags.size(); ++k)
    if (mags[k] > mags[peak]) peak = k;
  CHECK(peak == 1);
  CHECK(mags[1] > 1e3 * (mags[2] + mags[3] + mags[4] + 1e-300));
}

TEST_CASE("floquet scenario reports folded quasienergies") {
  const ScenarioConfig cfg = parse_config_json(json::parse(R"({"kind": "floquet", "drive": {"omega": 1.0, "h0": [[0.7, 0.0], [0.0, -0.7]]}})"));
  const RunResult r = evaluate_scenario(cfg);
  CHECK(r.exit_code == kExitPass);
  const auto e = r.report["results"]["quasienergies"].get<std::vector<double>>();
  REQUIRE(e.size() == 2);
  CHECK(std::abs(e[0] + 0.3) < 1e-12);
  CHECK(std::abs(e[1] - 0.3) < 1e-12);
}

TEST_CASE("invariant failures are reported, not hidden") {
  json doc = json::parse(R"({"kind": "superselect", "lattice": {"cells": 3, "cutoff": 4},
                             "potential": {"harmonics": [{"j": 1, "re": 0.25, "im": 0.0}]},
                             "tolerances": {"coherence": 10.0}})");
  const RunResult r = evaluate_scenario(parse_config_json(doc));
  CHECK(r.exit_code == kExitInvariant);
  CHECK(r.report["passed"] == false);
  CHECK(r.report["checks"]["positive_control"] == false);
  CHECK(r.report["tolerances"]["coherence"] == 10.0);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  const json doc = json::parse(R"({"kind": "wannier", "lattice": {"cells": 5, "cutoff": 7},
                                   "potential": {"harmonics": [{"j": 1, "re": 0.25, "im": 0.0}]}})");
  json a = evaluate_scenario(parse_config_json(doc)).report;
  json b = evaluate_scenario(parse_config_json(doc)).report;
  CHECK(a.contains("timestamp"));
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(render_report(a) == render_report(b));
  CHECK(config_hash(doc) == a["config_hash"]);
  CHECK(config_hash(doc).size() == 16);
}

TEST_CASE("fnv1a hash") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(config_hash(json("a")) != config_hash(json("b")));
  CHECK(config_hash(json::parse("{}")) == config_hash(json::object()));
}
