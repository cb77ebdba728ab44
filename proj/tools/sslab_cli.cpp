// sslab: band, superselection, Wannier and Floquet scenarios from JSON configs.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sslab/config.hpp"
#include "sslab/errors.hpp"
#include "sslab/harness.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string output;
  std::optional<int> seed_battery;
  std::vector<std::string> tol_overrides;
};

// Global flags edit the document before validation so the echoed config
// reproduces the run.
json apply_overrides(json doc, const Options& opt, const std::string& kind) {
  if (!doc.is_object()) throw sslab::ConfigError("", "config root must be an object");
  if (!doc.contains("kind"))
    doc["kind"] = kind;
  else if (doc["kind"] != kind)
    throw sslab::ConfigError("/kind", "config kind " + doc["kind"].dump() + " does not match subcommand '" + kind + "'");
  if (opt.seed_battery) {
    if (!doc.contains("battery")) doc["battery"] = json::object();
    doc["battery"]["seeds"] = *opt.seed_battery;
  }
  for (const std::string& kv : opt.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw sslab::ConfigError("/tolerances", "--tol-override expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    } catch (const std::exception&) {
      throw sslab::ConfigError("/tolerances/" + key, "not a number: '" + kv.substr(eq + 1) + "'");
    }
    if (!doc.contains("tolerances")) doc["tolerances"] = json::object();
    doc["tolerances"][key] = value;
  }
  return doc;
}

int run(const Options& opt, const std::string& kind) {
  try {
    sslab::ScenarioConfig cfg = sslab::parse_config_json(apply_overrides(sslab::load_json_file(opt.config), opt, kind));
    if (kind == "bands")
      cfg.csv_path = opt.output;
    else
      cfg.report_path = opt.output;
    const sslab::RunResult r = sslab::run_scenario(cfg);
    std::cout << "wrote " << opt.output << "\n";
    if (r.exit_code != sslab::kExitPass) {
      for (const auto& [name, ok] : r.report["checks"].items())
        if (!ok.get<bool>()) std::cerr << "invariant failed: " << name << "\n";
    }
    return r.exit_code;
  } catch (const sslab::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sslab::kExitConfig;
  } catch (const sslab::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return sslab::kExitNumerical;
  } catch (const std::exception& e) {
    // Unwritable output paths and similar usage problems.
    std::cerr << "error: " << e.what() << "\n";
    return sslab::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superselection lab: Bloch and Floquet scenario runner"};
  app.set_version_flag("--version", std::string(sslab::kToolName) + " " + sslab::kToolVersion);
  app.require_subcommand(1);

  Options opt;
  app.add_option("--seed-battery", opt.seed_battery, "Number of seeded observables in the battery")->check(CLI::NonNegativeNumber);
  app.add_option("--tol-override", opt.tol_overrides, "Override a tolerance, key=value (repeatable)")->allow_extra_args(false);

  std::string chosen;
  auto add = [&](const std::string& name, const std::string& help, const std::string& out_flag) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option(out_flag, opt.output, out_flag == "--out" ? "Band table CSV" : "Report JSON")->required();
    sub->callback([&chosen, name] { chosen = name; });
  };
  add("bands", "Solve the band structure and write l,k,band,energy", "--out");
  add("superselect", "Sector leakage, fringes, mixture and breaking controls", "--report");
  add("wannier", "Wannier states and the mixture identity", "--report");
  add("floquet", "Monodromy, quasienergies, Sambe check and temporal probes", "--report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sslab::kExitConfig;
  }
  return run(opt, chosen);
}
