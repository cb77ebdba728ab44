#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sslab/errors.hpp"
#include "sslab/floquet.hpp"
#include "sslab/observables.hpp"
#include "sslab/spectral.hpp"
#include "sslab/superselection.hpp"

namespace sslab {

/// Schema or semantic error in a scenario file, located by JSON pointer.
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : InvalidInput((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class ScenarioKind { bands, superselect, wannier, floquet };

std::string to_string(ScenarioKind kind);

/// Thresholds used by run_scenario; every report echoes them.
struct Tolerances {
  double structural = 1e-12;         // cross-sector leakage, relative to ‖O‖_max
  double solver = 1e-10;             // solver-mediated zeros and orthonormality
  double residual = 1e-9;            // ‖Hψ − Eψ‖ relative to ‖H‖_max
  double periodicity = 1e-12;        // check_cell_periodicity
  double coherence = 1e-4;           // positive control
  double breaking = 1e-6;            // negative control
  double fringe_match = 0.01;        // relative, amplitude vs 2|⟨a|O|b⟩|
  double quasienergy = 1e-6;         // propagator vs Sambe, integrator vs integrator
  double unitarity = 1e-10;
  double floquet_residual = 1e-9;    // ‖Uφ − e^{−iεT/ħ}φ‖
  double mode_periodicity = 1e-8;    // ‖v(T) − v(0)‖
  double phase_relation = 1e-7;
  double bound_slack = 0.1;
  double commuting = 1e-10;

  /// Sets a field by name; false if the name is unknown.
  bool set(const std::string& name, double value);
  nlohmann::json to_json() const;
};

struct FringeRequest {
  StateLabel a;
  StateLabel b;
  std::string observable;
};

struct ProbeConfig {
  int mode_a = 0;
  int mode_b = 1;
  std::vector<int> periods{8, 16, 32, 64};
  PeriodicObservableSpec observable;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::bands;

  LatticeSpec lattice;
  PotentialSpec potential;

  BatterySpec battery;
  std::vector<std::pair<std::string, ObservableSpec>> custom_observables;
  std::vector<int> breaking_shifts;

  int fringe_points = 64;
  std::vector<FringeRequest> fringes;  // empty: defaults chosen at run time

  std::vector<int> wannier_bands{0, 1};
  int home_cell = 0;

  DriveSpec drive;
  int steps = 4096;
  Integrator method = Integrator::midpoint_exponential;
  int sambe_max_harmonic = 12;
  int samples_per_period = 256;
  std::optional<ProbeConfig> probe;

  Tolerances tolerances;

  std::string csv_path;
  std::string report_path;
  std::string fringe_prefix;

  nlohmann::json source;  // validated input, echoed in reports
};

/// Validates and converts a parsed document. Unknown keys, wrong types and
/// out-of-range values raise ConfigError naming the offending pointer.
ScenarioConfig parse_config_json(const nlohmann::json& doc);

/// Reads and validates a scenario file. Malformed JSON raises ConfigError.
ScenarioConfig parse_config(const std::filesystem::path& path);

nlohmann::json load_json_file(const std::filesystem::path& path);

/// [re, im] pairs; matrices as nested row-major arrays.
nlohmann::json complex_to_json(cplx z);
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json observable_spec_to_json(const ObservableSpec& spec);

}  // namespace sslab
