#include "sslab/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "sslab/bloch.hpp"
#include "sslab/floquet.hpp"
#include "sslab/observables.hpp"
#include "sslab/spectral.hpp"

namespace sslab {

using nlohmann::json;

namespace {

std::string g17(double v) { return fmt::format("{:.17g}", v); }

json label_json(StateLabel s) { return json::array({s.band, s.wavevector_class}); }

// Battery plus named custom entries and breaking observables, with lookup.
struct ObservableSet {
  Battery periodic;  // seeded, named and custom cell-periodic operators
  Battery breaking;  // "break:<s>"

  const NamedOperator* find(const std::string& id) const {
    for (const NamedOperator& o : periodic)
      if (o.id == id) return &o;
    for (const NamedOperator& o : breaking)
      if (o.id == id) return &o;
    return nullptr;
  }
};

ObservableSet make_observables(const ScenarioConfig& cfg, const PlaneWaveBasis& basis) {
  ObservableSet set;
  set.periodic = make_battery(cfg.battery, basis);
  for (const auto& [id, spec] : cfg.custom_observables) set.periodic.push_back({id, build_observable(spec, basis)});
  for (int s : cfg.breaking_shifts) set.breaking.push_back({"break:" + std::to_string(s), breaking_observable(s, basis)});
  return set;
}

json battery_json(const Battery& battery, const TranslationOperator& t, const Tolerances& tol, bool& all_periodic) {
  json out = json::array();
  all_periodic = true;
  for (const NamedOperator& o : battery) {
    const PeriodicityReport r = check_cell_periodicity(o.op, t, tol.periodicity);
    all_periodic = all_periodic && r.is_cell_periodic;
    out.push_back({{"id", o.id}, {"max_abs", o.op.max_abs()}, {"periodicity_violation", r.max_violation},
                   {"cell_periodic", r.is_cell_periodic}});
  }
  return out;
}

json leakage_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::isnan(m(i, j)))
        row.push_back(nullptr);
      else
        row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Evaluation {
  json results = json::object();
  json checks = json::object();
  std::string csv;
  std::vector<std::string> fringe_series;
};

void evaluate_bands(const ScenarioConfig& cfg, Evaluation& ev) {
  const PlaneWaveBasis basis(cfg.lattice);
  const HermitianOperator h = build_hamiltonian(basis, cfg.potential);
  const TranslationOperator t(basis);
  const BlochSolution sol = solve_bands(h, cfg.lattice);
  const BlochResiduals res = bloch_residuals(sol, h, t);
  const double scale = std::max(1.0, h.max_abs());

  ev.csv = bands_csv(sol.bands);
  json rows = json::array();
  for (const BandEntry& e : sol.bands.rows) rows.push_back({{"l", e.wavevector_class}, {"k", e.wavevector}, {"band", e.band}, {"energy", e.energy}});
  ev.results["dimension"] = basis.dimension();
  ev.results["cells"] = basis.cells();
  ev.results["bands_per_class"] = basis.states_per_class();
  ev.results["bands"] = std::move(rows);
  ev.results["residuals"] = {{"eigen", res.eigen}, {"translation", res.translation}, {"orthonormality", res.orthonormality}};

  ev.checks["eigen_residual"] = res.eigen < cfg.tolerances.residual * scale;
  ev.checks["translation_eigen"] = res.translation < cfg.tolerances.solver;
  ev.checks["orthonormal"] = res.orthonormality < cfg.tolerances.solver;
  if (cfg.potential.harmonics().empty()) {
    // Every energy must equal some ħ²q_m²/2μ + v0.
    double worst = 0.0;
    const double kin = cfg.lattice.hbar * cfg.lattice.hbar / (2.0 * cfg.lattice.mass);
    for (const BandEntry& e : sol.bands.rows) {
      double best = std::numeric_limits<double>::infinity();
      for (int p = 0; p < basis.dimension(); ++p) {
        const double q = basis.momentum(p);
        best = std::min(best, std::abs(e.energy - (kin * q * q + cfg.potential.offset())));
      }
      worst = std::max(worst, best);
    }
    ev.results["free_particle_deviation"] = worst;
    ev.checks["free_particle_closed_form"] = worst < cfg.tolerances.structural * scale;
  }
}

void evaluate_superselect(const ScenarioConfig& cfg, Evaluation& ev) {
  const PlaneWaveBasis basis(cfg.lattice);
  const HermitianOperator h = build_hamiltonian(basis, cfg.potential);
  const TranslationOperator t(basis);
  const BlochSolution sol = solve_bands(h, cfg.lattice);
  const ObservableSet obs = make_observables(cfg, basis);
  const Tolerances& tol = cfg.tolerances;
  const int n_cells = basis.cells();
  const int per_class = basis.states_per_class();

  bool all_periodic = true;
  ev.results["battery"] = battery_json(obs.periodic, t, tol, all_periodic);
  ev.checks["battery_cell_periodic"] = all_periodic;

  const SectorReport sectors = sector_decomposition_report(sol.states, obs.periodic);
  ev.results["sector_leakage"] = leakage_json(sectors.leakage);
  ev.results["max_leakage"] = sectors.max_off_diagonal;
  ev.checks["cross_sector_leakage"] = sectors.max_off_diagonal < tol.structural;

  // Positive control: some battery element couples bands 0 and 1 in every class.
  if (per_class >= 2) {
    json per = json::array();
    bool ok = true;
    for (int l = 0; l < n_cells; ++l) {
      double best = 0.0;
      std::string witness;
      for (const NamedOperator& o : obs.periodic) {
        const OverlapRecord r = matrix_element(o.op, sol.state(l, 0), sol.state(l, 1), o.id);
        if (r.magnitude > best) {
          best = r.magnitude;
          witness = o.id;
        }
      }
      ok = ok && best > tol.coherence;
      per.push_back({{"l", l}, {"max_magnitude", best}, {"witness", witness}});
    }
    ev.results["within_sector_coherence"] = std::move(per);
    ev.checks["positive_control"] = ok;
  }

  // Fringe scans.
  std::vector<FringeRequest> fringes = cfg.fringes;
  if (fringes.empty()) {
    const std::string id = obs.find("cos") ? "cos" : obs.periodic.front().id;
    fringes.push_back({{0, 0}, {0, 1}, id});
    if (per_class >= 2) fringes.push_back({{0, 1}, {1, 1}, id});
  }
  json scans = json::array();
  bool flat_ok = true;
  bool match_ok = true;
  for (const FringeRequest& req : fringes) {
    const NamedOperator* o = obs.find(req.observable);
    if (o == nullptr) throw ConfigError("/superselect/fringes", "unknown observable id '" + req.observable + "'");
    const BlochState& a = sol.state(req.a.wavevector_class, req.a.band);
    const BlochState& b = sol.state(req.b.wavevector_class, req.b.band);
    const FringeScan scan = fringe_scan(o->op, a.coefficients, b.coefficients, cfg.fringe_points);
    const OverlapRecord x = matrix_element(o->op, a, b, o->id);
    const bool cross = req.a.wavevector_class != req.b.wavevector_class;
    const bool periodic = o->op.periodicity() == Periodicity::cell_periodic;
    json entry{{"a", label_json(req.a)},
               {"b", label_json(req.b)},
               {"observable", o->id},
               {"cross_sector", cross},
               {"amplitude", scan.amplitude},
               {"mean", scan.mean},
               {"cross_element", complex_to_json(x.value)},
               {"expected_amplitude", 2.0 * x.magnitude},
               {"phases", scan.phases},
               {"averages", scan.averages}};
    if (cross && periodic) flat_ok = flat_ok && scan.amplitude < tol.solver;
    if (!cross && x.magnitude > 0.0)
      match_ok = match_ok && std::abs(scan.amplitude - 2.0 * x.magnitude) <= tol.fringe_match * 2.0 * x.magnitude;
    scans.push_back(std::move(entry));
    ev.fringe_series.push_back(fringe_csv(scan));
  }
  ev.results["fringes"] = std::move(scans);
  ev.checks["fringe_cross_sector_flat"] = flat_ok;
  ev.checks["fringe_matches_cross_element"] = match_ok;

  // Mixture diagnostics.
  {
    const MixtureDiagnostic cross = mixture_diagnostic(sol.state(0, 0).coefficients, sol.state(1, 0).coefficients, obs.periodic);
    json mix{{"cross_sector", {{"a", label_json({0, 0})}, {"b", label_json({0, 1})}, {"distinguishability", cross.distinguishability}, {"witness", cross.witness}}}};
    ev.checks["mixture_cross_sector"] = cross.distinguishability < tol.solver;
    if (per_class >= 2) {
      const MixtureDiagnostic within = mixture_diagnostic(sol.state(1, 0).coefficients, sol.state(1, 1).coefficients, obs.periodic);
      mix["within_sector"] = {{"a", label_json({0, 1})}, {"b", label_json({1, 1})}, {"distinguishability", within.distinguishability}, {"witness", within.witness}};
      ev.checks["mixture_within_sector_distinguishable"] = within.distinguishability > tol.coherence;
    }
    ev.results["mixture"] = std::move(mix);
  }

  // Negative controls.
  if (!obs.breaking.empty()) {
    json out = json::array();
    bool detected = true;
    bool restores = true;
    for (const NamedOperator& o : obs.breaking) {
      const PeriodicityReport r = check_cell_periodicity(o.op, t, tol.periodicity);
      detected = detected && !r.is_cell_periodic;
      const int s = std::stoi(o.id.substr(6));
      json pairs = json::array();
      for (int l = 0; l < n_cells; ++l) {
        const int lp = (l + s) % n_cells;
        double best = 0.0;
        for (int m = 0; m < per_class; ++m)
          for (int n = 0; n < per_class; ++n)
            best = std::max(best, fringe_scan(o.op, sol.state(l, m).coefficients, sol.state(lp, n).coefficients, cfg.fringe_points).amplitude);
        restores = restores && best > tol.breaking;
        pairs.push_back({{"classes", json::array({l, lp})}, {"max_fringe_amplitude", best}});
      }
      Battery single{o};
      const SectorReport leak = sector_decomposition_report(sol.states, single);
      out.push_back({{"id", o.id},
                     {"shift", s},
                     {"periodicity_violation", r.max_violation},
                     {"cell_periodic", r.is_cell_periodic},
                     {"coupled_classes", std::move(pairs)},
                     {"sector_leakage", leakage_json(leak.leakage)}});
    }
    ev.results["breaking"] = std::move(out);
    ev.checks["breaking_detected"] = detected;
    ev.checks["breaking_restores_fringes"] = restores;
  }
}

void evaluate_wannier(const ScenarioConfig& cfg, Evaluation& ev) {
  const PlaneWaveBasis basis(cfg.lattice);
  const HermitianOperator h = build_hamiltonian(basis, cfg.potential);
  const TranslationOperator t(basis);
  const BlochSolution sol = solve_bands(h, cfg.lattice);
  const ObservableSet obs = make_observables(cfg, basis);
  const Tolerances& tol = cfg.tolerances;

  json out = json::array();
  bool norm_ok = true;
  bool translation_ok = true;
  bool mixture_ok = true;
  for (int band : cfg.wannier_bands) {
    const std::vector<BlochState> states = sol.band(band);
    const Vector w = wannier_state(band, cfg.home_cell, states, basis);
    const Vector next = wannier_state(band, cfg.home_cell + 1, states, basis);
    const double norm_err = std::abs(w.norm() - 1.0);
    const double shift_err = (t.apply_adjoint(w) - next).norm();
    const double deviation = wannier_mixture_deviation(w, states, obs.periodic);
    norm_ok = norm_ok && norm_err < tol.solver;
    translation_ok = translation_ok && shift_err < tol.solver;
    mixture_ok = mixture_ok && deviation < tol.solver;
    json coeffs = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) coeffs.push_back(complex_to_json(w(i)));
    out.push_back({{"band", band},
                   {"home_cell", cfg.home_cell},
                   {"norm_error", norm_err},
                   {"translation_residual", shift_err},
                   {"mixture_deviation", deviation},
                   {"coefficients", std::move(coeffs)}});
  }
  ev.results["wannier"] = std::move(out);
  ev.checks["unit_norm"] = norm_ok;
  ev.checks["translation_covariance"] = translation_ok;
  ev.checks["mixture_identity"] = mixture_ok;
}

void evaluate_floquet(const ScenarioConfig& cfg, Evaluation& ev) {
  const Tolerances& tol = cfg.tolerances;
  const FloquetSolution sol = solve_floquet(cfg.drive, cfg.steps, cfg.method);
  const double period = sol.period();

  double eig_res = 0.0;
  for (Eigen::Index j = 0; j < sol.modes.cols(); ++j) {
    const cplx lambda = std::polar(1.0, -sol.quasienergies[static_cast<std::size_t>(j)] * period / sol.hbar);
    eig_res = std::max(eig_res, (sol.monodromy * sol.modes.col(j) - lambda * sol.modes.col(j)).norm());
  }
  const double drift = unitarity_defect(sol.monodromy);
  ev.results["quasienergies"] = sol.quasienergies;
  ev.results["monodromy"] = matrix_to_json(sol.monodromy);
  ev.results["unitarity_defect"] = drift;
  ev.results["eigen_residual"] = eig_res;
  ev.checks["unitarity"] = drift < tol.unitarity;
  ev.checks["monodromy_eigen"] = eig_res < tol.floquet_residual;

  const Integrator other = cfg.method == Integrator::midpoint_exponential ? Integrator::fourth_order : Integrator::midpoint_exponential;
  const Matrix u_other = propagate_period(cfg.drive, cfg.steps, other);
  const double cross = max_abs(u_other - sol.monodromy);
  ev.results["cross_integrator"] = {{"max_abs_difference", cross}};
  ev.checks["cross_integrator"] = cross < tol.quasienergy;

  const std::vector<double> sambe = sambe_quasienergies(cfg.drive, cfg.sambe_max_harmonic);
  const double sd = spectrum_distance(sol.quasienergies, sambe, sol.omega, sol.hbar);
  ev.results["sambe"] = {{"max_harmonic", cfg.sambe_max_harmonic}, {"quasienergies", sambe}, {"distance", sd}};
  ev.checks["sambe_agreement"] = sd < tol.quasienergy;

  const ModeTrajectories traj = mode_trajectory(cfg.drive, sol, cfg.samples_per_period);
  double residual = 0.0;
  for (double r : traj.periodicity_residual) residual = std::max(residual, r);
  ev.results["trajectory"] = {{"samples_per_period", cfg.samples_per_period},
                              {"periodicity_residual", residual},
                              {"max_norm_error", traj.max_norm_error}};
  ev.checks["mode_periodicity"] = residual < tol.mode_periodicity;
  ev.checks["norm_preservation"] = traj.max_norm_error < tol.floquet_residual;

  if (cfg.probe) {
    const ProbeConfig& p = *cfg.probe;
    const TemporalProbeReport r = temporal_overlap_probe(cfg.drive, sol, p.observable, p.mode_a, p.mode_b, p.periods,
                                                         cfg.samples_per_period, tol.bound_slack);
    bool within = true;
    for (bool b : r.within_bound) within = within && b;
    ev.results["probe"] = {{"modes", json::array({r.mode_a, r.mode_b})},
                           {"detuning", r.detuning},
                           {"phase_relation_deviation", r.phase_relation_deviation},
                           {"max_overlap", r.max_overlap},
                           {"periods", r.periods},
                           {"running_average", r.running_average},
                           {"geometric_bound", r.geometric_bound},
                           {"fitted_constant", r.fitted_constant},
                           {"commuting_overlap", r.commuting_overlap}};
    ev.checks["probe_phase_relation"] = r.phase_relation_deviation < tol.phase_relation;
    ev.checks["probe_average_bound"] = within;
    ev.checks["probe_commuting_overlap"] = r.commuting_overlap < tol.commuting;
  }
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string bands_csv(const BandStructure& bands) {
  std::string out = "l,k,band,energy\n";
  for (const BandEntry& e : bands.rows)
    out += fmt::format("{},{},{},{}\n", e.wavevector_class, g17(e.wavevector), e.band, g17(e.energy));
  return out;
}

std::string fringe_csv(const FringeScan& scan) {
  std::string out = "lambda,average\n";
  for (std::size_t i = 0; i < scan.phases.size(); ++i) out += g17(scan.phases[i]) + "," + g17(scan.averages[i]) + "\n";
  return out;
}

void emit_fringe_series(const FringeScan& scan, const std::filesystem::path& path) { write_file_atomic(path, fringe_csv(scan)); }

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string render_report(const json& report) { return report.dump(2) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) { return fmt::format("{:016x}", fnv1a64(config.dump())); }

RunResult evaluate_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Evaluation ev;
  switch (cfg.kind) {
    case ScenarioKind::bands: evaluate_bands(cfg, ev); break;
    case ScenarioKind::superselect: evaluate_superselect(cfg, ev); break;
    case ScenarioKind::wannier: evaluate_wannier(cfg, ev); break;
    case ScenarioKind::floquet: evaluate_floquet(cfg, ev); break;
  }
  bool passed = true;
  for (const auto& [_, v] : ev.checks.items()) passed = passed && v.get<bool>();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult out;
  out.report = {{"tool", kToolName},
                {"version", kToolVersion},
                {"kind", to_string(cfg.kind)},
                {"config", cfg.source},
                {"config_hash", config_hash(cfg.source)},
                {"tolerances", cfg.tolerances.to_json()},
                {"results", std::move(ev.results)},
                {"checks", std::move(ev.checks)},
                {"passed", passed},
                {"timestamp", {{"utc", utc_now()}, {"wall_clock_seconds", seconds}}}};
  out.exit_code = passed ? kExitPass : kExitInvariant;
  if (!ev.csv.empty()) out.report["_csv"] = ev.csv;
  if (!ev.fringe_series.empty()) out.report["_fringe_series"] = ev.fringe_series;
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult r = evaluate_scenario(cfg);
  if (r.report.contains("_csv")) {
    if (!cfg.csv_path.empty()) write_file_atomic(cfg.csv_path, r.report["_csv"].get<std::string>());
    r.report.erase("_csv");
  }
  if (r.report.contains("_fringe_series")) {
    if (!cfg.fringe_prefix.empty()) {
      const auto& series = r.report["_fringe_series"];
      for (std::size_t i = 0; i < series.size(); ++i)
        write_file_atomic(cfg.fringe_prefix + std::to_string(i) + ".csv", series[i].get<std::string>());
    }
    r.report.erase("_fringe_series");
  }
  if (!cfg.report_path.empty()) write_file_atomic(cfg.report_path, render_report(r.report));
  return r;
}

}  // namespace sslab
