#pragma once

#include <span>
#include <vector>

#include "sslab/linalg.hpp"

namespace sslab {

enum class DriveKind { cos, sin };

/// matrix·cos(hωt) or matrix·sin(hωt).
struct DriveTerm {
  int harmonic = 1;
  DriveKind kind = DriveKind::cos;
  Matrix matrix;
};

/// H(t) = H0 + Σ drives, T-periodic with T = 2π/ω.
struct DriveSpec {
  Matrix h0;
  std::vector<DriveTerm> drives;
  double omega = 1.0;
  double hbar = 1.0;

  int dimension() const { return static_cast<int>(h0.rows()); }
  double period() const { return kTwoPi / omega; }
  Matrix hamiltonian(double t) const;
  /// Dimension 2..16, all matrices Hermitian to 1e−12, harmonics ≥ 1.
  void validate() const;
};

/// A T-periodic observable O(t) = O0 + Σ harmonics.
struct PeriodicObservableSpec {
  Matrix static_part;
  std::vector<DriveTerm> harmonics;

  Matrix at(double t, double omega) const;
  void validate(int dimension) const;
};

enum class Integrator { midpoint_exponential, fourth_order };

/// Step maps U(t_{s+1}, t_s) of one period on the grid t_s = sT/steps.
/// Midpoint-exponential steps are exp(−iH(t_s + Δt/2)Δt/ħ); fourth-order
/// steps are one classical RK4 step of dU/dt = −(i/ħ)H(t)U from U = I.
class PeriodPropagator {
 public:
  PeriodPropagator(const DriveSpec& spec, int steps, Integrator method);

  int steps() const { return static_cast<int>(maps_.size()); }
  double step_size() const { return dt_; }
  const Matrix& step(int s) const { return maps_[static_cast<std::size_t>(s)]; }
  /// Ordered product of all steps.
  Matrix monodromy() const;

 private:
  std::vector<Matrix> maps_;
  double dt_ = 0.0;
};

/// U(T). Throws InvalidInput for steps < 64 and NumericalFailure when
/// ‖U†U − I‖_max > 1e−6.
Matrix propagate_period(const DriveSpec& spec, int steps, Integrator method);

/// Folds into [−ħω/2, ħω/2).
double fold_quasienergy(double energy, double omega, double hbar);
/// Distance on the quasienergy circle of circumference ħω.
double quasienergy_distance(double a, double b, double omega, double hbar);
/// Symmetric Hausdorff distance between two quasienergy sets on the circle.
double spectrum_distance(std::span<const double> a, std::span<const double> b, double omega, double hbar);

struct QuasienergySpectrum {
  std::vector<double> energies;  // ascending
  Matrix modes;                  // φ_j(0) as columns
};

/// ε_j = −(ħ/T) arg λ_j folded; modes from the complex Schur form,
/// canonicalized inside clusters degenerate within 1e−8 and phase-fixed.
/// Throws InvalidInput when ‖U†U − I‖_max > 1e−8.
QuasienergySpectrum quasienergies(const Matrix& monodromy, double omega, double hbar);

struct FloquetSolution {
  Matrix monodromy;
  double omega = 1.0;
  double hbar = 1.0;
  int steps = 0;
  Integrator method = Integrator::midpoint_exponential;
  std::vector<double> quasienergies;
  Matrix modes;

  double period() const { return kTwoPi / omega; }
};

FloquetSolution solve_floquet(const DriveSpec& spec, int steps = 4096,
                              Integrator method = Integrator::midpoint_exponential);

/// Quasienergies from the truncated extended-space matrix
/// K[n, n'] = H_{n−n'} + δ_{nn'} nħω, |n| ≤ max_harmonic, where
/// H(t) = Σ_m H_m e^{imωt}. Of the d(2H+1) eigenpairs, the d with the
/// smallest |mean Fourier index| are kept, folded and sorted.
std::vector<double> sambe_quasienergies(const DriveSpec& spec, int max_harmonic);

struct ModeTrajectories {
  std::vector<double> times;                 // t_i = iT/samples, i = 0..periods·samples
  std::vector<Matrix> modes;                 // φ_j(t_i) as columns
  std::vector<Matrix> periodic;              // v_j(t_i) = e^{iε_j t_i/ħ} φ_j(t_i)
  std::vector<double> periodicity_residual;  // ‖v_j(T) − v_j(0)‖ per mode
  double max_norm_error = 0.0;               // max |‖φ_j(t)‖ − 1|
};

/// Propagates φ_j(0) with the solution's own step sequence. `steps` of the
/// solution must be a multiple of samples_per_period.
ModeTrajectories mode_trajectory(const DriveSpec& spec, const FloquetSolution& solution, int samples_per_period,
                                 int periods = 1);

/// Hermitian c_0 I + Σ_{k≥1} c_k (U^k + U^{−k})/2 + s_k (U^k − U^{−k})/(2i).
/// Commutes with U for unitary U. sin_coeffs[0] is ignored.
Matrix monodromy_polynomial(const Matrix& monodromy, std::span<const double> cos_coeffs,
                            std::span<const double> sin_coeffs);

struct TemporalProbeReport {
  int mode_a = 0;
  int mode_b = 1;
  double detuning = 0.0;                  // Δ = ε_a − ε_b
  double phase_relation_deviation = 0.0;  // max_t |F(t+T) − e^{iΔT/ħ}F(t)|
  double max_overlap = 0.0;               // max_{[0,T)} |F|
  std::vector<int> periods;
  std::vector<double> running_average;    // |mean of F over [0, KT)|
  std::vector<double> geometric_bound;    // (1/K)|Σ_{p<K} e^{ipΔT/ħ}| max|F|
  std::vector<bool> within_bound;         // running_average ≤ (1 + slack)·bound
  double fitted_constant = 0.0;           // least squares |avg_K| ≈ C/K
  double commuting_overlap = 0.0;         // |⟨φ_a(0)|P(U)|φ_b(0)⟩|
};

/// F(t) = ⟨φ_a(t)|O(t)|φ_b(t)⟩ probed on `samples_per_period` points per
/// period over max(periods) periods. Rejects a = b and pairs whose
/// quasienergies coincide modulo ħω within 1e−8.
TemporalProbeReport temporal_overlap_probe(const DriveSpec& spec, const FloquetSolution& solution,
                                           const PeriodicObservableSpec& observable, int mode_a, int mode_b,
                                           std::span<const int> periods, int samples_per_period = 256,
                                           double slack = 0.1);

/// c_j = ⟨φ_j(0)|state⟩. Throws InvalidInput if the modes are not
/// orthonormal to 1e−10.
Vector floquet_expansion(const Vector& state, const FloquetSolution& solution);

/// Direct propagation of a state over whole periods.
Vector evolve_periods(const DriveSpec& spec, const Vector& state, int periods, int steps,
                      Integrator method = Integrator::midpoint_exponential);

}  // namespace sslab
