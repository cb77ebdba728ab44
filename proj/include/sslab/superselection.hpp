#pragma once

#include <span>
#include <string>
#include <vector>

#include "sslab/bloch.hpp"
#include "sslab/observables.hpp"

namespace sslab {

struct StateLabel {
  int band = 0;
  int wavevector_class = 0;
};

/// ⟨bra| O |ket⟩.
struct OverlapRecord {
  StateLabel bra;
  StateLabel ket;
  std::string observable;
  cplx value{};
  double magnitude = 0.0;
};

OverlapRecord matrix_element(const HermitianOperator& o, const BlochState& bra, const BlochState& ket,
                             std::string observable_id = {});

/// Observable average over Φ(λ) = a + e^{iλ} b on λ_i = 2πi/n.
struct FringeScan {
  std::vector<double> phases;
  std::vector<double> averages;
  double amplitude = 0.0;  // max − min over the grid
  double mean = 0.0;
};

/// Throws InvalidInput for points < 8, non-unit states, or ⟨Φ|Φ⟩ < 1e−12
/// anywhere on the grid.
FringeScan fringe_scan(const HermitianOperator& o, const Vector& a, const Vector& b, int points);

struct MixtureDiagnostic {
  Matrix superposition;  // |Φ⟩⟨Φ|/⟨Φ|Φ⟩, Φ = a + b
  Matrix mixture;        // (|a⟩⟨a| + |b⟩⟨b|)/2
  double distinguishability = 0.0;  // max_O |Tr((ρ_sup − ρ_mix) O)| / ‖O‖_max
  std::string witness;              // battery id attaining the maximum
};

/// Requires unit-norm a, b with |⟨a|b⟩| < 1e−10.
MixtureDiagnostic mixture_diagnostic(const Vector& a, const Vector& b, const Battery& battery);

/// leakage(j, l) = max over battery O and bands m, n of
/// |⟨ψ_{m k_j}|O|ψ_{n k_l}⟩| / ‖O‖_max. The diagonal is not evaluated (NaN).
struct SectorReport {
  int cells = 0;
  Eigen::MatrixXd leakage;
  double max_off_diagonal = 0.0;
};

SectorReport sector_decomposition_report(std::span<const BlochState> states, const Battery& battery);

/// max over O of |⟨w|O|w⟩ − (1/N) Σ_l ⟨ψ_{nk_l}|O|ψ_{nk_l}⟩|, both sides
/// evaluated independently.
double wannier_mixture_deviation(const Vector& wannier, std::span<const BlochState> band_states,
                                 const Battery& battery);

}  // namespace sslab
