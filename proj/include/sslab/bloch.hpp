#pragma once

#include <span>
#include <vector>

#include "sslab/spectral.hpp"

namespace sslab {

/// Simultaneous eigenvector of H and T. Bands are numbered from 0.
struct BlochState {
  int band = 0;
  int wavevector_class = 0;  // l
  double wavevector = 0.0;   // k_l = 2πl/(Na)
  double energy = 0.0;
  Vector coefficients;  // plane-wave coefficients, zero outside class l
};

/// u_{nk}: coefficients on reciprocal-lattice harmonics G_j = 2πj/a.
struct CellPeriodicState {
  int band = 0;
  int wavevector_class = 0;
  double wavevector = 0.0;
  std::vector<int> harmonics;  // j, ascending
  Vector coefficients;
};

struct BandEntry {
  int wavevector_class = 0;
  double wavevector = 0.0;
  int band = 0;
  double energy = 0.0;
};

/// Rows ordered class-major (l = 0..N−1), bands ascending within a class.
struct BandStructure {
  int cells = 0;
  int bands_per_class = 0;
  std::vector<BandEntry> rows;

  double energy(int l, int band) const { return rows[static_cast<std::size_t>(l * bands_per_class + band)].energy; }
};

struct BlochSolution {
  BandStructure bands;
  std::vector<BlochState> states;  // same order as bands.rows

  const BlochState& state(int l, int band) const {
    return states[static_cast<std::size_t>(l * bands.bands_per_class + band)];
  }
  /// All N states of one band, in class order.
  std::vector<BlochState> band(int n) const;
};

/// Block-diagonalizes H class by class. Within a class, eigenpairs are
/// sorted by energy; clusters degenerate within 1e−10 are replaced by the
/// canonical basis of their eigenspace; each vector is phase-fixed so its
/// dominant coefficient is real positive.
BlochSolution solve_bands(const HermitianOperator& hamiltonian, const LatticeSpec& spec);

/// Reindexes m → j = (m − l)/N. Throws InvalidInput if ψ has weight
/// outside class l.
CellPeriodicState cell_periodic_part(const BlochState& state, const PlaneWaveBasis& basis);

/// Winding of a closed sampled loop (last sample connects to the first).
/// Every |sample| must be ≥ 0.5 and every phase step below π/2 in
/// magnitude; either violation throws InvalidInput.
int winding_number(std::span<const cplx> samples);

/// e^{i k_l x} sampled at x_p = pL/P, p = 0..P−1.
std::vector<cplx> sample_bloch_factor(const PlaneWaveBasis& basis, int l, int points);

/// w_{n,r} = N^{−1/2} Σ_l e^{−i k_l r a} ψ_{n k_l}. `band_states` must hold
/// one state of band n for every class.
Vector wannier_state(int band, int home_cell, std::span<const BlochState> band_states, const PlaneWaveBasis& basis);

/// Worst-case checks on solver output.
struct BlochResiduals {
  double eigen = 0.0;          // max ‖Hψ − Eψ‖
  double translation = 0.0;    // max ‖Tψ − e^{ika}ψ‖
  double orthonormality = 0.0; // max |⟨ψ_i|ψ_j⟩ − δ_ij|
};
BlochResiduals bloch_residuals(const BlochSolution& solution, const HermitianOperator& hamiltonian,
                               const TranslationOperator& translation);

}  // namespace sslab
