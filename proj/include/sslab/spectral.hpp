#pragma once

#include <span>
#include <vector>

#include "sslab/linalg.hpp"

namespace sslab {

/// Ring geometry and plane-wave cutoff. Units default to ħ = μ = a = 1.
struct LatticeSpec {
  double lattice_constant = 1.0;
  int cells = 2;   // N ≥ 2
  int cutoff = 1;  // M ≥ 1
  double mass = 1.0;
  double hbar = 1.0;
  // Allow the asymmetric index set {−M, …, M+r} with the smallest r that
  // makes the dimension a multiple of N. Off by default: a symmetric set
  // whose size is not a multiple of N is rejected.
  bool pad_basis = false;

  double length() const { return cells * lattice_constant; }
  void validate() const;
};

/// One Fourier term c·e^{i2πjx/a} + c.c. of a real cell-periodic function.
struct Harmonic {
  int j = 1;
  cplx coefficient{};
};

/// Canonicalizes a harmonic list: negative j become (|j|, conj c), equal j
/// are summed, and the result is sorted by j. j = 0 is rejected.
std::vector<Harmonic> canonicalize_harmonics(std::span<const Harmonic> harmonics);

/// V(x) = v0 + Σ_j (v_j e^{i2πjx/a} + c.c.), real and a-periodic by
/// construction.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  PotentialSpec(double offset, std::span<const Harmonic> harmonics);

  double offset() const { return offset_; }
  std::span<const Harmonic> harmonics() const { return harmonics_; }

  /// Fourier coefficient of e^{i2πjx/a}; handles negative j and j = 0.
  cplx fourier(int j) const;
  double value(double x, double lattice_constant) const;

 private:
  double offset_ = 0.0;
  std::vector<Harmonic> harmonics_;
};

/// Plane waves e^{i q_m x}/√L, q_m = 2πm/L, for m in [first, first + D).
class PlaneWaveBasis {
 public:
  explicit PlaneWaveBasis(const LatticeSpec& spec);

  const LatticeSpec& lattice() const { return spec_; }
  int dimension() const { return dimension_; }
  int cells() const { return spec_.cells; }
  int first_index() const { return first_; }
  int states_per_class() const { return dimension_ / spec_.cells; }

  /// Plane-wave index m at basis position i.
  int index(int position) const { return first_ + position; }
  int position(int m) const { return m - first_; }
  bool contains(int m) const { return m >= first_ && m < first_ + dimension_; }

  /// q_m at basis position i.
  double momentum(int position) const;
  /// Wavevector class c(m) = m mod N in [0, N).
  int wavevector_class(int position) const;
  /// k_l = 2πl/(Na).
  double class_wavevector(int l) const;
  /// Basis positions of class l, in ascending m.
  std::vector<int> class_positions(int l) const;

 private:
  LatticeSpec spec_;
  int first_ = 0;
  int dimension_ = 0;
};

PlaneWaveBasis build_basis(const LatticeSpec& spec);

/// Declared or verified status with respect to conjugation by T.
enum class Periodicity { unknown, cell_periodic, broken };

/// Dense Hermitian matrix in the plane-wave basis.
class HermitianOperator {
 public:
  /// Throws InvalidInput unless `m` is square and Hermitian to
  /// 1e−12·max(1, ‖m‖_max).
  explicit HermitianOperator(Matrix m, Periodicity periodicity = Periodicity::unknown);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dimension() const { return m_.rows(); }
  double max_abs() const { return sslab::max_abs(m_); }
  Periodicity periodicity() const { return periodicity_; }
  void set_periodicity(Periodicity p) { periodicity_ = p; }

 private:
  Matrix m_;
  Periodicity periodicity_;
};

/// Diagonal unitary T = e^{i p a/ħ} in the plane-wave basis.
class TranslationOperator {
 public:
  explicit TranslationOperator(const PlaneWaveBasis& basis);

  const Vector& diagonal() const { return phases_; }
  Eigen::Index dimension() const { return phases_.size(); }
  Matrix dense() const;
  Vector apply(const Vector& v) const { return phases_.cwiseProduct(v); }
  Vector apply_adjoint(const Vector& v) const { return phases_.conjugate().cwiseProduct(v); }
  /// T O T†.
  Matrix conjugate(const Matrix& o) const;

 private:
  Vector phases_;
};

HermitianOperator build_hamiltonian(const PlaneWaveBasis& basis, const PotentialSpec& potential);
HermitianOperator build_hamiltonian(const LatticeSpec& spec, const PotentialSpec& potential);
TranslationOperator build_translation(const LatticeSpec& spec);
/// Diagonal ħq_m.
HermitianOperator momentum_operator(const PlaneWaveBasis& basis);

}  // namespace sslab
