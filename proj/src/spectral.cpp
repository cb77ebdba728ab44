#include "sslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sslab/errors.hpp"

namespace sslab {

namespace {

int floor_mod(int m, int n) {
  const int r = m % n;
  return r < 0 ? r + n : r;
}

}  // namespace

void LatticeSpec::validate() const {
  if (cells < 2) throw InvalidInput("lattice: cells must be >= 2, got " + std::to_string(cells));
  if (cutoff < 1) throw InvalidInput("lattice: cutoff must be >= 1, got " + std::to_string(cutoff));
  if (!(lattice_constant > 0.0) || !std::isfinite(lattice_constant))
    throw InvalidInput("lattice: lattice constant must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidInput("lattice: mass must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("lattice: hbar must be positive");
  const int d = 2 * cutoff + 1;
  if (!pad_basis && d % cells != 0)
    throw InvalidInput("lattice: basis dimension " + std::to_string(d) + " = 2M+1 is not a multiple of N = " +
                       std::to_string(cells));
}

std::vector<Harmonic> canonicalize_harmonics(std::span<const Harmonic> harmonics) {
  std::map<int, cplx> merged;
  for (const Harmonic& h : harmonics) {
    if (h.j == 0) throw InvalidInput("harmonic index j must be nonzero");
    if (!std::isfinite(h.coefficient.real()) || !std::isfinite(h.coefficient.imag()))
      throw InvalidInput("harmonic coefficient must be finite");
    if (h.j > 0)
      merged[h.j] += h.coefficient;
    else
      merged[-h.j] += std::conj(h.coefficient);
  }
  std::vector<Harmonic> out;
  out.reserve(merged.size());
  for (const auto& [j, c] : merged) out.push_back({j, c});
  return out;
}

PotentialSpec::PotentialSpec(double offset, std::span<const Harmonic> harmonics)
    : offset_(offset), harmonics_(canonicalize_harmonics(harmonics)) {
  if (!std::isfinite(offset)) throw InvalidInput("potential offset must be finite");
}

cplx PotentialSpec::fourier(int j) const {
  if (j == 0) return {offset_, 0.0};
  const int aj = j < 0 ? -j : j;
  for (const Harmonic& h : harmonics_)
    if (h.j == aj) return j > 0 ? h.coefficient : std::conj(h.coefficient);
  return {};
}

double PotentialSpec::value(double x, double lattice_constant) const {
  double v = offset_;
  for (const Harmonic& h : harmonics_)
    v += 2.0 * (h.coefficient * std::polar(1.0, kTwoPi * h.j * x / lattice_constant)).real();
  return v;
}

PlaneWaveBasis::PlaneWaveBasis(const LatticeSpec& spec) : spec_(spec) {
  spec_.validate();
  const int n = spec_.cells;
  const int d = 2 * spec_.cutoff + 1;
  const int pad = (n - d % n) % n;
  first_ = -spec_.cutoff;
  dimension_ = d + pad;
}

double PlaneWaveBasis::momentum(int position) const { return kTwoPi * index(position) / spec_.length(); }

int PlaneWaveBasis::wavevector_class(int position) const { return floor_mod(index(position), spec_.cells); }

double PlaneWaveBasis::class_wavevector(int l) const { return kTwoPi * l / spec_.length(); }

std::vector<int> PlaneWaveBasis::class_positions(int l) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(states_per_class()));
  for (int p = 0; p < dimension_; ++p)
    if (wavevector_class(p) == l) out.push_back(p);
  return out;
}

PlaneWaveBasis build_basis(const LatticeSpec& spec) { return PlaneWaveBasis(spec); }

HermitianOperator::HermitianOperator(Matrix m, Periodicity periodicity)
    : m_(std::move(m)), periodicity_(periodicity) {
  if (m_.rows() != m_.cols()) throw InvalidInput("operator matrix must be square");
  const double scale = std::max(1.0, sslab::max_abs(m_));
  if (hermiticity_defect(m_) > 1e-12 * scale) throw InvalidInput("operator matrix is not Hermitian");
}

TranslationOperator::TranslationOperator(const PlaneWaveBasis& basis) : phases_(basis.dimension()) {
  const int n = basis.cells();
  // e^{i q_m a} = e^{2πi m/N}; using the residue keeps every entry of one
  // class bitwise identical and makes multiples of N exactly 1.
  for (int p = 0; p < basis.dimension(); ++p) {
    const int l = basis.wavevector_class(p);
    phases_(p) = l == 0 ? cplx{1.0, 0.0} : std::polar(1.0, kTwoPi * l / n);
  }
}

Matrix TranslationOperator::dense() const { return phases_.asDiagonal(); }

Matrix TranslationOperator::conjugate(const Matrix& o) const {
  Matrix out(o.rows(), o.cols());
  for (Eigen::Index j = 0; j < o.cols(); ++j)
    for (Eigen::Index i = 0; i < o.rows(); ++i)
      out(i, j) = phases_(i) == phases_(j) ? o(i, j) : phases_(i) * o(i, j) * std::conj(phases_(j));
  return out;
}

HermitianOperator build_hamiltonian(const PlaneWaveBasis& basis, const PotentialSpec& potential) {
  const LatticeSpec& spec = basis.lattice();
  const int d = basis.dimension();
  const int n = basis.cells();
  Matrix h = Matrix::Zero(d, d);
  const double kinetic = spec.hbar * spec.hbar / (2.0 * spec.mass);
  for (int p = 0; p < d; ++p) {
    const double q = basis.momentum(p);
    h(p, p) = kinetic * q * q + potential.offset();
  }
  for (const Harmonic& harm : potential.harmonics()) {
    const int shift = harm.j * n;
    for (int p = 0; p + shift < d; ++p) {
      // ⟨m+jN| V |m⟩ = v_j
      h(p + shift, p) = harm.coefficient;
      h(p, p + shift) = std::conj(harm.coefficient);
    }
  }
  return HermitianOperator(std::move(h), Periodicity::cell_periodic);
}

HermitianOperator build_hamiltonian(const LatticeSpec& spec, const PotentialSpec& potential) {
  return build_hamiltonian(build_basis(spec), potential);
}

TranslationOperator build_translation(const LatticeSpec& spec) { return TranslationOperator(build_basis(spec)); }

HermitianOperator momentum_operator(const PlaneWaveBasis& basis) {
  const int d = basis.dimension();
  Matrix p = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) p(i, i) = basis.lattice().hbar * basis.momentum(i);
  return HermitianOperator(std::move(p), Periodicity::cell_periodic);
}

}  // namespace sslab
