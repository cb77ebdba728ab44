#include "sslab/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sslab/errors.hpp"

namespace sslab {

namespace {

constexpr double kDegeneracyTol = 1e-10;

}  // namespace

std::vector<BlochState> BlochSolution::band(int n) const {
  std::vector<BlochState> out;
  out.reserve(static_cast<std::size_t>(bands.cells));
  for (int l = 0; l < bands.cells; ++l) out.push_back(state(l, n));
  return out;
}

BlochSolution solve_bands(const HermitianOperator& hamiltonian, const LatticeSpec& spec) {
  const PlaneWaveBasis basis(spec);
  const int d = basis.dimension();
  if (hamiltonian.dimension() != d) throw InvalidInput("hamiltonian dimension does not match lattice basis");

  const int n_cells = basis.cells();
  const int per_class = basis.states_per_class();
  BlochSolution out;
  out.bands.cells = n_cells;
  out.bands.bands_per_class = per_class;
  out.bands.rows.reserve(static_cast<std::size_t>(d));
  out.states.reserve(static_cast<std::size_t>(d));

  const Matrix& h = hamiltonian.matrix();
  for (int l = 0; l < n_cells; ++l) {
    const std::vector<int> pos = basis.class_positions(l);
    Matrix block(per_class, per_class);
    for (int i = 0; i < per_class; ++i)
      for (int j = 0; j < per_class; ++j) block(i, j) = h(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
    if (solver.info() != Eigen::Success)
      throw NumericalFailure("eigensolver did not converge for wavevector class " + std::to_string(l));
    const Eigen::VectorXd& energies = solver.eigenvalues();
    Matrix vectors = solver.eigenvectors();

    for (int start = 0; start < per_class;) {
      int stop = start + 1;
      while (stop < per_class && energies(stop) - energies(stop - 1) <= kDegeneracyTol) ++stop;
      vectors.middleCols(start, stop - start) = canonical_subspace_basis(vectors.middleCols(start, stop - start));
      start = stop;
    }

    const double k = basis.class_wavevector(l);
    for (int nb = 0; nb < per_class; ++nb) {
      BlochState s;
      s.band = nb;
      s.wavevector_class = l;
      s.wavevector = k;
      s.energy = energies(nb);
      s.coefficients = Vector::Zero(d);
      for (int i = 0; i < per_class; ++i) s.coefficients(pos[static_cast<std::size_t>(i)]) = vectors(i, nb);
      out.bands.rows.push_back({l, k, nb, s.energy});
      out.states.push_back(std::move(s));
    }
  }
  return out;
}

CellPeriodicState cell_periodic_part(const BlochState& state, const PlaneWaveBasis& basis) {
  if (state.coefficients.size() != basis.dimension())
    throw InvalidInput("state dimension does not match basis");
  const int n = basis.cells();
  const int l = state.wavevector_class;
  if (l < 0 || l >= n) throw InvalidInput("wavevector class out of range");

  CellPeriodicState u;
  u.band = state.band;
  u.wavevector_class = l;
  u.wavevector = state.wavevector;
  const std::vector<int> pos = basis.class_positions(l);
  u.coefficients.resize(static_cast<Eigen::Index>(pos.size()));
  u.harmonics.reserve(pos.size());
  for (int p = 0; p < basis.dimension(); ++p) {
    if (basis.wavevector_class(p) != l && state.coefficients(p) != cplx{})
      throw InvalidInput("state has weight outside wavevector class " + std::to_string(l) + " at m = " +
                         std::to_string(basis.index(p)));
  }
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const int m = basis.index(pos[i]);
    u.harmonics.push_back((m - l) / n);
    u.coefficients(static_cast<Eigen::Index>(i)) = state.coefficients(pos[i]);
  }
  return u;
}

int winding_number(std::span<const cplx> samples) {
  if (samples.size() < 2) throw InvalidInput("winding number needs at least two samples");
  for (const cplx& s : samples)
    if (!(std::abs(s) >= 0.5)) throw InvalidInput("winding number: sample modulus below 0.5, phase ill-defined");

  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const cplx& a = samples[i];
    const cplx& b = samples[(i + 1) % samples.size()];
    const double step = std::arg(b * std::conj(a));
    if (std::abs(step) >= kPi / 2)
      throw InvalidInput("winding number: phase step " + std::to_string(step) + " exceeds pi/2, sample more densely");
    total += step;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

std::vector<cplx> sample_bloch_factor(const PlaneWaveBasis& basis, int l, int points) {
  if (points < 1) throw InvalidInput("sample count must be positive");
  const double length = basis.lattice().length();
  const double k = basis.class_wavevector(l);
  std::vector<cplx> out(static_cast<std::size_t>(points));
  for (int p = 0; p < points; ++p) out[static_cast<std::size_t>(p)] = std::polar(1.0, k * (length * p / points));
  return out;
}

Vector wannier_state(int band, int home_cell, std::span<const BlochState> band_states, const PlaneWaveBasis& basis) {
  const int n = basis.cells();
  std::vector<const BlochState*> by_class(static_cast<std::size_t>(n), nullptr);
  for (const BlochState& s : band_states) {
    if (s.band != band || s.wavevector_class < 0 || s.wavevector_class >= n) continue;
    by_class[static_cast<std::size_t>(s.wavevector_class)] = &s;
  }
  std::string missing;
  for (int l = 0; l < n; ++l)
    if (by_class[static_cast<std::size_t>(l)] == nullptr) missing += (missing.empty() ? "" : ", ") + std::to_string(l);
  if (!missing.empty())
    throw InvalidInput("wannier state of band " + std::to_string(band) + " is missing classes: " + missing);

  Vector w = Vector::Zero(basis.dimension());
  for (int l = 0; l < n; ++l) {
    const BlochState& s = *by_class[static_cast<std::size_t>(l)];
    // k_l R = 2π l r / N, reduced mod 2π.
    long long lr = (static_cast<long long>(l) * home_cell) % n;
    if (lr < 0) lr += n;
    const cplx phase = lr == 0 ? cplx{1.0, 0.0} : std::polar(1.0, -kTwoPi * static_cast<double>(lr) / n);
    w += phase * s.coefficients;
  }
  return w / std::sqrt(static_cast<double>(n));
}

BlochResiduals bloch_residuals(const BlochSolution& solution, const HermitianOperator& hamiltonian,
                               const TranslationOperator& translation) {
  BlochResiduals r;
  const Matrix& h = hamiltonian.matrix();
  const int n = solution.bands.cells;
  Matrix all(h.rows(), static_cast<Eigen::Index>(solution.states.size()));
  for (std::size_t i = 0; i < solution.states.size(); ++i) {
    const BlochState& s = solution.states[i];
    all.col(static_cast<Eigen::Index>(i)) = s.coefficients;
    r.eigen = std::max(r.eigen, (h * s.coefficients - s.energy * s.coefficients).norm());
    const cplx eig = s.wavevector_class == 0 ? cplx{1.0, 0.0} : std::polar(1.0, kTwoPi * s.wavevector_class / n);
    r.translation = std::max(r.translation, (translation.apply(s.coefficients) - eig * s.coefficients).norm());
  }
  r.orthonormality = max_abs(all.adjoint() * all - Matrix::Identity(all.cols(), all.cols()));
  return r;
}

}  // namespace sslab
