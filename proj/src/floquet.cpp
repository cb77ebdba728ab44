#include "sslab/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sslab/errors.hpp"

namespace sslab {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_hermitian(const Matrix& m, int d, const std::string& what) {
  if (m.rows() != d || m.cols() != d) throw InvalidInput(what + " must be " + std::to_string(d) + "x" + std::to_string(d));
  if (hermiticity_defect(m) > 1e-12 * std::max(1.0, max_abs(m))) throw InvalidInput(what + " is not Hermitian");
}

double drive_factor(const DriveTerm& term, double t, double omega) {
  const double arg = term.harmonic * omega * t;
  return term.kind == DriveKind::cos ? std::cos(arg) : std::sin(arg);
}

// exp(−i H τ) for Hermitian H.
Matrix hermitian_exponential(const Matrix& h, double tau) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver failed in step exponential");
  const Eigen::VectorXd& e = solver.eigenvalues();
  Vector phases(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) phases(i) = std::polar(1.0, -e(i) * tau);
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

Matrix DriveSpec::hamiltonian(double t) const {
  Matrix h = h0;
  for (const DriveTerm& term : drives) h += drive_factor(term, t, omega) * term.matrix;
  return h;
}

void DriveSpec::validate() const {
  const int d = dimension();
  if (d < 2 || d > 16) throw InvalidInput("drive dimension must be in [2, 16], got " + std::to_string(d));
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidInput("drive omega must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("drive hbar must be positive");
  require_hermitian(h0, d, "H0");
  for (const DriveTerm& term : drives) {
    if (term.harmonic < 1) throw InvalidInput("drive harmonic must be >= 1");
    require_hermitian(term.matrix, d, "drive matrix");
  }
}

Matrix PeriodicObservableSpec::at(double t, double omega) const {
  Matrix o = static_part;
  for (const DriveTerm& term : harmonics) o += drive_factor(term, t, omega) * term.matrix;
  return o;
}

void PeriodicObservableSpec::validate(int dimension) const {
  require_hermitian(static_part, dimension, "observable static part");
  for (const DriveTerm& term : harmonics) {
    if (term.harmonic < 1) throw InvalidInput("observable harmonic must be >= 1");
    require_hermitian(term.matrix, dimension, "observable harmonic matrix");
  }
}

PeriodPropagator::PeriodPropagator(const DriveSpec& spec, int steps, Integrator method) {
  spec.validate();
  if (steps < 64) throw InvalidInput("propagation needs at least 64 steps per period, got " + std::to_string(steps));
  dt_ = spec.period() / steps;
  const double inv_hbar = 1.0 / spec.hbar;
  const int d = spec.dimension();
  maps_.reserve(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    const double t0 = s * dt_;
    if (method == Integrator::midpoint_exponential) {
      maps_.push_back(hermitian_exponential(spec.hamiltonian(t0 + 0.5 * dt_), dt_ * inv_hbar));
    } else {
      const Matrix id = Matrix::Identity(d, d);
      const Matrix a0 = (-kI * inv_hbar * dt_) * spec.hamiltonian(t0);
      const Matrix am = (-kI * inv_hbar * dt_) * spec.hamiltonian(t0 + 0.5 * dt_);
      const Matrix a1 = (-kI * inv_hbar * dt_) * spec.hamiltonian(t0 + dt_);
      const Matrix k1 = a0;
      const Matrix k2 = am * (id + 0.5 * k1);
      const Matrix k3 = am * (id + 0.5 * k2);
      const Matrix k4 = a1 * (id + k3);
      maps_.push_back(id + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
    }
  }
}

Matrix PeriodPropagator::monodromy() const {
  const Eigen::Index d = maps_.front().rows();
  Matrix u = Matrix::Identity(d, d);
  for (const Matrix& m : maps_) u = m * u;
  return u;
}

Matrix propagate_period(const DriveSpec& spec, int steps, Integrator method) {
  const Matrix u = PeriodPropagator(spec, steps, method).monodromy();
  const double drift = unitarity_defect(u);
  if (drift > 1e-6)
    throw NumericalFailure("monodromy unitarity drift " + std::to_string(drift) + " exceeds 1e-6; increase steps");
  return u;
}

double fold_quasienergy(double energy, double omega, double hbar) {
  const double zone = hbar * omega;
  double folded = energy - zone * std::floor((energy + 0.5 * zone) / zone);
  // Guard the half-open top edge against rounding.
  if (folded >= 0.5 * zone) folded -= zone;
  if (folded < -0.5 * zone) folded += zone;
  return folded;
}

double quasienergy_distance(double a, double b, double omega, double hbar) {
  return std::abs(fold_quasienergy(a - b, omega, hbar));
}

double spectrum_distance(std::span<const double> a, std::span<const double> b, double omega, double hbar) {
  auto one_way = [&](std::span<const double> x, std::span<const double> y) {
    double worst = 0.0;
    for (double u : x) {
      double best = std::numeric_limits<double>::infinity();
      for (double v : y) best = std::min(best, quasienergy_distance(u, v, omega, hbar));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

QuasienergySpectrum quasienergies(const Matrix& monodromy, double omega, double hbar) {
  if (monodromy.rows() != monodromy.cols() || monodromy.rows() == 0)
    throw InvalidInput("monodromy must be a non-empty square matrix");
  if (unitarity_defect(monodromy) > 1e-8) throw InvalidInput("monodromy is not unitary to 1e-8");

  const Eigen::Index d = monodromy.rows();
  const double period = kTwoPi / omega;
  Eigen::ComplexSchur<Matrix> schur(monodromy);
  if (schur.info() != Eigen::Success) throw NumericalFailure("Schur decomposition of the monodromy failed");
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();

  std::vector<double> raw(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    raw[static_cast<std::size_t>(i)] = fold_quasienergy(-hbar / period * std::arg(t(i, i)), omega, hbar);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return raw[static_cast<std::size_t>(x)] < raw[static_cast<std::size_t>(y)];
  });

  QuasienergySpectrum out;
  out.modes.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.energies.push_back(raw[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    out.modes.col(i) = q.col(order[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index start = 0; start < d;) {
    Eigen::Index stop = start + 1;
    while (stop < d && out.energies[static_cast<std::size_t>(stop)] - out.energies[static_cast<std::size_t>(stop - 1)] <= 1e-8)
      ++stop;
    out.modes.middleCols(start, stop - start) = canonical_subspace_basis(out.modes.middleCols(start, stop - start));
    start = stop;
  }
  return out;
}

FloquetSolution solve_floquet(const DriveSpec& spec, int steps, Integrator method) {
  FloquetSolution s;
  s.monodromy = propagate_period(spec, steps, method);
  s.omega = spec.omega;
  s.hbar = spec.hbar;
  s.steps = steps;
  s.method = method;
  QuasienergySpectrum spectrum = quasienergies(s.monodromy, spec.omega, spec.hbar);
  s.quasienergies = std::move(spectrum.energies);
  s.modes = std::move(spectrum.modes);
  return s;
}

std::vector<double> sambe_quasienergies(const DriveSpec& spec, int max_harmonic) {
  spec.validate();
  if (max_harmonic < 4) throw InvalidInput("Sambe truncation must be >= 4, got " + std::to_string(max_harmonic));
  const int d = spec.dimension();
  const int blocks = 2 * max_harmonic + 1;

  // Fourier components H_m of H(t) = Σ_m H_m e^{imωt}, stored at m + offset.
  int top = 0;
  for (const DriveTerm& term : spec.drives) top = std::max(top, term.harmonic);
  std::vector<Matrix> comp(static_cast<std::size_t>(2 * top + 1), Matrix::Zero(d, d));
  comp[static_cast<std::size_t>(top)] = spec.h0;
  for (const DriveTerm& term : spec.drives) {
    const std::size_t up = static_cast<std::size_t>(top + term.harmonic);
    const std::size_t down = static_cast<std::size_t>(top - term.harmonic);
    if (term.kind == DriveKind::cos) {
      comp[up] += 0.5 * term.matrix;
      comp[down] += 0.5 * term.matrix;
    } else {
      comp[up] += (-0.5 * kI) * term.matrix;
      comp[down] += (0.5 * kI) * term.matrix;
    }
  }

  Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d) * blocks, static_cast<Eigen::Index>(d) * blocks);
  for (int bi = 0; bi < blocks; ++bi) {
    for (int bj = 0; bj < blocks; ++bj) {
      const int m = bi - bj;
      if (std::abs(m) > top) continue;
      k.block(static_cast<Eigen::Index>(bi) * d, static_cast<Eigen::Index>(bj) * d, d, d) =
          comp[static_cast<std::size_t>(m + top)];
    }
    const int n = bi - max_harmonic;
    k.block(static_cast<Eigen::Index>(bi) * d, static_cast<Eigen::Index>(bi) * d, d, d).diagonal().array() +=
        n * spec.hbar * spec.omega;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(k);
  if (solver.info() != Eigen::Success) throw NumericalFailure("Sambe eigensolver did not converge");
  const Matrix& v = solver.eigenvectors();
  const Eigen::Index total = k.rows();
  std::vector<double> center(static_cast<std::size_t>(total));
  for (Eigen::Index c = 0; c < total; ++c) {
    double mean = 0.0;
    for (int bi = 0; bi < blocks; ++bi)
      mean += (bi - max_harmonic) * v.col(c).segment(static_cast<Eigen::Index>(bi) * d, d).squaredNorm();
    center[static_cast<std::size_t>(c)] = std::abs(mean);
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return center[static_cast<std::size_t>(x)] < center[static_cast<std::size_t>(y)];
  });
  std::vector<double> out;
  for (int i = 0; i < d; ++i)
    out.push_back(fold_quasienergy(solver.eigenvalues()(order[static_cast<std::size_t>(i)]), spec.omega, spec.hbar));
  std::sort(out.begin(), out.end());
  return out;
}

ModeTrajectories mode_trajectory(const DriveSpec& spec, const FloquetSolution& solution, int samples_per_period,
                                 int periods) {
  if (samples_per_period < 1 || periods < 1) throw InvalidInput("trajectory grid must be positive");
  if (solution.steps % samples_per_period != 0)
    throw InvalidInput("solution steps (" + std::to_string(solution.steps) + ") must be a multiple of the " +
                       std::to_string(samples_per_period) + " samples per period");
  const PeriodPropagator prop(spec, solution.steps, solution.method);
  const int sub = solution.steps / samples_per_period;
  const double period = solution.period();
  const Eigen::Index d = solution.modes.cols();

  ModeTrajectories out;
  const int total = periods * samples_per_period;
  out.times.reserve(static_cast<std::size_t>(total + 1));
  out.modes.reserve(static_cast<std::size_t>(total + 1));
  out.periodic.reserve(static_cast<std::size_t>(total + 1));

  Matrix phi = solution.modes;
  auto record = [&](int i) {
    const double t = period * static_cast<double>(i) / samples_per_period;
    Matrix v = phi;
    for (Eigen::Index j = 0; j < d; ++j)
      v.col(j) *= std::polar(1.0, solution.quasienergies[static_cast<std::size_t>(j)] * t / solution.hbar);
    for (Eigen::Index j = 0; j < d; ++j) out.max_norm_error = std::max(out.max_norm_error, std::abs(phi.col(j).norm() - 1.0));
    out.times.push_back(t);
    out.modes.push_back(phi);
    out.periodic.push_back(std::move(v));
  };
  record(0);
  for (int i = 1; i <= total; ++i) {
    const int first = ((i - 1) % samples_per_period) * sub;
    for (int s = first; s < first + sub; ++s) phi = prop.step(s) * phi;
    record(i);
  }
  const Matrix& v0 = out.periodic.front();
  const Matrix& v1 = out.periodic[static_cast<std::size_t>(samples_per_period)];
  for (Eigen::Index j = 0; j < d; ++j) out.periodicity_residual.push_back((v1.col(j) - v0.col(j)).norm());
  return out;
}

Matrix monodromy_polynomial(const Matrix& monodromy, std::span<const double> cos_coeffs,
                            std::span<const double> sin_coeffs) {
  const Eigen::Index d = monodromy.rows();
  Matrix out = Matrix::Zero(d, d);
  if (!cos_coeffs.empty()) out.diagonal().array() += cos_coeffs[0];
  const std::size_t order = std::max(cos_coeffs.size(), sin_coeffs.size());
  Matrix power = Matrix::Identity(d, d);
  for (std::size_t k = 1; k < order; ++k) {
    power = monodromy * power;
    const Matrix inverse = power.adjoint();
    const double c = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
    const double s = k < sin_coeffs.size() ? sin_coeffs[k] : 0.0;
    out += (0.5 * c) * (power + inverse) + (s / (2.0 * kI)) * (power - inverse);
  }
  return out;
}

TemporalProbeReport temporal_overlap_probe(const DriveSpec& spec, const FloquetSolution& solution,
                                           const PeriodicObservableSpec& observable, int mode_a, int mode_b,
                                           std::span<const int> periods, int samples_per_period, double slack) {
  const int d = static_cast<int>(solution.modes.cols());
  observable.validate(d);
  if (mode_a < 0 || mode_b < 0 || mode_a >= d || mode_b >= d) throw InvalidInput("probe mode index out of range");
  if (mode_a == mode_b) throw InvalidInput("probe needs two distinct modes");
  const double ea = solution.quasienergies[static_cast<std::size_t>(mode_a)];
  const double eb = solution.quasienergies[static_cast<std::size_t>(mode_b)];
  if (quasienergy_distance(ea, eb, solution.omega, solution.hbar) <= 1e-8)
    throw InvalidInput("probe modes have equal quasienergy modulo hbar*omega");
  if (periods.empty()) throw InvalidInput("probe needs at least one averaging window");
  int longest = 1;
  for (int k : periods) {
    if (k < 1) throw InvalidInput("averaging window must be >= 1 period");
    longest = std::max(longest, k);
  }

  const ModeTrajectories traj = mode_trajectory(spec, solution, samples_per_period, std::max(longest, 2));
  const double period = solution.period();
  std::vector<cplx> f(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Matrix o = observable.at(traj.times[i], solution.omega);
    f[i] = traj.modes[i].col(mode_a).dot(o * traj.modes[i].col(mode_b));
  }

  TemporalProbeReport r;
  r.mode_a = mode_a;
  r.mode_b = mode_b;
  r.detuning = ea - eb;
  const double theta = r.detuning * period / solution.hbar;
  const cplx shift = std::polar(1.0, theta);
  for (int i = 0; i < samples_per_period; ++i) {
    const std::size_t here = static_cast<std::size_t>(i);
    const std::size_t next = here + static_cast<std::size_t>(samples_per_period);
    r.phase_relation_deviation = std::max(r.phase_relation_deviation, std::abs(f[next] - shift * f[here]));
    r.max_overlap = std::max(r.max_overlap, std::abs(f[here]));
  }

  double num = 0.0;
  double den = 0.0;
  for (int k : periods) {
    const std::size_t count = static_cast<std::size_t>(k) * static_cast<std::size_t>(samples_per_period);
    cplx sum{};
    for (std::size_t i = 0; i < count; ++i) sum += f[i];
    const double avg = std::abs(sum) / static_cast<double>(count);
    cplx geometric{};
    for (int p = 0; p < k; ++p) geometric += std::polar(1.0, p * theta);
    const double bound = std::abs(geometric) / k * r.max_overlap;
    r.periods.push_back(k);
    r.running_average.push_back(avg);
    r.geometric_bound.push_back(bound);
    r.within_bound.push_back(avg <= (1.0 + slack) * bound);
    num += avg / k;
    den += 1.0 / (static_cast<double>(k) * k);
  }
  r.fitted_constant = num / den;

  const double cos_coeffs[] = {0.2, 1.0, 0.5};
  const double sin_coeffs[] = {0.0, 0.7, -0.3};
  const Matrix commuting = monodromy_polynomial(solution.monodromy, cos_coeffs, sin_coeffs);
  r.commuting_overlap = std::abs(solution.modes.col(mode_a).dot(commuting * solution.modes.col(mode_b)));
  return r;
}

Vector floquet_expansion(const Vector& state, const FloquetSolution& solution) {
  if (state.size() != solution.modes.rows()) throw InvalidInput("state dimension does not match Floquet modes");
  if (unitarity_defect(solution.modes) > 1e-10) throw InvalidInput("Floquet modes are not orthonormal to 1e-10");
  return solution.modes.adjoint() * state;
}

Vector evolve_periods(const DriveSpec& spec, const Vector& state, int periods, int steps, Integrator method) {
  if (periods < 0) throw InvalidInput("period count must be non-negative");
  if (state.size() != spec.dimension()) throw InvalidInput("state dimension does not match drive");
  const PeriodPropagator prop(spec, steps, method);
  Vector v = state;
  for (int p = 0; p < periods; ++p)
    for (int s = 0; s < prop.steps(); ++s) v = prop.step(s) * v;
  return v;
}

}  // namespace sslab
