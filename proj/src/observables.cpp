#include "sslab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sslab/errors.hpp"
#include "sslab/rng.hpp"

namespace sslab {

namespace {

// F[m', m] = c for m' − m = jN, conj(c) for m' − m = −jN.
Matrix fourier_matrix(std::span<const Harmonic> harmonics, const PlaneWaveBasis& basis) {
  const int d = basis.dimension();
  Matrix f = Matrix::Zero(d, d);
  for (const Harmonic& h : canonicalize_harmonics(harmonics)) {
    const int shift = h.j * basis.cells();
    for (int p = 0; p + shift < d; ++p) {
      f(p + shift, p) += h.coefficient;
      f(p, p + shift) += std::conj(h.coefficient);
    }
  }
  return f;
}

Eigen::VectorXd momentum_polynomial(std::span<const double> coeffs, const PlaneWaveBasis& basis) {
  const int d = basis.dimension();
  Eigen::VectorXd out(d);
  for (int p = 0; p < d; ++p) {
    const double momentum = basis.lattice().hbar * basis.momentum(p);
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * momentum + *it;
    out(p) = acc;
  }
  return out;
}

// (F·P + P·F)/2 with P diagonal, written entrywise so structural zeros of F
// stay exact zeros.
Matrix symmetrized_product(const Matrix& f, const Eigen::VectorXd& p) {
  Matrix out(f.rows(), f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (Eigen::Index i = 0; i < f.rows(); ++i) out(i, j) = f(i, j) * (0.5 * (p(i) + p(j)));
  return out;
}

}  // namespace

HermitianOperator build_observable(const ObservableSpec& spec, const PlaneWaveBasis& basis) {
  const int d = basis.dimension();
  Matrix total = Matrix::Zero(d, d);
  for (const ObservableTerm& term : spec.terms) {
    if (!term.f && !term.p_poly) throw InvalidInput("observable term has neither f nor p_poly");
    if (term.p_poly) {
      if (term.p_poly->empty()) throw InvalidInput("p_poly must have at least one coefficient");
      if (static_cast<int>(term.p_poly->size()) - 1 > kMaxMomentumDegree)
        throw InvalidInput("momentum polynomial degree " + std::to_string(term.p_poly->size() - 1) +
                           " exceeds the maximum of " + std::to_string(kMaxMomentumDegree));
      for (double c : *term.p_poly)
        if (!std::isfinite(c)) throw InvalidInput("p_poly coefficients must be finite");
    }
    if (term.f && term.p_poly && !spec.symmetrize)
      throw InvalidInput("a term with both f and p_poly requires symmetrize = true");

    if (term.f && term.p_poly) {
      total += symmetrized_product(fourier_matrix(*term.f, basis), momentum_polynomial(*term.p_poly, basis));
    } else if (term.f) {
      total += fourier_matrix(*term.f, basis);
    } else {
      total.diagonal() += momentum_polynomial(*term.p_poly, basis).cast<cplx>();
    }
  }
  return HermitianOperator(std::move(total), Periodicity::cell_periodic);
}

PeriodicityReport check_cell_periodicity(const HermitianOperator& o, const TranslationOperator& t, double tolerance) {
  if (o.dimension() != t.dimension()) throw InvalidInput("operator and translation dimensions differ");
  PeriodicityReport r;
  const double scale = o.max_abs();
  if (scale > 0.0) r.max_violation = max_abs(t.conjugate(o.matrix()) - o.matrix()) / scale;
  r.is_cell_periodic = r.max_violation < tolerance;
  return r;
}

HermitianOperator random_cell_periodic(std::uint64_t seed, const PlaneWaveBasis& basis, int max_harmonic, int degree) {
  if (degree < 0 || degree > kMaxMomentumDegree)
    throw InvalidInput("random observable degree must be in [0, 6]");
  if (max_harmonic < 0 || max_harmonic * basis.cells() > basis.dimension() - 1)
    throw InvalidInput("random observable harmonic " + std::to_string(max_harmonic) +
                       " is not reachable in a basis of dimension " + std::to_string(basis.dimension()));

  double p_max = 0.0;
  for (int p = 0; p < basis.dimension(); ++p)
    p_max = std::max(p_max, std::abs(basis.lattice().hbar * basis.momentum(p)));
  const double inv_p = p_max > 0.0 ? 1.0 / p_max : 1.0;

  SplitMix64 rng(seed);
  auto draw_harmonics = [&] {
    std::vector<Harmonic> hs;
    for (int j = 1; j <= max_harmonic; ++j) {
      const double re = rng.symmetric();
      const double im = rng.symmetric();
      hs.push_back({j, {re, im}});
    }
    return hs;
  };
  auto draw_poly = [&] {
    std::vector<double> c(static_cast<std::size_t>(degree + 1));
    double scale = 1.0;
    for (double& x : c) {
      x = rng.symmetric() * scale;
      scale *= inv_p;
    }
    return c;
  };

  ObservableSpec spec;
  spec.symmetrize = true;
  const std::vector<Harmonic> f1 = draw_harmonics();
  const std::vector<double> p1 = draw_poly();
  const std::vector<Harmonic> f2 = draw_harmonics();
  const std::vector<double> p2 = draw_poly();
  if (!f1.empty()) {
    spec.terms.push_back({f1, p1});
    spec.terms.push_back({f2, std::nullopt});
  }
  spec.terms.push_back({std::nullopt, p2});

  Matrix m = build_observable(spec, basis).matrix();
  const double scale = max_abs(m);
  if (scale > 0.0) m /= scale;
  return HermitianOperator(std::move(m), Periodicity::cell_periodic);
}

HermitianOperator breaking_observable(int s, const PlaneWaveBasis& basis) {
  const int d = basis.dimension();
  if (s < 1 || s > d - 1)
    throw InvalidInput("breaking observable shift " + std::to_string(s) + " outside [1, " + std::to_string(d - 1) + "]");
  if (s % basis.cells() == 0)
    throw InvalidInput("breaking observable shift " + std::to_string(s) + " is a multiple of N and would be cell-periodic");
  Matrix m = Matrix::Zero(d, d);
  for (int p = 0; p + s < d; ++p) {
    m(p + s, p) = 1.0;
    m(p, p + s) = 1.0;
  }
  return HermitianOperator(std::move(m), Periodicity::broken);
}

ObservableSpec named_observable(std::string_view name) {
  ObservableSpec spec;
  if (name == "identity") {
    spec.terms.push_back({std::nullopt, std::vector<double>{1.0}});
  } else if (name == "cos") {
    spec.terms.push_back({std::vector<Harmonic>{{1, {0.5, 0.0}}}, std::nullopt});
  } else if (name == "sin") {
    spec.terms.push_back({std::vector<Harmonic>{{1, {0.0, -0.5}}}, std::nullopt});
  } else if (name == "p") {
    spec.terms.push_back({std::nullopt, std::vector<double>{0.0, 1.0}});
  } else if (name == "p2") {
    spec.terms.push_back({std::nullopt, std::vector<double>{0.0, 0.0, 1.0}});
  } else {
    throw InvalidInput("unknown named observable '" + std::string(name) + "'");
  }
  return spec;
}

Battery make_battery(const BatterySpec& spec, const PlaneWaveBasis& basis) {
  if (spec.seeds < 0) throw InvalidInput("battery seed count must be non-negative");
  Battery out;
  out.reserve(static_cast<std::size_t>(spec.seeds) + spec.named.size());
  for (int i = 0; i < spec.seeds; ++i) {
    const std::uint64_t seed = spec.first_seed + static_cast<std::uint64_t>(i);
    out.push_back({"seed:" + std::to_string(seed), random_cell_periodic(seed, basis, spec.max_harmonic, spec.degree)});
  }
  for (const std::string& name : spec.named) out.push_back({name, build_observable(named_observable(name), basis)});
  return out;
}

}  // namespace sslab
