#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sslab/bloch.hpp"
#include "sslab/errors.hpp"
#include "sslab/rng.hpp"

using namespace sslab;

namespace {

BlochSolution solve(const LatticeSpec& spec, const PotentialSpec& pot) {
  return solve_bands(build_hamiltonian(spec, pot), spec);
}

}  // namespace

TEST_CASE("free bands") {
  const LatticeSpec spec = fixture::lattice(3, 4);
  const BlochSolution sol = solve(spec, fixture::free_particle());
  CHECK(sol.bands.bands_per_class == 3);
  CHECK(sol.bands.rows.size() == 9);
  CHECK(sol.bands.energy(0, 0) == 0.0);
  CHECK(sol.bands.energy(1, 0) == doctest::Approx(2.1932454224643).epsilon(1e-12));
  CHECK(sol.bands.energy(2, 0) == doctest::Approx(2.1932454224643).epsilon(1e-12));

  const PlaneWaveBasis b(spec);
  for (const BandEntry& e : sol.bands.rows) {
    double best = 1e300;
    for (int p = 0; p < b.dimension(); ++p) best = std::min(best, std::abs(e.energy - 0.5 * b.momentum(p) * b.momentum(p)));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("degenerate free pair ordered by plane-wave index") {
  const LatticeSpec spec = fixture::lattice(3, 4);
  const PlaneWaveBasis b(spec);
  const BlochSolution sol = solve(spec, fixture::free_particle());
  // class 0 holds m = −3 and m = 3 at the same energy.
  CHECK(sol.bands.energy(0, 1) == sol.bands.energy(0, 2));
  const Vector& lo = sol.state(0, 1).coefficients;
  const Vector& hi = sol.state(0, 2).coefficients;
  CHECK(lo(b.position(-3)) == cplx(1.0));
  CHECK(hi(b.position(3)) == cplx(1.0));
  CHECK(lo.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("solver residuals on the acceptance lattices") {
  for (auto [n, m] : {std::pair{3, 4}, {5, 7}, {7, 10}}) {
    const LatticeSpec spec = fixture::lattice(n, m);
    for (const PotentialSpec& pot : {fixture::free_particle(), fixture::mathieu(0.25), fixture::mathieu(0.25, 0.1)}) {
      const HermitianOperator h = build_hamiltonian(spec, pot);
      const BlochSolution sol = solve_bands(h, spec);
      const BlochResiduals r = bloch_residuals(sol, h, TranslationOperator(PlaneWaveBasis(spec)));
      CHECK(r.eigen < 1e-9 * h.max_abs());
      CHECK(r.translation < 1e-10);
      CHECK(r.orthonormality < 1e-10);

      // Translation eigenvalue checked against the dense oracle matrix.
      const Matrix t = oracle::dense_translation(PlaneWaveBasis(spec));
      for (const BlochState& s : sol.states)
        CHECK((t * s.coefficients - std::polar(1.0, s.wavevector) * s.coefficients).norm() < 1e-10);
    }
  }
}

TEST_CASE("solve_bands is bitwise deterministic") {
  const LatticeSpec spec = fixture::lattice(5, 7);
  const BlochSolution a = solve(spec, fixture::mathieu(0.25, 0.1));
  const BlochSolution b = solve(spec, fixture::mathieu(0.25, 0.1));
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i].energy == b.states[i].energy);
    CHECK((a.states[i].coefficients.array() == b.states[i].coefficients.array()).all());
  }
}

TEST_CASE("phase fixing leaves the dominant coefficient real positive") {
  const LatticeSpec spec = fixture::lattice(7, 10);
  const BlochSolution sol = solve(spec, fixture::mathieu(0.25, 0.1));
  for (const BlochState& s : sol.states) {
    const Eigen::Index p = dominant_position(s.coefficients);
    CHECK(s.coefficients(p).imag() == 0.0);
    CHECK(s.coefficients(p).real() > 0.0);
  }
}

TEST_CASE("converged Mathieu bands match a high-order finite-difference ring") {
  // Cutoff large enough that plane-wave truncation sits far below 1e−6.
  const PotentialSpec pot = fixture::mathieu(0.25);
  const LatticeSpec spec = fixture::lattice(3, 31);
  const BlochSolution sol = solve(spec, pot);
  std::vector<double> ours;
  for (int l = 0; l < 3; ++l)
    for (int n = 0; n < 3; ++n) ours.push_back(sol.bands.energy(l, n));
  std::sort(ours.begin(), ours.end());
  const Eigen::VectorXd fd = oracle::fd_ring_spectrum(spec, pot, 960, 8);
  for (std::size_t i = 0; i < ours.size(); ++i)
    CHECK(std::abs(ours[i] - fd(static_cast<Eigen::Index>(i))) <= 1e-6 * std::max(1.0, std::abs(fd(static_cast<Eigen::Index>(i)))));
}

TEST_CASE("cell-periodic part") {
  const LatticeSpec spec = fixture::lattice(3, 4);
  const PlaneWaveBasis b(spec);
  BlochState s;
  s.band = 0;
  s.wavevector_class = 1;
  s.wavevector = b.class_wavevector(1);
  s.coefficients = Vector::Zero(9);
  s.coefficients(b.position(1)) = 1.0;
  CellPeriodicState u = cell_periodic_part(s, b);
  CHECK(u.harmonics == std::vector<int>{-1, 0, 1});
  CHECK(u.coefficients(1) == cplx(1.0));
  CHECK(u.coefficients.norm() == 1.0);

  s.coefficients.setZero();
  s.coefficients(b.position(4)) = 1.0;
  u = cell_periodic_part(s, b);
  CHECK(u.coefficients(2) == cplx(1.0));

  s.coefficients(b.position(0)) = 0.1;
  CHECK_THROWS_AS(cell_periodic_part(s, b), InvalidInput);

  const BlochSolution sol = solve(spec, fixture::mathieu(0.25));
  for (const BlochState& st : sol.states)
    CHECK(cell_periodic_part(st, b).coefficients.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("winding numbers") {
  const PlaneWaveBasis b3(fixture::lattice(3, 4));
  CHECK(winding_number(sample_bloch_factor(b3, 0, 64)) == 0);
  const PlaneWaveBasis b5(fixture::lattice(5, 7));
  const auto two = sample_bloch_factor(b5, 2, 64);
  CHECK(winding_number(two) == 2);
  CHECK(oracle::crossing_winding(two) == 2);

  const auto one = sample_bloch_factor(b5, 1, 64);
  std::vector<cplx> prod(64);
  for (std::size_t i = 0; i < 64; ++i) prod[i] = one[i] * two[i];
  CHECK(winding_number(prod) == 3);
  CHECK(oracle::crossing_winding(prod) == 3);

  for (auto [n, m] : {std::pair{3, 4}, {5, 7}, {7, 10}}) {
    const PlaneWaveBasis b(fixture::lattice(n, m));
    for (int l = 0; l < n; ++l) CHECK(winding_number(sample_bloch_factor(b, l, 64)) == l);
  }
}

TEST_CASE("winding rejects undersampled or vanishing loops") {
  const PlaneWaveBasis b(fixture::lattice(7, 10));
  CHECK_THROWS_AS(winding_number(sample_bloch_factor(b, 6, 8)), InvalidInput);
  std::vector<cplx> z(16, cplx(1.0));
  z[3] = 0.1;
  CHECK_THROWS_AS(winding_number(z), InvalidInput);
}

TEST_CASE("winding additivity on random unimodular loops") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int wf = static_cast<int>(rng.next() % 7) - 3;
    const int wg = static_cast<int>(rng.next() % 7) - 3;
    const double af = 0.4 * rng.symmetric();
    const double ag = 0.4 * rng.symmetric();
    const int points = 128;
    std::vector<cplx> f(points), g(points), fg(points);
    for (int p = 0; p < points; ++p) {
      const double x = kTwoPi * p / points;
      f[p] = std::polar(1.0, wf * x + af * std::sin(2 * x));
      g[p] = std::polar(1.0, wg * x + ag * std::cos(3 * x));
      fg[p] = f[p] * g[p];
    }
    CHECK(winding_number(f) == oracle::crossing_winding(f));
    CHECK(winding_number(fg) == winding_number(f) + winding_number(g));
  }
}

TEST_CASE("wannier state") {
  const LatticeSpec spec = fixture::lattice(3, 4);
  const PlaneWaveBasis b(spec);
  const BlochSolution sol = solve(spec, fixture::free_particle());
  const Vector w = wannier_state(0, 0, sol.band(0), b);
  Vector expect = Vector::Zero(9);
  for (int m : {-1, 0, 1}) expect(b.position(m)) = 1.0 / std::sqrt(3.0);
  CHECK((w - expect).norm() < 1e-15);
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<BlochState> partial = sol.band(0);
  partial.pop_back();
  CHECK_THROWS_AS(wannier_state(0, 0, partial, b), InvalidInput);
}

TEST_CASE("wannier states translate cell by cell") {
  for (auto [n, m] : {std::pair{3, 4}, {5, 7}, {7, 10}}) {
    const LatticeSpec spec = fixture::lattice(n, m);
    const PlaneWaveBasis b(spec);
    const BlochSolution sol = solve(spec, fixture::mathieu(0.25, 0.1));
    const Matrix t = oracle::dense_translation(b);
    for (int band = 0; band < 2; ++band) {
      const auto states = sol.band(band);
      // Direct sum, written independently of wannier_state.
      Vector w0 = Vector::Zero(b.dimension());
      Vector w1 = Vector::Zero(b.dimension());
      for (const BlochState& s : states) {
        w0 += s.coefficients / std::sqrt(double(n));
        w1 += std::polar(1.0, -s.wavevector) * s.coefficients / std::sqrt(double(n));
      }
      CHECK((wannier_state(band, 0, states, b) - w0).norm() < 1e-14);
      CHECK((wannier_state(band, 1, states, b) - w1).norm() < 1e-14);
      CHECK((t * w1 - w0).norm() < 1e-10);
      CHECK((t.adjoint() * w0 - w1).norm() < 1e-10);
      CHECK((wannier_state(band, n, states, b) - w0).norm() < 1e-12);
    }
  }
}
