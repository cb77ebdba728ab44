#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sslab/errors.hpp"
#include "sslab/observables.hpp"
#include "sslab/rng.hpp"

using namespace sslab;

namespace {

ObservableSpec term(std::optional<std::vector<Harmonic>> f, std::optional<std::vector<double>> p, bool sym = true) {
  return ObservableSpec{{ObservableTerm{std::move(f), std::move(p)}}, sym};
}

double off_class_max(const Matrix& m, const PlaneWaveBasis& b) {
  double worst = 0.0;
  for (int r = 0; r < b.dimension(); ++r)
    for (int c = 0; c < b.dimension(); ++c)
      if (b.wavevector_class(r) != b.wavevector_class(c)) worst = std::max(worst, std::abs(m(r, c)));
  return worst;
}

}  // namespace

TEST_CASE("splitmix64 reference values") {
  SplitMix64 zero(0);
  CHECK(zero.next() == 0xE220A8397B1DCDAFULL);
  SplitMix64 one(1);
  CHECK(one.next() == 10451216379200822465ULL);
  CHECK(one.next() == 13757245211066428519ULL);
  SplitMix64 u(99);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.symmetric();
    CHECK(x >= -1.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("multiplication operator placement") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  const HermitianOperator cos_op = build_observable(term(std::vector<Harmonic>{{1, 0.5}}, std::nullopt), b);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      const int dm = std::abs(b.index(r) - b.index(c));
      CHECK(cos_op.matrix()(r, c) == cplx(dm == 3 ? 0.5 : 0.0));
    }

  const HermitianOperator p2 = build_observable(term(std::nullopt, std::vector<double>{0.0, 0.0, 1.0}), b);
  for (int r = 0; r < 9; ++r) CHECK(p2.matrix()(r, r).real() == doctest::Approx(std::pow(b.momentum(r), 2)).epsilon(1e-14));
  CHECK(max_abs(p2.matrix() - oracle::momentum_power(b, 2)) < 1e-13);
}

TEST_CASE("symmetrized product against dense oracle") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  const std::vector<Harmonic> f{{1, 0.5}};
  const HermitianOperator o = build_observable(term(f, std::vector<double>{0.0, 1.0}), b);
  const Matrix F = oracle::fourier_multiplier(b, f);
  const Matrix P = oracle::momentum_power(b, 1);
  CHECK(max_abs(o.matrix() - 0.5 * (F * P + P * F)) < 1e-14);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c)
      if (std::abs(b.index(r) - b.index(c)) == 3)
        CHECK(o.matrix()(r, c).real() == doctest::Approx(0.25 * (b.momentum(r) + b.momentum(c))).epsilon(1e-14));

  // Complex harmonics, higher degree, several terms.
  const std::vector<Harmonic> g{{1, cplx(0.3, -0.2)}, {2, cplx(0.0, 0.4)}};
  ObservableSpec spec{{ObservableTerm{g, std::vector<double>{0.1, -0.5, 0.02, 0.001}}, ObservableTerm{std::nullopt, std::vector<double>{1.0}}}};
  const PlaneWaveBasis wide(fixture::lattice(5, 7));
  const Matrix G = oracle::fourier_multiplier(wide, g);
  const Matrix Q = 0.1 * Matrix::Identity(15, 15) - 0.5 * oracle::momentum_power(wide, 1) + 0.02 * oracle::momentum_power(wide, 2) +
                   0.001 * oracle::momentum_power(wide, 3);
  CHECK(max_abs(build_observable(spec, wide).matrix() - (0.5 * (G * Q + Q * G) + Matrix::Identity(15, 15))) < 1e-12);
}

TEST_CASE("observable spec rejections") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  CHECK_THROWS_AS(build_observable(term(std::vector<Harmonic>{{0, 1.0}}, std::nullopt), b), InvalidInput);
  CHECK_THROWS_AS(build_observable(term(std::nullopt, std::vector<double>(8, 1.0)), b), InvalidInput);
  CHECK_THROWS_AS(build_observable(term(std::vector<Harmonic>{{1, 0.5}}, std::vector<double>{0.0, 1.0}, false), b), InvalidInput);
  CHECK_THROWS_AS(build_observable(term(std::nullopt, std::nullopt), b), InvalidInput);
  CHECK_NOTHROW(build_observable(term(std::vector<Harmonic>{{1, 0.5}}, std::nullopt, false), b));
}

TEST_CASE("cell periodicity check") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  const TranslationOperator t(b);
  for (std::string_view name : kNamedObservables) {
    const PeriodicityReport r = check_cell_periodicity(build_observable(named_observable(name), b), t);
    CHECK(r.is_cell_periodic);
    CHECK(r.max_violation < 1e-14);
  }
  const PeriodicityReport id = check_cell_periodicity(HermitianOperator(Matrix::Identity(9, 9)), t);
  CHECK(id.is_cell_periodic);
  CHECK(id.max_violation == 0.0);

  const HermitianOperator ring = breaking_observable(1, b);
  const PeriodicityReport br = check_cell_periodicity(ring, t);
  CHECK_FALSE(br.is_cell_periodic);
  CHECK(br.max_violation > 0.5);
  // Direct T O T† − O with the dense translation matrix.
  const Matrix tt = oracle::dense_translation(b);
  const double direct = max_abs(tt * ring.matrix() * tt.adjoint() - ring.matrix()) / ring.max_abs();
  CHECK(direct == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(br.max_violation == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("seeded observables") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  const TranslationOperator t(b);
  const HermitianOperator a = random_cell_periodic(1, b, 2, 2);
  const HermitianOperator a2 = random_cell_periodic(1, b, 2, 2);
  CHECK((a.matrix().array() == a2.matrix().array()).all());

  // Frozen regression values for the (N=3, M=4, J=2, degree 2) generator.
  const HermitianOperator c = random_cell_periodic(2, b, 2, 2);
  CHECK(max_abs(a.matrix() - c.matrix()) == doctest::Approx(0.94811872282396514).epsilon(1e-14));
  CHECK(a.matrix()(0, 0).real() == doctest::Approx(0.33448400112966481).epsilon(1e-14));
  CHECK(a.matrix()(4, 1).real() == doctest::Approx(0.030846881587001364).epsilon(1e-13));
  CHECK(a.matrix()(4, 1).imag() == doctest::Approx(-0.44122121397205699).epsilon(1e-14));
  CHECK(a.matrix()(8, 2).real() == doctest::Approx(0.97360247307927306).epsilon(1e-14));
  CHECK(c.matrix()(0, 0).real() == doctest::Approx(-0.61363472169430033).epsilon(1e-14));
  CHECK(c.matrix()(7, 4).imag() == doctest::Approx(-0.85578141209206948).epsilon(1e-14));

  for (auto [n, m] : {std::pair{3, 4}, {5, 7}, {7, 10}}) {
    const PlaneWaveBasis bb(fixture::lattice(n, m));
    const TranslationOperator tt(bb);
    const int j_max = std::min(2, (bb.dimension() - 1) / n);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const HermitianOperator o = random_cell_periodic(seed, bb, j_max, 2);
      CHECK(hermiticity_defect(o.matrix()) < 1e-14);
      CHECK(off_class_max(o.matrix(), bb) == 0.0);
      CHECK(o.max_abs() == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(check_cell_periodicity(o, tt).is_cell_periodic);
    }
  }
  CHECK_THROWS_AS(random_cell_periodic(1, b, 3, 2), InvalidInput);
  CHECK_THROWS_AS(random_cell_periodic(1, b, 1, 7), InvalidInput);
}

TEST_CASE("periodic observables form an algebra") {
  const PlaneWaveBasis b(fixture::lattice(5, 7));
  const TranslationOperator t(b);
  const Matrix x = random_cell_periodic(3, b, 1, 2).matrix();
  const Matrix y = build_observable(named_observable("sin"), b).matrix();
  const HermitianOperator sum(x + 0.7 * y);
  const HermitianOperator prod(Matrix(0.5 * (x * y + y * x)));
  CHECK(check_cell_periodicity(sum, t).is_cell_periodic);
  CHECK(check_cell_periodicity(prod, t).is_cell_periodic);
  CHECK(off_class_max(prod.matrix(), b) < 1e-12 * prod.max_abs());
}

TEST_CASE("breaking observables") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  const HermitianOperator o = breaking_observable(1, b);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) CHECK(o.matrix()(r, c) == cplx(std::abs(b.index(r) - b.index(c)) == 1 ? 1.0 : 0.0));
  // Class pairs that receive a coupling.
  std::set<std::pair<int, int>> pairs;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c)
      if (o.matrix()(r, c) != cplx(0.0)) pairs.insert({b.wavevector_class(r), b.wavevector_class(c)});
  CHECK(pairs == std::set<std::pair<int, int>>{{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 0}, {0, 2}});

  const TranslationOperator t(b);
  for (auto [n, m] : {std::pair{3, 4}, {5, 7}, {7, 10}}) {
    const PlaneWaveBasis bb(fixture::lattice(n, m));
    const TranslationOperator tt(bb);
    for (int s = 1; s < n; ++s) CHECK_FALSE(check_cell_periodicity(breaking_observable(s, bb), tt).is_cell_periodic);
  }
  CHECK_THROWS_AS(breaking_observable(3, b), InvalidInput);
  CHECK_THROWS_AS(breaking_observable(0, b), InvalidInput);
  CHECK_THROWS_AS(breaking_observable(9, b), InvalidInput);
}

TEST_CASE("named observables and battery") {
  const PlaneWaveBasis b(fixture::lattice(3, 4));
  CHECK(max_abs(build_observable(named_observable("identity"), b).matrix() - Matrix::Identity(9, 9)) == 0.0);
  CHECK(max_abs(build_observable(named_observable("cos"), b).matrix() - oracle::fourier_multiplier(b, {{1, 0.5}})) == 0.0);
  CHECK(max_abs(build_observable(named_observable("sin"), b).matrix() - oracle::fourier_multiplier(b, {{1, cplx(0.0, -0.5)}})) == 0.0);
  CHECK(max_abs(build_observable(named_observable("p"), b).matrix() - oracle::momentum_power(b, 1)) < 1e-15);
  CHECK_THROWS_AS(named_observable("tan"), InvalidInput);

  const Battery battery = make_battery(BatterySpec{}, b);
  REQUIRE(battery.size() == 25);
  CHECK(battery.front().id == "seed:1");
  CHECK(battery[19].id == "seed:20");
  CHECK(battery[20].id == "identity");
  CHECK(battery.back().id == "p2");
  for (const NamedOperator& o : battery) CHECK(o.op.periodicity() == Periodicity::cell_periodic);
}
