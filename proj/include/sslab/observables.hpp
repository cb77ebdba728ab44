#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sslab/spectral.hpp"

namespace sslab {

/// One term f(x)·P(p). A missing part is the identity. When both parts are
/// present the term is realized as (F·P + P·F)/2.
struct ObservableTerm {
  std::optional<std::vector<Harmonic>> f;   // entries c·e^{i2πjx/a} + c.c., j ≠ 0
  std::optional<std::vector<double>> p_poly;  // Σ_i c_i p^i, degree ≤ 6
};

struct ObservableSpec {
  std::vector<ObservableTerm> terms;
  bool symmetrize = true;
};

inline constexpr int kMaxMomentumDegree = 6;

HermitianOperator build_observable(const ObservableSpec& spec, const PlaneWaveBasis& basis);

struct PeriodicityReport {
  double max_violation = 0.0;  // ‖T O T† − O‖_max / ‖O‖_max
  bool is_cell_periodic = false;
};

PeriodicityReport check_cell_periodicity(const HermitianOperator& o, const TranslationOperator& t,
                                         double tolerance = 1e-12);

/// Seeded cell-periodic observable: sym(F1·P1) + F2 + P2 with harmonics
/// 1..max_harmonic and momentum polynomials of the given degree, all
/// coefficients drawn from SplitMix64(seed) in [−1, 1) (polynomial
/// coefficient i scaled by p_max^{−i}), then divided by its max-abs entry.
HermitianOperator random_cell_periodic(std::uint64_t seed, const PlaneWaveBasis& basis, int max_harmonic, int degree);

/// Ring harmonic e^{i2πsx/L} + h.c.: ones at Δm = ±s. Couples class l to
/// class (l ± s) mod N. s must satisfy 1 ≤ s ≤ D−1 and s ≢ 0 (mod N).
HermitianOperator breaking_observable(int s, const PlaneWaveBasis& basis);

/// Named observables: "identity", "cos", "sin", "p", "p2".
ObservableSpec named_observable(std::string_view name);
inline constexpr std::string_view kNamedObservables[] = {"identity", "cos", "sin", "p", "p2"};

struct NamedOperator {
  std::string id;
  HermitianOperator op;
};
using Battery = std::vector<NamedOperator>;

struct BatterySpec {
  int seeds = 20;
  std::uint64_t first_seed = 1;
  int max_harmonic = 2;
  int degree = 2;
  std::vector<std::string> named{"identity", "cos", "sin", "p", "p2"};
};

/// Seeded operators ("seed:<n>") followed by the named ones.
Battery make_battery(const BatterySpec& spec, const PlaneWaveBasis& basis);

}  // namespace sslab
