#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace sslab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Largest modulus over all entries; 0 for an empty matrix.
double max_abs(const Matrix& m);

/// Max-abs distance from hermiticity, ‖M − M†‖_max.
double hermiticity_defect(const Matrix& m);

/// ‖M†M − I‖_max.
double unitarity_defect(const Matrix& m);

/// Position of the largest-modulus entry. Entries within `rel_tie` of the
/// maximum count as ties and the lowest position wins.
Eigen::Index dominant_position(const Vector& v, double rel_tie = 1e-12);

/// Multiplies `v` by a unit phase so its dominant entry is real and positive.
void fix_phase(Vector& v);

/// Canonical orthonormal basis of the span of the (orthonormal) columns of
/// `cluster`, depending only on that subspace. Basis vectors are chosen by
/// greedily projecting unit vectors: at each step the unit vector with the
/// largest remaining projection (ties to the lowest position) is projected,
/// normalized and deflated. The result is ordered by dominant position and
/// phase-fixed.
Matrix canonical_subspace_basis(const Matrix& cluster);

}  // namespace sslab
