#include "sslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sslab {

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, std::abs(m(i, j)));
  return best;
}

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

double unitarity_defect(const Matrix& m) {
  return max_abs(m.adjoint() * m - Matrix::Identity(m.cols(), m.cols()));
}

Eigen::Index dominant_position(const Vector& v, double rel_tie) {
  double peak = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) peak = std::max(peak, std::abs(v(i)));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) >= peak * (1.0 - rel_tie)) return i;
  return 0;
}

void fix_phase(Vector& v) {
  if (v.size() == 0) return;
  const cplx c = v(dominant_position(v));
  if (std::abs(c) == 0.0) return;
  v *= std::conj(c) / std::abs(c);
}

Matrix canonical_subspace_basis(const Matrix& cluster) {
  const Eigen::Index n = cluster.rows();
  const Eigen::Index g = cluster.cols();
  if (g == 1) {
    Vector v = cluster.col(0);
    v.normalize();
    fix_phase(v);
    return v;
  }

  Matrix projector = cluster * cluster.adjoint();
  Matrix basis(n, g);
  for (Eigen::Index c = 0; c < g; ++c) {
    // Projected norm² of unit vector e_i is the diagonal entry P(i,i).
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) best = std::max(best, projector(i, i).real());
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (projector(i, i).real() >= best - 1e-12) {
        pick = i;
        break;
      }
    }
    Vector v = projector.col(pick);
    v.normalize();
    basis.col(c) = v;
    projector -= v * v.adjoint();
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(g));
  std::vector<Eigen::Index> dominant(static_cast<std::size_t>(g));
  for (Eigen::Index c = 0; c < g; ++c) dominant[static_cast<std::size_t>(c)] = dominant_position(basis.col(c));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return dominant[static_cast<std::size_t>(x)] < dominant[static_cast<std::size_t>(y)];
  });

  Matrix out(n, g);
  for (Eigen::Index c = 0; c < g; ++c) {
    Vector v = basis.col(order[static_cast<std::size_t>(c)]);
    fix_phase(v);
    out.col(c) = v;
  }
  return out;
}

}  // namespace sslab
