#include "sslab/superselection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sslab/errors.hpp"

namespace sslab {

OverlapRecord matrix_element(const HermitianOperator& o, const BlochState& bra, const BlochState& ket,
                             std::string observable_id) {
  if (bra.coefficients.size() != o.dimension() || ket.coefficients.size() != o.dimension())
    throw InvalidInput("matrix_element: dimension mismatch");
  OverlapRecord r;
  r.bra = {bra.band, bra.wavevector_class};
  r.ket = {ket.band, ket.wavevector_class};
  r.observable = std::move(observable_id);
  r.value = bra.coefficients.dot(o.matrix() * ket.coefficients);
  r.magnitude = std::abs(r.value);
  return r;
}

FringeScan fringe_scan(const HermitianOperator& o, const Vector& a, const Vector& b, int points) {
  if (points < 8) throw InvalidInput("fringe scan needs at least 8 phase points");
  if (a.size() != o.dimension() || b.size() != o.dimension()) throw InvalidInput("fringe scan: dimension mismatch");
  if (std::abs(a.norm() - 1.0) > 1e-10 || std::abs(b.norm() - 1.0) > 1e-10)
    throw InvalidInput("fringe scan: states must have unit norm");

  FringeScan scan;
  scan.phases.reserve(static_cast<std::size_t>(points));
  scan.averages.reserve(static_cast<std::size_t>(points));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double lambda = kTwoPi * i / points;
    const Vector phi = a + std::polar(1.0, lambda) * b;
    const double norm2 = phi.squaredNorm();
    if (norm2 < 1e-12)
      throw InvalidInput("fringe scan: degenerate superposition at lambda = " + std::to_string(lambda));
    const double avg = phi.dot(o.matrix() * phi).real() / norm2;
    scan.phases.push_back(lambda);
    scan.averages.push_back(avg);
    lo = std::min(lo, avg);
    hi = std::max(hi, avg);
    sum += avg;
  }
  scan.amplitude = hi - lo;
  scan.mean = sum / points;
  return scan;
}

MixtureDiagnostic mixture_diagnostic(const Vector& a, const Vector& b, const Battery& battery) {
  if (a.size() != b.size()) throw InvalidInput("mixture diagnostic: dimension mismatch");
  if (std::abs(a.norm() - 1.0) > 1e-10 || std::abs(b.norm() - 1.0) > 1e-10)
    throw InvalidInput("mixture diagnostic: states must have unit norm");
  if (std::abs(a.dot(b)) >= 1e-10) throw InvalidInput("mixture diagnostic: states must be orthogonal");

  MixtureDiagnostic out;
  const Vector phi = a + b;
  out.superposition = phi * phi.adjoint() / phi.squaredNorm();
  out.mixture = 0.5 * (a * a.adjoint() + b * b.adjoint());
  const Matrix diff = out.superposition - out.mixture;
  for (const NamedOperator& entry : battery) {
    if (entry.op.dimension() != a.size()) throw InvalidInput("mixture diagnostic: battery dimension mismatch");
    const double scale = entry.op.max_abs();
    if (scale == 0.0) continue;
    const double value = std::abs((diff * entry.op.matrix()).trace()) / scale;
    if (out.witness.empty() || value > out.distinguishability) {
      out.distinguishability = value;
      out.witness = entry.id;
    }
  }
  return out;
}

SectorReport sector_decomposition_report(std::span<const BlochState> states, const Battery& battery) {
  SectorReport report;
  if (states.empty()) return report;
  int cells = 0;
  for (const BlochState& s : states) cells = std::max(cells, s.wavevector_class + 1);
  report.cells = cells;
  report.leakage = Eigen::MatrixXd::Zero(cells, cells);
  for (int l = 0; l < cells; ++l) report.leakage(l, l) = std::numeric_limits<double>::quiet_NaN();

  const Eigen::Index d = states.front().coefficients.size();
  Matrix psi(d, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) psi.col(static_cast<Eigen::Index>(i)) = states[i].coefficients;

  for (const NamedOperator& entry : battery) {
    const double scale = entry.op.max_abs();
    if (scale == 0.0) continue;
    const Matrix elements = psi.adjoint() * entry.op.matrix() * psi;
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (std::size_t j = 0; j < states.size(); ++j) {
        const int ci = states[i].wavevector_class;
        const int cj = states[j].wavevector_class;
        if (ci == cj) continue;
        const double v = std::abs(elements(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) / scale;
        report.leakage(ci, cj) = std::max(report.leakage(ci, cj), v);
      }
    }
  }
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      if (i != j) report.max_off_diagonal = std::max(report.max_off_diagonal, report.leakage(i, j));
  return report;
}

double wannier_mixture_deviation(const Vector& wannier, std::span<const BlochState> band_states,
                                 const Battery& battery) {
  if (band_states.empty()) throw InvalidInput("wannier mixture check needs band states");
  double worst = 0.0;
  const double n = static_cast<double>(band_states.size());
  for (const NamedOperator& entry : battery) {
    const Matrix& o = entry.op.matrix();
    const cplx coherent = wannier.dot(o * wannier);
    cplx mixed{};
    for (const BlochState& s : band_states) mixed += s.coefficients.dot(o * s.coefficients);
    worst = std::max(worst, std::abs(coherent - mixed / n));
  }
  return worst;
}

}  // namespace sslab
