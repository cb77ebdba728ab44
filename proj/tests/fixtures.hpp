#pragma once

#include <vector>

#include "sslab/spectral.hpp"

namespace fixture {

inline sslab::LatticeSpec lattice(int cells, int cutoff, double a = 1.0) {
  sslab::LatticeSpec s;
  s.lattice_constant = a;
  s.cells = cells;
  s.cutoff = cutoff;
  return s;
}

inline sslab::PotentialSpec free_particle() { return {}; }

// V = 2v·cos(2πx/a) (+ 2w·cos(4πx/a)).
inline sslab::PotentialSpec mathieu(double v, double w = 0.0) {
  std::vector<sslab::Harmonic> h{{1, v}};
  if (w != 0.0) h.push_back({2, w});
  return sslab::PotentialSpec(0.0, h);
}

}  // namespace fixture
