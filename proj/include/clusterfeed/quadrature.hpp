#pragma once

#include <vector>

namespace clusterfeed {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order (Newton iteration on P_n).
GaussRule gauss_legendre(int order);

}  // namespace clusterfeed
