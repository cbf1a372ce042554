#ifndef KDIM_SAMPLING_HPP
#define KDIM_SAMPLING_HPP

#include <Eigen/Core>
#include <cmath>

#include "kdim/rng.hpp"

namespace kdim {

// Uniform draw from the radius-r ball: normalized Gaussian direction scaled
// by r * U^{1/m}.
inline Eigen::VectorXd uniform_ball(RngStream& rng, int m, double r) {
  Eigen::VectorXd g(m);
  for (int i = 0; i < m; ++i) g[i] = rng.next_normal();
  double norm = g.norm();
  if (norm <= 0.0) {  // measure-zero degenerate direction
    g.setZero();
    g[0] = 1.0;
    norm = 1.0;
  }
  const double scale = r * std::pow(rng.next_double(), 1.0 / double(m)) / norm;
  return g * scale;
}

// Uniform ball draw folded into the non-negative orthant; the fold preserves
// the norm, so samples stay inside the radius-r ball.
inline Eigen::VectorXd uniform_orthant_ball(RngStream& rng, int m, double r) {
  return uniform_ball(rng, m, r).cwiseAbs();
}

}  // namespace kdim

#endif
