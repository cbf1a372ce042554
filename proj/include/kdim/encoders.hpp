#ifndef KDIM_ENCODERS_HPP
#define KDIM_ENCODERS_HPP

#include <Eigen/Core>
#include <string>

#include "kdim/scheme.hpp"

namespace kdim {

inline constexpr double kEncodeTol = 1e-8;
inline constexpr int kEncodeMaxIters = 10000;

struct EncodeResult {
  Eigen::VectorXd code;
  double loss = 0.0;
  int iterations = 0;
  bool converged = true;
  std::string note;  // non-fatal quality warnings
};

std::string to_json_string(const EncodeResult& result);

// Nearest column, exact. Ties broken by lowest column index.
EncodeResult encode_kmeans(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const ImplementationMatrix& T);

// Non-negative least squares by projected gradient; converged when the KKT
// residual of ||x - Ty||^2 drops below tol in the infinity norm. Negative
// entries in x are allowed (noted, the objective stays convex).
EncodeResult encode_nmf(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const ImplementationMatrix& T, double tol = kEncodeTol);

// min ||x - Ty||^2 over ||y|| <= radius. Interior case: minimum-norm least
// squares. Boundary case: secular equation in the Lagrange multiplier,
// bisected to tol.
EncodeResult encode_l2ball(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const ImplementationMatrix& T, double radius,
                           double tol = kEncodeTol);

// lp-ball codebooks, p in {1, 2, inf}. p=2 delegates to encode_l2ball; p=1
// projected gradient with exact sort-based ball projection; p=inf projected
// gradient with clamping.
EncodeResult encode_lp_ball(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const ImplementationMatrix& T, double s, double p,
                            double tol = kEncodeTol);

// Dispatch on the constraint kind.
EncodeResult encode(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const ImplementationMatrix& T, const ConstraintSet& constraint,
                    double tol = kEncodeTol);

// Independent oracle: exhaustive grid search over the constraint set at
// resolution grid_step (grid includes 0). k <= 3 enforced. The result is an
// upper bound on the true minimum within Lipschitz slack O(grid_step).
double brute_force_encode(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const ImplementationMatrix& T, const ConstraintSet& constraint,
                          double grid_step);

// Exact Euclidean projection onto {v : ||v||_1 <= s} (sort-based).
Eigen::VectorXd project_l1_ball(const Eigen::Ref<const Eigen::VectorXd>& v, double s);

}  // namespace kdim

#endif
