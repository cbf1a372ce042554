#ifndef KDIM_ERM_HPP
#define KDIM_ERM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kdim/encoders.hpp"
#include "kdim/scheme.hpp"

namespace kdim {

struct TrainReport {
  ImplementationMatrix T;
  double empirical_risk = 0.0;
  std::vector<double> risk_trace;  // one entry per outer evaluation, final = empirical_risk
  int iterations = 0;              // outer iterations performed
  bool monotone = true;            // descent held within 1e-9 at every step
  bool encoders_converged = true;  // quality flag, non-fatal
};

std::string to_json_string(const TrainReport& report);

// (1/n) sum of encode(x_i, T).loss; sample columns are points. Encoder
// non-convergence is reported through all_converged, never thrown.
double empirical_risk(const ImplementationMatrix& T,
                      const Eigen::Ref<const Eigen::MatrixXd>& sample,
                      const ConstraintSet& constraint, double tol = kEncodeTol,
                      bool* all_converged = nullptr);

struct NormalizeResult {
  ImplementationMatrix T;
  Eigen::VectorXd scales;      // original column norms (1 for zero columns)
  bool had_zero_column = false;
};

// Rescale nonzero columns to unit norm; T_original = T_normalized * diag(scales).
NormalizeResult normalize_columns(const ImplementationMatrix& T);

// Uniform random feasible implementation for the scheme (used as the default
// train initializer and for candidate sets).
ImplementationMatrix random_feasible(const SchemeSpec& spec, std::uint64_t seed);

// Alternating minimization: encode all points, then update T (Lloyd means for
// k-means, exact least squares + column clipping otherwise, plus the NMF
// non-negativity clamp and column normalization). Stops at outer_iters or when
// the risk improves by less than 1e-10.
TrainReport train(const SchemeSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& sample,
                  int outer_iters, std::uint64_t seed,
                  const std::optional<ImplementationMatrix>& init = std::nullopt);

}  // namespace kdim

#endif
