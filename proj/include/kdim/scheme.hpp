#ifndef KDIM_SCHEME_HPP
#define KDIM_SCHEME_HPP

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

namespace kdim {

enum class Scheme { NMF, DictionaryLearning, SparseCoding, KMeans };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

// Shared problem description: coding scheme, dimensions, radii and norm caps.
// Conventions: data lives in the ball of radius r, implementation columns are
// capped at norm c, sparse codes satisfy ||y||_p <= s, losses are treated as
// bounded by b in the concentration steps.
struct SchemeSpec {
  Scheme scheme = Scheme::DictionaryLearning;
  int m = 1;
  int k = 1;
  double r = 1.0;
  double c = 1.0;
  double s = 0.0;  // sparse coding only
  double p = 2.0;  // sparse coding only; may be infinity
  double b = 1.0;

  void validate() const;  // throws std::invalid_argument
};

// Analytic worst case of the reconstruction error f_T over the scheme's
// feasible (x, T): general/dictionary r^2 + c^2 k^2, NMF r^2 (code 0 always
// competes), sparse (r + s c k^{1-1/p})^2, k-means (2r)^2 with centers inside
// the data ball.
double worst_case_loss_bound(const SchemeSpec& spec);

// Operator norm of T restricted to the codebook, sup_{y in Y} ||Ty|| per
// column-norm cap c: NMF c*sqrt(k), sparse s*c*k^{1-1/p}, L2-ball dictionary
// learning c*k, k-means c.
double operator_norm_on_Y(const SchemeSpec& spec);

std::string to_json_string(const SchemeSpec& spec);
SchemeSpec scheme_spec_from_json_string(const std::string& text);

// Dense m x k implementation; columns are atoms/centers. Immutable after
// construction, column norms cached once.
class ImplementationMatrix {
 public:
  ImplementationMatrix() = default;
  explicit ImplementationMatrix(Eigen::MatrixXd entries)
      : entries_(std::move(entries)), column_norms_(entries_.colwise().norm()) {}

  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::VectorXd& column_norms() const { return column_norms_; }
  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }

  // column norms <= c + slack, entries >= 0 for NMF
  bool feasible_for(const SchemeSpec& spec, double slack = 1e-9) const;

 private:
  Eigen::MatrixXd entries_;
  Eigen::VectorXd column_norms_;
};

// Codebook Y.
struct ConstraintSet {
  enum class Kind { NonNegOrthant, L2Ball, LpBall, StandardBasis };
  Kind kind = Kind::L2Ball;
  double radius = 1.0;  // ball kinds
  double index = 2.0;   // LpBall only

  static ConstraintSet non_neg_orthant();
  static ConstraintSet l2_ball(double radius);
  static ConstraintSet lp_ball(double radius, double index);
  static ConstraintSet standard_basis();
  static ConstraintSet for_scheme(const SchemeSpec& spec);

  void validate() const;
};

// Sampling distribution supported on the radius-r ball.
struct DistributionSpec {
  enum class Kind { UniformBall, UniformPositiveOrthantBall, PointMixture };
  Kind kind = Kind::UniformBall;
  int m = 1;
  double r = 1.0;
  std::vector<Eigen::VectorXd> atoms;  // PointMixture
  std::vector<double> weights;         // PointMixture, sums to 1

  void validate() const;
};

std::string to_json_string(const DistributionSpec& dist);
DistributionSpec distribution_from_json_string(const std::string& text);

}  // namespace kdim

#endif
