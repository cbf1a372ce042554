#ifndef KDIM_BOUNDS_HPP
#define KDIM_BOUNDS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdim/scheme.hpp"

namespace kdim {

// A bound formula was evaluated outside the regime where its logarithms /
// exponents are defined.
struct RegimeError : std::domain_error {
  using std::domain_error::domain_error;
};

// Inputs shared by the closed-form bound evaluators. m, k, n are kept as
// reals so sweeps and crossover bisection can treat them continuously.
struct BoundParams {
  double m = 1.0;
  double k = 1.0;
  double n = 1.0;
  double delta = 0.05;
  double r = 1.0;
  double c = 1.0;
  double b = 1.0;
  double s = 0.0;  // sparse coding
  double p = 2.0;  // sparse coding
  std::optional<double> empirical_risk;  // Bernstein-type bounds
  std::optional<double> lambda;          // risk-bound multiplier
  std::optional<double> V;               // Bennett variance proxy
  std::optional<double> beta;            // Bennett beta (default 2 at call sites)

  void validate() const;  // throws std::invalid_argument
  static BoundParams from_spec(const SchemeSpec& spec, double n, double delta);
};

// Bennett's exponent kernel h(x) = (1+x)ln(1+x) - x.
double bennett_h(double x);

// Two-sided tail bounds for a mean of n iid terms in a range of width B with
// variance proxy V. Values may exceed 1 (vacuous regime); they are raw
// formula values, not clipped probabilities.
double hoeffding_tail(double n, double eps, double B);
double bernstein_tail(double n, double eps, double V, double B);
double bennett_tail(double n, double eps, double V, double B);

// Gap bound with the k^2-type Rademacher complexity term:
// (4crk + 2c^2k^2) sqrt(pi/n) + b sqrt(8 ln(2/delta) / n).
double bound_mp_theorem1(const BoundParams& params);

// Gap bound driven by the codebook operator norm; finite_dim swaps the middle
// term k/2 sqrt(ln(16 n normY^2)/n) for 1/2 sqrt(mk ln(16 n normY^2)/n).
double bound_mp_theorem2(const BoundParams& params, double norm_y, bool finite_dim);

// Dimensionality-dependent gap bounds built from the parameter-grid covering
// argument: Hoeffding-type, Bernstein-type (needs empirical_risk), and the
// lambda risk bound (1+lambda) R_n + ... which bounds R(T) itself.
double bound_main_one(const BoundParams& params);
double bound_main_two(const BoundParams& params);
double bound_prop_lambda(const BoundParams& params);

// Implicit Bennett exponent 1 / (2 - ln(8 beta V / 3) / ln(gap)); defined for
// 0 < 8 beta V <= 3 and gap in (0, 1). Exactly 1/2 on the boundary
// 8 beta V = 3 and in the gap -> 0 limit.
double bennett_exponent(double beta, double V, double gap);

struct BennettEval {
  double value = 0.0;
  double exponent = 0.5;
  double gap = 0.0;        // the gap the exponent was evaluated at
  bool converged = true;   // always true in given-gap mode
  int iterations = 0;
};

// Bennett-type bound 2/n + ((A + ln(2/delta)) / (beta n))^exponent with the
// implicit exponent above. Given-gap mode evaluates at a caller-supplied gap;
// self-consistent mode iterates gap <- bound(gap) from the Hoeffding-type
// bound value until |change| < 1e-10 or 100 iterations.
BennettEval bound_main_three_given(const BoundParams& params, double gap);
BennettEval bound_main_three_self_consistent(const BoundParams& params);

// Fixed registry of named bounds usable in reports, figures and gap checks.
namespace bound_names {
inline constexpr const char* kCoverHoeffding = "cover_hoeffding";
inline constexpr const char* kCoverBernstein = "cover_bernstein";
inline constexpr const char* kMaurerPontilK2 = "maurer_pontil_k2";
inline constexpr const char* kNmfCover = "nmf_cover";
inline constexpr const char* kNmfMaurerPontil = "nmf_maurer_pontil";
inline constexpr const char* kNmfGribonval = "nmf_gribonval";
inline constexpr const char* kSparseCover = "sparse_cover";
inline constexpr const char* kSparseMaurerPontil = "sparse_maurer_pontil";
inline constexpr const char* kSparseGribonval = "sparse_gribonval";
inline constexpr const char* kKmeansCover = "kmeans_cover";
inline constexpr const char* kKmeansMaurerPontil = "kmeans_maurer_pontil";
inline constexpr const char* kKmeansGribonval = "kmeans_gribonval";
}  // namespace bound_names

// Evaluate a registry bound at the given parameters. Throws RegimeError /
// std::invalid_argument outside the valid regime.
double evaluate_bound(const std::string& name, const BoundParams& params);

struct BoundEntry {
  std::string name;
  double value = 0.0;
  double capped = 0.0;  // min(value, b)
  bool applicable = false;
  std::string notes;
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  const BoundEntry* find(const std::string& name) const;
};

// Every registry bound evaluated at the spec's parameters; rows for other
// schemes and for unmet preconditions are marked inapplicable with a note.
BoundReport scheme_bounds(const SchemeSpec& spec, double n, double delta,
                          std::optional<double> empirical_risk = std::nullopt);

std::string to_csv_string(const BoundReport& report);
std::string to_json_string(const BoundReport& report);

}  // namespace kdim

#endif
