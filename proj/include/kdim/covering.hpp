#pragma once

// Covering numbers for the loss class {x -> min_y ||x - Ty||^2}: closed-form
// upper bounds on ln N_1(F, xi', n), the explicit parameter-grid net behind
// them, and empirical cover estimators used to sanity-check the bounds on
// instances small enough to enumerate.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdim/scheme.hpp"

namespace kdim {

struct CoverReport {
  double ln_theoretical = 0.0;
  std::optional<std::int64_t> empirical_size;
  double xi_prime = 0.0;  // loss-space radius
  double xi = 0.0;        // parameter-space grid width
  std::optional<std::int64_t> net_size;
  std::string notes;
};

std::string to_json_string(const CoverReport& report);

// ln of the covering-number bound at loss resolution xi_prime. Clamped at 0
// (a single function always covers a bounded class at large xi_prime); when
// the clamp fires and `note` is non-null it receives an explanation.
double ln_cover_bound(const SchemeSpec& spec, double xi_prime, std::string* note = nullptr);

// Conversion factor F with xi_prime = F * xi between a parameter-space grid
// of width xi and the loss-space radius it certifies.
double lipschitz_xi_factor(const SchemeSpec& spec);

// The grid net on [-c, c]^{m x k}: every entry drawn from the q = ceil(2c/xi)
// cell centers -c + xi/2 + i*xi. Matrices are enumerated by index in base-q
// digit order (entry (row, col) = digit col*m + row, least significant first).
class GridNet {
 public:
  GridNet(int m, int k, double c, double xi);  // throws when size would exceed 10^6

  std::uint64_t size() const { return size_; }
  int cells_per_axis() const { return q_; }
  double center(int cell) const;
  Eigen::MatrixXd matrix(std::uint64_t index) const;

 private:
  int m_, k_, q_;
  double c_, xi_;
  std::uint64_t size_;
};

std::vector<ImplementationMatrix> build_grid_net(int m, int k, double c, double xi);

// Greedy set cover over loss rows (rows = functions, columns = sample
// points): repeatedly picks the row covering the most uncovered rows within
// average-l1 distance xi_prime (ties: lowest index). Returns an upper bound
// on the minimal cover size.
std::int64_t empirical_cover_number(const Eigen::MatrixXd& loss_rows, double xi_prime);

// Exact minimal cover by subset DP; refuses more than 20 rows.
std::int64_t exact_cover_number(const Eigen::MatrixXd& loss_rows, double xi_prime);

}  // namespace kdim
