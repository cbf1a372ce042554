#include "kdim/covering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace kdim {

std::string to_json_string(const CoverReport& report) {
  nlohmann::json j;
  j["ln_theoretical"] = report.ln_theoretical;
  if (report.empirical_size)
    j["empirical_size"] = *report.empirical_size;
  else
    j["empirical_size"] = nullptr;
  j["xi_prime"] = report.xi_prime;
  j["xi"] = report.xi;
  if (report.net_size)
    j["net_size"] = *report.net_size;
  else
    j["net_size"] = nullptr;
  j["notes"] = report.notes;
  return j.dump();
}

double ln_cover_bound(const SchemeSpec& spec, double xi_prime, std::string* note) {
  spec.validate();
  if (!(xi_prime > 0.0)) throw std::invalid_argument("xi_prime must be > 0");
  const double m = spec.m;
  const double k = spec.k;
  const double r = spec.r;
  const double c = spec.c;
  double constant = 0.0;
  switch (spec.scheme) {
    case Scheme::NMF:
      constant = 2.0 * (r + c * k) * std::sqrt(m) * c * k;
      break;
    case Scheme::SparseCoding: {
      const double kp = std::pow(k, 1.0 - 1.0 / spec.p);
      constant = 4.0 * (r * spec.s + c * spec.s * spec.s * kp) * std::sqrt(m) * c * kp;
      break;
    }
    case Scheme::KMeans:
      constant = 8.0 * r * r * std::sqrt(m);
      break;
    case Scheme::DictionaryLearning:
      constant = 4.0 * (r + c * k) * std::sqrt(m) * c * k;
      break;
  }
  const double arg = constant / xi_prime;
  if (!(arg > 1.0)) {
    if (note) *note = "log argument <= 1; clamped at 0 (a single-function cover suffices)";
    return 0.0;
  }
  return m * k * std::log(arg);
}

double lipschitz_xi_factor(const SchemeSpec& spec) {
  spec.validate();
  const double m = spec.m;
  const double k = spec.k;
  switch (spec.scheme) {
    case Scheme::KMeans:
      return 2.0 * spec.r * std::sqrt(m);
    case Scheme::SparseCoding: {
      const double kp = std::pow(k, 1.0 - 1.0 / spec.p);
      return (spec.r * spec.s + spec.c * spec.s * spec.s * kp) * std::sqrt(m) * kp;
    }
    default:
      return (spec.r + spec.c * k) * std::sqrt(m) * k;
  }
}

GridNet::GridNet(int m, int k, double c, double xi) : m_(m), k_(k), c_(c), xi_(xi) {
  if (m < 1 || k < 1) throw std::invalid_argument("grid net needs m, k >= 1");
  if (!(c > 0.0) || !(xi > 0.0)) throw std::invalid_argument("grid net needs c, xi > 0");
  q_ = static_cast<int>(std::ceil(2.0 * c / xi));
  if (q_ < 1) q_ = 1;

  constexpr std::uint64_t kLimit = 1000000;
  long double required = 1.0L;
  for (int i = 0; i < m * k; ++i) required *= q_;
  if (required > static_cast<long double>(kLimit))
    throw std::invalid_argument("grid net would hold " + std::to_string(static_cast<double>(required)) +
                                " matrices; limit is " + std::to_string(kLimit));
  size_ = 1;
  for (int i = 0; i < m * k; ++i) size_ *= static_cast<std::uint64_t>(q_);
}

double GridNet::center(int cell) const {
  if (cell < 0 || cell >= q_) throw std::out_of_range("grid cell index");
  return -c_ + xi_ / 2.0 + cell * xi_;
}

Eigen::MatrixXd GridNet::matrix(std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("grid net index");
  Eigen::MatrixXd T(m_, k_);
  for (int col = 0; col < k_; ++col) {
    for (int row = 0; row < m_; ++row) {
      T(row, col) = center(static_cast<int>(index % q_));
      index /= q_;
    }
  }
  return T;
}

std::vector<ImplementationMatrix> build_grid_net(int m, int k, double c, double xi) {
  GridNet net(m, k, c, xi);
  std::vector<ImplementationMatrix> out;
  out.reserve(static_cast<size_t>(net.size()));
  for (std::uint64_t i = 0; i < net.size(); ++i) out.emplace_back(net.matrix(i));
  return out;
}

namespace {

// Pairwise average-l1 distances between loss rows.
Eigen::MatrixXd row_distances(const Eigen::MatrixXd& loss_rows) {
  const Eigen::Index n_rows = loss_rows.rows();
  const Eigen::Index n_cols = loss_rows.cols();
  if (n_rows == 0 || n_cols == 0) throw std::invalid_argument("cover needs a nonempty loss matrix");
  if (!loss_rows.allFinite()) throw std::invalid_argument("cover needs finite loss values");
  Eigen::MatrixXd dist(n_rows, n_rows);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n_rows; ++j) {
      const double d = (loss_rows.row(i) - loss_rows.row(j)).cwiseAbs().sum() / double(n_cols);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

}  // namespace

std::int64_t empirical_cover_number(const Eigen::MatrixXd& loss_rows, double xi_prime) {
  if (!(xi_prime > 0.0)) throw std::invalid_argument("xi_prime must be > 0");
  const Eigen::MatrixXd dist = row_distances(loss_rows);
  const Eigen::Index n = dist.rows();
  std::vector<bool> covered(static_cast<size_t>(n), false);
  Eigen::Index remaining = n;
  std::int64_t centers = 0;
  while (remaining > 0) {
    Eigen::Index best = -1;
    Eigen::Index best_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index count = 0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (!covered[static_cast<size_t>(j)] && dist(i, j) <= xi_prime) ++count;
      if (count > best_count) {  // ties keep the lowest index
        best_count = count;
        best = i;
      }
    }
    // every uncovered row covers itself, so best_count >= 1
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!covered[static_cast<size_t>(j)] && dist(best, j) <= xi_prime) {
        covered[static_cast<size_t>(j)] = true;
        --remaining;
      }
    }
    ++centers;
  }
  return centers;
}

std::int64_t exact_cover_number(const Eigen::MatrixXd& loss_rows, double xi_prime) {
  if (!(xi_prime > 0.0)) throw std::invalid_argument("xi_prime must be > 0");
  const Eigen::MatrixXd dist = row_distances(loss_rows);
  const int n = static_cast<int>(dist.rows());
  if (n > 20) throw std::invalid_argument("exact cover limited to 20 rows");

  std::vector<std::uint32_t> reach(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dist(i, j) <= xi_prime) reach[static_cast<size_t>(i)] |= (1u << j);

  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  std::vector<std::uint8_t> dp(static_cast<size_t>(full) + 1, 255);
  dp[0] = 0;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if (dp[mask] == 255) continue;
    int e = 0;
    while (mask & (1u << e)) ++e;  // lowest uncovered row
    for (int i = 0; i < n; ++i) {
      if (!(reach[static_cast<size_t>(i)] & (1u << e))) continue;
      const std::uint32_t next = mask | reach[static_cast<size_t>(i)];
      if (dp[next] > dp[mask] + 1) dp[next] = static_cast<std::uint8_t>(dp[mask] + 1);
    }
  }
  return dp[full];
}

}  // namespace kdim
