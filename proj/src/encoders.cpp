#include "kdim/encoders.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace kdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest eigenvalue of T^T T by 50 power iterations (ramped start breaks
// accidental orthogonality with the leading eigenvector).
double lipschitz_constant(const Eigen::MatrixXd& gram) {
  const Eigen::Index k = gram.rows();
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = 1.0 + 1e-3 * double(i);
  v.normalize();
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd w = gram * v;
    const double norm = w.norm();
    if (norm <= 0.0) return 0.0;
    v = w / norm;
  }
  return v.dot(gram * v);
}

double recomputed_loss(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const ImplementationMatrix& T, const Eigen::VectorXd& y) {
  return (x - T.entries() * y).squaredNorm();
}

// Projected gradient on 1/2||x-Ty||^2 with step 1/L. The projection is
// supplied per codebook; the convergence test is the KKT / gradient-mapping
// residual measured on the full objective ||x-Ty||^2.
EncodeResult projected_gradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const ImplementationMatrix& T, double tol,
                                const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project,
                                bool kkt_componentwise) {
  if (x.size() != T.rows()) throw std::invalid_argument("dimension mismatch between x and T");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const Eigen::Index k = T.cols();

  EncodeResult result;
  result.code = project(Eigen::VectorXd::Zero(k));
  const Eigen::MatrixXd gram = T.entries().transpose() * T.entries();
  const Eigen::VectorXd tx = T.entries().transpose() * x;
  const double L = lipschitz_constant(gram);
  if (L <= 0.0) {  // zero implementation: code 0 is optimal
    result.loss = recomputed_loss(x, T, result.code);
    return result;
  }
  const double eta = 1.0 / L;

  Eigen::VectorXd y = result.code;
  result.converged = false;
  for (int iter = 0; iter < kEncodeMaxIters; ++iter) {
    const Eigen::VectorXd g = gram * y - tx;  // gradient of the halved objective
    double residual = 0.0;
    Eigen::VectorXd y_next = project(y - eta * g);
    if (kkt_componentwise) {
      // non-negative orthant KKT: interior gradient must vanish, active
      // coordinates must not want to decrease
      for (Eigen::Index i = 0; i < k; ++i) {
        const double full_grad = 2.0 * g[i];
        const double r = y[i] > 0.0 ? full_grad : std::min(full_grad, 0.0);
        residual = std::max(residual, std::abs(r));
      }
    } else {
      residual = 2.0 * (y - y_next).lpNorm<Eigen::Infinity>() / eta;
    }
    if (residual <= tol) {
      result.converged = true;
      break;
    }
    y = std::move(y_next);
    result.iterations = iter + 1;
  }
  result.code = y;
  result.loss = recomputed_loss(x, T, y);
  return result;
}

}  // namespace

std::string to_json_string(const EncodeResult& result) {
  nlohmann::json j;
  nlohmann::json code = nlohmann::json::array();
  for (Eigen::Index i = 0; i < result.code.size(); ++i) code.push_back(result.code[i]);
  j["code"] = code;
  j["loss"] = result.loss;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  if (!result.note.empty()) j["note"] = result.note;
  return j.dump();
}

EncodeResult encode_kmeans(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const ImplementationMatrix& T) {
  if (x.size() != T.rows()) throw std::invalid_argument("dimension mismatch between x and T");
  if (T.cols() < 1) throw std::invalid_argument("T needs at least one column");
  Eigen::Index best = 0;
  double best_loss = kInf;
  for (Eigen::Index i = 0; i < T.cols(); ++i) {
    const double loss = (x - T.entries().col(i)).squaredNorm();
    if (loss < best_loss) {
      best_loss = loss;
      best = i;
    }
  }
  EncodeResult result;
  result.code = Eigen::VectorXd::Zero(T.cols());
  result.code[best] = 1.0;
  result.loss = best_loss;
  result.iterations = int(T.cols());
  result.converged = true;
  return result;
}

EncodeResult encode_nmf(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const ImplementationMatrix& T, double tol) {
  EncodeResult result = projected_gradient(
      x, T, tol, [](const Eigen::VectorXd& v) { return v.cwiseMax(0.0).eval(); },
      /*kkt_componentwise=*/true);
  if ((x.array() < 0.0).any()) result.note = "x has negative components; NNLS objective is still convex";
  return result;
}

EncodeResult encode_l2ball(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const ImplementationMatrix& T, double radius, double tol) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (x.size() != T.rows()) throw std::invalid_argument("dimension mismatch between x and T");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(T.entries(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::VectorXd beta = svd.matrixU().transpose() * x;
  const double thresh = sigma.size() > 0 ? sigma[0] * 1e-12 : 0.0;

  EncodeResult result;
  // minimum-norm least squares (rank-deficient columns contribute nothing)
  Eigen::VectorXd z = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > thresh) z[i] = beta[i] / sigma[i];
  Eigen::VectorXd y = svd.matrixV() * z;
  if (y.norm() <= radius) {
    result.code = std::move(y);
    result.loss = recomputed_loss(x, T, result.code);
    return result;
  }

  // boundary: ||y(mu)||^2 = sum (sigma_i beta_i / (sigma_i^2 + mu))^2 is
  // strictly decreasing in mu > 0; bisect to the radius
  const auto norm_sq_at = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma[i] <= thresh) continue;
      const double zi = sigma[i] * beta[i] / (sigma[i] * sigma[i] + mu);
      acc += zi * zi;
    }
    return acc;
  };
  double lo = 0.0;
  double hi = std::max(1.0, sigma[0] * beta.norm() / radius);  // guarantees ||y(hi)|| <= radius
  while (norm_sq_at(hi) > radius * radius) hi *= 2.0;
  const double width_target = tol * std::max(1.0, hi);
  int iters = 0;
  while (hi - lo > width_target && iters < 200) {
    const double mid = 0.5 * (lo + hi);
    if (norm_sq_at(mid) > radius * radius) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iters;
  }
  // hi endpoint keeps the code inside the ball
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    z[i] = sigma[i] > thresh ? sigma[i] * beta[i] / (sigma[i] * sigma[i] + hi) : 0.0;
  result.code = svd.matrixV() * z;
  result.loss = recomputed_loss(x, T, result.code);
  result.iterations = iters;
  result.converged = iters < 200;
  return result;
}

EncodeResult encode_lp_ball(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const ImplementationMatrix& T, double s, double p, double tol) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be > 0");
  if (p == 2.0) return encode_l2ball(x, T, s, tol);
  if (p == 1.0) {
    return projected_gradient(
        x, T, tol, [s](const Eigen::VectorXd& v) { return project_l1_ball(v, s); },
        /*kkt_componentwise=*/false);
  }
  if (std::isinf(p)) {
    return projected_gradient(
        x, T, tol,
        [s](const Eigen::VectorXd& v) { return v.cwiseMax(-s).cwiseMin(s).eval(); },
        /*kkt_componentwise=*/false);
  }
  throw std::invalid_argument("exact lp encoding supports p in {1, 2, inf} only");
}

EncodeResult encode(const Eigen::Ref<const Eigen::VectorXd>& x, const ImplementationMatrix& T,
                    const ConstraintSet& constraint, double tol) {
  switch (constraint.kind) {
    case ConstraintSet::Kind::NonNegOrthant: return encode_nmf(x, T, tol);
    case ConstraintSet::Kind::L2Ball: return encode_l2ball(x, T, constraint.radius, tol);
    case ConstraintSet::Kind::LpBall: return encode_lp_ball(x, T, constraint.radius, constraint.index, tol);
    case ConstraintSet::Kind::StandardBasis: return encode_kmeans(x, T);
  }
  throw std::invalid_argument("unknown constraint kind");
}

Eigen::VectorXd project_l1_ball(const Eigen::Ref<const Eigen::VectorXd>& v, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("l1 radius must be > 0");
  if (v.lpNorm<1>() <= s) return v;
  const Eigen::Index k = v.size();
  std::vector<double> u(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) u[std::size_t(i)] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double candidate = (prefix - s) / double(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd out(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double mag = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] >= 0.0 ? mag : -mag;
  }
  return out;
}

double brute_force_encode(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const ImplementationMatrix& T, const ConstraintSet& constraint,
                          double grid_step) {
  if (T.cols() > 3) throw std::invalid_argument("brute_force_encode supports k <= 3 only");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
  if (x.size() != T.rows()) throw std::invalid_argument("dimension mismatch between x and T");
  constraint.validate();

  if (constraint.kind == ConstraintSet::Kind::StandardBasis)
    return encode_kmeans(x, T).loss;

  const Eigen::Index k = T.cols();
  const bool nonneg = constraint.kind == ConstraintSet::Kind::NonNegOrthant;
  if (nonneg && (T.entries().array() < 0.0).any())
    throw std::invalid_argument("non-negative orthant oracle requires a non-negative T");
  if (constraint.kind == ConstraintSet::Kind::LpBall && constraint.index != 1.0 &&
      constraint.index != 2.0 && !std::isinf(constraint.index))
    throw std::invalid_argument("grid oracle supports p in {1, 2, inf} only");

  // per-axis cap: orthant codes obey y_i ||T_i|| <= ||Ty*|| <= 2||x|| at any
  // optimum of a non-negative T; ball kinds are capped by their radius
  const double x_norm = x.norm();
  std::vector<double> axis_cap(std::size_t(k), 0.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    switch (constraint.kind) {
      case ConstraintSet::Kind::NonNegOrthant:
        axis_cap[std::size_t(i)] =
            T.column_norms()[i] > 1e-12 ? 2.0 * x_norm / T.column_norms()[i] : 0.0;
        break;
      case ConstraintSet::Kind::L2Ball:
        axis_cap[std::size_t(i)] = constraint.radius;
        break;
      case ConstraintSet::Kind::LpBall:
        axis_cap[std::size_t(i)] = constraint.radius;
        break;
      default: break;
    }
  }

  const bool l2_budget = constraint.kind == ConstraintSet::Kind::L2Ball ||
                         (constraint.kind == ConstraintSet::Kind::LpBall && constraint.index == 2.0);
  const bool l1_budget = constraint.kind == ConstraintSet::Kind::LpBall && constraint.index == 1.0;
  const double radius = constraint.radius;

  double best = kInf;
  // depth-first over axes; the innermost axis reduces to a scalar quadratic
  // a - 2vb + v^2 c2 per grid value
  std::function<void(Eigen::Index, const Eigen::VectorXd&, double)> descend =
      [&](Eigen::Index depth, const Eigen::VectorXd& residual, double budget) {
        // budget: remaining squared norm (l2) or remaining absolute sum (l1)
        double cap = axis_cap[std::size_t(depth)];
        if (l2_budget) cap = std::min(cap, std::sqrt(std::max(0.0, budget)));
        if (l1_budget) cap = std::min(cap, budget);
        const long long j_hi = (long long)std::floor(cap / grid_step * (1.0 + 1e-12));
        const long long j_lo = nonneg ? 0 : -j_hi;
        const Eigen::VectorXd col = T.entries().col(depth);
        if (depth == k - 1) {
          const double a = residual.squaredNorm();
          const double bb = residual.dot(col);
          const double c2 = col.squaredNorm();
          for (long long j = j_lo; j <= j_hi; ++j) {
            const double v = double(j) * grid_step;
            const double loss = a - 2.0 * v * bb + v * v * c2;
            if (loss < best) best = loss;
          }
        } else {
          for (long long j = j_lo; j <= j_hi; ++j) {
            const double v = double(j) * grid_step;
            double next_budget = budget;
            if (l2_budget) next_budget = budget - v * v;
            if (l1_budget) next_budget = budget - std::abs(v);
            descend(depth + 1, residual - v * col, next_budget);
          }
        }
      };
  const double budget0 = l2_budget ? radius * radius : (l1_budget ? radius : 0.0);
  descend(0, x, budget0);
  return std::max(best, 0.0);
}

}  // namespace kdim
