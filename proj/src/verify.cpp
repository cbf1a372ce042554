#include "kdim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "kdim/bounds.hpp"
#include "kdim/covering.hpp"
#include "kdim/encoders.hpp"
#include "kdim/erm.hpp"
#include "kdim/experiments.hpp"
#include "kdim/rng.hpp"
#include "kdim/sampling.hpp"

namespace kdim {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Stream index for the training sample in gap_suite; clear of per-trial
// streams (trial index) and reference-risk streams (1e9 + candidate).
constexpr std::uint64_t kTrainSampleStream = 2000000000ull;

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

std::vector<CheckResult> tails_suite(int grid_points, std::uint64_t seed) {
  RngStream rng(seed);
  int violations = 0;
  double worst_excess = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double n = double(1 + rng.next_below(10000));
    const double B = 10.0 * (1.0 - rng.next_double());  // (0, 10]
    const double eps = B * rng.next_double();           // [0, B)
    const double V = B * B * (1.0 - rng.next_double()); // (0, B^2]
    const double bennett = bennett_tail(n, eps, V, B);
    const double bernstein = bernstein_tail(n, eps, V, B);
    if (bennett > bernstein * (1.0 + 1e-12)) {
      ++violations;
      worst_excess = std::max(worst_excess, bennett / bernstein - 1.0);
    }
  }
  CheckResult result;
  result.name = "tail_ordering_bennett_le_bernstein";
  result.passed = violations == 0;
  result.details = std::to_string(grid_points) + " tuples, " + std::to_string(violations) +
                   " violations" +
                   (violations ? ", worst relative excess " + fmt(worst_excess) : "");
  return {result};
}

namespace {

CheckResult cover_check(const std::string& name, const SchemeSpec& spec, double net_width,
                        double xi, int n, std::uint64_t seed) {
  const std::vector<ImplementationMatrix> net = build_grid_net(spec.m, spec.k, net_width, xi);
  DistributionSpec dist;
  dist.kind = DistributionSpec::Kind::UniformBall;
  dist.m = spec.m;
  dist.r = spec.r;
  const Eigen::MatrixXd xs = sample(dist, n, seed);
  const ConstraintSet constraint = ConstraintSet::for_scheme(spec);

  Eigen::MatrixXd loss_rows(static_cast<Eigen::Index>(net.size()), n);
  for (size_t row = 0; row < net.size(); ++row)
    for (int col = 0; col < n; ++col)
      loss_rows(static_cast<Eigen::Index>(row), col) = encode(xs.col(col), net[row], constraint).loss;

  const double xi_prime = lipschitz_xi_factor(spec) * xi;
  std::string clamp_note;
  const double bound = ln_cover_bound(spec, xi_prime, &clamp_note);

  CoverReport report;
  report.xi = xi;
  report.xi_prime = xi_prime;
  report.ln_theoretical = bound;
  report.net_size = static_cast<std::int64_t>(net.size());
  report.empirical_size = empirical_cover_number(loss_rows, xi_prime);

  bool passed = std::log(double(*report.empirical_size)) <= bound + 1e-9;
  std::string extra;
  if (!passed && net.size() <= 20) {
    // greedy is only an upper bound; settle the question exactly when feasible
    const std::int64_t exact = exact_cover_number(loss_rows, xi_prime);
    extra = ", exact " + std::to_string(exact);
    passed = std::log(double(exact)) <= bound + 1e-9;
  }

  CheckResult result;
  result.name = name;
  result.passed = passed;
  result.details = "net " + std::to_string(net.size()) + ", empirical cover " +
                   std::to_string(*report.empirical_size) + extra + ", ln bound " + fmt(bound) +
                   " at xi'=" + fmt(xi_prime) + (clamp_note.empty() ? "" : " (" + clamp_note + ")");
  return result;
}

}  // namespace

std::vector<CheckResult> cover_suite(int m, int k, double xi, double r, double c, int n,
                                     std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("cover_suite needs n >= 1");
  std::vector<CheckResult> results;

  SchemeSpec general;
  general.scheme = Scheme::DictionaryLearning;
  general.m = m;
  general.k = k;
  general.r = r;
  general.c = c;
  general.validate();
  results.push_back(cover_check("cover_soundness_general", general, c, xi, n, seed));

  SchemeSpec kmeans;
  kmeans.scheme = Scheme::KMeans;
  kmeans.m = m;
  kmeans.k = k;
  kmeans.r = r;
  kmeans.c = r;  // centers live in the data ball
  kmeans.validate();
  results.push_back(cover_check("cover_soundness_kmeans", kmeans, r, xi, n, seed + 1));

  return results;
}

std::vector<CheckResult> encoder_suite(int instances_per_scheme, std::uint64_t seed) {
  if (instances_per_scheme < 1) throw std::invalid_argument("encoder_suite needs instances >= 1");
  const Scheme schemes[] = {Scheme::NMF, Scheme::DictionaryLearning, Scheme::SparseCoding,
                            Scheme::KMeans};
  const double p_cycle[] = {1.0, 2.0, std::numeric_limits<double>::infinity()};

  std::vector<CheckResult> results;
  for (size_t si = 0; si < 4; ++si) {
    RngStream rng(seed, si);
    int failures = 0;
    double worst = 0.0;
    for (int inst = 0; inst < instances_per_scheme; ++inst) {
      const int m = 1 + static_cast<int>(rng.next_below(2));
      const int k = 1 + static_cast<int>(rng.next_below(2));

      SchemeSpec spec;
      spec.scheme = schemes[si];
      spec.m = m;
      spec.k = k;
      if (spec.scheme == Scheme::SparseCoding) {
        spec.s = 0.5 + rng.next_double();
        spec.p = p_cycle[inst % 3];
      }
      spec.validate();

      Eigen::MatrixXd T(m, k);
      for (int col = 0; col < k; ++col) {
        Eigen::VectorXd dir(m);
        for (int row = 0; row < m; ++row) dir[row] = rng.next_normal();
        if (dir.norm() <= 0.0) dir.setOnes();
        dir.normalize();
        T.col(col) = (0.6 + 0.4 * rng.next_double()) * dir;
      }
      if (spec.scheme == Scheme::NMF) T = T.cwiseAbs();  // oracle box cap needs nonneg atoms

      const Eigen::VectorXd x = uniform_ball(rng, m, spec.r);
      const ImplementationMatrix impl(T);
      const ConstraintSet constraint = ConstraintSet::for_scheme(spec);
      const double grid_step = (k == 1) ? 1e-4 : 1e-3;
      const double tol_check = 5.0 * grid_step * (1.0 + x.norm() + spec.c * k);

      const double solved = encode(x, impl, constraint).loss;
      const double oracle = brute_force_encode(x, impl, constraint, grid_step);
      const double deviation = std::abs(solved - oracle);
      worst = std::max(worst, deviation);
      if (deviation > tol_check) ++failures;
    }
    CheckResult result;
    result.name = "encoder_oracle_" + to_string(schemes[si]);
    result.passed = failures == 0;
    result.details = std::to_string(instances_per_scheme) + " instances, " +
                     std::to_string(failures) + " beyond tolerance, worst deviation " + fmt(worst);
    results.push_back(std::move(result));
  }
  return results;
}

std::vector<CheckResult> gap_suite(const SchemeSpec& spec, const DistributionSpec& dist, int n,
                                   int trials, std::uint64_t seed, double delta, int jobs) {
  std::vector<ImplementationMatrix> candidates;
  candidates.emplace_back(Eigen::MatrixXd::Zero(spec.m, spec.k));
  candidates.push_back(random_feasible(spec, seed));
  const Eigen::MatrixXd train_xs = sample(dist, n, seed, kTrainSampleStream);
  candidates.push_back(train(spec, train_xs, 20, seed).T);

  const GapReport report = gap_experiment(spec, dist, candidates, n, trials, seed,
                                          {bound_names::kCoverHoeffding}, delta, jobs);

  const double max_gap = report.gap_sup_per_trial.empty()
                             ? 0.0
                             : *std::max_element(report.gap_sup_per_trial.begin(),
                                                 report.gap_sup_per_trial.end());
  CheckResult result;
  result.name = "gap_soundness_" + to_string(spec.scheme);
  result.passed = report.violations == 0;
  result.details = std::to_string(report.trials) + " trials, max gap " + fmt(max_gap) +
                   ", bound " + fmt(report.bound_values.at(bound_names::kCoverHoeffding)) + ", " +
                   std::to_string(report.violations) + " violations" +
                   (report.all_converged ? "" : ", encoder convergence flagged");
  return {result};
}

}  // namespace kdim
