#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdim/experiments.hpp"

using namespace kdim;
using namespace kdim::bound_names;

namespace {

DistributionSpec ball(int m, double r = 1.0) {
  DistributionSpec dist;
  dist.kind = DistributionSpec::Kind::UniformBall;
  dist.m = m;
  dist.r = r;
  return dist;
}

DistributionSpec mixture(std::vector<Eigen::VectorXd> atoms, std::vector<double> weights,
                         double r = 1.0) {
  DistributionSpec dist;
  dist.kind = DistributionSpec::Kind::PointMixture;
  dist.m = int(atoms.front().size());
  dist.r = r;
  dist.atoms = std::move(atoms);
  dist.weights = std::move(weights);
  return dist;
}

SchemeSpec kmeans_spec(int m, int k, double r = 1.0) {
  SchemeSpec spec;
  spec.scheme = Scheme::KMeans;
  spec.m = m;
  spec.k = k;
  spec.r = r;
  spec.c = r;
  spec.b = worst_case_loss_bound(spec);
  return spec;
}

}  // namespace

TEST_CASE("sampling stays inside the ball and respects streams") {
  const Eigen::MatrixXd xs = sample(ball(3, 2.0), 500, 5);
  REQUIRE(xs.rows() == 3);
  REQUIRE(xs.cols() == 500);
  for (int j = 0; j < 500; ++j) CHECK(xs.col(j).norm() <= 2.0 + 1e-12);

  DistributionSpec orthant = ball(3, 1.0);
  orthant.kind = DistributionSpec::Kind::UniformPositiveOrthantBall;
  const Eigen::MatrixXd pos = sample(orthant, 200, 5);
  CHECK(pos.minCoeff() >= 0.0);
  for (int j = 0; j < 200; ++j) CHECK(pos.col(j).norm() <= 1.0 + 1e-12);

  const Eigen::MatrixXd again = sample(ball(3, 2.0), 500, 5);
  CHECK((xs - again).norm() == 0.0);
  const Eigen::MatrixXd other_stream = sample(ball(3, 2.0), 500, 5, 1);
  CHECK((xs - other_stream).norm() > 0.0);

  CHECK_THROWS_AS(sample(ball(3), -1, 5), std::invalid_argument);
}

TEST_CASE("point mixture sampling repeats the single atom") {
  Eigen::VectorXd a(2);
  a << 0.3, -0.4;
  const Eigen::MatrixXd xs = sample(mixture({a}, {1.0}), 50, 9);
  for (int j = 0; j < 50; ++j) CHECK((xs.col(j) - a).norm() == 0.0);
}

TEST_CASE("ball moments match the closed forms") {
  // E ||x|| = r m/(m+1); E x_i^2 = r^2/(m+2)
  const Eigen::MatrixXd xs = sample(ball(2, 1.0), 100000, 11);
  double mean_norm = 0.0;
  for (int j = 0; j < xs.cols(); ++j) mean_norm += xs.col(j).norm();
  mean_norm /= double(xs.cols());
  CHECK(std::abs(mean_norm - 2.0 / 3.0) <= 0.01);

  const Eigen::MatrixXd line = sample(ball(1, 1.0), 100000, 12);
  const double second_moment = line.array().square().mean();
  CHECK(std::abs(second_moment - 1.0 / 3.0) <= 0.01);
}

TEST_CASE("risk estimation against the exact mixture value") {
  Eigen::VectorXd a(1), b(1);
  a << 0.25;
  b << 1.0;
  const DistributionSpec dist = mixture({a, b}, {0.5, 0.5});
  Eigen::MatrixXd T(1, 2);
  T << 0.0, 1.0;
  const ConstraintSet basis = ConstraintSet::standard_basis();

  // losses: 0.25 -> 0.0625 to the zero center, 1.0 -> 0
  CHECK(exact_mixture_risk(T, dist, basis) == doctest::Approx(0.03125).epsilon(1e-15));

  const RiskEstimate est = estimate_expected_risk(T, dist, 2000, 3, basis);
  CHECK(std::abs(est.estimate - 0.03125) <= 3.0 * est.half_width + 1e-12);
  CHECK(est.all_converged);

  // constant-loss distribution: zero spread
  const RiskEstimate flat = estimate_expected_risk(T, mixture({b}, {1.0}), 500, 3, basis);
  CHECK(flat.estimate == 0.0);
  CHECK(flat.half_width == 0.0);

  CHECK_THROWS_AS(estimate_expected_risk(T, dist, 50, 3, basis), std::invalid_argument);
  CHECK_THROWS_AS(exact_mixture_risk(T, ball(1), basis), std::invalid_argument);
}

TEST_CASE("half width shrinks like the square root of the sample count") {
  Eigen::MatrixXd T(2, 1);
  T << 1.0, 0.0;
  const ConstraintSet basis = ConstraintSet::standard_basis();
  const RiskEstimate narrow = estimate_expected_risk(T, ball(2), 16000, 7, basis);
  const RiskEstimate wide = estimate_expected_risk(T, ball(2), 4000, 7, basis);
  REQUIRE(wide.half_width > 0.0);
  const double ratio = narrow.half_width / wide.half_width;
  CHECK(ratio > 0.35);
  CHECK(ratio < 0.7);
}

TEST_CASE("gap experiment on a point mixture has zero gaps") {
  Eigen::VectorXd a(2), b(2);
  a << 0.5, 0.0;
  b << 0.0, -0.5;
  const DistributionSpec dist = mixture({a, b}, {0.5, 0.5});
  const SchemeSpec spec = kmeans_spec(2, 2);
  Eigen::MatrixXd centers(2, 2);
  centers << 0.5, 0.0, 0.0, -0.5;
  const std::vector<ImplementationMatrix> candidates = {ImplementationMatrix(centers)};

  const GapReport report =
      gap_experiment(spec, dist, candidates, 40, 10, 21, {kCoverHoeffding}, 0.05);
  CHECK(report.trials == 10);
  CHECK(report.candidate_count == 1);
  CHECK(report.violations == 0);
  REQUIRE(report.gap_sup_per_trial.size() == 10);
  for (double g : report.gap_sup_per_trial) CHECK(g == 0.0);  // exact reference, zero loss
  CHECK(report.bound_values.count(kCoverHoeffding) == 1);
}

TEST_CASE("gap experiment is deterministic and thread-count invariant") {
  const SchemeSpec spec = kmeans_spec(1, 1);
  const std::vector<ImplementationMatrix> candidates = {
      ImplementationMatrix(Eigen::MatrixXd::Zero(1, 1))};
  const GapReport one =
      gap_experiment(spec, ball(1), candidates, 50, 8, 77, {kCoverHoeffding}, 0.05, 1);
  const GapReport two =
      gap_experiment(spec, ball(1), candidates, 50, 8, 77, {kCoverHoeffding}, 0.05, 2);
  REQUIRE(one.gap_sup_per_trial.size() == two.gap_sup_per_trial.size());
  for (std::size_t i = 0; i < one.gap_sup_per_trial.size(); ++i)
    CHECK(one.gap_sup_per_trial[i] == two.gap_sup_per_trial[i]);
  CHECK(one.violations == two.violations);
}

TEST_CASE("gap experiment input validation") {
  const SchemeSpec spec = kmeans_spec(1, 1);
  const std::vector<ImplementationMatrix> candidates = {
      ImplementationMatrix(Eigen::MatrixXd::Zero(1, 1))};
  CHECK_THROWS_AS(gap_experiment(spec, ball(1), {}, 50, 4, 1, {}, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(gap_experiment(spec, ball(2), candidates, 50, 4, 1, {}, 0.05),
                  std::invalid_argument);
  // n_mc override below 100*n is refused
  CHECK_THROWS_AS(
      gap_experiment(spec, ball(1), candidates, 50, 4, 1, {}, 0.05, 1, 1000),
      std::invalid_argument);

  const GapReport empty =
      gap_experiment(spec, ball(1), candidates, 50, 0, 1, {kCoverHoeffding}, 0.05);
  CHECK(empty.trials == 0);
  CHECK(empty.gap_sup_per_trial.empty());
  CHECK(empty.violations == 0);
  CHECK(empty.bound_values.count(kCoverHoeffding) == 1);

  const std::string text = to_json_string(empty);
  CHECK(text.find("\"gap_sup_per_trial\"") != std::string::npos);
  CHECK(text.find("\"violations\"") != std::string::npos);
}

TEST_CASE("figure data: panel composition and frozen values") {
  const FigureData one_b = figure_data("1b");
  CHECK(one_b.notes.empty());
  CHECK(one_b.rows.size() == 3 * 61);
  CHECK(std::is_sorted(one_b.rows.begin(), one_b.rows.end(),
                       [](const FigureRow& a, const FigureRow& b) {
                         return a.bound_name != b.bound_name ? a.bound_name < b.bound_name
                                                             : a.sweep_value < b.sweep_value;
                       }));
  for (const FigureRow& row : one_b.rows) CHECK(row.sweep_var == "n");
  CHECK(one_b.rows.front().sweep_value == doctest::Approx(1e2).epsilon(1e-9));
  CHECK(one_b.rows.back().sweep_value == doctest::Approx(1e8).epsilon(1e-9));

  // n = 1e6 is the 41st of 61 log-spaced points in [1e2, 1e8]
  for (const FigureRow& row : one_b.rows) {
    if (std::abs(row.sweep_value - 1e6) > 1.0) continue;
    if (row.bound_name == kNmfCover)
      CHECK(row.value == doctest::Approx(0.803221926024546).epsilon(1e-6));
    if (row.bound_name == kNmfMaurerPontil)
      CHECK(row.value == doctest::Approx(5.0645677437674905).epsilon(1e-6));
    if (row.bound_name == kNmfGribonval)
      CHECK(row.value == doctest::Approx(2.8713056616536243).epsilon(1e-6));
  }

  const FigureData one_a = figure_data("1a");
  CHECK(one_a.rows.size() == 61);
  for (const FigureRow& row : one_a.rows) CHECK(row.bound_name == kNmfCover);

  const FigureData three_b = figure_data("3b");
  for (const FigureRow& row : three_b.rows) {
    if (std::abs(row.sweep_value - 1e6) > 1.0) continue;
    if (row.bound_name == kKmeansCover)
      CHECK(row.value == doctest::Approx(0.3016480427750943).epsilon(1e-6));
    if (row.bound_name == kKmeansGribonval)
      CHECK(row.value == doctest::Approx(0.8065252680066121).epsilon(1e-6));
  }

  const FigureData two_c = figure_data("2c");
  for (const FigureRow& row : two_c.rows) {
    CHECK(row.sweep_var == "m");
    CHECK(row.sweep_value >= 10.0 * (1.0 - 1e-12));
    CHECK(row.sweep_value <= 1e4 * (1.0 + 1e-12));
  }

  CHECK_THROWS_AS(figure_data("4a"), std::invalid_argument);
  CHECK_THROWS_AS(figure_data("1e"), std::invalid_argument);
  CHECK_THROWS_AS(figure_data(""), std::invalid_argument);
}

TEST_CASE("figure overrides narrow the sweep") {
  FigureOverrides ov;
  ov.k_min = 2.0;
  ov.k_max = 50.0;
  ov.points = 13;
  const FigureData data = figure_data("1d", ov);
  CHECK(data.rows.size() == 3 * 13);
  double max_k = 0.0;
  for (const FigureRow& row : data.rows) {
    CHECK(row.sweep_var == "k");
    max_k = std::max(max_k, row.sweep_value);
  }
  CHECK(max_k == doctest::Approx(50.0).epsilon(1e-9));

  FigureOverrides nv;
  nv.n_min = 1e3;
  nv.n_max = 1e4;
  nv.points = 5;
  const FigureData narrowed = figure_data("3a", nv);
  CHECK(narrowed.rows.size() == 5);
  CHECK(narrowed.rows.front().sweep_value == doctest::Approx(1e3).epsilon(1e-9));
  CHECK(narrowed.rows.back().sweep_value == doctest::Approx(1e4).epsilon(1e-9));
}

TEST_CASE("figure csv serialization") {
  FigureOverrides ov;
  ov.points = 3;
  const std::string csv = to_csv_string(figure_data("1a", ov));
  CHECK(csv.rfind("sweep_var,sweep_value,bound_name,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  CHECK(csv.find("nmf_cover") != std::string::npos);
}

TEST_CASE("crossover scan finds the single nmf crossing in k") {
  BoundParams fixed;
  fixed.m = 1000.0;
  fixed.n = 1e6;
  fixed.delta = 0.01;
  SweepRange sweep{"k", 2.0, 50.0};
  const std::vector<double> roots =
      crossover_scan(kNmfCover, kNmfMaurerPontil, sweep, fixed);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] > 5.0);
  CHECK(roots[0] < 50.0);

  // the two bounds really do swap order across the root
  BoundParams at = fixed;
  at.k = 2.0;
  CHECK(evaluate_bound(kNmfCover, at) > evaluate_bound(kNmfMaurerPontil, at));
  at.k = 50.0;
  CHECK(evaluate_bound(kNmfCover, at) < evaluate_bound(kNmfMaurerPontil, at));

  // frozen endpoint values
  at.k = 2.0;
  CHECK(evaluate_bound(kNmfCover, at) == doctest::Approx(0.14056139671870616).epsilon(1e-13));
  CHECK(evaluate_bound(kNmfMaurerPontil, at) ==
        doctest::Approx(0.04538267523855581).epsilon(1e-13));
  at.k = 5.0;
  CHECK(evaluate_bound(kNmfCover, at) == doctest::Approx(0.23111232226596215).epsilon(1e-13));
  CHECK(evaluate_bound(kNmfMaurerPontil, at) ==
        doctest::Approx(0.1688170249214538).epsilon(1e-13));
}

TEST_CASE("crossover scan stays empty for identical or separated pairs") {
  BoundParams fixed;
  fixed.m = 100.0;
  fixed.k = 100.0;
  fixed.delta = 0.01;
  SweepRange sweep{"n", 1e2, 1e8};
  CHECK(crossover_scan(kKmeansCover, kKmeansCover, sweep, fixed).empty());
  CHECK(crossover_scan(kKmeansCover, kKmeansMaurerPontil, sweep, fixed).empty());

  SweepRange bad{"q", 1.0, 2.0};
  CHECK_THROWS_AS(crossover_scan(kKmeansCover, kKmeansMaurerPontil, bad, fixed),
                  std::invalid_argument);
}
