#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "kdim/erm.hpp"
#include "kdim/rng.hpp"
#include "kdim/sampling.hpp"

using namespace kdim;

namespace {

SchemeSpec make(Scheme scheme, int m, int k, double r = 1.0, double c = 1.0, double s = 0.0,
                double p = 2.0) {
  SchemeSpec spec;
  spec.scheme = scheme;
  spec.m = m;
  spec.k = k;
  spec.r = r;
  spec.c = c;
  spec.s = s;
  spec.p = p;
  return spec;
}

}  // namespace

TEST_CASE("column normalization") {
  Eigen::MatrixXd T(2, 1);
  T << 3.0, 4.0;
  const NormalizeResult res = normalize_columns(ImplementationMatrix(T));
  CHECK(res.T.entries()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(res.T.entries()(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(res.scales[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_FALSE(res.had_zero_column);

  Eigen::MatrixXd with_zero(2, 2);
  with_zero << 3.0, 0.0, 4.0, 0.0;
  const NormalizeResult zr = normalize_columns(ImplementationMatrix(with_zero));
  CHECK(zr.had_zero_column);
  CHECK(zr.scales[1] == 1.0);
  CHECK(zr.T.entries().col(1).norm() == 0.0);

  RngStream rng(3);
  Eigen::MatrixXd random(5, 4);
  for (Eigen::Index j = 0; j < 4; ++j) random.col(j) = uniform_ball(rng, 5, 2.0);
  const NormalizeResult rr = normalize_columns(ImplementationMatrix(random));
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(std::abs(rr.T.entries().col(j).norm() - 1.0) <= 1e-12);
    CHECK((rr.T.entries().col(j) * rr.scales[j] - random.col(j)).norm() <= 1e-12);
  }
}

TEST_CASE("random feasible implementations respect the scheme") {
  const SchemeSpec specs[] = {
      make(Scheme::NMF, 4, 3, 1.0, 0.8),
      make(Scheme::DictionaryLearning, 4, 3, 1.0, 1.5),
      make(Scheme::SparseCoding, 4, 3, 1.0, 1.0, 2.0, 1.0),
      make(Scheme::KMeans, 4, 3),
  };
  for (const SchemeSpec& spec : specs) {
    const ImplementationMatrix T = random_feasible(spec, 5);
    CHECK(T.rows() == spec.m);
    CHECK(T.cols() == spec.k);
    CHECK(T.feasible_for(spec));
    if (spec.scheme == Scheme::NMF) CHECK(T.entries().minCoeff() >= 0.0);
    const ImplementationMatrix again = random_feasible(spec, 5);
    CHECK((T.entries() - again.entries()).norm() == 0.0);
    const ImplementationMatrix other = random_feasible(spec, 6);
    CHECK((T.entries() - other.entries()).norm() > 0.0);
  }
}

TEST_CASE("kmeans training with one center finds the mean") {
  Eigen::MatrixXd sample(1, 2);
  sample << 0.0, 2.0;
  const SchemeSpec spec = make(Scheme::KMeans, 1, 1, 2.0, 2.0);
  const TrainReport report = train(spec, sample, 10, 1);
  CHECK(report.T.entries()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.empirical_risk == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.monotone);
  CHECK(report.risk_trace.back() == report.empirical_risk);
}

TEST_CASE("kmeans training separates two points with two centers") {
  Eigen::MatrixXd sample(2, 2);
  sample << 0.0, 1.0, 0.0, 0.0;
  Eigen::MatrixXd init(2, 2);
  init << 0.1, 0.9, 0.0, 0.0;
  const SchemeSpec spec = make(Scheme::KMeans, 2, 2);
  const TrainReport report =
      train(spec, sample, 10, 1, ImplementationMatrix(init));
  CHECK(report.empirical_risk <= 1e-12);
  CHECK(report.monotone);
  CHECK(report.T.feasible_for(spec));
}

TEST_CASE("scalar nmf training reaches zero risk with a unit atom") {
  Eigen::MatrixXd sample(1, 2);
  sample << 0.5, 1.0;
  const SchemeSpec spec = make(Scheme::NMF, 1, 1);
  const TrainReport report = train(spec, sample, 10, 3);
  CHECK(report.T.entries()(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.empirical_risk <= 1e-12);
  CHECK(report.monotone);
}

TEST_CASE("training descends and stays feasible") {
  RngStream rng(17);
  const SchemeSpec spec = make(Scheme::DictionaryLearning, 3, 2);
  Eigen::MatrixXd sample(3, 40);
  for (int j = 0; j < 40; ++j) sample.col(j) = uniform_ball(rng, 3, 1.0);
  const TrainReport report = train(spec, sample, 15, 2);
  CHECK(report.monotone);
  for (std::size_t i = 1; i < report.risk_trace.size(); ++i)
    CHECK(report.risk_trace[i] <= report.risk_trace[i - 1] + 1e-9);
  CHECK(report.T.feasible_for(spec));

  // reported risk matches a recomputation at the returned implementation
  const double recomputed =
      empirical_risk(report.T, sample, ConstraintSet::for_scheme(spec));
  CHECK(std::abs(recomputed - report.empirical_risk) <= 1e-12);

  // same seed, same run
  const TrainReport again = train(spec, sample, 15, 2);
  CHECK((again.T.entries() - report.T.entries()).norm() == 0.0);
  CHECK(again.empirical_risk == report.empirical_risk);
}

TEST_CASE("optimal nmf codes with unit atoms stay inside the data ball") {
  RngStream rng(23);
  const double r = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + int(rng.next_below(2));
    const int k = 1 + int(rng.next_below(2));
    Eigen::MatrixXd entries(m, k);
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd dir = uniform_orthant_ball(rng, m, 1.0);
      if (dir.norm() == 0.0) dir.setOnes();
      entries.col(j) = dir.normalized();
    }
    const ImplementationMatrix T(entries);
    const Eigen::VectorXd x = uniform_orthant_ball(rng, m, r);
    const EncodeResult res = encode_nmf(x, T);
    CHECK(res.code.norm() <= r + 1e-6);
  }
}

TEST_CASE("empirical risk averages per-point losses") {
  Eigen::MatrixXd T(2, 2);
  T << 1.0, 0.0, 0.0, 1.0;
  Eigen::MatrixXd sample(2, 3);
  sample << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  bool converged = false;
  const double risk = empirical_risk(ImplementationMatrix(T), sample,
                                     ConstraintSet::standard_basis(), kEncodeTol, &converged);
  CHECK(risk == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(converged);

  Eigen::MatrixXd wrong(3, 1);
  CHECK_THROWS_AS(
      empirical_risk(ImplementationMatrix(T), wrong, ConstraintSet::standard_basis()),
      std::invalid_argument);
}

TEST_CASE("train input validation") {
  const SchemeSpec spec = make(Scheme::KMeans, 2, 1);
  Eigen::MatrixXd empty(2, 0);
  CHECK_THROWS_AS(train(spec, empty, 5, 1), std::invalid_argument);
  Eigen::MatrixXd wrong(3, 4);
  wrong.setZero();
  CHECK_THROWS_AS(train(spec, wrong, 5, 1), std::invalid_argument);
  Eigen::MatrixXd ok(2, 4);
  ok.setZero();
  CHECK_THROWS_AS(train(spec, ok, 0, 1), std::invalid_argument);
}

TEST_CASE("train report serializes to json") {
  Eigen::MatrixXd sample(1, 2);
  sample << 0.5, 1.0;
  const TrainReport report = train(make(Scheme::NMF, 1, 1), sample, 5, 3);
  const std::string text = to_json_string(report);
  CHECK(text.find("\"matrix\"") != std::string::npos);
  CHECK(text.find("\"empirical_risk\"") != std::string::npos);
  CHECK(text.find("\"risk_trace\"") != std::string::npos);
  CHECK(text.find("\"monotone\"") != std::string::npos);
}
