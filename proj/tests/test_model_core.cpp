#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kdim/encoders.hpp"
#include "kdim/rng.hpp"
#include "kdim/sampling.hpp"
#include "kdim/scheme.hpp"

using namespace kdim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::NMF, Scheme::DictionaryLearning, Scheme::SparseCoding, Scheme::KMeans})
    CHECK(scheme_from_string(to_string(s)) == s);
  CHECK(scheme_from_string("dictionary") == Scheme::DictionaryLearning);
  CHECK(scheme_from_string("sparse") == Scheme::SparseCoding);
  CHECK_THROWS_AS(scheme_from_string("pca"), std::invalid_argument);
}

TEST_CASE("spec validation rejects bad parameters") {
  CHECK_THROWS_AS(make(Scheme::NMF, 0, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(Scheme::NMF, 1, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(Scheme::NMF, 1, 1, -1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(Scheme::SparseCoding, 1, 1, 1.0, 1.0, 0.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make(Scheme::SparseCoding, 1, 1, 1.0, 1.0, 1.0, 0.5).validate(),
                  std::invalid_argument);
  SchemeSpec bad = make(Scheme::KMeans, 1, 1);
  bad.b = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(make(Scheme::SparseCoding, 2, 3, 1.0, 1.0, 2.0, kInf).validate());
}

TEST_CASE("worst case loss per scheme") {
  CHECK(worst_case_loss_bound(make(Scheme::NMF, 5, 3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(worst_case_loss_bound(make(Scheme::DictionaryLearning, 4, 7, 1.0, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(worst_case_loss_bound(make(Scheme::DictionaryLearning, 4, 3, 2.0, 1.0)) ==
        doctest::Approx(13.0).epsilon(1e-15));
  // p=1 kills the k factor: (r + s c)^2
  CHECK(worst_case_loss_bound(make(Scheme::SparseCoding, 3, 50, 1.0, 1.0, 10.0, 1.0)) ==
        doctest::Approx(121.0).epsilon(1e-15));
  CHECK(worst_case_loss_bound(make(Scheme::SparseCoding, 3, 3, 1.0, 1.0, 2.0, kInf)) ==
        doctest::Approx(49.0).epsilon(1e-15));
  CHECK(worst_case_loss_bound(make(Scheme::KMeans, 2, 4, 1.5)) ==
        doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("codebook operator norm per scheme") {
  CHECK(operator_norm_on_Y(make(Scheme::NMF, 3, 49)) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(operator_norm_on_Y(make(Scheme::NMF, 3, 4, 1.0, 2.0)) ==
        doctest::Approx(4.0).epsilon(1e-15));
  CHECK(operator_norm_on_Y(make(Scheme::SparseCoding, 3, 50, 1.0, 1.0, 1.0, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(operator_norm_on_Y(make(Scheme::DictionaryLearning, 3, 4, 1.0, 2.0)) ==
        doctest::Approx(8.0).epsilon(1e-15));
  CHECK(operator_norm_on_Y(make(Scheme::KMeans, 3, 4, 1.0, 0.7)) ==
        doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("spec json round trip, p=inf spelled out") {
  SchemeSpec spec = make(Scheme::SparseCoding, 12, 7, 1.5, 0.5, 3.0, kInf);
  spec.b = 2.25;
  const SchemeSpec back = scheme_spec_from_json_string(to_json_string(spec));
  CHECK(back.scheme == spec.scheme);
  CHECK(back.m == spec.m);
  CHECK(back.k == spec.k);
  CHECK(back.r == spec.r);
  CHECK(back.c == spec.c);
  CHECK(back.s == spec.s);
  CHECK(std::isinf(back.p));
  CHECK(back.b == spec.b);
  CHECK(to_json_string(spec).find("\"inf\"") != std::string::npos);
  CHECK_THROWS_AS(scheme_spec_from_json_string("{\"scheme\":\"pca\",\"m\":1,\"k\":1,\"r\":1,\"c\":1}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      scheme_spec_from_json_string(
          "{\"scheme\":\"sparse_coding\",\"m\":1,\"k\":1,\"r\":1,\"c\":1,\"s\":1,\"p\":\"oops\"}"),
      std::invalid_argument);
}

TEST_CASE("implementation matrix caches column norms") {
  RngStream rng(11);
  Eigen::MatrixXd entries(7, 5);
  for (Eigen::Index j = 0; j < entries.cols(); ++j)
    for (Eigen::Index i = 0; i < entries.rows(); ++i) entries(i, j) = rng.next_normal();
  const ImplementationMatrix T(entries);
  REQUIRE(T.column_norms().size() == 5);
  for (Eigen::Index j = 0; j < 5; ++j)
    CHECK(std::abs(T.column_norms()[j] - entries.col(j).norm()) <= 1e-12);
}

TEST_CASE("feasibility slack boundaries") {
  SchemeSpec spec = make(Scheme::DictionaryLearning, 2, 1);
  Eigen::MatrixXd just_over(2, 1);
  just_over << 1.0 + 1e-10, 0.0;
  CHECK(ImplementationMatrix(just_over).feasible_for(spec));
  Eigen::MatrixXd too_far(2, 1);
  too_far << 1.0 + 1e-8, 0.0;
  CHECK_FALSE(ImplementationMatrix(too_far).feasible_for(spec));

  SchemeSpec nmf = make(Scheme::NMF, 2, 1);
  Eigen::MatrixXd tiny_neg(2, 1);
  tiny_neg << 0.5, -1e-10;
  CHECK(ImplementationMatrix(tiny_neg).feasible_for(nmf));
  Eigen::MatrixXd real_neg(2, 1);
  real_neg << 0.5, -1e-8;
  CHECK_FALSE(ImplementationMatrix(real_neg).feasible_for(nmf));

  CHECK_FALSE(ImplementationMatrix(Eigen::MatrixXd::Zero(3, 1)).feasible_for(spec));  // wrong m
}

TEST_CASE("encoded losses never exceed the worst case") {
  const SchemeSpec specs[] = {
      make(Scheme::NMF, 3, 2),
      make(Scheme::DictionaryLearning, 3, 2),
      make(Scheme::SparseCoding, 3, 2, 1.0, 1.0, 2.0, 1.0),
      make(Scheme::KMeans, 3, 2),
  };
  for (const SchemeSpec& spec : specs) {
    const ConstraintSet constraint = ConstraintSet::for_scheme(spec);
    const double cap = worst_case_loss_bound(spec);
    // k-means worst case assumes centers inside the data ball
    const double col_cap = spec.scheme == Scheme::KMeans ? std::min(spec.c, spec.r) : spec.c;
    RngStream rng(7);
    double worst_seen = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      Eigen::MatrixXd entries(spec.m, spec.k);
      for (int j = 0; j < spec.k; ++j)
        entries.col(j) = spec.scheme == Scheme::NMF
                             ? uniform_orthant_ball(rng, spec.m, col_cap)
                             : uniform_ball(rng, spec.m, col_cap);
      const ImplementationMatrix T(entries);
      const Eigen::VectorXd x = spec.scheme == Scheme::NMF
                                    ? uniform_orthant_ball(rng, spec.m, spec.r)
                                    : uniform_ball(rng, spec.m, spec.r);
      const double loss = encode(x, T, constraint).loss;
      worst_seen = std::max(worst_seen, loss);
      REQUIRE(loss <= cap + 1e-9);
    }
    CHECK(worst_seen <= cap + 1e-9);
  }
}

TEST_CASE("constraint factories and validation") {
  CHECK(ConstraintSet::for_scheme(make(Scheme::NMF, 2, 2)).kind ==
        ConstraintSet::Kind::NonNegOrthant);
  CHECK(ConstraintSet::for_scheme(make(Scheme::DictionaryLearning, 2, 2)).kind ==
        ConstraintSet::Kind::L2Ball);
  const ConstraintSet sc =
      ConstraintSet::for_scheme(make(Scheme::SparseCoding, 2, 2, 1.0, 1.0, 3.0, 1.0));
  CHECK(sc.kind == ConstraintSet::Kind::LpBall);
  CHECK(sc.radius == 3.0);
  CHECK(sc.index == 1.0);
  CHECK(ConstraintSet::for_scheme(make(Scheme::KMeans, 2, 2)).kind ==
        ConstraintSet::Kind::StandardBasis);

  CHECK_THROWS_AS(ConstraintSet::l2_ball(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintSet::lp_ball(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintSet::lp_ball(-1.0, 2.0), std::invalid_argument);
  CHECK_NOTHROW(ConstraintSet::lp_ball(1.0, kInf).validate());
}

TEST_CASE("distribution validation and json round trip") {
  DistributionSpec dist;
  dist.kind = DistributionSpec::Kind::PointMixture;
  dist.m = 2;
  dist.r = 1.0;
  Eigen::VectorXd a(2), b(2);
  a << 0.3, -0.4;
  b << 0.0, 1.0;
  dist.atoms = {a, b};
  dist.weights = {0.25, 0.75};
  CHECK_NOTHROW(dist.validate());

  const DistributionSpec back = distribution_from_json_string(to_json_string(dist));
  CHECK(back.kind == dist.kind);
  CHECK(back.m == 2);
  REQUIRE(back.atoms.size() == 2);
  CHECK((back.atoms[0] - a).norm() == 0.0);
  CHECK(back.weights[1] == 0.75);

  DistributionSpec bad = dist;
  bad.weights = {0.5, 0.6};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = dist;
  bad.r = 0.4;  // atom b sticks out
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = dist;
  bad.atoms[0] = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(distribution_from_json_string("{\"kind\":\"gaussian\",\"m\":1,\"r\":1}"),
                  std::invalid_argument);
}
