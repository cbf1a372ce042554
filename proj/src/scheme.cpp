#include "kdim/scheme.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace kdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// k^{1-1/p}; exact at the p=1 and p=inf endpoints (1/inf == 0 in IEEE)
double k_pow(double k, double p) { return std::pow(k, 1.0 - 1.0 / p); }

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::NMF: return "nmf";
    case Scheme::DictionaryLearning: return "dictionary_learning";
    case Scheme::SparseCoding: return "sparse_coding";
    case Scheme::KMeans: return "kmeans";
  }
  throw std::invalid_argument("unknown scheme enum value");
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "nmf") return Scheme::NMF;
  if (name == "dictionary_learning" || name == "dictionary") return Scheme::DictionaryLearning;
  if (name == "sparse_coding" || name == "sparse") return Scheme::SparseCoding;
  if (name == "kmeans") return Scheme::KMeans;
  throw std::invalid_argument("unknown scheme name: " + name);
}

void SchemeSpec::validate() const {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
  if (scheme == Scheme::SparseCoding) {
    if (!(s > 0.0)) throw std::invalid_argument("s must be > 0 for sparse coding");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be in [1, inf]");
  }
}

double worst_case_loss_bound(const SchemeSpec& spec) {
  spec.validate();
  switch (spec.scheme) {
    case Scheme::NMF:
      return spec.r * spec.r;
    case Scheme::DictionaryLearning:
      return spec.r * spec.r + spec.c * spec.c * double(spec.k) * double(spec.k);
    case Scheme::SparseCoding: {
      const double reach = spec.r + spec.s * spec.c * k_pow(double(spec.k), spec.p);
      return reach * reach;
    }
    case Scheme::KMeans:
      return 4.0 * spec.r * spec.r;
  }
  throw std::invalid_argument("unknown scheme");
}

double operator_norm_on_Y(const SchemeSpec& spec) {
  spec.validate();
  switch (spec.scheme) {
    case Scheme::NMF:
      return spec.c * std::sqrt(double(spec.k));
    case Scheme::DictionaryLearning:
      return spec.c * double(spec.k);
    case Scheme::SparseCoding:
      return spec.s * spec.c * k_pow(double(spec.k), spec.p);
    case Scheme::KMeans:
      return spec.c;
  }
  throw std::invalid_argument("unknown scheme");
}

std::string to_json_string(const SchemeSpec& spec) {
  nlohmann::json j;
  j["scheme"] = to_string(spec.scheme);
  j["m"] = spec.m;
  j["k"] = spec.k;
  j["r"] = spec.r;
  j["c"] = spec.c;
  j["s"] = spec.s;
  if (std::isinf(spec.p)) {
    j["p"] = "inf";
  } else {
    j["p"] = spec.p;
  }
  j["b"] = spec.b;
  return j.dump();
}

SchemeSpec scheme_spec_from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SchemeSpec spec;
  spec.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  spec.m = j.at("m").get<int>();
  spec.k = j.at("k").get<int>();
  spec.r = j.at("r").get<double>();
  spec.c = j.at("c").get<double>();
  if (j.contains("s")) spec.s = j.at("s").get<double>();
  if (j.contains("p")) {
    if (j.at("p").is_string()) {
      if (j.at("p").get<std::string>() != "inf")
        throw std::invalid_argument("p must be a number or \"inf\"");
      spec.p = kInf;
    } else {
      spec.p = j.at("p").get<double>();
    }
  }
  if (j.contains("b")) spec.b = j.at("b").get<double>();
  spec.validate();
  return spec;
}

bool ImplementationMatrix::feasible_for(const SchemeSpec& spec, double slack) const {
  if (rows() != spec.m || cols() != spec.k) return false;
  for (Eigen::Index i = 0; i < cols(); ++i)
    if (column_norms_[i] > spec.c + slack) return false;
  if (spec.scheme == Scheme::NMF && (entries_.array() < -slack).any()) return false;
  return true;
}

ConstraintSet ConstraintSet::non_neg_orthant() {
  ConstraintSet cs;
  cs.kind = Kind::NonNegOrthant;
  return cs;
}

ConstraintSet ConstraintSet::l2_ball(double radius) {
  ConstraintSet cs;
  cs.kind = Kind::L2Ball;
  cs.radius = radius;
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::lp_ball(double radius, double index) {
  ConstraintSet cs;
  cs.kind = Kind::LpBall;
  cs.radius = radius;
  cs.index = index;
  cs.validate();
  return cs;
}

ConstraintSet ConstraintSet::standard_basis() {
  ConstraintSet cs;
  cs.kind = Kind::StandardBasis;
  return cs;
}

ConstraintSet ConstraintSet::for_scheme(const SchemeSpec& spec) {
  switch (spec.scheme) {
    case Scheme::NMF: return non_neg_orthant();
    case Scheme::DictionaryLearning: return l2_ball(1.0);  // unit-ball codebook
    case Scheme::SparseCoding: return lp_ball(spec.s, spec.p);
    case Scheme::KMeans: return standard_basis();
  }
  throw std::invalid_argument("unknown scheme");
}

void ConstraintSet::validate() const {
  if (kind == Kind::L2Ball || kind == Kind::LpBall) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
  }
  if (kind == Kind::LpBall && !(index >= 1.0))
    throw std::invalid_argument("lp index must be in [1, inf]");
}

void DistributionSpec::validate() const {
  if (m < 1) throw std::invalid_argument("distribution dimension must be >= 1");
  if (!(r >= 0.0)) throw std::invalid_argument("distribution radius must be >= 0");
  if (kind == Kind::PointMixture) {
    if (atoms.empty() || atoms.size() != weights.size())
      throw std::invalid_argument("point mixture needs matching atoms and weights");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].size() != m) throw std::invalid_argument("atom dimension mismatch");
      if (!(weights[i] >= 0.0)) throw std::invalid_argument("weights must be >= 0");
      if (atoms[i].norm() > r + 1e-9) throw std::invalid_argument("atom outside the radius-r ball");
      total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
  }
}

std::string to_json_string(const DistributionSpec& dist) {
  nlohmann::json j;
  switch (dist.kind) {
    case DistributionSpec::Kind::UniformBall: j["kind"] = "uniform_ball"; break;
    case DistributionSpec::Kind::UniformPositiveOrthantBall: j["kind"] = "uniform_positive_orthant_ball"; break;
    case DistributionSpec::Kind::PointMixture: j["kind"] = "point_mixture"; break;
  }
  j["m"] = dist.m;
  j["r"] = dist.r;
  if (dist.kind == DistributionSpec::Kind::PointMixture) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : dist.atoms) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index i = 0; i < a.size(); ++i) row.push_back(a[i]);
      atoms.push_back(row);
    }
    j["atoms"] = atoms;
    j["weights"] = dist.weights;
  }
  return j.dump();
}

DistributionSpec distribution_from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  DistributionSpec dist;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform_ball") {
    dist.kind = DistributionSpec::Kind::UniformBall;
  } else if (kind == "uniform_positive_orthant_ball") {
    dist.kind = DistributionSpec::Kind::UniformPositiveOrthantBall;
  } else if (kind == "point_mixture") {
    dist.kind = DistributionSpec::Kind::PointMixture;
  } else {
    throw std::invalid_argument("unknown distribution kind: " + kind);
  }
  dist.m = j.at("m").get<int>();
  dist.r = j.at("r").get<double>();
  if (dist.kind == DistributionSpec::Kind::PointMixture) {
    for (const auto& row : j.at("atoms")) {
      Eigen::VectorXd a(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) a[Eigen::Index(i)] = row[i].get<double>();
      dist.atoms.push_back(std::move(a));
    }
    dist.weights = j.at("weights").get<std::vector<double>>();
  }
  dist.validate();
  return dist;
}

}  // namespace kdim
