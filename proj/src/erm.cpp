#include "kdim/erm.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "kdim/sampling.hpp"

namespace kdim {

namespace {

// Lloyd mean update; a cluster that captured no points keeps its center.
Eigen::MatrixXd lloyd_update(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::MatrixXd>& sample,
                             const Eigen::MatrixXd& codes) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centers.rows(), centers.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(centers.cols());
  for (Eigen::Index j = 0; j < sample.cols(); ++j) {
    Eigen::Index assigned;
    codes.col(j).maxCoeff(&assigned);
    sums.col(assigned) += sample.col(j);
    counts[assigned] += 1.0;
  }
  Eigen::MatrixXd next = centers;
  for (Eigen::Index i = 0; i < centers.cols(); ++i)
    if (counts[i] > 0.0) next.col(i) = sums.col(i) / counts[i];
  return next;
}

// Exact least-squares dictionary update on fixed codes (minimum-norm when the
// code matrix is rank deficient), then the scheme's feasibility repairs.
Eigen::MatrixXd dictionary_update(const SchemeSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& sample,
                                  const Eigen::MatrixXd& codes) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(codes.transpose());
  Eigen::MatrixXd next = cod.solve(sample.transpose()).transpose();
  if (spec.scheme == Scheme::NMF) next = next.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < next.cols(); ++i) {
    const double norm = next.col(i).norm();
    if (norm > spec.c && norm > 0.0) next.col(i) *= spec.c / norm;
  }
  if (spec.scheme == Scheme::NMF && spec.c >= 1.0) {
    // normalized NMF convention: unit columns, codes absorb the scale.
    // Skipped when c < 1 because unit columns would break feasibility.
    next = normalize_columns(ImplementationMatrix(next)).T.entries();
  }
  return next;
}

}  // namespace

std::string to_json_string(const TrainReport& report) {
  nlohmann::json j;
  nlohmann::json matrix = nlohmann::json::array();
  for (Eigen::Index row = 0; row < report.T.rows(); ++row) {
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index col = 0; col < report.T.cols(); ++col) r.push_back(report.T.entries()(row, col));
    matrix.push_back(r);
  }
  j["matrix"] = matrix;
  j["rows"] = report.T.rows();
  j["cols"] = report.T.cols();
  j["empirical_risk"] = report.empirical_risk;
  j["risk_trace"] = report.risk_trace;
  j["iterations"] = report.iterations;
  j["monotone"] = report.monotone;
  j["encoders_converged"] = report.encoders_converged;
  return j.dump();
}

double empirical_risk(const ImplementationMatrix& T, const Eigen::Ref<const Eigen::MatrixXd>& sample,
                      const ConstraintSet& constraint, double tol, bool* all_converged) {
  if (sample.cols() < 1) throw std::invalid_argument("sample must be non-empty");
  if (sample.rows() != T.rows()) throw std::invalid_argument("sample dimension mismatch");
  double total = 0.0;
  bool converged = true;
  for (Eigen::Index j = 0; j < sample.cols(); ++j) {
    const EncodeResult res = encode(sample.col(j), T, constraint, tol);
    total += res.loss;
    converged = converged && res.converged;
  }
  if (all_converged) *all_converged = converged;
  return total / double(sample.cols());
}

NormalizeResult normalize_columns(const ImplementationMatrix& T) {
  NormalizeResult out;
  Eigen::MatrixXd entries = T.entries();
  out.scales = Eigen::VectorXd::Ones(T.cols());
  for (Eigen::Index i = 0; i < T.cols(); ++i) {
    const double norm = T.column_norms()[i];
    if (norm > 0.0) {
      entries.col(i) /= norm;
      out.scales[i] = norm;
    } else {
      out.had_zero_column = true;
    }
  }
  out.T = ImplementationMatrix(std::move(entries));
  return out;
}

ImplementationMatrix random_feasible(const SchemeSpec& spec, std::uint64_t seed) {
  spec.validate();
  RngStream rng(seed, /*stream_index=*/0x1f);
  Eigen::MatrixXd entries(spec.m, spec.k);
  for (int i = 0; i < spec.k; ++i) {
    entries.col(i) = spec.scheme == Scheme::NMF
                         ? uniform_orthant_ball(rng, spec.m, spec.c)
                         : uniform_ball(rng, spec.m, spec.c);
  }
  return ImplementationMatrix(std::move(entries));
}

TrainReport train(const SchemeSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& sample,
                  int outer_iters, std::uint64_t seed,
                  const std::optional<ImplementationMatrix>& init) {
  spec.validate();
  if (sample.cols() < 1) throw std::invalid_argument("sample must be non-empty");
  if (sample.rows() != spec.m) throw std::invalid_argument("sample dimension mismatch");
  if (outer_iters < 1) throw std::invalid_argument("outer_iters must be >= 1");

  const ConstraintSet constraint = ConstraintSet::for_scheme(spec);
  ImplementationMatrix T = init ? *init : random_feasible(spec, seed);
  if (T.rows() != spec.m || T.cols() != spec.k) throw std::invalid_argument("init shape mismatch");

  TrainReport report;
  const Eigen::Index n = sample.cols();
  Eigen::MatrixXd codes(spec.k, n);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < outer_iters; ++it) {
    double risk = 0.0;
    bool all_converged = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      const EncodeResult res = encode(sample.col(j), T, constraint);
      codes.col(j) = res.code;
      risk += res.loss;
      all_converged = all_converged && res.converged;
    }
    risk /= double(n);
    report.risk_trace.push_back(risk);
    report.encoders_converged = report.encoders_converged && all_converged;
    report.iterations = it + 1;
    if (risk > prev + 1e-9) report.monotone = false;
    if (prev - risk < 1e-10) break;  // converged (or worsened): T matches the last trace entry
    prev = risk;
    if (it == outer_iters - 1) break;  // budget exhausted before the next update
    T = ImplementationMatrix(spec.scheme == Scheme::KMeans
                                 ? lloyd_update(T.entries(), sample, codes)
                                 : dictionary_update(spec, sample, codes));
  }
  report.T = std::move(T);
  report.empirical_risk = report.risk_trace.back();
  return report;
}

}  // namespace kdim
