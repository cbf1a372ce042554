#pragma once

// Monte Carlo machinery: distribution sampling, expected-risk estimation,
// bound-validation gap experiments, figure-data sweeps, and crossover scans.

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdim/bounds.hpp"
#include "kdim/encoders.hpp"
#include "kdim/scheme.hpp"

namespace kdim {

// count i.i.d. draws as columns of an m x count matrix. Deterministic in
// (seed, stream): independent experiments pass distinct stream indices.
Eigen::MatrixXd sample(const DistributionSpec& dist, int count, std::uint64_t seed,
                       std::uint64_t stream = 0);

struct RiskEstimate {
  double estimate = 0.0;
  double half_width = 0.0;  // 99% normal-approximation interval
  bool all_converged = true;
};

// Monte Carlo mean of the reconstruction loss over n_mc fresh draws.
// Requires n_mc >= 100.
RiskEstimate estimate_expected_risk(const Eigen::MatrixXd& T, const DistributionSpec& dist,
                                    int n_mc, std::uint64_t seed, const ConstraintSet& constraint,
                                    double tol = kEncodeTol, std::uint64_t stream = 0);

// Exact expected risk for a PointMixture distribution.
double exact_mixture_risk(const Eigen::MatrixXd& T, const DistributionSpec& dist,
                          const ConstraintSet& constraint, double tol = kEncodeTol);

struct GapReport {
  int candidate_count = 0;
  int trials = 0;
  int n = 0;
  double delta = 0.05;
  std::vector<double> gap_sup_per_trial;
  std::map<std::string, double> bound_values;
  int violations = 0;  // trials whose gap exceeds at least one requested bound
  std::uint64_t seed = 0;
  bool all_converged = true;
};

std::string to_json_string(const GapReport& report);

// Per trial: draw n points, take the max over candidates of |R(T) - R_n(T)|,
// and compare against each requested bound evaluated at (spec, n, delta).
// Reference risks R(T) use n_mc = 100*n draws (exact for PointMixture);
// n_mc_override below 100*n is refused. Trials run on `jobs` threads
// (0 = hardware concurrency) with one RNG stream per trial, so results are
// bit-identical for a given seed regardless of thread count.
GapReport gap_experiment(const SchemeSpec& spec, const DistributionSpec& dist,
                         const std::vector<ImplementationMatrix>& candidates, int n, int trials,
                         std::uint64_t seed, const std::vector<std::string>& bounds_to_check,
                         double delta, int jobs = 0, int n_mc_override = 0);

struct FigureRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string bound_name;
  double value = 0.0;
};

struct FigureData {
  std::vector<FigureRow> rows;  // sorted by (bound_name, sweep_value)
  std::vector<std::string> notes;
};

struct FigureOverrides {
  std::optional<double> n_min, n_max;
  std::optional<double> m_min, m_max;
  std::optional<double> k_min, k_max;
  int points = 61;
};

// Bound curves behind the three comparison figures. Panels: (a) the scheme's
// covering bound alone over n; (b) all three bounds over n; (c) all three
// over m; (d) all three over k. Defaults: figure 1 NMF m=1000, k=50;
// figure 2 sparse coding m=100, k=50, s=10, p=1; figure 3 k-means m=k=100;
// delta=0.01 and r=c=1 throughout. Sweep ranges: n in [1e2, 1e8] and
// m in [10, 1e4] and k in [2, 500], log-spaced. Values outside a bound's
// valid regime are omitted with a note.
FigureData figure_data(const std::string& figure_id, const FigureOverrides& overrides = {});

std::string to_csv_string(const FigureData& data);

struct SweepRange {
  std::string var;  // "n", "m", or "k"
  double lo = 0.0;
  double hi = 0.0;
};

// Locations where bound_a - bound_b changes sign over the sweep, each refined
// by bisection to relative width 1e-6. Tangencies without a sign change are
// not reported.
std::vector<double> crossover_scan(const std::string& bound_a, const std::string& bound_b,
                                   const SweepRange& sweep, const BoundParams& fixed);

}  // namespace kdim
