#include "kdim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "kdim/csv.hpp"
#include "kdim/erm.hpp"
#include "kdim/rng.hpp"
#include "kdim/sampling.hpp"

namespace kdim {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99.5% normal quantile (two-sided 99%)

// Reference-risk streams must never collide with per-trial streams (= trial index).
constexpr std::uint64_t kReferenceStreamBase = 1000000000ull;

int mixture_component(const DistributionSpec& dist, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < dist.weights.size(); ++i) {
    acc += dist.weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(dist.weights.size()) - 1;  // u landed in rounding slack
}

void run_parallel(int count, int jobs, const std::function<void(int)>& body) {
  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

Eigen::MatrixXd sample(const DistributionSpec& dist, int count, std::uint64_t seed,
                       std::uint64_t stream) {
  dist.validate();
  if (count < 0) throw std::invalid_argument("sample count must be >= 0");
  RngStream rng(seed, stream);
  Eigen::MatrixXd out(dist.m, count);
  switch (dist.kind) {
    case DistributionSpec::Kind::UniformBall:
      for (int i = 0; i < count; ++i) out.col(i) = uniform_ball(rng, dist.m, dist.r);
      break;
    case DistributionSpec::Kind::UniformPositiveOrthantBall:
      for (int i = 0; i < count; ++i) out.col(i) = uniform_orthant_ball(rng, dist.m, dist.r);
      break;
    case DistributionSpec::Kind::PointMixture:
      for (int i = 0; i < count; ++i)
        out.col(i) = dist.atoms[static_cast<size_t>(mixture_component(dist, rng.next_double()))];
      break;
  }
  return out;
}

RiskEstimate estimate_expected_risk(const Eigen::MatrixXd& T, const DistributionSpec& dist,
                                    int n_mc, std::uint64_t seed, const ConstraintSet& constraint,
                                    double tol, std::uint64_t stream) {
  if (n_mc < 100) throw std::invalid_argument("estimate_expected_risk needs n_mc >= 100");
  constraint.validate();
  const ImplementationMatrix impl(T);
  const Eigen::MatrixXd draws = sample(dist, n_mc, seed, stream);
  RiskEstimate out;
  double mean = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const EncodeResult res = encode(draws.col(i), impl, constraint, tol);
    out.all_converged = out.all_converged && res.converged;
    const double d = res.loss - mean;
    mean += d / double(i + 1);
    m2 += d * (res.loss - mean);
  }
  out.estimate = mean;
  const double variance = m2 / double(n_mc - 1);
  out.half_width = kZ99 * std::sqrt(std::max(variance, 0.0) / double(n_mc));
  return out;
}

double exact_mixture_risk(const Eigen::MatrixXd& T, const DistributionSpec& dist,
                          const ConstraintSet& constraint, double tol) {
  dist.validate();
  if (dist.kind != DistributionSpec::Kind::PointMixture)
    throw std::invalid_argument("exact risk requires a PointMixture distribution");
  const ImplementationMatrix impl(T);
  double risk = 0.0;
  for (size_t i = 0; i < dist.atoms.size(); ++i)
    risk += dist.weights[i] * encode(dist.atoms[i], impl, constraint, tol).loss;
  return risk;
}

std::string to_json_string(const GapReport& report) {
  nlohmann::json j;
  j["candidate_count"] = report.candidate_count;
  j["trials"] = report.trials;
  j["n"] = report.n;
  j["delta"] = report.delta;
  j["gap_sup_per_trial"] = report.gap_sup_per_trial;
  j["bound_values"] = report.bound_values;
  j["violations"] = report.violations;
  j["seed"] = report.seed;
  j["all_converged"] = report.all_converged;
  return j.dump();
}

GapReport gap_experiment(const SchemeSpec& spec, const DistributionSpec& dist,
                         const std::vector<ImplementationMatrix>& candidates, int n, int trials,
                         std::uint64_t seed, const std::vector<std::string>& bounds_to_check,
                         double delta, int jobs, int n_mc_override) {
  spec.validate();
  dist.validate();
  if (candidates.empty()) throw std::invalid_argument("gap_experiment needs candidates");
  if (n < 1) throw std::invalid_argument("gap_experiment needs n >= 1");
  if (trials < 0) throw std::invalid_argument("gap_experiment needs trials >= 0");
  if (dist.m != spec.m) throw std::invalid_argument("distribution dimension does not match scheme");
  const long long n_mc_needed = 100ll * n;
  long long n_mc = n_mc_override == 0 ? n_mc_needed : n_mc_override;
  if (n_mc < n_mc_needed)
    throw std::invalid_argument("reference risk needs n_mc >= 100*n = " +
                                std::to_string(n_mc_needed));
  if (n_mc > 100000000ll) throw std::invalid_argument("reference n_mc above 1e8 is unsupported");
  const ConstraintSet constraint = ConstraintSet::for_scheme(spec);

  GapReport report;
  report.candidate_count = static_cast<int>(candidates.size());
  report.trials = trials;
  report.n = n;
  report.delta = delta;
  report.seed = seed;

  BoundParams params = BoundParams::from_spec(spec, double(n), delta);
  for (const std::string& name : bounds_to_check)
    report.bound_values[name] = evaluate_bound(name, params);

  if (trials == 0) return report;

  const bool exact_reference = dist.kind == DistributionSpec::Kind::PointMixture;
  std::vector<double> reference(candidates.size(), 0.0);
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (exact_reference) {
      reference[i] = exact_mixture_risk(candidates[i].entries(), dist, constraint);
    } else {
      const RiskEstimate est =
          estimate_expected_risk(candidates[i].entries(), dist, static_cast<int>(n_mc), seed,
                                 constraint, kEncodeTol, kReferenceStreamBase + i);
      reference[i] = est.estimate;
      report.all_converged = report.all_converged && est.all_converged;
    }
  }

  report.gap_sup_per_trial.assign(static_cast<size_t>(trials), 0.0);
  std::vector<char> trial_converged(static_cast<size_t>(trials), 1);
  run_parallel(trials, jobs, [&](int t) {
    const Eigen::MatrixXd xs = sample(dist, n, seed, static_cast<std::uint64_t>(t));
    double sup = 0.0;
    bool ok = true;
    for (size_t i = 0; i < candidates.size(); ++i) {
      bool conv = true;
      const double rn = empirical_risk(candidates[i], xs, constraint, kEncodeTol, &conv);
      ok = ok && conv;
      sup = std::max(sup, std::abs(reference[i] - rn));
    }
    report.gap_sup_per_trial[static_cast<size_t>(t)] = sup;
    trial_converged[static_cast<size_t>(t)] = ok ? 1 : 0;
  });

  for (int t = 0; t < trials; ++t) {
    report.all_converged = report.all_converged && trial_converged[static_cast<size_t>(t)];
    const double gap = report.gap_sup_per_trial[static_cast<size_t>(t)];
    for (const auto& [name, value] : report.bound_values) {
      if (gap > value) {
        ++report.violations;
        break;
      }
    }
  }
  return report;
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("sweep needs 0 < lo < hi");
  if (points < 2) throw std::invalid_argument("sweep needs at least 2 points");
  std::vector<double> out(static_cast<size_t>(points));
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    out[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * double(i) / double(points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void set_sweep_var(BoundParams& params, const std::string& var, double value) {
  if (var == "n")
    params.n = value;
  else if (var == "m")
    params.m = value;
  else if (var == "k")
    params.k = value;
  else
    throw std::invalid_argument("unknown sweep variable: " + var);
}

}  // namespace

FigureData figure_data(const std::string& figure_id, const FigureOverrides& overrides) {
  if (figure_id.size() != 2 || figure_id[0] < '1' || figure_id[0] > '3' || figure_id[1] < 'a' ||
      figure_id[1] > 'd')
    throw std::invalid_argument("figure id must be one of 1a..1d, 2a..2d, 3a..3d");
  const int figure = figure_id[0] - '0';
  const char panel = figure_id[1];

  using namespace bound_names;
  SchemeSpec spec;
  std::vector<std::string> bounds;
  switch (figure) {
    case 1:
      spec.scheme = Scheme::NMF;
      spec.m = 1000;
      spec.k = 50;
      bounds = {kNmfCover, kNmfMaurerPontil, kNmfGribonval};
      break;
    case 2:
      spec.scheme = Scheme::SparseCoding;
      spec.m = 100;
      spec.k = 50;
      spec.s = 10.0;
      spec.p = 1.0;
      bounds = {kSparseCover, kSparseMaurerPontil, kSparseGribonval};
      break;
    default:
      spec.scheme = Scheme::KMeans;
      spec.m = 100;
      spec.k = 100;
      bounds = {kKmeansCover, kKmeansMaurerPontil, kKmeansGribonval};
      break;
  }
  if (panel == 'a') bounds.resize(1);  // convergence panel plots only the covering bound

  std::string var = (panel == 'c') ? "m" : (panel == 'd') ? "k" : "n";
  double lo, hi;
  if (var == "n") {
    lo = overrides.n_min.value_or(1e2);
    hi = overrides.n_max.value_or(1e8);
  } else if (var == "m") {
    lo = overrides.m_min.value_or(10.0);
    hi = overrides.m_max.value_or(1e4);
  } else {
    lo = overrides.k_min.value_or(2.0);
    hi = overrides.k_max.value_or(500.0);
  }

  const BoundParams base = BoundParams::from_spec(spec, 1e6, 0.01);
  const std::vector<double> values = log_spaced(lo, hi, overrides.points);

  FigureData data;
  for (const std::string& name : bounds) {
    for (double v : values) {
      BoundParams params = base;
      set_sweep_var(params, var, v);
      FigureRow row;
      row.sweep_var = var;
      row.sweep_value = v;
      row.bound_name = name;
      try {
        row.value = evaluate_bound(name, params);
      } catch (const RegimeError& e) {
        data.notes.push_back(name + " at " + var + "=" + csv::format_double(v) + ": " + e.what());
        continue;
      }
      data.rows.push_back(std::move(row));
    }
  }
  std::sort(data.rows.begin(), data.rows.end(), [](const FigureRow& a, const FigureRow& b) {
    if (a.bound_name != b.bound_name) return a.bound_name < b.bound_name;
    return a.sweep_value < b.sweep_value;
  });
  return data;
}

std::string to_csv_string(const FigureData& data) {
  csv::Table table;
  table.header = {"sweep_var", "sweep_value", "bound_name", "value"};
  for (const FigureRow& row : data.rows)
    table.rows.push_back(
        {row.sweep_var, csv::format_double(row.sweep_value), row.bound_name,
         csv::format_double(row.value)});
  return csv::serialize(table);
}

std::vector<double> crossover_scan(const std::string& bound_a, const std::string& bound_b,
                                   const SweepRange& sweep, const BoundParams& fixed) {
  fixed.validate();
  auto diff = [&](double v) {
    BoundParams params = fixed;
    set_sweep_var(params, sweep.var, v);
    return evaluate_bound(bound_a, params) - evaluate_bound(bound_b, params);
  };

  constexpr int kScanPoints = 512;
  const std::vector<double> xs = log_spaced(sweep.lo, sweep.hi, kScanPoints);
  std::vector<double> fs(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) fs[i] = diff(xs[i]);

  std::vector<double> crossings;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    if (fs[i] == 0.0) {
      // grid point exactly on the curve: a crossover only if the sign flips around it
      if (i > 0 && i + 1 < xs.size() && fs[i - 1] * fs[i + 1] < 0.0) crossings.push_back(xs[i]);
      continue;
    }
    if (fs[i] * fs[i + 1] >= 0.0) continue;
    double lo = xs[i];
    double hi = xs[i + 1];
    double flo = fs[i];
    while (hi - lo > 1e-6 * hi) {
      const double mid = std::sqrt(lo * hi);
      const double fmid = diff(mid);
      if (fmid == 0.0) {
        lo = hi = mid;
        break;
      }
      if (flo * fmid < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fmid;
      }
    }
    crossings.push_back(0.5 * (lo + hi));
  }
  return crossings;
}

}  // namespace kdim
