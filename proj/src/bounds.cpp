#include "kdim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "kdim/csv.hpp"

namespace kdim {

namespace {

constexpr double kPi = std::numbers::pi;

double ln_two_over(double delta) { return std::log(2.0 / delta); }

// k^{1-1/p}, exact at p=1 and p=inf
double k_pow(double k, double p) { return std::pow(k, 1.0 - 1.0 / p); }

// Shared gap-bound shells fed by a covering log-term lnN = ln N_1(F, 1/n, n):
// Hoeffding-type 2/n + b sqrt((lnN + ln(2/delta)) / (2n)) and Bernstein-type
// 2/n + 5(lnN + ln(2/delta))/n + sqrt(2 R_n (lnN + ln(2/delta))/n). Every
// dimensionality-dependent bound goes through these, with the scheme's
// covering constant swapped in.
double hoeffding_cover_form(double ln_cover, double b, double n, double delta) {
  return 2.0 / n + b * std::sqrt((ln_cover + ln_two_over(delta)) / (2.0 * n));
}

double bernstein_cover_form(double ln_cover, double empirical_risk, double n, double delta) {
  const double a = ln_cover + ln_two_over(delta);
  return 2.0 / n + 5.0 * a / n + std::sqrt(2.0 * empirical_risk * a / n);
}

// Covering log-terms mk ln(C n) at loss resolution 1/n. The constants C are
// the per-scheme parameter-grid covering constants; the NMF and k-means forms
// reduce to their printed r=c=1 statements exactly.
double general_cover_log(const BoundParams& q) {
  const double arg = 4.0 * (q.r + q.c * q.k) * std::sqrt(q.m) * q.c * q.k * q.n;
  if (!(arg > 1.0)) throw RegimeError("covering log argument <= 1; bound outside valid regime");
  return q.m * q.k * std::log(arg);
}

double nmf_cover_log(const BoundParams& q) {
  const double arg = 2.0 * (q.r + q.c * q.k) * std::sqrt(q.m) * q.c * q.k * q.n;
  if (!(arg > 1.0)) throw RegimeError("covering log argument <= 1; bound outside valid regime");
  return q.m * q.k * std::log(arg);
}

double sparse_cover_log(const BoundParams& q) {
  if (!(q.s > 0.0)) throw std::invalid_argument("sparse bounds need s > 0");
  const double kp = k_pow(q.k, q.p);
  const double arg = 4.0 * (q.r * q.s + q.c * q.s * q.s * kp) * std::sqrt(q.m) * q.c * kp * q.n;
  if (!(arg > 1.0)) throw RegimeError("covering log argument <= 1; bound outside valid regime");
  return q.m * q.k * std::log(arg);
}

double kmeans_cover_log(const BoundParams& q) {
  const double arg = 8.0 * q.r * q.r * std::sqrt(q.m) * q.n;
  if (!(arg > 1.0)) throw RegimeError("covering log argument <= 1; bound outside valid regime");
  return q.m * q.k * std::log(arg);
}

double require_risk(const BoundParams& q, const char* who) {
  if (!q.empirical_risk)
    throw std::invalid_argument(std::string(who) + " needs empirical_risk");
  return *q.empirical_risk;
}

double nmf_maurer_pontil(const BoundParams& q) {
  const double arg = 16.0 * q.n * q.k;
  if (!(arg > 1.0)) throw RegimeError("log argument <= 1; bound outside valid regime");
  return q.k / std::sqrt(q.n) * (14.0 * std::sqrt(q.k) + 0.5 * std::sqrt(std::log(arg))) +
         std::sqrt(ln_two_over(q.delta) / (2.0 * q.n));
}

double nmf_gribonval(const BoundParams& q) {
  const double lg = std::log(12.0 * std::sqrt(8.0 * q.m * q.k));
  return 3.0 / std::sqrt(8.0) * std::sqrt(q.m * q.k * lg * std::log(q.n) / q.n) +
         1.0 / std::sqrt(8.0) * std::sqrt((q.m * q.k * lg + ln_two_over(q.delta)) / q.n);
}

double sparse_maurer_pontil(const BoundParams& q) {
  if (!(q.s > 0.0)) throw std::invalid_argument("sparse bounds need s > 0");
  const double kp = k_pow(q.k, q.p);
  const double arg = 16.0 * q.n * q.s * q.s * 2.0 * kp * kp;
  if (!(arg > 1.0)) throw RegimeError("log argument <= 1; bound outside valid regime");
  return q.k / 2.0 * std::sqrt(std::log(arg) / q.n) + std::sqrt(ln_two_over(q.delta) / (2.0 * q.n)) +
         (4.0 + 4.0 * q.s * kp + std::sqrt(8.0 * kPi) * q.s * std::pow(q.k, 2.0 - 1.0 / q.p)) /
             std::sqrt(q.n);
}

double sparse_gribonval(const BoundParams& q) {
  if (!(q.s > 0.0)) throw std::invalid_argument("sparse bounds need s > 0");
  const double kp = k_pow(q.k, q.p);
  const double lg = std::max(std::log(6.0 * std::sqrt(8.0) * q.s * kp), 1.0);
  return 1.0 / std::sqrt(8.0) *
         (3.0 * std::sqrt(q.m * q.k * lg * std::log(q.n) / q.n) +
          std::sqrt((q.m * q.k * lg + ln_two_over(q.delta)) / q.n));
}

double kmeans_maurer_pontil(const BoundParams& q) {
  return 3.0 * std::sqrt(2.0 * kPi) * q.k * q.r * q.r / std::sqrt(q.n) +
         q.r * q.r * std::sqrt(8.0 * std::log(1.0 / q.delta) / q.n);
}

double kmeans_gribonval(const BoundParams& q) {
  const double lg = std::log(12.0 * std::sqrt(8.0));
  return 3.0 / std::sqrt(8.0) * std::sqrt(q.m * q.k * lg * std::log(q.n) / q.n) +
         1.0 / std::sqrt(8.0) * std::sqrt((q.m * q.k * lg + ln_two_over(q.delta)) / q.n);
}

}  // namespace

void BoundParams::validate() const {
  if (!(m >= 1.0)) throw std::invalid_argument("m must be >= 1");
  if (!(k >= 1.0)) throw std::invalid_argument("k must be >= 1");
  if (!(n >= 1.0)) throw std::invalid_argument("n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be >= 0");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (!(b > 0.0)) throw std::invalid_argument("b must be > 0");
  if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be in [1, inf]");
  if (empirical_risk && !(*empirical_risk >= 0.0))
    throw std::invalid_argument("empirical_risk must be >= 0");
  if (lambda && !(*lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (V && !(*V > 0.0)) throw std::invalid_argument("V must be > 0");
  if (beta && !(*beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (V && beta && !(8.0 * *beta * *V < 3.0))
    throw std::invalid_argument("Bennett fields need 8*beta*V < 3");
}

BoundParams BoundParams::from_spec(const SchemeSpec& spec, double n, double delta) {
  spec.validate();
  BoundParams q;
  q.m = spec.m;
  q.k = spec.k;
  q.n = n;
  q.delta = delta;
  q.r = spec.r;
  q.c = spec.c;
  q.b = spec.b;
  q.s = spec.s;
  q.p = spec.p;
  q.validate();
  return q;
}

double bennett_h(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("bennett_h needs x >= 0");
  return (1.0 + x) * std::log1p(x) - x;
}

double hoeffding_tail(double n, double eps, double B) {
  if (!(n >= 1.0) || !(eps >= 0.0) || !(B > 0.0))
    throw std::invalid_argument("hoeffding_tail needs n >= 1, eps >= 0, B > 0");
  return 2.0 * std::exp(-2.0 * n * eps * eps / (B * B));
}

double bernstein_tail(double n, double eps, double V, double B) {
  if (!(n >= 1.0) || !(eps >= 0.0) || !(V > 0.0) || !(B > 0.0))
    throw std::invalid_argument("bernstein_tail needs n >= 1, eps >= 0, V > 0, B > 0");
  return 2.0 * std::exp(-n * eps * eps / (2.0 * (V + B * eps / 3.0)));
}

double bennett_tail(double n, double eps, double V, double B) {
  if (!(n >= 1.0) || !(eps >= 0.0) || !(V > 0.0) || !(B > 0.0))
    throw std::invalid_argument("bennett_tail needs n >= 1, eps >= 0, V > 0, B > 0");
  return 2.0 * std::exp(-n * V / (B * B) * bennett_h(B * eps / V));
}

double bound_mp_theorem1(const BoundParams& params) {
  params.validate();
  return (4.0 * params.c * params.r * params.k + 2.0 * params.c * params.c * params.k * params.k) *
             std::sqrt(kPi / params.n) +
         params.b * std::sqrt(8.0 * ln_two_over(params.delta) / params.n);
}

double bound_mp_theorem2(const BoundParams& params, double norm_y, bool finite_dim) {
  params.validate();
  if (!(norm_y > 0.0)) throw std::invalid_argument("norm_y must be > 0");
  const double arg = 16.0 * params.n * norm_y * norm_y;
  if (!(arg > 1.0)) throw RegimeError("16 n normY^2 <= 1; formula outside valid regime");
  const double middle =
      finite_dim ? params.b / 2.0 * std::sqrt(params.m * params.k * std::log(arg) / params.n)
                 : params.b * params.k / 2.0 * std::sqrt(std::log(arg) / params.n);
  return params.b * std::sqrt(ln_two_over(params.delta) / (2.0 * params.n)) + middle +
         (4.0 + 4.0 * norm_y + std::sqrt(8.0 * kPi) * params.r * params.k * norm_y) /
             std::sqrt(params.n);
}

double bound_main_one(const BoundParams& params) {
  params.validate();
  return hoeffding_cover_form(general_cover_log(params), params.b, params.n, params.delta);
}

double bound_main_two(const BoundParams& params) {
  params.validate();
  const double risk = require_risk(params, "bound_main_two");
  return bernstein_cover_form(general_cover_log(params), risk, params.n, params.delta);
}

double bound_prop_lambda(const BoundParams& params) {
  params.validate();
  if (!params.lambda) throw std::invalid_argument("bound_prop_lambda needs lambda");
  const double lambda = *params.lambda;
  const double risk = require_risk(params, "bound_prop_lambda");
  const double a = general_cover_log(params) + ln_two_over(params.delta);
  return (1.0 + lambda) * risk + 2.0 / params.n + (1.0 / (4.0 * lambda) + 5.0) * a / params.n;
}

double bennett_exponent(double beta, double V, double gap) {
  if (!(beta > 0.0) || !(V > 0.0)) throw std::invalid_argument("bennett_exponent needs beta, V > 0");
  const double ratio_arg = 8.0 * beta * V / 3.0;
  if (!(ratio_arg <= 1.0)) throw RegimeError("8*beta*V > 3; exponent outside valid regime");
  if (!(gap > 0.0 && gap < 1.0)) throw RegimeError("gap must be in (0,1)");
  return 1.0 / (2.0 - std::log(ratio_arg) / std::log(gap));
}

BennettEval bound_main_three_given(const BoundParams& params, double gap) {
  params.validate();
  if (!params.V || !params.beta) throw std::invalid_argument("Bennett bound needs V and beta");
  if (!(gap > 0.0 && gap <= *params.V))
    throw std::invalid_argument("given gap must lie in (0, V]");
  if (!(gap < 1.0)) throw RegimeError("gap >= 1; exponent outside valid regime");
  BennettEval out;
  out.gap = gap;
  out.exponent = bennett_exponent(*params.beta, *params.V, gap);
  const double base = (general_cover_log(params) + ln_two_over(params.delta)) / (*params.beta * params.n);
  out.value = 2.0 / params.n + std::pow(base, out.exponent);
  return out;
}

BennettEval bound_main_three_self_consistent(const BoundParams& params) {
  params.validate();
  if (!params.V || !params.beta) throw std::invalid_argument("Bennett bound needs V and beta");
  const double base = (general_cover_log(params) + ln_two_over(params.delta)) / (*params.beta * params.n);
  double gap = bound_main_one(params);
  BennettEval out;
  out.converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    if (!(gap > 0.0 && gap < 1.0)) {
      out.gap = gap;  // left the regime; report where
      out.iterations = iter;
      return out;
    }
    out.exponent = bennett_exponent(*params.beta, *params.V, gap);
    const double next = 2.0 / params.n + std::pow(base, out.exponent);
    out.iterations = iter + 1;
    const bool done = std::abs(next - gap) < 1e-10;
    gap = next;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.gap = gap;
  out.value = gap;
  return out;
}

double evaluate_bound(const std::string& name, const BoundParams& params) {
  using namespace bound_names;
  params.validate();
  if (name == kCoverHoeffding) return bound_main_one(params);
  if (name == kCoverBernstein) return bound_main_two(params);
  if (name == kMaurerPontilK2) return bound_mp_theorem1(params);
  if (name == kNmfCover) return hoeffding_cover_form(nmf_cover_log(params), 1.0, params.n, params.delta);
  if (name == kNmfMaurerPontil) return nmf_maurer_pontil(params);
  if (name == kNmfGribonval) return nmf_gribonval(params);
  if (name == kSparseCover) return hoeffding_cover_form(sparse_cover_log(params), 1.0, params.n, params.delta);
  if (name == kSparseMaurerPontil) return sparse_maurer_pontil(params);
  if (name == kSparseGribonval) return sparse_gribonval(params);
  if (name == kKmeansCover) return hoeffding_cover_form(kmeans_cover_log(params), 1.0, params.n, params.delta);
  if (name == kKmeansMaurerPontil) return kmeans_maurer_pontil(params);
  if (name == kKmeansGribonval) return kmeans_gribonval(params);
  throw std::invalid_argument("unknown bound name: " + name);
}

const BoundEntry* BoundReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

BoundReport scheme_bounds(const SchemeSpec& spec, double n, double delta,
                          std::optional<double> empirical_risk) {
  BoundParams params = BoundParams::from_spec(spec, n, delta);
  params.empirical_risk = empirical_risk;

  using namespace bound_names;
  struct Row {
    const char* name;
    std::optional<Scheme> scheme;  // nullopt = generic
  };
  static const Row registry[] = {
      {kNmfCover, Scheme::NMF},
      {kNmfMaurerPontil, Scheme::NMF},
      {kNmfGribonval, Scheme::NMF},
      {kSparseCover, Scheme::SparseCoding},
      {kSparseMaurerPontil, Scheme::SparseCoding},
      {kSparseGribonval, Scheme::SparseCoding},
      {kKmeansCover, Scheme::KMeans},
      {kKmeansMaurerPontil, Scheme::KMeans},
      {kKmeansGribonval, Scheme::KMeans},
      {kCoverHoeffding, std::nullopt},
      {kCoverBernstein, std::nullopt},
      {kMaurerPontilK2, std::nullopt},
  };

  BoundReport report;
  for (const Row& row : registry) {
    BoundEntry entry;
    entry.name = row.name;
    if (row.scheme && *row.scheme != spec.scheme) {
      entry.notes = "applies to scheme " + to_string(*row.scheme);
      report.entries.push_back(std::move(entry));
      continue;
    }
    try {
      entry.value = evaluate_bound(row.name, params);
      entry.capped = std::min(entry.value, spec.b);
      entry.applicable = true;
      if (row.name == std::string(kCoverBernstein) && empirical_risk &&
          (*empirical_risk < 0.0 || *empirical_risk > 1.0)) {
        entry.notes = "empirical risk outside [0,1]; theorem hypothesis violated, value computed anyway";
      }
    } catch (const RegimeError& e) {
      entry.notes = e.what();
    } catch (const std::invalid_argument& e) {
      entry.notes = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string to_csv_string(const BoundReport& report) {
  std::ostringstream out;
  out << "bound_name,value,applicable,notes\n";
  for (const auto& e : report.entries) {
    out << csv::quote(e.name) << ',';
    if (e.applicable) out << csv::format_double(e.value);
    out << ',' << (e.applicable ? "true" : "false") << ',' << csv::quote(e.notes) << '\n';
  }
  return out.str();
}

std::string to_json_string(const BoundReport& report) {
  nlohmann::json j;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json row;
    row["bound_name"] = e.name;
    if (e.applicable) {
      row["value"] = e.value;
      row["capped"] = e.capped;
    } else {
      row["value"] = nullptr;
      row["capped"] = nullptr;
    }
    row["applicable"] = e.applicable;
    row["notes"] = e.notes;
    entries.push_back(row);
  }
  j["entries"] = entries;
  return j.dump();
}

}  // namespace kdim
