// kdim: closed-form generalization bounds for k-dimensional coding schemes,
// figure-data sweeps, encoder/trainer runs, and verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or validation error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kdim/bounds.hpp"
#include "kdim/covering.hpp"
#include "kdim/csv.hpp"
#include "kdim/encoders.hpp"
#include "kdim/erm.hpp"
#include "kdim/experiments.hpp"
#include "kdim/scheme.hpp"
#include "kdim/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

const CLI::Validator kDeltaOpen{
    [](std::string& value) -> std::string {
      double v = 0.0;
      try {
        size_t used = 0;
        v = std::stod(value, &used);
        if (used != value.size()) return "not a number: " + value;
      } catch (const std::exception&) {
        return "not a number: " + value;
      }
      if (!(v > 0.0 && v < 1.0)) return "must be strictly between 0 and 1, got " + value;
      return {};
    },
    "FLOAT in (0,1)"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << text;
}

// One state struct per subcommand, bound to CLI11 options.

struct BoundsArgs {
  std::string scheme = "dictionary_learning";
  int m = 1, k = 1;
  double n = 1000;
  double delta = 0.05;
  double r = 1.0, c = 1.0, s = 0.0, p = 2.0, b = 1.0;
  std::optional<double> rn;
  std::string format = "csv";
  std::string out;
};

struct FigureArgs {
  std::string id;
  kdim::FigureOverrides overrides;
  std::string out;
};

struct VerifyCommonArgs {
  std::uint64_t seed = 1;
};

struct VerifyTailsArgs {
  int points = 10000;
};

struct VerifyCoverArgs {
  int m = 1, k = 1;
  double xi = 0.5;
  double r = 1.0, c = 1.0;
  int n = 8;
};

struct VerifyGapArgs {
  std::string scheme = "kmeans";
  int m = 1, k = 1;
  double r = 1.0, c = 1.0, s = 0.0, p = 2.0;
  int n = 100;
  int trials = 200;
  double delta = 0.05;
  int jobs = 0;
};

struct VerifyEncodersArgs {
  int instances = 200;
};

struct TrainArgs {
  std::string scheme;
  int k = 1;
  std::optional<int> m;
  double r = 1.0, c = 1.0, s = 0.0, p = 2.0;
  std::string data;
  std::string gen;
  int count = 0;
  int iters = 50;
  std::uint64_t seed = 1;
  std::string out;
};

struct EncodeArgs {
  std::string scheme;
  double r = 1.0, c = 1.0, s = 0.0, p = 2.0;
  std::string data;
  std::string matrix;
  std::string out;
};

kdim::SchemeSpec make_spec(const std::string& scheme, int m, int k, double r, double c, double s,
                           double p, double b = 1.0) {
  kdim::SchemeSpec spec;
  spec.scheme = kdim::scheme_from_string(scheme);
  spec.m = m;
  spec.k = k;
  spec.r = r;
  spec.c = c;
  spec.s = s;
  spec.p = p;
  spec.b = b;
  spec.validate();
  return spec;
}

int cmd_bounds(const BoundsArgs& args) {
  const kdim::SchemeSpec spec =
      make_spec(args.scheme, args.m, args.k, args.r, args.c, args.s, args.p, args.b);
  const kdim::BoundReport report = kdim::scheme_bounds(spec, args.n, args.delta, args.rn);
  const bool any = std::any_of(report.entries.begin(), report.entries.end(),
                               [](const kdim::BoundEntry& e) { return e.applicable; });
  write_output(args.out,
               args.format == "json" ? kdim::to_json_string(report) : kdim::to_csv_string(report));
  if (!any) {
    std::cerr << "error: no bound applicable at these parameters\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_figure(const FigureArgs& args) {
  const kdim::FigureData data = kdim::figure_data(args.id, args.overrides);
  for (const std::string& note : data.notes) std::cerr << "note: " << note << "\n";
  write_output(args.out, kdim::to_csv_string(data));
  return kExitOk;
}

int print_checks(const std::vector<kdim::CheckResult>& results) {
  for (const auto& r : results)
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.details << "\n";
  return kdim::all_passed(results) ? kExitOk : kExitCheckFailed;
}

int cmd_train(const TrainArgs& args) {
  if (args.data.empty() && args.gen.empty())
    throw std::invalid_argument("train needs --data or --gen");
  Eigen::MatrixXd points;  // columns = points
  if (!args.data.empty()) {
    const Eigen::MatrixXd rows = kdim::csv::read_matrix(read_file(args.data));
    points = rows.transpose();
  } else {
    const kdim::DistributionSpec dist =
        kdim::distribution_from_json_string(read_file(args.gen));
    if (args.count < 1) throw std::invalid_argument("--count must be >= 1 with --gen");
    points = kdim::sample(dist, args.count, args.seed);
  }
  if (points.cols() < 1) throw std::invalid_argument("training data is empty");
  const int m = static_cast<int>(points.rows());
  if (args.m && *args.m != m)
    throw std::invalid_argument("--m " + std::to_string(*args.m) + " does not match data width " +
                                std::to_string(m));
  const kdim::SchemeSpec spec = make_spec(args.scheme, m, args.k, args.r, args.c, args.s, args.p);
  const kdim::TrainReport report = kdim::train(spec, points, args.iters, args.seed);
  write_output(args.out, kdim::to_json_string(report) + "\n");
  return kExitOk;
}

int cmd_encode(const EncodeArgs& args) {
  const Eigen::MatrixXd data_rows = kdim::csv::read_matrix(read_file(args.data));
  const Eigen::MatrixXd T = kdim::csv::read_matrix(read_file(args.matrix));
  if (data_rows.cols() != T.rows())
    throw std::invalid_argument("data width " + std::to_string(data_rows.cols()) +
                                " does not match matrix rows " + std::to_string(T.rows()));
  const kdim::SchemeSpec spec =
      make_spec(args.scheme, static_cast<int>(T.rows()), static_cast<int>(T.cols()), args.r,
                args.c, args.s, args.p);
  const kdim::ImplementationMatrix impl(T);
  const kdim::ConstraintSet constraint = kdim::ConstraintSet::for_scheme(spec);

  std::string text;
  if (data_rows.rows() == 1) {
    text = kdim::to_json_string(kdim::encode(data_rows.row(0).transpose(), impl, constraint));
  } else {
    text = "[";
    for (Eigen::Index i = 0; i < data_rows.rows(); ++i) {
      if (i) text += ",";
      text += kdim::to_json_string(kdim::encode(data_rows.row(i).transpose(), impl, constraint));
    }
    text += "]";
  }
  write_output(args.out, text + "\n");
  return kExitOk;
}

std::string json_scalar_to_string(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
  if (value.is_number_float()) {
    const double v = value.get<double>();
    char buf[64];
    if (v == std::floor(v) && std::abs(v) < 1e15)
      std::snprintf(buf, sizeof(buf), "%.0f", v);
    else
      std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  throw std::invalid_argument("config values must be scalars");
}

// {"subcommand": "verify cover", "m": 1, "xi": 0.25} -> {verify, cover, --m, 1, --xi, 0.25}
std::vector<std::string> config_to_args(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (!j.contains("subcommand") || !j["subcommand"].is_string())
    throw std::invalid_argument("config needs a string \"subcommand\" key");

  std::vector<std::string> args;
  std::istringstream sub(j["subcommand"].get<std::string>());
  for (std::string token; sub >> token;) args.push_back(token);
  if (args.empty()) throw std::invalid_argument("config \"subcommand\" is empty");

  for (const auto& [key, value] : j.items()) {
    if (key == "subcommand") continue;
    if (key == "config") throw std::invalid_argument("config files cannot nest \"config\"");
    std::string flag = "--" + key;
    for (char& ch : flag)
      if (ch == '_') ch = '-';
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    args.push_back(json_scalar_to_string(value));
  }
  return args;
}

int run(const std::vector<std::string>& args);

int dispatch_config(const std::string& path) {
  return run(config_to_args(read_file(path)));
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Generalization bounds for k-dimensional coding schemes"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration replacing subcommand flags");

  BoundsArgs bounds_args;
  CLI::App* bounds = app.add_subcommand("bounds", "Evaluate every bound for a scheme");
  bounds->add_option("--scheme", bounds_args.scheme, "nmf|dictionary_learning|sparse_coding|kmeans")
      ->required();
  bounds->add_option("--m", bounds_args.m, "data dimension")->check(CLI::PositiveNumber);
  bounds->add_option("--k", bounds_args.k, "code dimension")->check(CLI::PositiveNumber);
  bounds->add_option("--n", bounds_args.n, "sample size")->check(CLI::PositiveNumber);
  bounds->add_option("--delta", bounds_args.delta, "confidence level")->check(kDeltaOpen);
  bounds->add_option("--r", bounds_args.r, "data ball radius");
  bounds->add_option("--c", bounds_args.c, "column norm cap");
  bounds->add_option("--s", bounds_args.s, "sparse code norm cap");
  bounds->add_option("--p", bounds_args.p, "sparse norm index (inf allowed)");
  bounds->add_option("--b", bounds_args.b, "loss bound used by the generic forms");
  double rn_value = 0.0;
  CLI::Option* rn_opt = bounds->add_option("--rn", rn_value, "empirical risk for risk-dependent bounds");
  bounds->add_option("--format", bounds_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  bounds->add_option("--out", bounds_args.out, "output path (default stdout)");

  FigureArgs figure_args;
  CLI::App* figure = app.add_subcommand("figure", "Bound curves behind the comparison figures");
  figure->add_option("--id", figure_args.id, "1a..1d, 2a..2d, 3a..3d")->required();
  double ov = 0.0;
  auto add_override = [&](const char* flag, std::optional<double> kdim::FigureOverrides::* field,
                          const char* help) {
    figure
        ->add_option(flag, ov, help)
        // capture the member pointer; CLI11 stores the lambda
        ->each([&figure_args, field](const std::string& value) {
          figure_args.overrides.*field = std::stod(value);
        })
        ->check(CLI::PositiveNumber);
  };
  add_override("--n-min", &kdim::FigureOverrides::n_min, "sample size sweep lower end");
  add_override("--n-max", &kdim::FigureOverrides::n_max, "sample size sweep upper end");
  add_override("--m-min", &kdim::FigureOverrides::m_min, "dimension sweep lower end");
  add_override("--m-max", &kdim::FigureOverrides::m_max, "dimension sweep upper end");
  add_override("--k-min", &kdim::FigureOverrides::k_min, "code dimension sweep lower end");
  add_override("--k-max", &kdim::FigureOverrides::k_max, "code dimension sweep upper end");
  figure->add_option("--points", figure_args.overrides.points, "sweep points")
      ->check(CLI::Range(2, 100000));
  figure->add_option("--out", figure_args.out, "output path (default stdout)");

  VerifyCommonArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "Run invariant suites");
  verify->require_subcommand(1);
  verify->fallthrough();  // leaf subcommands accept --seed wherever it appears
  verify->add_option("--seed", verify_args.seed, "RNG master seed")->envname("KDIM_SEED");

  VerifyTailsArgs tails_args;
  CLI::App* vtails = verify->add_subcommand("tails", "Bennett <= Bernstein over a random grid");
  vtails->fallthrough();
  vtails->add_option("--points", tails_args.points, "grid size")->check(CLI::PositiveNumber);

  VerifyCoverArgs cover_args;
  CLI::App* vcover = verify->add_subcommand("cover", "Empirical covers vs closed-form bounds");
  vcover->fallthrough();
  vcover->add_option("--m", cover_args.m, "data dimension")->check(CLI::PositiveNumber);
  vcover->add_option("--k", cover_args.k, "code dimension")->check(CLI::PositiveNumber);
  vcover->add_option("--xi", cover_args.xi, "parameter grid width")->check(CLI::PositiveNumber);
  vcover->add_option("--r", cover_args.r, "data ball radius")->check(CLI::PositiveNumber);
  vcover->add_option("--c", cover_args.c, "column norm cap")->check(CLI::PositiveNumber);
  vcover->add_option("--n", cover_args.n, "sample size")->check(CLI::PositiveNumber);

  VerifyGapArgs gap_args;
  CLI::App* vgap = verify->add_subcommand("gap", "Monte Carlo gaps vs the covering Hoeffding bound");
  vgap->fallthrough();
  vgap->add_option("--scheme", gap_args.scheme, "nmf|dictionary_learning|sparse_coding|kmeans");
  vgap->add_option("--m", gap_args.m, "data dimension")->check(CLI::PositiveNumber);
  vgap->add_option("--k", gap_args.k, "code dimension")->check(CLI::PositiveNumber);
  vgap->add_option("--r", gap_args.r, "data ball radius");
  vgap->add_option("--c", gap_args.c, "column norm cap");
  vgap->add_option("--s", gap_args.s, "sparse code norm cap");
  vgap->add_option("--p", gap_args.p, "sparse norm index");
  vgap->add_option("--n", gap_args.n, "per-trial sample size")->check(CLI::PositiveNumber);
  vgap->add_option("--trials", gap_args.trials, "trial count")->check(CLI::NonNegativeNumber);
  vgap->add_option("--delta", gap_args.delta, "confidence level")->check(kDeltaOpen);
  vgap->add_option("--jobs", gap_args.jobs, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  VerifyEncodersArgs encoders_args;
  CLI::App* vencoders = verify->add_subcommand("encoders", "Solvers vs brute-force grid oracle");
  vencoders->fallthrough();
  vencoders->add_option("--instances", encoders_args.instances, "instances per scheme")
      ->check(CLI::PositiveNumber);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Fit an implementation by alternating minimization");
  train->add_option("--scheme", train_args.scheme, "nmf|dictionary_learning|sparse_coding|kmeans")
      ->required();
  train->add_option("--k", train_args.k, "code dimension")->check(CLI::PositiveNumber);
  int train_m = 0;
  CLI::Option* train_m_opt =
      train->add_option("--m", train_m, "expected data dimension (checked against the data)");
  train->add_option("--r", train_args.r, "data ball radius");
  train->add_option("--c", train_args.c, "column norm cap");
  train->add_option("--s", train_args.s, "sparse code norm cap");
  train->add_option("--p", train_args.p, "sparse norm index");
  CLI::Option* data_opt =
      train->add_option("--data", train_args.data, "CSV sample, one point per row");
  CLI::Option* gen_opt =
      train->add_option("--gen", train_args.gen, "distribution JSON to sample from");
  data_opt->excludes(gen_opt);
  train->add_option("--count", train_args.count, "draw count with --gen");
  train->add_option("--iters", train_args.iters, "outer iterations")->check(CLI::PositiveNumber);
  train->add_option("--seed", train_args.seed, "RNG master seed")->envname("KDIM_SEED");
  train->add_option("--out", train_args.out, "output path (default stdout)");

  EncodeArgs encode_args;
  CLI::App* encode = app.add_subcommand("encode", "Encode points against a fixed implementation");
  encode->add_option("--scheme", encode_args.scheme, "nmf|dictionary_learning|sparse_coding|kmeans")
      ->required();
  encode->add_option("--r", encode_args.r, "data ball radius");
  encode->add_option("--c", encode_args.c, "column norm cap");
  encode->add_option("--s", encode_args.s, "sparse code norm cap");
  encode->add_option("--p", encode_args.p, "sparse norm index");
  encode->add_option("--data", encode_args.data, "CSV points, one per row")->required();
  encode->add_option("--matrix", encode_args.matrix, "CSV implementation matrix")->required();
  encode->add_option("--out", encode_args.out, "output path (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("kdim");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!config_path.empty()) {
    if (app.get_subcommands().size() > 0) {
      std::cerr << "error: --config replaces subcommand flags; pass one or the other\n";
      return kExitUsage;
    }
    return dispatch_config(config_path);
  }

  if (*rn_opt) bounds_args.rn = rn_value;
  if (train_m_opt->count() > 0) train_args.m = train_m;

  if (*bounds) return cmd_bounds(bounds_args);
  if (*figure) return cmd_figure(figure_args);
  if (*verify) {
    if (*vtails) return print_checks(kdim::tails_suite(tails_args.points, verify_args.seed));
    if (*vcover)
      return print_checks(kdim::cover_suite(cover_args.m, cover_args.k, cover_args.xi,
                                            cover_args.r, cover_args.c, cover_args.n,
                                            verify_args.seed));
    if (*vgap) {
      kdim::SchemeSpec spec = make_spec(gap_args.scheme, gap_args.m, gap_args.k, gap_args.r,
                                        gap_args.c, gap_args.s, gap_args.p);
      spec.b = kdim::worst_case_loss_bound(spec);
      spec.validate();
      kdim::DistributionSpec dist;
      dist.kind = spec.scheme == kdim::Scheme::NMF
                      ? kdim::DistributionSpec::Kind::UniformPositiveOrthantBall
                      : kdim::DistributionSpec::Kind::UniformBall;
      dist.m = spec.m;
      dist.r = spec.r;
      return print_checks(kdim::gap_suite(spec, dist, gap_args.n, gap_args.trials,
                                          verify_args.seed, gap_args.delta, gap_args.jobs));
    }
    if (*vencoders)
      return print_checks(kdim::encoder_suite(encoders_args.instances, verify_args.seed));
  }
  if (*train) return cmd_train(train_args);
  if (*encode) return cmd_encode(encode_args);

  std::cerr << app.help();
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const kdim::RegimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
