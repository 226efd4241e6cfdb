#include "failsafe/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "failsafe/cli/io.hpp"
#include "failsafe/convergence.hpp"
#include "failsafe/error.hpp"
#include "failsafe/estimator.hpp"
#include "failsafe/montecarlo.hpp"
#include "failsafe/normal.hpp"
#include "failsafe/nr_distribution.hpp"
#include "failsafe/rng.hpp"

#ifndef FAILSAFE_VERSION
#define FAILSAFE_VERSION "0.0.0"
#endif

namespace failsafe::cli {
namespace {

using io::Cell;
using io::Emission;
using io::Json;
using io::Table;

struct CommonOptions {
  std::string format = "json";
  std::string output = "-";
  std::string report;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
};

struct Grid {
  double lo;
  double hi;
  int n;

  std::vector<double> points() const {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    if (n > 1) v.back() = hi;
    return v;
  }
};

Grid parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? std::string::npos : spec.find(':', a + 1);
  if (b == std::string::npos) throw UsageError("--grid expects LO:HI:N, got '" + spec + "'");
  auto num = [&](std::string_view s, auto& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  };
  Grid g{};
  const std::string_view sv(spec);
  if (!num(sv.substr(0, a), g.lo) || !num(sv.substr(a + 1, b - a - 1), g.hi) || !num(sv.substr(b + 1), g.n) ||
      g.n < 1 || !(g.hi >= g.lo) || !std::isfinite(g.lo) || !std::isfinite(g.hi)) {
    throw UsageError("--grid expects LO:HI:N with LO <= HI and N >= 1, got '" + spec + "'");
  }
  return g;
}

std::uint64_t resolve_seed(const CommonOptions& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("FAILSAFE_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw UsageError("FAILSAFE_SEED must be an unsigned 64-bit integer, got '" + std::string(s) + "'");
    }
    return v;
  }
  return kDefaultSeed;
}

std::vector<Approach> approaches_for(const std::string& name) {
  if (name == "both") return {Approach::Truncated, Approach::Folded};
  return {parse_approach(name)};
}

std::optional<int> parse_bins(const std::string& s) {
  if (s == "auto") return std::nullopt;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1) {
    throw UsageError("--bins expects a positive integer or 'auto', got '" + s + "'");
  }
  return v;
}

Json base_meta(const std::string& command, const CommonOptions& c, std::uint64_t seed, Json config) {
  config["format"] = c.format;
  config["output"] = c.output;
  config["workers"] = c.workers;
  Json meta = Json::object();
  meta["tool"] = "failsafe";
  meta["version"] = FAILSAFE_VERSION;
  meta["command"] = command;
  meta["seed"] = seed;
  meta["config"] = std::move(config);
  return meta;
}

void finish(const Emission& e, const CommonOptions& c, std::ostream& out, std::ostream& err,
            const std::string& summary) {
  const auto format = io::parse_format(c.format);
  io::emit(e, format, c.output, out);
  if (format == io::Format::Csv) {
    if (!c.report.empty()) {
      Json report = Json::object();
      report["meta"] = e.meta;
      for (const auto& [key, value] : e.sections.items()) report[key] = value;
      io::write_text(report.dump(2) + "\n", c.report, out);
    } else if (!summary.empty()) {
      err << summary << "\n";
    }
  }
}

void add_common(CLI::App* cmd, CommonOptions& c, bool seeded) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd->add_option("-o,--output", c.output, "Output path, '-' for stdout")->capture_default_str();
  cmd->add_option("--report", c.report, "In CSV mode, also write the JSON sections (fit, ks, ...) here");
  if (seeded) {
    cmd->add_option("--seed", c.seed, "Master seed (default: $FAILSAFE_SEED, else 1979)");
    cmd->add_option("--workers", c.workers, "Worker threads, 0 = hardware concurrency")->capture_default_str();
  }
}

// ---- compute ---------------------------------------------------------------

struct ComputeOptions {
  double alpha = kDefaultAlpha;
  std::string file;
};

void run_compute(const ComputeOptions& o, const CommonOptions& c, std::ostream& out, std::ostream& err) {
  const auto table = io::read_study_csv(o.file);
  const auto studies = table.to_study_set();
  const auto r = fail_safe_n(studies, o.alpha);

  Json config = Json::object();
  config["alpha"] = o.alpha;
  config["file"] = o.file;
  config["input_kind"] = table.kind == io::StudyKind::ZScores ? "z" : "effect,se";
  Emission e;
  e.meta = base_meta("compute", c, resolve_seed(c), std::move(config));
  e.data.columns = {"k",        "alpha",        "z_alpha",   "sum_z",       "stouffer_z",
                    "stouffer_p", "n_r_raw", "n_r_reported", "threshold", "minimal_bias"};
  e.data.add_row({static_cast<long long>(r.k), r.alpha, r.z_alpha, studies.sum(), r.stouffer_z, r.stouffer_p,
                  r.n_r_raw, r.n_r_reported, r.threshold, r.minimal_bias});
  finish(e, c, out, err, "");
}

// ---- dist ------------------------------------------------------------------

struct DistOptions {
  int k = 0;
  double alpha = kDefaultAlpha;
  std::string approach = "both";
  std::vector<double> x;
  std::vector<double> t;
  std::vector<double> p;
  std::string grid;
  bool asymptotic = false;
};

std::vector<double> dist_points(const DistOptions& o, const std::vector<double>& explicit_points, const char* flag) {
  if (!o.grid.empty() && !explicit_points.empty()) {
    throw UsageError(std::string("use either --grid or ") + flag + ", not both");
  }
  if (!o.grid.empty()) return parse_grid(o.grid).points();
  if (explicit_points.empty()) throw UsageError(std::string("one of --grid or ") + flag + " is required");
  return explicit_points;
}

Json dist_config(const std::string& kind, const DistOptions& o, const std::vector<double>& pts) {
  Json config = Json::object();
  config["kind"] = kind;
  config["k"] = o.k;
  config["alpha"] = o.alpha;
  config["approach"] = o.asymptotic ? "asymptotic" : o.approach;
  if (!o.grid.empty()) config["grid"] = o.grid;
  config["points"] = pts;
  return config;
}

void run_dist(const std::string& kind, const DistOptions& o, bool approach_given, const CommonOptions& c,
              std::ostream& out, std::ostream& err) {
  const auto params = sum_params(o.k, o.alpha);
  const auto approaches = approaches_for(o.approach);
  Emission e;
  std::vector<double> pts;

  if (kind == "pdf" || kind == "cdf") {
    pts = dist_points(o, o.x, "--x");
    e.data.columns = {"approach", "n_r", kind};
    if (o.asymptotic) {
      if (kind != "pdf") throw UsageError("--asymptotic applies to pdf only");
      if (approach_given) throw UsageError("--asymptotic replaces --approach; pass one or the other");
      for (double x : pts) e.data.add_row({std::string("asymptotic"), x, nr_pdf_asymptotic(x, params)});
    } else {
      for (auto a : approaches) {
        const NrDistribution d(a, params);
        for (double x : pts) {
          const double v = kind == "pdf" ? nr_pdf(x, d) : nr_cdf(x, d);
          e.data.add_row({std::string(to_string(a)), x, v});
        }
      }
    }
  } else if (kind == "quantile") {
    pts = dist_points(o, o.p, "--p");
    e.data.columns = {"approach", "p", "n_r"};
    for (auto a : approaches) {
      const NrDistribution d(a, params);
      for (double p : pts) e.data.add_row({std::string(to_string(a)), p, nr_quantile(p, d)});
    }
  } else if (kind == "moments") {
    if (!o.grid.empty()) throw UsageError("moments takes no --grid");
    e.data.columns = {"approach", "k", "alpha", "mean", "variance", "epsilon", "delta"};
    for (auto a : approaches) {
      const auto m = nr_moments(NrDistribution(a, params));
      e.data.add_row({std::string(to_string(a)), static_cast<long long>(o.k), o.alpha, m.mean, m.variance, m.epsilon,
                      m.delta});
    }
  } else if (kind == "cf") {
    pts = dist_points(o, o.t, "--t");
    e.data.columns = {"approach", "t", "re", "im"};
    for (auto a : approaches) {
      const NrDistribution d(a, params);
      for (double t : pts) {
        const auto v = nr_cf(t, d);
        e.data.add_row({std::string(to_string(a)), t, v.real(), v.imag()});
      }
    }
  }
  Json config = dist_config(kind, o, pts);
  e.meta = base_meta("dist " + kind, c, resolve_seed(c), std::move(config));
  finish(e, c, out, err, "");
}

// ---- simulate --------------------------------------------------------------

struct SimulateOptions {
  int k = 0;
  double alpha = kDefaultAlpha;
  long long reps = 100000;
  std::string regime;
  std::string bins = "auto";
};

Json ks_json(double stat, std::size_t n) {
  Json j = Json::object();
  j["statistic"] = stat;
  j["critical_1pct"] = ks_critical_value(n, 0.01);
  j["n"] = n;
  j["passes_1pct"] = stat < ks_critical_value(n, 0.01);
  return j;
}

void run_simulate_clt(const SimulateOptions& o, const CommonOptions& c, std::ostream& out, std::ostream& err) {
  const auto seed = resolve_seed(c);
  const auto batch = simulate_half_normal_sums(o.k, o.reps, seed, {.workers = c.workers});
  const auto hist = histogram(batch, parse_bins(o.bins));
  const double mu = o.k * normal::kSqrt2OverPi;
  const double sigma = std::sqrt(o.k * normal::kHalfNormalVarFactor);

  Emission e;
  Json config = Json::object();
  config["k"] = o.k;
  config["reps"] = o.reps;
  config["bins"] = o.bins;
  e.meta = base_meta("simulate clt", c, seed, std::move(config));
  e.data.columns = {"bin_lo", "bin_hi", "midpoint", "count", "density", "normal_pdf"};
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double m = hist.midpoint(i);
    e.data.add_row({hist.bin_edges[i], hist.bin_edges[i + 1], m, hist.counts[i], hist.height(i),
                    normal::pdf((m - mu) / sigma) / sigma});
  }
  const double d = ks_statistic(batch, [&](double x) { return normal::cdf((x - mu) / sigma); });
  e.sections["ks"] = ks_json(d, batch.values.size());
  e.sections["normal"] = Json{{"mean", mu}, {"variance", sigma * sigma}};
  std::ostringstream summary;
  summary << "ks " << io::format_number(d) << " (1% critical " << io::format_number(ks_critical_value(batch.values.size()))
          << ")";
  finish(e, c, out, err, summary.str());
}

void run_simulate_nr(const SimulateOptions& o, const CommonOptions& c, std::ostream& out, std::ostream& err) {
  const auto seed = resolve_seed(c);
  Regime regime;
  if (o.regime == "truncated") regime = Regime::NrTruncated;
  else if (o.regime == "folded") regime = Regime::NrFolded;
  else throw UsageError("--regime must be truncated or folded");

  const auto batch = simulate_nr(o.k, o.alpha, o.reps, seed, regime, {.workers = c.workers});
  const auto hist = histogram(batch, parse_bins(o.bins));
  const NrDistribution trunc(Approach::Truncated, o.k, o.alpha);
  const NrDistribution fold(Approach::Folded, o.k, o.alpha);
  auto safe_pdf = [](double x, const NrDistribution& d) {
    try {
      return nr_pdf(x, d);
    } catch (const SingularityError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  Emission e;
  Json config = Json::object();
  config["k"] = o.k;
  config["alpha"] = o.alpha;
  config["reps"] = o.reps;
  config["regime"] = o.regime;
  config["bins"] = o.bins;
  e.meta = base_meta("simulate nr", c, seed, std::move(config));
  e.data.columns = {"bin_lo", "bin_hi", "midpoint", "count", "density", "pdf_truncated", "pdf_folded"};
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double m = hist.midpoint(i);
    e.data.add_row({hist.bin_edges[i], hist.bin_edges[i + 1], m, hist.counts[i], hist.height(i), safe_pdf(m, trunc),
                    safe_pdf(m, fold)});
  }
  const double d_trunc = ks_statistic(batch, [&](double x) { return nr_cdf(x, trunc); });
  const double d_fold = ks_statistic(batch, [&](double x) { return nr_cdf(x, fold); });
  e.sections["ks"] = Json{{"truncated", ks_json(d_trunc, batch.values.size())},
                          {"folded", ks_json(d_fold, batch.values.size())}};
  const double rejected = static_cast<double>(batch.reps_requested - batch.reps_kept);
  e.sections["rejection"] = Json{{"reps_requested", batch.reps_requested},
                                 {"reps_kept", batch.reps_kept},
                                 {"rejection_rate", rejected / static_cast<double>(batch.reps_requested)},
                                 {"expected_rejection_rate", normal::cdf(-trunc.params.lambda)}};
  std::ostringstream summary;
  summary << "ks truncated " << io::format_number(d_trunc) << ", folded " << io::format_number(d_fold)
          << " (1% critical " << io::format_number(ks_critical_value(batch.values.size())) << ")";
  finish(e, c, out, err, summary.str());
}

// ---- converge --------------------------------------------------------------

struct ConvergeOptions {
  int kmin = 10;
  int kmax = 1000;
  int step = 10;
  long long reps = 2000;
  double alpha = kDefaultAlpha;
  std::string truth = "folded";
  bool paper_scale = false;
};

void run_converge(ConvergeOptions o, bool kmax_given, bool reps_given, const CommonOptions& c, std::ostream& out,
                  std::ostream& err) {
  if (o.paper_scale) {
    if (kmax_given || reps_given) throw UsageError("--paper-scale fixes --kmax 5000 and --reps 10000");
    o.kmax = 5000;
    o.reps = 10000;
  }
  const auto seed = resolve_seed(c);
  const auto grid = k_grid(o.kmin, o.kmax, o.step);
  const auto study =
      convergence_study(grid, o.reps, o.alpha, seed, {.truth = parse_approach(o.truth), .workers = c.workers});
  const auto fit = ols_loglog(study.records);

  Emission e;
  Json config = Json::object();
  config["kmin"] = o.kmin;
  config["kmax"] = o.kmax;
  config["step"] = o.step;
  config["reps"] = o.reps;
  config["alpha"] = o.alpha;
  config["truth"] = o.truth;
  config["paper_scale"] = o.paper_scale;
  e.meta = base_meta("converge", c, seed, std::move(config));
  e.data.columns = {"k", "mean_estimate", "true_value", "abs_rel_error", "ratio"};
  for (const auto& r : study.records) {
    e.data.add_row({static_cast<long long>(r.k), r.mean_estimate, r.true_value, r.abs_rel_error, r.ratio});
  }
  e.sections["fit"] = Json{{"slope", fit.slope},
                           {"intercept", fit.intercept},
                           {"slope_ci_95", Json::array({fit.slope_ci_lo, fit.slope_ci_hi})},
                           {"slope_se", fit.slope_se},
                           {"n_points", fit.n_points},
                           {"n_excluded", fit.n_excluded}};
  Json skipped = Json::array();
  for (const auto& s : study.skipped) skipped.push_back(Json{{"k", s.k}, {"reason", s.reason}});
  e.sections["skipped"] = std::move(skipped);
  for (const auto& s : study.skipped) err << "warning: skipped k = " << s.k << ": " << s.reason << "\n";

  std::ostringstream summary;
  summary << "slope " << io::format_number(fit.slope) << ", 95% CI (" << io::format_number(fit.slope_ci_lo) << ", "
          << io::format_number(fit.slope_ci_hi) << ")";
  finish(e, c, out, err, summary.str());
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rosenthal fail-safe number: estimator, exact distributions, simulation"};
  app.name("failsafe");
  app.set_version_flag("--version", FAILSAFE_VERSION);
  app.require_subcommand(1);

  std::function<void()> action;
  CommonOptions common;

  // compute
  ComputeOptions compute;
  auto* compute_cmd = app.add_subcommand("compute", "Fail-safe number of a study table");
  compute_cmd->add_option("--alpha", compute.alpha, "One-tailed significance level")->capture_default_str();
  compute_cmd->add_option("file", compute.file, "CSV with a `z` column or `effect,se` columns")->required();
  add_common(compute_cmd, common, false);
  compute_cmd->callback([&] { action = [&] { run_compute(compute, common, out, err); }; });

  // dist
  DistOptions dist;
  auto* dist_cmd = app.add_subcommand("dist", "Exact distribution of the fail-safe estimator");
  dist_cmd->require_subcommand(1);
  for (const char* kind : {"pdf", "cdf", "quantile", "moments", "cf"}) {
    auto* sub = dist_cmd->add_subcommand(kind, std::string(kind) + " of N_R");
    sub->add_option("--k", dist.k, "Number of studies")->required()->check(CLI::PositiveNumber);
    sub->add_option("--alpha", dist.alpha, "One-tailed significance level")->capture_default_str();
    auto* approach_opt = sub->add_option("--approach", dist.approach, "truncated, folded or both")
                             ->check(CLI::IsMember({"truncated", "folded", "both"}))
                             ->capture_default_str();
    const std::string k(kind);
    if (k == "pdf" || k == "cdf") sub->add_option("--x", dist.x, "Evaluation point(s)");
    if (k == "pdf") sub->add_flag("--asymptotic", dist.asymptotic, "Large-k form without the truncation normalizer");
    if (k == "quantile") sub->add_option("--p", dist.p, "Probability level(s)");
    if (k == "cf") sub->add_option("--t", dist.t, "Frequency value(s)");
    if (k != "moments") sub->add_option("--grid", dist.grid, "Evenly spaced points LO:HI:N");
    add_common(sub, common, false);
    sub->callback([&, k, approach_opt] {
      const bool given = approach_opt->count() > 0;
      action = [&, k, given] { run_dist(k, dist, given, common, out, err); };
    });
  }

  // simulate
  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiments");
  sim_cmd->require_subcommand(1);
  auto* clt_cmd = sim_cmd->add_subcommand("clt", "Sums of k half-normal draws vs their normal limit");
  clt_cmd->add_option("--k", sim.k, "Summands per draw")->required()->check(CLI::PositiveNumber);
  clt_cmd->add_option("--reps", sim.reps, "Number of sums")->check(CLI::PositiveNumber)->capture_default_str();
  clt_cmd->add_option("--bins", sim.bins, "Histogram bins or 'auto' (Freedman-Diaconis)")->capture_default_str();
  add_common(clt_cmd, common, true);
  clt_cmd->callback([&] { action = [&] { run_simulate_clt(sim, common, out, err); }; });

  auto* nr_cmd = sim_cmd->add_subcommand("nr", "Simulated fail-safe numbers vs both exact densities");
  nr_cmd->add_option("--k", sim.k, "Studies per draw")->required()->check(CLI::PositiveNumber);
  nr_cmd->add_option("--alpha", sim.alpha, "One-tailed significance level")->capture_default_str();
  nr_cmd->add_option("--reps", sim.reps, "Number of draws")->check(CLI::PositiveNumber)->capture_default_str();
  nr_cmd->add_option("--regime", sim.regime, "truncated or folded")
      ->required()
      ->check(CLI::IsMember({"truncated", "folded"}));
  nr_cmd->add_option("--bins", sim.bins, "Histogram bins or 'auto' (Freedman-Diaconis)")->capture_default_str();
  add_common(nr_cmd, common, true);
  nr_cmd->callback([&] { action = [&] { run_simulate_nr(sim, common, out, err); }; });

  // converge
  ConvergeOptions conv;
  auto* conv_cmd = app.add_subcommand("converge", "Convergence rate of the mean of simulated N_R");
  conv_cmd->add_option("--kmin", conv.kmin, "Smallest k")->check(CLI::PositiveNumber)->capture_default_str();
  auto* kmax_opt =
      conv_cmd->add_option("--kmax", conv.kmax, "Largest k")->check(CLI::PositiveNumber)->capture_default_str();
  conv_cmd->add_option("--step", conv.step, "k increment")->check(CLI::PositiveNumber)->capture_default_str();
  auto* reps_opt =
      conv_cmd->add_option("--reps", conv.reps, "Draws per k")->check(CLI::Range(2LL, 1LL << 40))->capture_default_str();
  conv_cmd->add_option("--alpha", conv.alpha, "One-tailed significance level")->capture_default_str();
  conv_cmd->add_option("--truth", conv.truth, "Closed-form mean used as truth")
      ->check(CLI::IsMember({"folded", "truncated"}))
      ->capture_default_str();
  conv_cmd->add_flag("--paper-scale", conv.paper_scale, "k up to 5000 with 10000 draws per k");
  add_common(conv_cmd, common, true);
  conv_cmd->callback([&] {
    const bool kmax_given = kmax_opt->count() > 0;
    const bool reps_given = reps_opt->count() > 0;
    action = [&, kmax_given, reps_given] { run_converge(conv, kmax_given, reps_given, common, out, err); };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace failsafe::cli
