#include "batchlearn/lab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "batchlearn/errors.hpp"
#include "batchlearn/exact.hpp"
#include "batchlearn/parallel.hpp"
#include "batchlearn/thresholds.hpp"
#include "batchlearn/zeta.hpp"

namespace batchlearn {

namespace {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_grid(const NGrid& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(grid[i]);
  }
  return out;
}

std::string band(double lo, double hi) {
  return "[" + format_number(lo) + ", " + format_number(hi) + "]";
}

// Builds "batchlab <words> --flag value ..." in a fixed order.
class CommandLine {
 public:
  explicit CommandLine(std::string head) : text_("batchlab " + std::move(head)) {}
  CommandLine& flag(const std::string& name, const std::string& value) {
    text_ += " --" + name + " " + value;
    return *this;
  }
  CommandLine& flag(const std::string& name, double value) { return flag(name, format_number(value)); }
  CommandLine& flag(const std::string& name, std::uint64_t value) { return flag(name, std::to_string(value)); }
  CommandLine& grid(const NGrid& g) { return flag("n-grid", format_grid(g)); }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

void require_grid(const NGrid& grid, std::size_t min_points) {
  if (grid.size() < min_points) {
    throw DomainError("n_grid needs at least " + std::to_string(min_points) + " points");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0) throw DomainError("n_grid entries must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1]) throw DomainError("n_grid must be strictly increasing");
  }
}

void require_full_support(const OverlapDistribution<double>& dist, const char* what) {
  if (!dist.full_support()) throw UnsupportedError(std::string(what) + " needs support_max = 1");
}

std::uint64_t cell_key(std::uint64_t n) { return n; }

Seed cell_seed(Seed seed, std::uint64_t n) {
  return derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kCell), cell_key(n)});
}

Seed cell_seed(Seed seed, std::uint64_t n, std::uint64_t index) {
  return derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kCell), cell_key(n), index});
}

Seed bootstrap_seed(Seed seed, std::uint64_t n, std::uint64_t salt = 0) {
  return derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kBootstrap), n, salt});
}

SweepRow make_row(std::uint64_t n, std::string name, std::span<const double> xs, const Statistic& stat, Seed seed) {
  const auto ci = bootstrap_ci(xs, stat, seed);
  return {n, std::move(name), stat(xs), ci.lo, ci.hi};
}

std::vector<double> to_doubles(std::span<const WordCount> xs) {
  return std::vector<double>(xs.begin(), xs.end());
}

PowerFit fit_rows(const std::vector<SweepRow>& rows, const std::string& statistic) {
  std::vector<std::pair<double, double>> points;
  for (const auto& r : rows) {
    if (r.statistic == statistic) points.emplace_back(static_cast<double>(r.n), r.value);
  }
  return fit_power_exponent(points);
}

double spread(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi / *lo;
}

}  // namespace

NGrid powers_of_two(unsigned lo, unsigned hi) {
  NGrid out;
  for (unsigned e = lo; e <= hi; ++e) out.push_back(std::uint64_t{1} << e);
  return out;
}

void SweepSpec::validate() const {
  require_grid(n_grid, 4);
  if (runs_per_n < 100) throw DomainError("runs_per_n must be >= 100");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  (void)OverlapDistribution<double>(beta, support_max);
  if (statistic.uses_sample_mean() && mode == Mode::kAnnealed && beta <= 0.0) {
    throw DomainError(
        "the annealed learning time has no mean for beta <= 0; use median, quantile(q) or trimmed_mean(f)");
  }
}

bool SweepReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SweepReport::to_csv() const {
  std::string out = "n,statistic,value,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + r.statistic + "," + format_number(r.value) + "," + format_number(r.ci_lo) +
           "," + format_number(r.ci_hi) + "\n";
  }
  return out;
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["command"] = command;
  j["thresholds_version"] = thresholds::kVersion;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"n", r.n}, {"statistic", r.statistic}, {"value", r.value}, {"ci_lo", r.ci_lo},
                         {"ci_hi", r.ci_hi}});
  }
  if (fit) {
    j["fit"] = {{"exponent", fit->exponent}, {"intercept", fit->intercept}, {"r2", fit->r2}};
  } else {
    j["fit"] = nullptr;
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"measured", c.measured}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  j["pass"] = passed();
  return j;
}

Check check_within(std::string name, double measured, double lo, double hi) {
  return {std::move(name), measured, band(lo, hi), measured >= lo && measured <= hi};
}

Check check_below(std::string name, double measured, double bound) {
  return {std::move(name), measured, "< " + format_number(bound), measured < bound};
}

nlohmann::json to_json(const OverlapDistribution<double>& dist) {
  return {{"beta", dist.beta()}, {"support_max", dist.support_max()}};
}

OverlapDistribution<double> distribution_from_json(const nlohmann::json& j) {
  return OverlapDistribution<double>(j.at("beta").get<double>(), j.value("support_max", 1.0));
}

SweepReport run_sweep(const SweepSpec& spec, unsigned workers) {
  spec.validate();
  const auto dist = make_power_overlap(spec.beta, spec.support_max);
  SweepReport report;
  report.name = "sweep";
  report.command = CommandLine("sweep")
                       .flag("alg", std::string(to_string(spec.algorithm)))
                       .flag("mode", std::string(to_string(spec.mode)))
                       .flag("beta", spec.beta)
                       .flag("support-max", spec.support_max)
                       .grid(spec.n_grid)
                       .flag("runs", static_cast<std::uint64_t>(spec.runs_per_n))
                       .flag("delta", spec.delta)
                       .flag("seed", spec.seed)
                       .flag("statistic", spec.statistic.to_string())
                       .str();
  const std::string stat_name = spec.statistic.to_string();
  const Statistic n_delta_stat = Statistic::quantile(1.0 - spec.delta);
  for (std::uint64_t n : spec.n_grid) {
    const auto set = run_ensemble(spec.algorithm, spec.mode, dist, n, spec.runs_per_n, cell_seed(spec.seed, n),
                                  std::nullopt, workers);
    const auto xs = to_doubles(set.samples);
    report.rows.push_back(make_row(n, stat_name, xs, spec.statistic, bootstrap_seed(spec.seed, n, 0)));
    report.rows.push_back(make_row(n, "n_delta", xs, n_delta_stat, bootstrap_seed(spec.seed, n, 1)));
  }
  bool positive = std::all_of(report.rows.begin(), report.rows.end(), [&](const SweepRow& r) {
    return r.statistic != stat_name || r.value > 0.0;
  });
  if (positive) report.fit = fit_rows(report.rows, stat_name);
  return report;
}

std::vector<double> sample_scaled_minima(const OverlapDistribution<double>& dist, std::uint64_t n, std::size_t runs,
                                         Seed seed, unsigned workers) {
  if (n == 0 || runs == 0) throw DomainError("sample_scaled_minima: n and runs must be >= 1");
  const double scale = std::pow(static_cast<double>(n), 1.0 / dist.tail_index());
  std::vector<double> out(runs);
  constexpr std::size_t kBlock = 64;
  parallel_for((runs + kBlock - 1) / kBlock, workers, [&](std::size_t b) {
    const std::size_t end = std::min(runs, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) {
      Engine eng = make_engine(cell_seed(seed, n, r));
      // q is increasing in u, so the smallest complement comes from the
      // smallest uniform; the draw sequence matches draw_complements.
      double umin = 1.0;
      for (std::uint64_t i = 0; i < n; ++i) umin = std::min(umin, uniform_open_zero(eng));
      out[r] = scale * dist.complement_from_uniform(umin);
    }
  });
  return out;
}

double min_overlap_limit(double beta) {
  const double alpha = beta + 1.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([alpha](double x) { return std::exp(-std::pow(x, alpha)); }, 0.0,
                              std::numeric_limits<double>::infinity(), 1e-13);
}

SweepReport min_overlap_sweep(const OverlapDistribution<double>& dist, const NGrid& n_grid, std::size_t runs,
                              Seed seed, unsigned workers) {
  require_full_support(dist, "min_overlap_sweep");
  require_grid(n_grid, 1);
  SweepReport report;
  report.name = "expmin";
  report.command = CommandLine("verify --suite expmin")
                       .flag("beta", dist.beta())
                       .grid(n_grid)
                       .flag("runs", static_cast<std::uint64_t>(runs))
                       .flag("seed", seed)
                       .str();
  for (std::uint64_t n : n_grid) {
    const auto xs = sample_scaled_minima(dist, n, runs, seed, workers);
    report.rows.push_back(make_row(n, "scaled_mean_min", xs, Statistic::mean(), bootstrap_seed(seed, n)));
  }
  if (n_grid.size() >= 4) report.fit = fit_rows(report.rows, "scaled_mean_min");
  const double limit = min_overlap_limit(dist.beta());
  const double last = report.rows.back().value;
  report.checks.push_back(check_within("scaled mean of min q / limit at n=" + std::to_string(n_grid.back()),
                                       last / limit, 1.0 - thresholds::kMinOverlapRelTol,
                                       1.0 + thresholds::kMinOverlapRelTol));
  return report;
}

double weibull_limit_check(const OverlapDistribution<double>& dist, std::uint64_t n, std::size_t runs, Seed seed,
                           unsigned workers) {
  require_full_support(dist, "weibull_limit_check");
  const double alpha = dist.tail_index();
  auto xs = sample_scaled_minima(dist, n, runs, seed, workers);
  return ks_distance(std::move(xs), [alpha](double x) { return -std::expm1(-std::pow(x, alpha)); });
}

SweepReport weibull_report(const OverlapDistribution<double>& dist, std::uint64_t n, std::size_t runs, Seed seed,
                           unsigned workers) {
  SweepReport report;
  report.name = "weibull";
  report.command = CommandLine("verify --suite weibull")
                       .flag("beta", dist.beta())
                       .flag("n", n)
                       .flag("runs", static_cast<std::uint64_t>(runs))
                       .flag("seed", seed)
                       .str();
  const double ks = weibull_limit_check(dist, n, runs, seed, workers);
  report.rows.push_back({n, "ks_distance", ks, ks, ks});
  report.checks.push_back(check_within("KS distance to 1 - exp(-x^(1+beta))", ks, 0.0, thresholds::kWeibullKsMax));
  return report;
}

SweepReport stable_sum_sweep(const OverlapDistribution<double>& dist, const NGrid& n_grid, std::size_t runs,
                             Seed seed, unsigned workers) {
  require_full_support(dist, "stable_sum_sweep");
  require_grid(n_grid, 1);
  const double beta = dist.beta();
  const double alpha = dist.tail_index();
  SweepReport report;
  report.name = "allstab";
  report.command = CommandLine("verify --suite allstab")
                       .flag("beta", beta)
                       .grid(n_grid)
                       .flag("runs", static_cast<std::uint64_t>(runs))
                       .flag("seed", seed)
                       .str();
  std::vector<double> medians;
  std::vector<double> iqrs;
  for (std::uint64_t n : n_grid) {
    const double nn = static_cast<double>(n);
    const double norm = beta > 0.0 ? nn : beta == 0.0 ? nn * std::log(nn) : std::pow(nn, 1.0 / alpha);
    std::vector<double> xs(runs);
    parallel_for(runs, workers, [&](std::size_t r) {
      const auto p = sample_overlaps(dist, n, cell_seed(seed, n, r));
      xs[r] = harmonic_overlap_sum(p) / norm;
    });
    report.rows.push_back(make_row(n, "median_normalized_S", xs, Statistic::median(), bootstrap_seed(seed, n, 0)));
    const double iqr = interquartile_range(xs);
    report.rows.push_back({n, "iqr_normalized_S", iqr, iqr, iqr});
    medians.push_back(report.rows[report.rows.size() - 2].value);
    iqrs.push_back(iqr);
  }
  if (beta > 0.0) {
    // S/n -> E[1/q] = 1 + zeta(1).
    const double target = 1.0 + zeta(dist, 1.0, 1e-10).value;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      report.checks.push_back(check_within("median(S/n) / (1 + zeta(1)) at n=" + std::to_string(n_grid[i]),
                                           medians[i] / target, 1.0 - thresholds::kStableMeanRelTol,
                                           1.0 + thresholds::kStableMeanRelTol));
    }
  } else if (beta == 0.0) {
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < thresholds::kStableLogMinN) continue;
      report.checks.push_back(check_within("median(S/(n ln n)) at n=" + std::to_string(n_grid[i]), medians[i],
                                           thresholds::kStableLogBandLo, thresholds::kStableLogBandHi));
    }
  } else {
    report.checks.push_back(check_within("IQR of S/n^(1/(1+beta)) max/min across grid", spread(iqrs), 1.0,
                                         thresholds::kStableIqrSpread));
  }
  return report;
}

SweepReport verify_batchthm(double beta, double delta, const NGrid& n_grid, std::size_t vectors, Seed seed,
                            unsigned workers) {
  require_grid(n_grid, 4);
  if (vectors == 0) throw DomainError("verify_batchthm: vectors must be >= 1");
  const auto dist = make_power_overlap(beta, 1.0);
  SweepReport report;
  report.name = "batchthm";
  report.command = CommandLine("verify --suite batchthm")
                       .flag("beta", beta)
                       .flag("delta", delta)
                       .grid(n_grid)
                       .flag("runs", static_cast<std::uint64_t>(vectors))
                       .flag("seed", seed)
                       .str();
  for (std::uint64_t n : n_grid) {
    std::vector<double> xs(vectors);
    parallel_for(vectors, workers, [&](std::size_t v) {
      const auto p = sample_overlaps(dist, n, cell_seed(seed, n, v));
      xs[v] = static_cast<double>(n_delta(p, delta));
    });
    report.rows.push_back(make_row(n, "median_n_delta", xs, Statistic::median(), bootstrap_seed(seed, n)));
  }
  report.fit = fit_rows(report.rows, "median_n_delta");
  const double target = 1.0 / (1.0 + beta);
  const double tol = beta >= 0.0 ? thresholds::kBatchExponentTolPositive : thresholds::kBatchExponentTolNegative;
  report.checks.push_back(check_within("fitted exponent vs 1/(1+beta)", report.fit->exponent, target - tol,
                                       target + tol));
  if (beta == 0.0) {
    std::vector<double> ratios;
    for (const auto& r : report.rows) ratios.push_back(r.value / static_cast<double>(r.n));
    report.checks.push_back(
        check_within("max/min of N_delta/n across grid", spread(ratios), 1.0, thresholds::kBatchLinearRatioSpread));
  }
  return report;
}

SweepReport verify_mainprev(Algorithm algorithm, double beta, double delta, const NGrid& n_grid, std::size_t runs,
                            Seed seed, unsigned workers) {
  if (algorithm == Algorithm::kBatch) throw DomainError("verify_mainprev covers memoryless and full-memory only");
  require_grid(n_grid, 4);
  const auto dist = make_power_overlap(beta, 1.0);
  SweepReport report;
  report.name = "mainprev";
  report.command = CommandLine("verify --suite mainprev")
                       .flag("alg", std::string(to_string(algorithm)))
                       .flag("beta", beta)
                       .flag("delta", delta)
                       .grid(n_grid)
                       .flag("runs", static_cast<std::uint64_t>(runs))
                       .flag("seed", seed)
                       .str();
  const Statistic stat = Statistic::quantile(1.0 - delta);
  for (std::uint64_t n : n_grid) {
    const auto set = run_ensemble(algorithm, Mode::kAnnealed, dist, n, runs, cell_seed(seed, n), std::nullopt, workers);
    const auto xs = to_doubles(set.samples);
    report.rows.push_back(make_row(n, "n_delta", xs, stat, bootstrap_seed(seed, n)));
  }
  report.fit = fit_rows(report.rows, "n_delta");
  if (beta == 0.0) {
    std::vector<double> ratios;
    for (const auto& r : report.rows) {
      const double nn = static_cast<double>(r.n);
      ratios.push_back(r.value / (nn * std::log(nn)));
    }
    report.checks.push_back(check_within("max/min of N_delta/(n ln n) across grid", spread(ratios), 1.0,
                                         thresholds::kMainprevLogBandSpread));
  } else {
    const double target = beta > 0.0 ? 1.0 : 1.0 / (1.0 + beta);
    const double tol =
        beta > 0.0 ? thresholds::kMainprevExponentTolPositive : thresholds::kMainprevExponentTolNegative;
    report.checks.push_back(
        check_within("fitted exponent", report.fit->exponent, target - tol, target + tol));
  }
  return report;
}

SweepReport compare_algorithms(double beta, double delta, const NGrid& n_grid, std::size_t runs, Seed seed,
                               unsigned workers) {
  require_grid(n_grid, 2);
  const auto dist = make_power_overlap(beta, 1.0);
  SweepReport report;
  report.name = "compare";
  report.command = CommandLine("compare")
                       .flag("beta", beta)
                       .flag("delta", delta)
                       .grid(n_grid)
                       .flag("runs", static_cast<std::uint64_t>(runs))
                       .flag("seed", seed)
                       .str();
  const Statistic stat = Statistic::quantile(1.0 - delta);
  constexpr Algorithm kSimulated[] = {Algorithm::kMemoryless, Algorithm::kFullMemory};
  // Batch N_Delta comes from the moments exactly. The two simulated learners
  // reuse one seed across n, so neighbouring grid points share random numbers
  // and their ratios are far less noisy than independent estimates.
  std::vector<std::array<double, 3>> nd;
  for (std::uint64_t n : n_grid) {
    std::array<double, 3> row{};
    row[0] = static_cast<double>(annealed_batch_n_delta(dist, n, delta));
    report.rows.push_back({n, "n_delta_batch", row[0], row[0], row[0]});
    for (std::size_t a = 0; a < 2; ++a) {
      const auto set = run_ensemble(kSimulated[a], Mode::kAnnealed, dist, n, runs,
                                    derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kCell), a}), std::nullopt,
                                    workers);
      const auto xs = to_doubles(set.samples);
      report.rows.push_back(make_row(n, "n_delta_" + std::string(to_string(kSimulated[a])), xs, stat,
                                     bootstrap_seed(seed, n, a)));
      row[a + 1] = report.rows.back().value;
    }
    nd.push_back(row);
  }
  if (beta > 0.0) {
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < thresholds::kCompareMinN) continue;
      const std::string at = " at n=" + std::to_string(n_grid[i]);
      report.checks.push_back(check_below("batch/memoryless N_delta" + at, nd[i][0] / nd[i][1], 1.0));
      report.checks.push_back(check_below("batch/full-memory N_delta" + at, nd[i][0] / nd[i][2], 1.0));
    }
  } else if (beta == 0.0) {
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
      const double prev = nd[i - 1][0] / nd[i - 1][2];
      const double cur = nd[i][0] / nd[i][2];
      report.checks.push_back(check_below("batch/full-memory ratio change " + std::to_string(n_grid[i - 1]) + "->" +
                                              std::to_string(n_grid[i]),
                                          cur / prev, 1.0));
    }
  }
  return report;
}

SweepReport verify_t1(double beta, const NGrid& n_grid, double tol) {
  require_grid(n_grid, 1);
  const auto dist = make_power_overlap(beta, 1.0);
  const double alpha = beta + 1.0;
  const double limit = t1_constant(beta, dist.normalization());
  SweepReport report;
  report.name = "t1";
  report.command = CommandLine("verify --suite t1").flag("beta", beta).grid(n_grid).flag("tol", tol).str();
  std::vector<double> gaps;
  for (std::uint64_t n : n_grid) {
    const double value = annealed_time(dist, n, tol) / std::pow(static_cast<double>(n), 1.0 / alpha);
    report.rows.push_back({n, "annealed_over_power", value, value, value});
    const double rel = std::abs(value / limit - 1.0);
    gaps.push_back(rel);
    const double allowed = n <= 10'000    ? thresholds::kT1RelTolAt1e4
                           : n <= 100'000 ? thresholds::kT1RelTolAt1e5
                                          : thresholds::kT1RelTolAt1e6;
    report.checks.push_back(check_within("relative gap to t1 constant at n=" + std::to_string(n), rel, 0.0, allowed));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    report.checks.push_back(check_within("gap shrinks " + std::to_string(n_grid[i - 1]) + "->" +
                                             std::to_string(n_grid[i]),
                                         gaps[i] - gaps[i - 1], -std::numeric_limits<double>::infinity(), 0.0));
  }
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= kMaxAlternatingSize; ++n) {
    const double series = annealed_time(dist, n, 1e-11);
    const double alternating = annealed_time_alternating(dist, n);
    worst = std::max(worst, std::abs(series - alternating) / series);
  }
  report.checks.push_back(
      check_within("max relative gap, series vs alternating, n<=40", worst, 0.0, thresholds::kAlternatingRelTol));
  return report;
}

SweepReport verify_alpha1(const NGrid& n_grid, double tol) {
  require_grid(n_grid, 2);
  const auto dist = make_power_overlap(0.0, 1.0);
  SweepReport report;
  report.name = "alpha1";
  report.command = CommandLine("verify --suite alpha1").grid(n_grid).flag("tol", tol).str();
  std::vector<double> linear;
  for (std::uint64_t n : n_grid) {
    const double nn = static_cast<double>(n);
    const double t2 = t2_remainder(dist, n, tol);
    const double ratio = -t2 / (nn * std::log(nn));
    const double excess = (-t2 - nn * std::log(nn)) / nn;
    report.rows.push_back({n, "minus_t2_over_nlogn", ratio, ratio, ratio});
    report.rows.push_back({n, "linear_excess", excess, excess, excess});
    report.checks.push_back(check_below("T2 sign at n=" + std::to_string(n), t2, 0.0));
    report.checks.push_back(check_within("-T2/(n ln n) at n=" + std::to_string(n), ratio, thresholds::kAlpha1BandLo,
                                         thresholds::kAlpha1BandHi));
    linear.push_back(excess);
  }
  const auto [lo, hi] = std::minmax_element(linear.begin(), linear.end());
  double scale = 0.0;
  for (double x : linear) scale = std::max(scale, std::abs(x));
  report.checks.push_back(check_within("relative variation of (-T2 - n ln n)/n", (*hi - *lo) / scale, 0.0,
                                       thresholds::kAlpha1LinearVariation));
  return report;
}

}  // namespace batchlearn
