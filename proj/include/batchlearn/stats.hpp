#pragma once

// Estimators used by the sweeps: robust location statistics, percentile
// bootstrap, one-sample Kolmogorov-Smirnov distance and log-log fits.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "batchlearn/random.hpp"

namespace batchlearn {

double mean(std::span<const double> xs);
double median(std::span<const double> xs);
// Lower nearest-rank quantile: the ceil(prob N)-th smallest value.
double quantile_nearest_rank(std::span<const double> xs, double prob);
// Mean after dropping floor(fraction N) values from each end.
double trimmed_mean(std::span<const double> xs, double fraction);
double interquartile_range(std::span<const double> xs);

struct Statistic {
  enum class Kind { kMean, kMedian, kQuantile, kTrimmedMean };
  Kind kind = Kind::kMedian;
  double parameter = 0.0;  // quantile level or trim fraction

  static Statistic mean() { return {Kind::kMean, 0.0}; }
  static Statistic median() { return {Kind::kMedian, 0.0}; }
  static Statistic quantile(double q) { return {Kind::kQuantile, q}; }
  static Statistic trimmed_mean(double f) { return {Kind::kTrimmedMean, f}; }

  // "mean", "median", "quantile(0.9)", "trimmed_mean(0.1)".
  static Statistic parse(const std::string& text);
  std::string to_string() const;
  bool uses_sample_mean() const { return kind == Kind::kMean; }

  double operator()(std::span<const double> xs) const;
};

struct ConfidenceInterval {
  double lo;
  double hi;
};

// Percentile bootstrap at the given level, with `resamples` draws seeded
// from `seed`.
ConfidenceInterval bootstrap_ci(std::span<const double> xs, const Statistic& stat, Seed seed,
                                std::size_t resamples = 1000, double level = 0.95);

// sup_x |F_emp(x) - cdf(x)| for a continuous reference cdf.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct PowerFit {
  double exponent;
  double intercept;  // ln of the prefactor
  double r2;
};

// Ordinary least squares of ln(value) on ln(n).
PowerFit fit_power_exponent(std::span<const std::pair<double, double>> points);

}  // namespace batchlearn
