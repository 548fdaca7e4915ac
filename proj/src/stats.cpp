#include "batchlearn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <regex>
#include <sstream>

#include <Eigen/Dense>

#include "batchlearn/errors.hpp"
#include "batchlearn/series.hpp"

namespace batchlearn {

namespace {

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  return v;
}

void require_nonempty(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw DomainError(std::string(what) + ": empty sample");
}

}  // namespace

double mean(std::span<const double> xs) {
  require_nonempty(xs, "mean");
  CompensatedSum<double> acc;
  for (double x : xs) acc += x;
  return acc.value() / static_cast<double>(xs.size());
}

double median(std::span<const double> xs) {
  require_nonempty(xs, "median");
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double quantile_nearest_rank(std::span<const double> xs, double prob) {
  require_nonempty(xs, "quantile");
  if (!(prob > 0.0 && prob <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
  std::vector<double> v(xs.begin(), xs.end());
  const double size = static_cast<double>(v.size());
  auto rank = static_cast<std::size_t>(std::ceil(prob * size - 1e-9 * size));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

double trimmed_mean(std::span<const double> xs, double fraction) {
  require_nonempty(xs, "trimmed_mean");
  if (!(fraction >= 0.0 && fraction < 0.5)) throw DomainError("trim fraction must lie in [0, 0.5)");
  const auto v = sorted_copy(xs);
  const auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(v.size())));
  return mean(std::span<const double>(v).subspan(cut, v.size() - 2 * cut));
}

double interquartile_range(std::span<const double> xs) {
  return quantile_nearest_rank(xs, 0.75) - quantile_nearest_rank(xs, 0.25);
}

Statistic Statistic::parse(const std::string& text) {
  if (text == "mean") return mean();
  if (text == "median") return median();
  static const std::regex pattern(R"((quantile|trimmed_mean)\(([0-9.eE+-]+)\))");
  std::smatch m;
  if (std::regex_match(text, m, pattern)) {
    const double value = std::stod(m[2].str());
    if (m[1] == "quantile") {
      if (!(value > 0.0 && value <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
      return quantile(value);
    }
    if (!(value >= 0.0 && value < 0.5)) throw DomainError("trim fraction must lie in [0, 0.5)");
    return trimmed_mean(value);
  }
  throw DomainError("unknown statistic '" + text + "' (mean, median, quantile(q), trimmed_mean(f))");
}

std::string Statistic::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kMean:
      return "mean";
    case Kind::kMedian:
      return "median";
    case Kind::kQuantile:
      out << "quantile(" << parameter << ")";
      return out.str();
    case Kind::kTrimmedMean:
      out << "trimmed_mean(" << parameter << ")";
      return out.str();
  }
  return "?";
}

double Statistic::operator()(std::span<const double> xs) const {
  switch (kind) {
    case Kind::kMean:
      return batchlearn::mean(xs);
    case Kind::kMedian:
      return batchlearn::median(xs);
    case Kind::kQuantile:
      return quantile_nearest_rank(xs, parameter);
    case Kind::kTrimmedMean:
      return batchlearn::trimmed_mean(xs, parameter);
  }
  return 0.0;
}

ConfidenceInterval bootstrap_ci(std::span<const double> xs, const Statistic& stat, Seed seed, std::size_t resamples,
                                double level) {
  require_nonempty(xs, "bootstrap_ci");
  if (resamples == 0) throw DomainError("bootstrap_ci: resamples must be >= 1");
  Engine eng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kBootstrap)}));
  std::vector<double> draws(resamples);
  std::vector<double> resample(xs.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (double& x : resample) x = xs[uniform_below(eng, xs.size())];
    draws[b] = stat(resample);
  }
  const double tail = 0.5 * (1.0 - level);
  return {quantile_nearest_rank(draws, std::max(tail, 1.0 / static_cast<double>(resamples))),
          quantile_nearest_rank(draws, 1.0 - tail)};
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: empty sample");
  std::sort(samples.begin(), samples.end());
  const double size = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double di = static_cast<double>(i);
    worst = std::max({worst, (di + 1.0) / size - f, f - di / size});
  }
  return worst;
}

PowerFit fit_power_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw DegenerateInputError("power fit needs at least 4 points");
  const auto rows = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(rows, 2);
  Eigen::VectorXd target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto [n, value] = points[static_cast<std::size_t>(i)];
    if (!(n > 0.0) || !(value > 0.0)) throw DegenerateInputError("power fit needs positive n and values");
    design(i, 0) = 1.0;
    design(i, 1) = std::log(n);
    target(i) = std::log(value);
  }
  const double spread = design.col(1).maxCoeff() - design.col(1).minCoeff();
  if (!(spread > 0.0)) throw DegenerateInputError("power fit needs at least two distinct n");

  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd residual = target - design * coef;
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (target.array() - target.mean()).matrix().squaredNorm();
  const double r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return {coef(1), coef(0), r2};
}

}  // namespace batchlearn
