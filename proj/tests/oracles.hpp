#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; the point is to disagree with it if it is wrong.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// sum_{k>=0} (1 - prod_i (1 - p_i^k)), plain powers, summed until the
// terms are negligible.
inline double expected_time_direct(const std::vector<double>& p) {
  if (p.empty()) return 0.0;
  double total = 1.0;
  for (int k = 1; k < 200000; ++k) {
    double prod = 1.0;
    for (double x : p) prod *= 1.0 - std::pow(x, k);
    const double term = 1.0 - prod;
    total += term;
    if (term < 1e-18) break;
  }
  return total;
}

// Expectation of the maximum of independent geometrics on {1, 2, ...}:
// 1 + sum over nonempty subsets of (-1)^(|S|+1) p_S / (1 - p_S).
inline double max_of_geometrics(const std::vector<double>& p) {
  if (p.empty()) return 0.0;
  const std::size_t n = p.size();
  double total = 1.0;
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    double prod = 1.0;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1U << i)) {
        prod *= p[i];
        ++bits;
      }
    }
    total += (bits % 2 == 1 ? 1.0 : -1.0) * prod / (1.0 - prod);
  }
  return total;
}

// E p^k for q = 1 - p ~ (beta + 1) q^beta on [0, 1]: a Beta integral.
inline double beta_moment(double beta, double k) {
  return std::exp(std::lgamma(beta + 2.0) + std::lgamma(k + 1.0) - std::lgamma(k + beta + 2.0));
}

// E p^k for q = a U^(1/(beta+1)) by composite Simpson in u.
inline double moment_simpson(double beta, double a, int k, int intervals = 200000) {
  const double alpha = beta + 1.0;
  auto f = [&](double u) { return std::pow(1.0 - a * std::pow(u, 1.0 / alpha), k); };
  const double h = 1.0 / intervals;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < intervals; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

inline double uniform_zeta_minus_one(int s) {
  double sum = 0.0;
  for (int j = 2000000; j >= 2; --j) sum += std::pow(static_cast<double>(j), -s);
  return sum;
}

inline constexpr double kPiSquaredOverSix = std::numbers::pi * std::numbers::pi / 6.0;

// Half-width of the DKW band holding with probability 1 - alpha.
inline double dkw_band(std::size_t samples, double alpha = 1e-3) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
}

// Overlap vectors for property tests: n in [1, max_n], p_i in [0, p_max].
struct VectorGenerator {
  std::mt19937_64 rng;
  std::size_t max_n;
  double p_max;

  VectorGenerator(std::uint64_t seed, std::size_t max_n_, double p_max_) : rng(seed), max_n(max_n_), p_max(p_max_) {}

  std::vector<double> operator()() {
    std::uniform_int_distribution<std::size_t> size(1, max_n);
    std::uniform_real_distribution<double> value(0.0, p_max);
    std::vector<double> p(size(rng));
    for (double& x : p) x = value(rng);
    return p;
  }
};

}  // namespace oracle
