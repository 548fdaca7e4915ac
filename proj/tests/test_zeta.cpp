#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "batchlearn/errors.hpp"
#include "batchlearn/exact.hpp"
#include "batchlearn/zeta.hpp"
#include "oracles.hpp"

using namespace batchlearn;

namespace {

constexpr double kPi = std::numbers::pi;

// sum_{k>=1} 4 / ((k+1)^2 (k+2)^2) by partial fractions.
constexpr double kLinearZeta2 = 4.0 * kPi * kPi / 3.0 - 13.0;

}  // namespace

TEST_CASE("zeta of the uniform family is the Riemann zeta minus one") {
  const auto z = zeta(make_power_overlap(0.0), 2.0, 1e-10);
  CHECK(std::abs(z.value - (oracle::kPiSquaredOverSix - 1.0)) <= 1e-8);
  CHECK(z.tail_bound <= 1e-10);
  CHECK(z.terms_summed > 0);
  const auto z3 = zeta(make_power_overlap(0.0), 3.0, 1e-12);
  CHECK(z3.value == doctest::Approx(oracle::uniform_zeta_minus_one(3)).epsilon(1e-10));
}

TEST_CASE("zeta of the linear family telescopes") {
  CHECK(std::abs(zeta(make_power_overlap(1.0), 1.0, 1e-10).value - 1.0) <= 1e-8);
  CHECK(std::abs(zeta(make_power_overlap(1.0), 2.0, 1e-12).value - kLinearZeta2) <= 1e-10);
}

TEST_CASE("zeta outside its domain") {
  CHECK_THROWS_AS(zeta(make_power_overlap(0.0), 1.0, 1e-8), DivergenceError);
  CHECK_THROWS_AS(zeta(make_power_overlap(1.0), 0.5, 1e-8), DivergenceError);
  try {
    zeta(make_power_overlap(1.0), 0.4, 1e-8);
    FAIL("expected a divergence error");
  } catch (const DivergenceError& e) {
    CHECK(e.threshold() == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(zeta(make_power_overlap(0.0, 0.5), 2.0, 1e-8), UnsupportedError);
}

TEST_CASE("zeta decreases in s toward the first moment") {
  for (double beta : {0.0, 1.0}) {
    const auto dist = make_power_overlap(beta);
    const double m1 = moment(dist, 1);
    double prev_value = zeta(dist, 1.5, 1e-10).value;
    double prev_gap = prev_value;
    for (double s : {2.0, 4.0, 8.0, 16.0}) {
      const double value = zeta(dist, s, 1e-12).value;
      const double gap = value - std::pow(m1, s);
      CHECK(value < prev_value);
      CHECK(gap > 0.0);
      CHECK(gap < prev_gap);
      prev_value = value;
      prev_gap = gap;
    }
    CHECK(prev_gap < 1e-4);
  }
}

TEST_CASE("E[1/(1 - p1...pn)] by Monte Carlo is 1 + zeta(n)") {
  CHECK(zeta_lemma_check(make_power_overlap(0.0), 2, 1000000, 1) == doctest::Approx(oracle::kPiSquaredOverSix).epsilon(0.006));
  CHECK(std::abs(zeta_lemma_check(make_power_overlap(1.0), 1, 1000000, 2) - 2.0) <= 0.01);
  CHECK_THROWS_AS(zeta_lemma_check(make_power_overlap(0.0), 1, 1000, 3), DivergenceError);
}

TEST_CASE("annealed time closed forms") {
  const auto linear = make_power_overlap(1.0);
  CHECK(annealed_time(linear, 1, 1e-10) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(annealed_time(linear, 2, 1e-10) == doctest::Approx(3.0 - kLinearZeta2).epsilon(1e-9));
  CHECK_THROWS_AS(annealed_time(make_power_overlap(0.0), 5, 1e-8), DivergenceError);
  CHECK_THROWS_AS(annealed_time(make_power_overlap(-0.5), 5, 1e-8), DivergenceError);
  const double big = annealed_time(linear, 1000000, 1e-8) / 1000.0;
  CHECK(big >= 0.95 * std::sqrt(2 * kPi));
  CHECK(big <= 1.05 * std::sqrt(2 * kPi));
}

TEST_CASE("alternating binomial evaluation") {
  const auto linear = make_power_overlap(1.0);
  CHECK(annealed_time_alternating(linear, 1) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(annealed_time_alternating(linear, 2) == doctest::Approx(3.0 - kLinearZeta2).epsilon(1e-10));
  CHECK(annealed_time_alternating(linear, 2) == doctest::Approx(2.84053).epsilon(1e-6));
  CHECK(std::abs(annealed_time_alternating(linear, 2) - annealed_time(linear, 2, 1e-9)) <= 1e-6);
  for (std::uint64_t n = 1; n <= 40; ++n) {
    const double series = annealed_time(linear, n, 1e-11);
    CAPTURE(n);
    CHECK(std::abs(annealed_time_alternating(linear, n) / series - 1.0) <= 1e-6);
  }
  for (double beta : {0.5, 2.0}) {
    const auto dist = make_power_overlap(beta);
    for (std::uint64_t n : {3ULL, 17ULL, 40ULL}) {
      CHECK(std::abs(annealed_time_alternating(dist, n) / annealed_time(dist, n, 1e-11) - 1.0) <= 1e-6);
    }
  }
  CHECK_THROWS_AS(annealed_time_alternating(linear, 41), SizeError);
}

TEST_CASE("annealed curve never decreases") {
  std::vector<std::uint64_t> ns{1, 2, 3, 5, 10, 100, 1000, 10000};
  for (double beta : {0.25, 1.0, 3.0}) {
    const auto curve = annealed_time_curve(make_power_overlap(beta), ns, 1e-9);
    REQUIRE(curve.entries.size() == ns.size());
    CHECK(curve.convention_offset == 1.0);
    for (std::size_t i = 1; i < ns.size(); ++i) CHECK(curve.entries[i].value > curve.entries[i - 1].value);
  }
}

TEST_CASE("annealed time is the ensemble mean of the exact quenched time") {
  const auto dist = make_power_overlap(1.0);
  for (std::size_t n : {10U, 100U}) {
    const std::size_t vectors = 100000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t v = 0; v < vectors; ++v) {
      const auto p = sample_overlaps(dist, n, derive_seed(77, {v}));
      const double t = expected_time(p, 1e-6).expected_time;
      sum += t;
      sum_sq += t * t;
    }
    const double mean = sum / vectors;
    const double se = std::sqrt((sum_sq / vectors - mean * mean) / vectors);
    CAPTURE(n);
    CHECK(std::abs(mean - annealed_time(dist, n, 1e-10)) <= 3.0 * se);
  }
}

TEST_CASE("t1 constant") {
  CHECK(t1_constant(1.0, 2.0) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-13));
  CHECK(t1_constant(2.0, 3.0) == doctest::Approx(std::cbrt(6.0) * std::tgamma(2.0 / 3.0)).epsilon(1e-13));
  CHECK(t1_constant(2.0, 3.0) == doctest::Approx(2.46061).epsilon(1e-5));
  CHECK(t1_constant(1e-6, 1.0) > 1e5);
  CHECK_THROWS_AS(t1_constant(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(t1_constant(1.0, 0.0), DomainError);
  const double ratio = annealed_time(make_power_overlap(2.0), 1000000, 1e-8) / 100.0;
  CHECK(ratio == doctest::Approx(t1_constant(2.0, 3.0)).epsilon(0.03));
}

TEST_CASE("t1 convergence bands") {
  const auto dist = make_power_overlap(1.0);
  const double limit = std::sqrt(2.0 * kPi);
  double prev_gap = 1.0;
  for (auto [n, tol] : {std::pair{1e4, 0.10}, std::pair{1e5, 0.06}, std::pair{1e6, 0.03}}) {
    const double gap = std::abs(annealed_time(dist, static_cast<std::uint64_t>(n), 1e-8) / std::sqrt(n) / limit - 1.0);
    CHECK(gap <= tol);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("second-order remainder of the uniform family") {
  const auto uniform = make_power_overlap(0.0);
  CHECK(t2_remainder(uniform, 2, 1e-12) == doctest::Approx(-(oracle::kPiSquaredOverSix - 1.0)).epsilon(1e-9));
  CHECK_THROWS_AS(t2_remainder(make_power_overlap(1.0), 4, 1e-8), UnsupportedError);
  CHECK_THROWS_AS(t2_remainder(uniform, 1, 1e-8), DomainError);
  for (std::uint64_t n : {2ULL, 3ULL, 10ULL, 1000ULL, 100000ULL}) CHECK(t2_remainder(uniform, n, 1e-6) < 0.0);

  const double n14 = 16384.0;
  const double ratio = -t2_remainder(uniform, 16384, 1e-6) / (n14 * std::log(n14));
  CHECK(ratio >= 0.8);
  CHECK(ratio <= 1.2);

  std::vector<double> excess;
  for (unsigned e = 10; e <= 15; ++e) {
    const double n = std::ldexp(1.0, static_cast<int>(e));
    excess.push_back((-t2_remainder(uniform, static_cast<std::uint64_t>(n), 1e-6) - n * std::log(n)) / n);
  }
  const auto [lo, hi] = std::minmax_element(excess.begin(), excess.end());
  CHECK(*hi - *lo < 0.05);
}

TEST_CASE("second-order remainder by direct summation") {
  // Small n, where the plain sum converges fast enough to brute-force.
  const auto uniform = make_power_overlap(0.0);
  for (int n : {3, 5, 8}) {
    const int last = 2000000;
    // Beyond `last` the summand is C(n,2) m^2 to leading order.
    double direct = 0.5 * n * (n - 1) / (last + 1.5);
    for (int j = last; j >= 1; --j) {
      const double m = 1.0 / (j + 1.0);
      direct += std::pow(1.0 - m, n) - 1.0 + n * m;
    }
    CHECK(t2_remainder(uniform, static_cast<std::uint64_t>(n), 1e-10) == doctest::Approx(-direct).epsilon(1e-6));
  }
}

TEST_CASE("exponential approximation") {
  const auto [e0, a0] = exp_approx_check(0.0, 17.0);
  CHECK(e0 == 1.0);
  CHECK(a0 == 1.0);
  const auto [e1, a1] = exp_approx_check(1.0, 1e6);
  CHECK(std::abs(e1 - a1) <= 1e-11);
  const auto [e2, a2] = exp_approx_check(2.0, 100.0);
  CHECK(std::abs(e2 - a2) <= 8.0 * std::exp(-2.0) * 1e-4);
  CHECK_THROWS_AS(exp_approx_check(5.0, 5.0), DomainError);
  CHECK_THROWS_AS(exp_approx_check(-1.0, 5.0), DomainError);
}

TEST_CASE("annealed batch N_delta") {
  // (1 - 1/(k+1))^n >= 0.9 for the uniform family.
  for (std::uint64_t n : {1ULL, 7ULL, 1000ULL}) {
    std::uint64_t k = 1;
    while (std::pow(static_cast<double>(k) / (k + 1.0), static_cast<double>(n)) < 0.9) ++k;
    CHECK(annealed_batch_n_delta(make_power_overlap(0.0), n, 0.1) == k);
  }
  CHECK(annealed_batch_n_delta(make_power_overlap(1.0), 0, 0.1) == 0);
  CHECK_THROWS_AS(annealed_batch_n_delta(make_power_overlap(1.0), 3, 1.0), DomainError);
}
