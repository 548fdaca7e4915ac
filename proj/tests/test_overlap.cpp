#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "batchlearn/errors.hpp"
#include "batchlearn/overlap.hpp"
#include "batchlearn/stats.hpp"
#include "oracles.hpp"

using namespace batchlearn;

TEST_CASE("normalization of the power family") {
  CHECK(make_power_overlap(0.0).normalization() == doctest::Approx(1.0));
  CHECK(make_power_overlap(1.0).normalization() == doctest::Approx(2.0));
  CHECK(make_power_overlap(1.0, 0.5).normalization() == doctest::Approx(8.0));
  CHECK(make_power_overlap(-0.5).tail_index() == doctest::Approx(0.5));
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(make_power_overlap(-1.0), DomainError);
  CHECK_THROWS_AS(make_power_overlap(-2.0), DomainError);
  CHECK_THROWS_AS(make_power_overlap(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(make_power_overlap(0.0, 1.5), DomainError);
  CHECK_THROWS_AS(make_power_overlap(std::nan(""), 1.0), DomainError);
}

TEST_CASE("overlap vectors validate their entries") {
  CHECK_THROWS_AS(OverlapVector<double>::from_overlaps({0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(OverlapVector<double>::from_overlaps({-0.1}), DomainError);
  const auto p = OverlapVector<double>::from_overlaps({0.0, 0.25});
  CHECK(p.size() == 2);
  CHECK(p.min_complement() == 0.75);
  CHECK(p.log_max_overlap() == doctest::Approx(std::log(0.25)));
  CHECK(p.to_std() == std::vector<double>{0.0, 0.25});
}

TEST_CASE("cdf_H") {
  CHECK(cdf_H(make_power_overlap(0.0), 0.3) == doctest::Approx(0.3));
  CHECK(cdf_H(make_power_overlap(1.0), 0.5) == doctest::Approx(0.25));
  CHECK(cdf_H(make_power_overlap(1.0, 0.5), 0.25) == doctest::Approx(0.25));
  for (double beta : {-0.5, 0.0, 2.0}) {
    CHECK(cdf_H(make_power_overlap(beta), 1.0) == 1.0);
    CHECK(cdf_H(make_power_overlap(beta, 0.5), 1.0) == 1.0);
    CHECK(cdf_H(make_power_overlap(beta), 0.0) == 0.0);
  }
  CHECK_THROWS_AS(cdf_H(make_power_overlap(0.0), 1.1), DomainError);
  CHECK_THROWS_AS(cdf_H(make_power_overlap(0.0), -0.1), DomainError);
}

TEST_CASE("moments") {
  const auto uniform = make_power_overlap(0.0);
  CHECK(moment(uniform, 3) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(moment(uniform, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(moment(make_power_overlap(1.0), 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(moment(uniform, 0), DomainError);
}

TEST_CASE("closed-form moments agree with the Beta integral") {
  for (double beta : {-0.75, -0.5, 0.0, 0.3, 1.0, 2.0, 5.5}) {
    const auto dist = make_power_overlap(beta);
    for (unsigned k : {1U, 2U, 7U, 50U, 1000U, 100000U}) {
      // lgamma differences near 1e6 leave the oracle itself only ~1e-10 accurate.
      const double eps = k <= 1000 ? 1e-11 : 1e-9;
      CHECK(moment(dist, k) == doctest::Approx(oracle::beta_moment(beta, k)).epsilon(eps));
    }
  }
}

TEST_CASE("quadrature and closed form agree for k <= 50") {
  for (double beta : {-0.5, 0.0, 1.0, 2.0}) {
    const auto dist = make_power_overlap(beta);
    for (unsigned k = 1; k <= 50; ++k) {
      const double closed = moment_continuous(dist, static_cast<double>(k));
      CHECK(std::abs(moment_quadrature(dist, k) / closed - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("truncated support moments match Simpson") {
  for (double beta : {-0.5, 0.0, 1.0}) {
    const auto dist = make_power_overlap(beta, 0.5);
    for (int k : {1, 5, 20}) {
      CHECK(moment(dist, static_cast<unsigned>(k)) ==
            doctest::Approx(oracle::moment_simpson(beta, 0.5, k)).epsilon(1e-6));
    }
  }
}

TEST_CASE("moments decrease strictly") {
  for (double support : {0.5, 1.0}) {
    for (double beta : {-0.5, 0.0, 1.0, 2.0}) {
      const auto dist = make_power_overlap(beta, support);
      double prev = moment(dist, 1);
      for (unsigned k = 2; k <= 200; ++k) {
        const double m = moment(dist, k);
        REQUIRE(m < prev);
        prev = m;
      }
    }
  }
}

TEST_CASE("moment asymptote") {
  CHECK(moment_asymptote(make_power_overlap(0.0), 1) == doctest::Approx(1.0));
  CHECK(moment_asymptote(make_power_overlap(0.0), 7) == doctest::Approx(1.0 / 7.0));
  CHECK(moment_asymptote(make_power_overlap(1.0), 10) == doctest::Approx(0.02));
  const auto uniform = make_power_overlap(0.0);
  CHECK(moment(uniform, 1000) / moment_asymptote(uniform, 1000) == doctest::Approx(1000.0 / 1001.0));
  CHECK_THROWS_AS(moment_asymptote(make_power_overlap(0.0, 0.5), 10), UnsupportedError);

  for (double beta : {0.0, 1.0}) {
    const auto dist = make_power_overlap(beta);
    for (unsigned k : {1000U, 10000U, 100000U, 1000000U}) {
      const double rel = std::abs(moment(dist, k) / moment_asymptote(dist, k) - 1.0);
      CHECK(rel <= (beta + 2.0) / k);
    }
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto dist = make_power_overlap(0.7);
  const auto a = sample_overlaps(dist, 1000, 42);
  const auto b = sample_overlaps(dist, 1000, 42);
  const auto c = sample_overlaps(dist, 1000, 43);
  CHECK((a.complements() == b.complements()).all());
  CHECK_FALSE((a.complements() == c.complements()).all());
}

TEST_CASE("sample means") {
  const auto p_uniform = sample_overlaps(make_power_overlap(0.0), 1000000, 5);
  CHECK(p_uniform.overlaps().mean() == doctest::Approx(0.5).epsilon(0.004));
  const auto p_linear = sample_overlaps(make_power_overlap(1.0), 1000000, 6);
  CHECK(std::abs(p_linear.complements().mean() - 2.0 / 3.0) <= 0.002);
}

TEST_CASE("sampled complements follow cdf_H") {
  for (double support : {0.5, 1.0}) {
    for (double beta : {-0.5, 0.0, 1.0, 2.0}) {
      const auto dist = make_power_overlap(beta, support);
      const auto p = sample_overlaps(dist, 1000000, 11);
      std::vector<double> q(p.complements().begin(), p.complements().end());
      const double ks = ks_distance(q, [&](double t) { return cdf_H(dist, std::min(t, 1.0)); });
      CAPTURE(beta);
      CAPTURE(support);
      CHECK(ks < 0.002);
      CHECK(p.complements().maxCoeff() <= support);
      CHECK(p.complements().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("long double instantiation") {
  const auto dist = make_power_overlap<long double>(1.0L, 1.0L);
  CHECK(static_cast<double>(moment(dist, 2)) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const auto p = sample_overlaps(dist, 10, 3);
  const auto pd = sample_overlaps(make_power_overlap(1.0), 10, 3);
  CHECK(static_cast<double>(p.complements()[0]) == doctest::Approx(pd.complements()[0]).epsilon(1e-12));
}
