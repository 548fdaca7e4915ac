#pragma once

// Moment zeta function and annealed (ensemble-averaged) batch-learning time.
//
// For the power family with a = 1 the moments m_k continue analytically to
// real k and are positive, decreasing and log-convex, which is what the
// Euler-Maclaurin tail closure in series.hpp needs.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "batchlearn/errors.hpp"
#include "batchlearn/overlap.hpp"
#include "batchlearn/random.hpp"
#include "batchlearn/series.hpp"

namespace batchlearn {

template <typename Scalar>
struct ZetaEvaluation {
  Scalar value;
  std::uint64_t terms_summed;
  Scalar tail_bound;
};

template <typename Scalar>
struct AnnealedTimeCurve {
  struct Entry {
    std::uint64_t n;
    Scalar value;
  };
  std::vector<Entry> entries;
  Scalar beta;
  Scalar convention_offset;
};

inline constexpr std::uint64_t kMaxSeriesTerms = 200'000'000ULL;

namespace detail {

template <typename Scalar>
void require_full_support(const OverlapDistribution<Scalar>& dist, const char* what) {
  if (!dist.full_support()) {
    throw UnsupportedError(std::string(what) + " is only offered for support_max = 1");
  }
}

// (1 - m)^n - 1 + n m >= 0 without cancellation.
template <typename Scalar>
Scalar second_order_remainder(Scalar m, Scalar n) {
  const Scalar y = n * std::log1p(-m);
  if (n * m > Scalar(0.01)) return std::expm1(y) + n * m;
  // d = n (-log1p(-m) - m) = n sum_{r >= 2} m^r / r, with m <= 0.005.
  Scalar d = 0;
  Scalar power = m;
  for (int r = 2; r < 40; ++r) {
    power *= m;
    const Scalar t = power / r;
    d += t;
    if (t < std::numeric_limits<Scalar>::epsilon() * d) break;
  }
  d *= n;
  const Scalar z = -n * m - d;
  // expm1(z) - z = sum_{r >= 2} z^r / r!, |z| <= ~0.01.
  Scalar e2 = 0;
  Scalar t = z;
  for (int r = 2; r < 40; ++r) {
    t *= z / r;
    e2 += t;
    if (std::abs(t) < std::numeric_limits<Scalar>::epsilon() * std::abs(e2)) break;
  }
  return e2 - d;
}

}  // namespace detail

// zeta(s) = sum_{k >= 1} m_k^s, defined for s > 1 / (1 + beta).
template <typename Scalar>
ZetaEvaluation<Scalar> zeta(const OverlapDistribution<Scalar>& dist, Scalar s, Scalar tol,
                            std::uint64_t max_terms = kMaxSeriesTerms) {
  detail::require_full_support(dist, "zeta");
  const Scalar threshold = Scalar(1) / dist.tail_index();
  if (!(s > threshold)) {
    std::ostringstream msg;
    msg << "zeta(s) diverges for s <= 1/(1+beta) = " << static_cast<double>(threshold) << " (s = "
        << static_cast<double>(s) << ")";
    throw DivergenceError(msg.str(), static_cast<double>(threshold));
  }
  auto term = [&](Scalar x) { return std::pow(moment_continuous(dist, x), s); };
  auto always = [](std::uint64_t) { return true; };
  const auto r = sum_convex_series<Scalar>(term, 1, tol, always, max_terms);
  return {r.value, r.terms, r.tail_bound};
}

// Monte Carlo estimate of E[1 / (1 - x_1 ... x_n)] over i.i.d. overlaps.
// Expanding the geometric series gives 1 + zeta(n): the k = 0 term is the 1.
inline double zeta_lemma_check(const OverlapDistribution<double>& dist, std::uint64_t n, std::uint64_t runs,
                               Seed seed) {
  const double threshold = 1.0 / dist.tail_index();
  if (!(static_cast<double>(n) > threshold)) {
    throw DivergenceError("E[1/(1 - x_1...x_n)] is infinite for n <= 1/(1+beta)", threshold);
  }
  if (runs == 0) throw DomainError("zeta_lemma_check: runs must be >= 1");
  CompensatedSum<double> acc;
  for (std::uint64_t r = 0; r < runs; ++r) {
    Engine eng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kRun), r}));
    double log_product = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      log_product += std::log1p(-dist.complement_from_uniform(uniform_open_zero(eng)));
    }
    acc += 1.0 / -std::expm1(log_product);
  }
  return acc.value() / static_cast<double>(runs);
}

// E(T) = 1 + sum_{j >= 1} [1 - (1 - m_j)^n], the annealed expected time.
template <typename Scalar>
Scalar annealed_time(const OverlapDistribution<Scalar>& dist, std::uint64_t n, Scalar tol,
                     std::uint64_t max_terms = kMaxSeriesTerms) {
  detail::require_full_support(dist, "annealed_time");
  if (!(dist.beta() > Scalar(0))) {
    throw DivergenceError("annealed expected time is infinite for beta <= 0; use quantiles", 0.0);
  }
  if (n == 0) throw DomainError("annealed_time: n must be >= 1");
  const Scalar nn = static_cast<Scalar>(n);
  auto term = [&](Scalar x) { return -std::expm1(nn * std::log1p(-moment_continuous(dist, x))); };
  // 1 - (1 - m)^n is convex in j once n m is small.
  auto ready = [&](std::uint64_t k) {
    return k >= 2 && nn * moment_continuous(dist, static_cast<Scalar>(k - 1)) <= Scalar(0.05);
  };
  const auto r = sum_convex_series<Scalar>(term, 1, tol, ready, max_terms);
  return Scalar(1) + r.value;
}

template <typename Scalar>
AnnealedTimeCurve<Scalar> annealed_time_curve(const OverlapDistribution<Scalar>& dist,
                                              const std::vector<std::uint64_t>& ns, Scalar tol) {
  AnnealedTimeCurve<Scalar> curve{{}, dist.beta(), Scalar(1)};
  for (std::uint64_t n : ns) curve.entries.push_back({n, annealed_time(dist, n, tol)});
  return curve;
}

inline constexpr std::uint64_t kMaxAlternatingSize = 40;

// 1 - sum_{k=1}^n C(n,k) (-1)^k zeta(k), accumulated in long double with
// zeta values certified to a binomial-weighted tolerance.
template <typename Scalar>
Scalar annealed_time_alternating(const OverlapDistribution<Scalar>& dist, std::uint64_t n) {
  detail::require_full_support(dist, "annealed_time_alternating");
  if (!(dist.beta() > Scalar(0))) {
    throw DivergenceError("annealed expected time is infinite for beta <= 0", 0.0);
  }
  if (n > kMaxAlternatingSize) {
    std::ostringstream msg;
    msg << "alternating binomial sum loses about n bits; n = " << n << " exceeds " << kMaxAlternatingSize;
    throw SizeError(msg.str());
  }
  using Wide = long double;
  const auto wide = dist.template cast<Wide>();
  CompensatedSum<Wide> acc;
  acc += Wide(1);
  Wide binom = 1;
  for (std::uint64_t k = 1; k <= n; ++k) {
    binom = binom * static_cast<Wide>(n - k + 1) / static_cast<Wide>(k);
    const Wide tol = std::max(Wide(1e-13) / (binom * static_cast<Wide>(n)), Wide(1e-30));
    const Wide z = zeta(wide, static_cast<Wide>(k), tol).value;
    if (k % 2 == 1) {
      acc += binom * z;
    } else {
      acc -= binom * z;
    }
  }
  return static_cast<Scalar>(acc.value());
}

// (c Gamma(beta + 1))^(1/(beta + 1)) Gamma(beta / (beta + 1)), the limit of
// n^(-1/(1+beta)) E(T).
inline double t1_constant(double beta, double c) {
  if (!(beta > 0.0)) throw DomainError("t1_constant: beta must be > 0 (Gamma pole at beta = 0)");
  if (!(c > 0.0)) throw DomainError("t1_constant: c must be > 0");
  const double alpha = beta + 1.0;
  return std::pow(c * std::tgamma(alpha), 1.0 / alpha) * std::tgamma(beta / alpha);
}

// T2(n) = -sum_j [(1 - m_j)^n - 1 + n m_j] for the uniform-type family.
template <typename Scalar>
Scalar t2_remainder(const OverlapDistribution<Scalar>& dist, std::uint64_t n, Scalar tol,
                    std::uint64_t max_terms = kMaxSeriesTerms) {
  detail::require_full_support(dist, "t2_remainder");
  if (dist.beta() != Scalar(0)) throw UnsupportedError("t2_remainder is defined for beta = 0 only");
  if (n < 2) throw DomainError("t2_remainder: n must be >= 2");
  const Scalar nn = static_cast<Scalar>(n);
  // m(x) = 1 / (x + 1); the summand is an increasing convex function of a
  // decreasing convex m, hence convex everywhere.
  auto term = [&](Scalar x) { return detail::second_order_remainder(Scalar(1) / (x + 1), nn); };
  auto always = [](std::uint64_t) { return true; };
  const auto r = sum_convex_series<Scalar>(term, 1, tol, always, max_terms);
  return -r.value;
}

// Smallest k with (1 - m_k)^n >= 1 - delta: the N_Delta of the batch
// learner averaged over the overlap ensemble. Deterministic.
template <typename Scalar>
std::uint64_t annealed_batch_n_delta(const OverlapDistribution<Scalar>& dist, std::uint64_t n, Scalar delta) {
  if (!(delta > Scalar(0) && delta < Scalar(1))) throw DomainError("annealed_batch_n_delta: delta must lie in (0, 1)");
  if (n == 0) return 0;
  const Scalar target = std::log1p(-delta);
  const Scalar nn = static_cast<Scalar>(n);
  auto learned = [&](std::uint64_t k) {
    if (k > std::numeric_limits<unsigned>::max()) throw SizeError("annealed_batch_n_delta: N_Delta beyond 2^32");
    return nn * std::log1p(-moment(dist, static_cast<unsigned>(k))) >= target;
  };
  std::uint64_t hi = 1;
  while (!learned(hi)) hi *= 2;
  std::uint64_t lo = hi / 2;  // not learned, or 0
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (learned(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ((1 - x/n)^n, e^-x (1 - x^2 / (2n))).
inline std::pair<double, double> exp_approx_check(double x, double n) {
  if (!(x >= 0.0 && x < n)) throw DomainError("exp_approx_check: need 0 <= x < n");
  const double exact = std::exp(n * std::log1p(-x / n));
  const double approx = std::exp(-x) * (1.0 - x * x / (2.0 * n));
  return {exact, approx};
}

}  // namespace batchlearn
