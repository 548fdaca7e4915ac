#pragma once

// Quenched batch-learning quantities for a fixed overlap vector.
//
// Under the independence hypothesis concept i survives k words with
// probability p_i^k, so the batch learner has isolated the target after k
// words with probability l_k = prod_i (1 - p_i^k).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "batchlearn/errors.hpp"
#include "batchlearn/overlap.hpp"
#include "batchlearn/series.hpp"

namespace batchlearn {

template <typename Scalar>
struct Interval {
  Scalar lower;
  Scalar upper;
};

template <typename Scalar>
struct ExactTimeResult {
  Scalar expected_time;
  std::uint64_t truncation_k;  // last k included in the series
  Scalar tail_bound;
  // T = offset + sum_{k >= 1} (1 - l_k); the offset is the k = 0 word.
  Scalar convention_offset;
};

inline constexpr std::uint64_t kDefaultMaxTerms = 1'000'000'000ULL;

// sum_i log(1 - p_i^k), with p_i^k = exp(k log p_i).
template <typename Scalar>
Scalar log_learned_probability(const OverlapVector<Scalar>& p, std::uint64_t k) {
  if (p.empty()) return Scalar(0);
  if (k == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar kk = static_cast<Scalar>(k);
  CompensatedSum<Scalar> acc;
  for (Scalar log_p : p.log_overlaps()) {
    acc += std::log1p(-std::exp(kk * log_p));
  }
  return acc.value();
}

namespace detail {

// log l_k over log overlaps sorted in decreasing order. Once p_i^k falls
// below 2^-60 / n of the running sum the remaining terms cannot change it,
// so late k cost O(number of overlaps still alive) instead of O(n).
template <typename Scalar>
class SortedLearnedProbability {
 public:
  explicit SortedLearnedProbability(const OverlapVector<Scalar>& p)
      : desc_(p.log_overlaps().begin(), p.log_overlaps().end()) {
    std::sort(desc_.begin(), desc_.end(), std::greater<>());
    cutoff_ = -60 * std::numbers::ln2_v<Scalar> - std::log(std::max<Scalar>(1, static_cast<Scalar>(desc_.size())));
  }

  Scalar log_learned(std::uint64_t k) const {
    if (desc_.empty()) return Scalar(0);
    if (k == 0) return -std::numeric_limits<Scalar>::infinity();
    const Scalar kk = static_cast<Scalar>(k);
    CompensatedSum<Scalar> acc;
    Scalar log_first = 0;
    for (std::size_t i = 0; i < desc_.size(); ++i) {
      const Scalar log_term = kk * desc_[i];
      if (i == 0) {
        log_first = log_term;
      } else if (log_term < log_first + cutoff_) {
        break;
      }
      acc += std::log1p(-std::exp(log_term));
    }
    return acc.value();
  }

  Scalar not_learned(std::uint64_t k) const {
    if (desc_.empty()) return Scalar(0);
    if (k == 0) return Scalar(1);
    return -std::expm1(log_learned(k));
  }

 private:
  std::vector<Scalar> desc_;
  Scalar cutoff_;
};

}  // namespace detail

template <typename Scalar>
Scalar learned_probability(const OverlapVector<Scalar>& p, std::uint64_t k) {
  return std::exp(log_learned_probability(p, k));
}

// 1 - l_k without cancellation: -expm1(log l_k).
template <typename Scalar>
Scalar not_learned_probability(const OverlapVector<Scalar>& p, std::uint64_t k) {
  if (p.empty()) return Scalar(0);
  if (k == 0) return Scalar(1);
  return -std::expm1(log_learned_probability(p, k));
}

// (max_i p_i^k, min(1, sum_i p_i^k)) brackets 1 - l_k.
template <typename Scalar>
Interval<Scalar> not_learned_bounds(const OverlapVector<Scalar>& p, std::uint64_t k) {
  if (p.empty()) return {Scalar(0), Scalar(0)};
  if (k == 0) return {Scalar(1), Scalar(1)};
  const Scalar kk = static_cast<Scalar>(k);
  const Scalar lower = std::exp(kk * p.log_max_overlap());
  Scalar upper = (kk * p.log_overlaps()).exp().sum();
  return {lower, std::min(Scalar(1), upper)};
}

// (max_i 1/(1 - p_i), sum_i 1/(1 - p_i)) brackets the expected time.
template <typename Scalar>
Interval<Scalar> sum_bounds(const OverlapVector<Scalar>& p) {
  if (p.empty()) return {Scalar(0), Scalar(0)};
  const auto inv = p.complements().inverse();
  return {inv.maxCoeff(), inv.sum()};
}

template <typename Scalar>
Scalar harmonic_overlap_sum(const OverlapVector<Scalar>& p) {
  return p.complements().inverse().sum();
}

// Expected number of words until the batch learner isolates the target,
// T = sum_{k >= 0} (1 - l_k), cut once n p_max^(K+1) / (1 - p_max) < tol.
template <typename Scalar>
ExactTimeResult<Scalar> expected_time(const OverlapVector<Scalar>& p, Scalar tol,
                                      std::uint64_t max_terms = kDefaultMaxTerms) {
  if (!(tol > Scalar(0))) throw DomainError("expected_time: tolerance must be positive");
  if (p.empty()) return {Scalar(0), 0, Scalar(0), Scalar(0)};

  const Scalar n = static_cast<Scalar>(p.size());
  const Scalar log_pmax = p.log_max_overlap();
  if (log_pmax == -std::numeric_limits<Scalar>::infinity()) {
    return {Scalar(1), 0, Scalar(0), Scalar(1)};
  }
  const Scalar qmin = p.min_complement();

  // Smallest K with n p_max^(K+1) / q_min < tol.
  const Scalar needed = (std::log(tol * qmin / n) / log_pmax) - 1;
  if (!(needed < static_cast<Scalar>(max_terms))) {
    std::ostringstream msg;
    msg << "expected_time: largest overlap 1 - " << static_cast<double>(qmin) << " needs about "
        << static_cast<double>(needed) << " terms, above the cap of " << max_terms;
    throw ToleranceError(msg.str());
  }
  std::uint64_t last = needed <= 0 ? 0 : static_cast<std::uint64_t>(std::floor(needed)) + 1;
  Scalar tail = n * std::exp(static_cast<Scalar>(last + 1) * log_pmax) / qmin;
  while (!(tail < tol)) {
    ++last;
    tail = n * std::exp(static_cast<Scalar>(last + 1) * log_pmax) / qmin;
  }

  const detail::SortedLearnedProbability<Scalar> sorted(p);
  CompensatedSum<Scalar> acc;
  acc += Scalar(1);  // k = 0: no word has been seen yet
  for (std::uint64_t k = 1; k <= last; ++k) acc += sorted.not_learned(k);
  return {acc.value(), last, tail, Scalar(1)};
}

inline constexpr std::size_t kMaxInclusionExclusionSize = 20;

// 1 + sum over nonempty subsets s of (-1)^(|s|-1) p_s / (1 - p_s).
template <typename Scalar>
Scalar inclusion_exclusion_time(const OverlapVector<Scalar>& p) {
  const std::size_t n = p.size();
  if (n > kMaxInclusionExclusionSize) {
    std::ostringstream msg;
    msg << "inclusion_exclusion_time enumerates 2^n subsets; n = " << n << " exceeds "
        << kMaxInclusionExclusionSize;
    throw SizeError(msg.str());
  }
  if (n == 0) return Scalar(0);
  const std::uint32_t subsets = 1U << n;
  std::vector<Scalar> log_ps(subsets);
  log_ps[0] = Scalar(0);
  CompensatedSum<Scalar> acc;
  acc += Scalar(1);
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    const int low = std::countr_zero(mask);
    log_ps[mask] = log_ps[mask & (mask - 1)] + p.log_overlaps()[low];
    const Scalar ps = std::exp(log_ps[mask]);
    const Scalar term = ps / -std::expm1(log_ps[mask]);
    if (std::popcount(mask) % 2 == 1) {
      acc += term;
    } else {
      acc -= term;
    }
  }
  return acc.value();
}

// Smallest k with 1 - l_k <= delta.
template <typename Scalar>
std::uint64_t n_delta(const OverlapVector<Scalar>& p, Scalar delta) {
  if (!(delta > Scalar(0) && delta < Scalar(1))) throw DomainError("n_delta: delta must lie in (0, 1)");
  if (p.empty()) return 0;
  const Scalar log_pmax = p.log_max_overlap();
  if (log_pmax == -std::numeric_limits<Scalar>::infinity()) return 1;

  const detail::SortedLearnedProbability<Scalar> sorted(p);
  auto learned = [&](std::uint64_t k) { return sorted.not_learned(k) <= delta; };
  // p_max^k <= 1 - l_k, so no k below log(delta) / log(p_max) can qualify.
  const Scalar floor_k = std::floor(std::log(delta) / log_pmax);
  std::uint64_t lo = floor_k > 1 ? static_cast<std::uint64_t>(floor_k) - 1 : 0;  // fails (or is 0)
  if (lo > 0 && learned(lo)) lo = 0;
  std::uint64_t step = std::max<std::uint64_t>(1, lo / 4);
  std::uint64_t hi = lo + step;
  while (!learned(hi)) {
    lo = hi;
    step *= 2;
    hi = lo + step;
  }
  // Invariant: not learned at lo (or lo == 0), learned at hi.
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (learned(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace batchlearn
