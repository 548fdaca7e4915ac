#pragma once

// Power-law overlap laws and overlap vectors.
//
// The wrong concept i shares a fraction p_i of the target's words. The
// complement q = 1 - p has density h(q) = c q^beta on [0, a], so the law of p
// near 1 behaves like c (1 - p)^beta. All numerics keep q rather than p: p is
// frequently within a few ulps of 1, where 1 - p is no longer recoverable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Core>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "batchlearn/errors.hpp"
#include "batchlearn/random.hpp"

namespace batchlearn {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
class OverlapDistribution {
 public:
  OverlapDistribution(Scalar beta, Scalar support_max) : beta_(beta), support_max_(support_max) {
    if (!(beta > Scalar(-1)) || !std::isfinite(static_cast<double>(beta))) {
      std::ostringstream msg;
      msg << "overlap exponent beta must exceed -1, got " << static_cast<double>(beta);
      throw DomainError(msg.str());
    }
    if (!(support_max > Scalar(0) && support_max <= Scalar(1))) {
      std::ostringstream msg;
      msg << "support_max must lie in (0, 1], got " << static_cast<double>(support_max);
      throw DomainError(msg.str());
    }
    normalization_ = (beta_ + 1) / std::pow(support_max_, beta_ + 1);
  }

  Scalar beta() const noexcept { return beta_; }
  Scalar support_max() const noexcept { return support_max_; }
  // c in h(q) = c q^beta; fixed so that h integrates to one.
  Scalar normalization() const noexcept { return normalization_; }
  // alpha = beta + 1, the tail index of 1 / q.
  Scalar tail_index() const noexcept { return beta_ + 1; }
  bool full_support() const noexcept { return support_max_ == Scalar(1); }

  // Inverse-CDF transform of u in (0, 1] to the complement q in (0, a].
  Scalar complement_from_uniform(Scalar u) const {
    const Scalar q = support_max_ * std::pow(u, Scalar(1) / (beta_ + 1));
    return std::max(q, std::numeric_limits<Scalar>::min());
  }

  template <typename Other>
  OverlapDistribution<Other> cast() const {
    return OverlapDistribution<Other>(static_cast<Other>(beta_), static_cast<Other>(support_max_));
  }

  friend bool operator==(const OverlapDistribution& a, const OverlapDistribution& b) {
    return a.beta_ == b.beta_ && a.support_max_ == b.support_max_;
  }

 private:
  Scalar beta_;
  Scalar support_max_;
  Scalar normalization_;
};

template <typename Scalar>
OverlapDistribution<Scalar> make_power_overlap(Scalar beta, Scalar support_max) {
  return OverlapDistribution<Scalar>(beta, support_max);
}

inline OverlapDistribution<double> make_power_overlap(double beta, double support_max = 1.0) {
  return OverlapDistribution<double>(beta, support_max);
}

// One realization p_1..p_n, stored as complements q_i = 1 - p_i together
// with log p_i = log1p(-q_i).
template <typename Scalar = double>
class OverlapVector {
 public:
  OverlapVector() = default;

  static OverlapVector from_overlaps(std::span<const Scalar> p) {
    ArrayX<Scalar> q(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= Scalar(0) && p[i] < Scalar(1))) {
        std::ostringstream msg;
        msg << "overlap p[" << i << "] = " << static_cast<double>(p[i]) << " is outside [0, 1)";
        throw DomainError(msg.str());
      }
      q[static_cast<Eigen::Index>(i)] = Scalar(1) - p[i];
    }
    return OverlapVector(std::move(q));
  }

  static OverlapVector from_overlaps(std::initializer_list<Scalar> p) {
    return from_overlaps(std::span<const Scalar>(p.begin(), p.size()));
  }

  static OverlapVector from_complements(ArrayX<Scalar> q) {
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      if (!(q[i] > Scalar(0) && q[i] <= Scalar(1))) {
        std::ostringstream msg;
        msg << "complement q[" << i << "] = " << static_cast<double>(q[i]) << " is outside (0, 1]";
        throw DomainError(msg.str());
      }
    }
    return OverlapVector(std::move(q));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(complement_.size()); }
  bool empty() const noexcept { return complement_.size() == 0; }

  const ArrayX<Scalar>& complements() const noexcept { return complement_; }
  const ArrayX<Scalar>& log_overlaps() const noexcept { return log_overlap_; }
  ArrayX<Scalar> overlaps() const { return Scalar(1) - complement_; }

  Scalar min_complement() const { return complement_.minCoeff(); }
  // log of the largest overlap; -inf when every overlap is zero.
  Scalar log_max_overlap() const { return log_overlap_.maxCoeff(); }

  std::vector<Scalar> to_std() const {
    std::vector<Scalar> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Scalar(1) - complement_[static_cast<Eigen::Index>(i)];
    return out;
  }

  template <typename Other>
  OverlapVector<Other> cast() const {
    return OverlapVector<Other>::from_complements(complement_.template cast<Other>());
  }

 private:
  explicit OverlapVector(ArrayX<Scalar> q) : complement_(std::move(q)), log_overlap_(complement_.size()) {
    for (Eigen::Index i = 0; i < complement_.size(); ++i) {
      log_overlap_[i] = std::log1p(-complement_[i]);
    }
  }

  ArrayX<Scalar> complement_;
  ArrayX<Scalar> log_overlap_;
};

// Draws the complements of n i.i.d. overlaps from `eng`, consuming n uniforms.
template <typename Scalar>
ArrayX<Scalar> draw_complements(const OverlapDistribution<Scalar>& dist, std::size_t n, Engine& eng) {
  ArrayX<Scalar> q(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    q[i] = dist.complement_from_uniform(static_cast<Scalar>(uniform_open_zero(eng)));
  }
  return q;
}

// n i.i.d. overlaps; a pure function of (dist, n, seed).
template <typename Scalar>
OverlapVector<Scalar> sample_overlaps(const OverlapDistribution<Scalar>& dist, std::size_t n, Seed seed) {
  Engine eng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::kOverlaps)}));
  return OverlapVector<Scalar>::from_complements(draw_complements(dist, n, eng));
}

// P(q <= t) = min(1, (t / a)^(beta + 1)).
template <typename Scalar>
Scalar cdf_H(const OverlapDistribution<Scalar>& dist, Scalar t) {
  if (!(t >= Scalar(0) && t <= Scalar(1))) throw DomainError("cdf_H: t must lie in [0, 1]");
  if (t >= dist.support_max()) return Scalar(1);
  return std::pow(t / dist.support_max(), dist.tail_index());
}

// E[p^k] by tanh-sinh quadrature of c q^beta (1 - q)^k over [0, a].
template <typename Scalar>
Scalar moment_quadrature(const OverlapDistribution<Scalar>& dist, unsigned k) {
  using boost::math::quadrature::tanh_sinh;
  const Scalar beta = dist.beta();
  const Scalar c = dist.normalization();
  auto integrand = [&](Scalar q) -> Scalar {
    if (q <= Scalar(0)) return Scalar(0);
    return c * std::pow(q, beta) * std::pow(Scalar(1) - q, static_cast<Scalar>(k));
  };
  tanh_sinh<Scalar> integrator(15);
  const Scalar tol = std::max(Scalar(1e-13), std::sqrt(std::numeric_limits<Scalar>::epsilon()) * Scalar(1e-6));
  return integrator.integrate(integrand, Scalar(0), dist.support_max(), tol);
}

// m(x) = Gamma(beta + 2) Gamma(x + 1) / Gamma(x + beta + 2), the analytic
// continuation of the k-th moment to real x >= 0. Requires a = 1.
template <typename Scalar>
Scalar moment_continuous(const OverlapDistribution<Scalar>& dist, Scalar x) {
  if (!dist.full_support()) throw UnsupportedError("continuous moments need support_max = 1");
  if (!std::isfinite(static_cast<double>(x))) return Scalar(0);
  const Scalar alpha = dist.tail_index();
  return boost::math::tgamma(alpha + 1) * boost::math::tgamma_delta_ratio(x + 1, alpha);
}

// m_k = E[p^k]: closed form for a = 1, quadrature otherwise.
template <typename Scalar>
Scalar moment(const OverlapDistribution<Scalar>& dist, unsigned k) {
  if (k == 0) throw DomainError("moment: k must be >= 1");
  if (dist.full_support()) return moment_continuous(dist, static_cast<Scalar>(k));
  return moment_quadrature(dist, k);
}

// Leading asymptote Gamma(beta + 2) k^-(beta + 1) of m_k; a = 1 only.
template <typename Scalar>
Scalar moment_asymptote(const OverlapDistribution<Scalar>& dist, unsigned k) {
  if (k == 0) throw DomainError("moment_asymptote: k must be >= 1");
  if (!dist.full_support()) throw UnsupportedError("moment_asymptote is only offered for support_max = 1");
  const Scalar alpha = dist.tail_index();
  return dist.normalization() * boost::math::tgamma(alpha) * std::pow(static_cast<Scalar>(k), -alpha);
}

}  // namespace batchlearn
