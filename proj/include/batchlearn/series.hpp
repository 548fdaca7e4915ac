#pragma once

// Summation helpers shared by the exact and annealed engines.

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "batchlearn/errors.hpp"

namespace batchlearn {

// Neumaier compensated summation.
template <typename Scalar>
class CompensatedSum {
 public:
  CompensatedSum& operator+=(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  CompensatedSum& operator-=(Scalar x) { return *this += -x; }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

template <typename Scalar>
struct SeriesResult {
  Scalar value;
  std::uint64_t terms;  // explicit terms added before the tail closure
  Scalar tail_bound;    // certified half-width of the tail estimate
};

// Sums term(k) for integer k >= first and closes the sum with an
// Euler-Maclaurin tail once the remainder can be certified below `tol`.
//
// Closing at K uses, for a decreasing convex term f on [K - 1, inf),
//   sum_{k > K} f(k) = int_K^inf f - f(K)/2 + E,   0 <= E <= |f'(K)| / 8,
// with |f'(K)| <= f(K - 1) - f(K) by convexity. The returned value takes the
// midpoint of that bracket; `tail_ready(K)` must only return true where the
// convexity requirement holds. `term` is called with real arguments.
template <typename Scalar, typename Term, typename Ready>
SeriesResult<Scalar> sum_convex_series(const Term& term, std::uint64_t first, Scalar tol, const Ready& tail_ready,
                                       std::uint64_t max_terms) {
  if (!(tol > Scalar(0))) throw DomainError("series tolerance must be positive");
  boost::math::quadrature::exp_sinh<Scalar> integrator;
  const Scalar quad_tol = std::max(Scalar(64) * std::numeric_limits<Scalar>::epsilon(), Scalar(1e-15));

  CompensatedSum<Scalar> acc;
  std::uint64_t k = first;
  std::uint64_t next_check = first + 15;
  Scalar previous = term(static_cast<Scalar>(first) - 1);
  for (;; ++k) {
    const Scalar current = term(static_cast<Scalar>(k));
    acc += current;
    if (current == Scalar(0)) {
      // Decreasing and nonnegative: everything beyond is zero.
      return {acc.value(), k - first + 1, Scalar(0)};
    }
    if (k >= next_check) {
      next_check = first + 2 * (k - first + 1) - 1;
      const Scalar slope = previous - current;
      const Scalar half_width = slope / 16;
      if (tail_ready(k) && half_width <= tol / 2) {
        Scalar quad_err = 0;
        Scalar l1 = 0;
        const Scalar integral = integrator.integrate(
            [&](Scalar x) { return term(x); }, static_cast<Scalar>(k), std::numeric_limits<Scalar>::infinity(),
            quad_tol, &quad_err, &l1);
        // The quadrature estimate is widened by a safety factor and by one
        // rounding of the integral itself.
        const Scalar bound = half_width + 4 * quad_err + std::numeric_limits<Scalar>::epsilon() * std::abs(integral);
        if (bound <= tol) {
          acc += integral - current / 2 + half_width;
          return {acc.value(), k - first + 1, bound};
        }
      }
    }
    if (k - first + 1 >= max_terms) {
      std::ostringstream msg;
      msg << "series tail could not be certified below " << static_cast<double>(tol) << " within " << max_terms
          << " terms";
      throw ToleranceError(msg.str());
    }
    previous = current;
  }
}

}  // namespace batchlearn
