#ifndef QSUM_TRANSFORMS_HPP
#define QSUM_TRANSFORMS_HPP

#include <functional>

#include "qsum/series.hpp"
#include "qsum/theta.hpp"

namespace qsum {

/// Slope mu = n/d of the non-zero Newton polygon slope, n, d coprime.
struct Slope {
    int n = 1;
    int d = 1;

    double mu() const { return static_cast<double>(n) / d; }
    void validate() const;
};

/// A summation direction: representative lambda of a class in C*/q^{dZ}.
/// margin is a relative-distance diagnostic to the forbidden set, filled
/// by sigma_forbidden.
struct Direction {
    Complex lambda;
    int d = 1;
    double margin = -1.0;

    void validate() const {
        if (lambda == Complex(0.0))
            throw std::domain_error("Direction: lambda must be nonzero");
    }
};

/// Evaluation contract on a discrete spiral: at(k) returns the value at
/// the spiral point anchor * ratio^k (ratio = q^d for order-mu sums).
/// Deterministic by contract: the same k always yields the same value.
struct SpiralSampler {
    std::function<Complex(long)> at;
    Complex anchor = Complex(1.0);
    long lo = -200;
    long hi = 200;
};

/// q-Borel transform of order mu = n/d, literal form: coefficient l of
/// the w-series maps to cpow(a_l, 1/n) * q^{-l(l-1)d/2}.
TruncatedSeries qborel_literal(const Slope& mu, const TruncatedSeries& f, Complex q);

/// Root-free linear variant: a_l * q^{-l(l-1)d/2}. Coincides with the
/// literal transform when n = 1.
TruncatedSeries qborel_linear(const Slope& mu, const TruncatedSeries& f, Complex q);

/// Core bilateral theta-kernel sum
///   sum_{k in Z} g(k) / Theta_Q(Q^{1+k} lambda / x),
/// where g(k) samples the spiral point Q^k lambda. The kernel reciprocal
/// is carried by the exact recursion 1/Theta(Q u) = (1/u)/Theta(u)
/// so no far-spiral theta value is ever formed directly.
Complex bilateral_theta_sum(Complex Q, Complex lambda, const SpiralSampler& g,
                            Complex x, const NumericContext& ctx,
                            double pole_guard = 1e-9);

/// Inner Laplace sum of order mu = n/d along lambda:
///   sum_{l in dZ} f(q^l lambda) / Theta_{q^d}(q^{d+l} lambda / z).
/// The sampler's step k corresponds to l = d*k.
Complex inner_laplace_sum(int d, const Direction& lambda, const SpiralSampler& g,
                          Complex q, Complex z, const NumericContext& ctx);

/// q-Laplace transform of order mu along lambda: the n-th power of the
/// inner sum. Poles of order at most n on the spiral -lambda q^{dZ}.
Complex qlaplace_literal(const Slope& mu, const Direction& lambda, const SpiralSampler& g,
                         Complex q, Complex z, const NumericContext& ctx);

struct GrowthFit {
    bool pass = false;
    double L_fit = 0.0;
    double M_fit = 0.0;
    double worst_ratio = 0.0;  // max |g| / (L |Theta(M|z|)|) over the test half
};

/// Empirical check of q^d-exponential growth of order 1: fit L, M >= 0 on
/// the inner half of the window so |g(z)| < L |Theta_{|q|^d}(M |z|)|, then
/// test the fit on the full window.
GrowthFit growth_check(const SpiralSampler& g, int d, Complex q,
                       long window_lo, long window_hi, const NumericContext& ctx);

/// Sampler backed by a truncated Borel series: evaluates the series at
/// spiral points inside 0.8x its empirical convergence radius and refuses
/// (domain error) beyond it.
SpiralSampler make_series_sampler(const TruncatedSeries& series_in_zeta, Complex Q,
                                  Complex lambda, const NumericContext& ctx);

}  // namespace qsum

#endif
