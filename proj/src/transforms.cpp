#include "qsum/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsum {

void Slope::validate() const {
    if (n < 1 || d < 1) throw std::invalid_argument("Slope: n and d must be positive");
    if (std::gcd(n, d) != 1) throw std::invalid_argument("Slope: n and d must be coprime");
}

TruncatedSeries qborel_literal(const Slope& mu, const TruncatedSeries& f, Complex q) {
    mu.validate();
    if (f.var() != Var::w) throw std::invalid_argument("qborel_literal: input must be in w");
    if (!(std::abs(q) > 1.0)) throw std::domain_error("qborel_literal: |q| must be > 1");
    const Complex root = Complex(1.0) / static_cast<double>(mu.n);
    std::vector<Complex> out(f.size());
    for (int l = 0; l <= f.trunc_order(); ++l) {
        long e = -static_cast<long>(l) * (l - 1) * mu.d / 2;
        out[static_cast<std::size_t>(l)] = cpow(f.at(l), root) * ipow(q, e);
    }
    return TruncatedSeries(Var::zeta, std::move(out));
}

TruncatedSeries qborel_linear(const Slope& mu, const TruncatedSeries& f, Complex q) {
    mu.validate();
    if (f.var() != Var::w) throw std::invalid_argument("qborel_linear: input must be in w");
    if (!(std::abs(q) > 1.0)) throw std::domain_error("qborel_linear: |q| must be > 1");
    std::vector<Complex> out(f.size());
    for (int l = 0; l <= f.trunc_order(); ++l) {
        long e = -static_cast<long>(l) * (l - 1) * mu.d / 2;
        out[static_cast<std::size_t>(l)] = f.at(l) * ipow(q, e);
    }
    return TruncatedSeries(Var::zeta, std::move(out));
}

Complex bilateral_theta_sum(Complex Q, Complex lambda, const SpiralSampler& g, Complex x,
                            const NumericContext& ctx, double pole_guard) {
    ThetaParams kernel{Q, pole_guard};
    kernel.validate();
    if (x == Complex(0.0)) throw std::domain_error("bilateral_theta_sum: x must be nonzero");
    ctx.validate();

    // geometric guard against the pole spiral -lambda Q^Z
    {
        double t = std::log(std::abs(x) / std::abs(lambda)) / std::log(std::abs(Q));
        long k0 = static_cast<long>(std::llround(t));
        for (long k = k0 - 1; k <= k0 + 1; ++k) {
            Complex p = -lambda * ipow(Q, k);
            double rel = std::abs(x - p) / std::abs(p);
            if (rel < kernel.eval_radius_guard)
                throw pole_proximity_error("bilateral_theta_sum: x too close to -lambda Q^Z", p,
                                           rel);
        }
    }

    // reciprocal kernel R_k = 1/Theta_Q(Q^{1+k} lambda / x), carried by the
    // exact recursion R_{k+1} = R_k x/(Q^{1+k} lambda), R_{k-1} = R_k Q^k lambda / x.
    const ThetaEval th0 = theta_eval_full(Q, Q * lambda / x, ctx);
    if (std::abs(th0.value) < kernel.eval_radius_guard * th0.term_scale)
        throw pole_proximity_error("bilateral_theta_sum: theta kernel vanishes at x", -lambda,
                                   std::abs(th0.value) / th0.term_scale);
    const Complex R0 = Complex(1.0) / th0.value;

    Complex sum = g.at(0) * R0;
    double scale = std::abs(sum);
    int used = 1;

    Complex R = R0;
    int small = 0;
    for (long k = 1;; ++k) {
        if (k - 1 >= g.hi) break;
        R *= x / (ipow(Q, k) * lambda);
        Complex t = g.at(k) * R;
        sum += t;
        scale = std::max(scale, std::abs(sum));
        ++used;
        small = (std::abs(t) < ctx.term_tol * (scale + 1e-300)) ? small + 1 : 0;
        if (small >= 3) break;
        if (used > ctx.max_terms)
            throw convergence_error("bilateral_theta_sum: no convergence (upward)", used);
    }
    R = R0;
    small = 0;
    for (long k = -1;; --k) {
        if (k + 1 <= g.lo) break;
        R *= ipow(Q, k + 1) * lambda / x;
        Complex t = g.at(k) * R;
        sum += t;
        scale = std::max(scale, std::abs(sum));
        ++used;
        small = (std::abs(t) < ctx.term_tol * (scale + 1e-300)) ? small + 1 : 0;
        if (small >= 3) break;
        if (used > ctx.max_terms)
            throw convergence_error("bilateral_theta_sum: no convergence (downward)", used);
    }
    return sum;
}

Complex inner_laplace_sum(int d, const Direction& lambda, const SpiralSampler& g, Complex q,
                          Complex z, const NumericContext& ctx) {
    if (d < 1) throw std::invalid_argument("inner_laplace_sum: d must be positive");
    lambda.validate();
    return bilateral_theta_sum(ipow(q, d), lambda.lambda, g, z, ctx);
}

Complex qlaplace_literal(const Slope& mu, const Direction& lambda, const SpiralSampler& g,
                         Complex q, Complex z, const NumericContext& ctx) {
    mu.validate();
    return ipow(inner_laplace_sum(mu.d, lambda, g, q, z, ctx), mu.n);
}

GrowthFit growth_check(const SpiralSampler& g, int d, Complex q, long window_lo, long window_hi,
                       const NumericContext& ctx) {
    if (window_lo >= window_hi) throw std::invalid_argument("growth_check: empty window");
    const double Qa = std::pow(std::abs(q), d);
    const double la = std::abs(g.anchor);

    auto theta_abs = [&](double s) {
        return std::abs(theta_eval(Complex(Qa), Complex(std::max(s, 1e-300)), ctx));
    };

    long lo = std::max(window_lo, g.lo), hi = std::min(window_hi, g.hi);
    std::vector<long> inner, outer;
    for (long k = lo; k <= hi; ++k)
        (std::llabs(k) * 2 <= std::max(std::llabs(lo), std::llabs(hi))) ? inner.push_back(k)
                                                                        : outer.push_back(k);
    if (inner.empty()) inner.assign(1, 0);

    // fit M over a geometric grid, L = max ratio on the inner window
    GrowthFit best;
    double bestL = 0.0;
    bool first = true;
    for (int j = -6; j <= 6; ++j) {
        double M = std::pow(Qa, 0.5 * j);
        double L = 0.0;
        for (long k : inner) {
            double s = la * std::pow(Qa, static_cast<double>(k));
            L = std::max(L, std::abs(g.at(k)) / theta_abs(M * s));
        }
        if (first || L < bestL) {
            first = false;
            bestL = L;
            best.M_fit = M;
        }
    }
    best.L_fit = bestL * 1.5;  // slack so inner samples are strictly below

    // validate the fit on the full window
    best.pass = true;
    best.worst_ratio = 0.0;
    for (long k = lo; k <= hi; ++k) {
        double s = la * std::pow(Qa, static_cast<double>(k));
        double ratio = std::abs(g.at(k)) / (best.L_fit * theta_abs(best.M_fit * s) + 1e-300);
        best.worst_ratio = std::max(best.worst_ratio, ratio);
        if (ratio >= 1.0) best.pass = false;
    }
    return best;
}

SpiralSampler make_series_sampler(const TruncatedSeries& series_in_zeta, Complex Q,
                                  Complex lambda, const NumericContext& ctx) {
    if (series_in_zeta.var() != Var::zeta)
        throw std::invalid_argument("make_series_sampler: series must be in zeta");
    ctx.validate();

    // empirical convergence radius by ratio test on the trailing coefficients;
    // trailing zeros mean the input is a polynomial (entire), not a truncation
    double radius = std::numeric_limits<double>::infinity();
    if (series_in_zeta.at(series_in_zeta.trunc_order()) != Complex(0.0)) {
        std::vector<double> ratios;
        for (int k = 1; k <= series_in_zeta.trunc_order(); ++k) {
            double a0 = std::abs(series_in_zeta.at(k - 1)), a1 = std::abs(series_in_zeta.at(k));
            if (a0 > 0 && a1 > 0) ratios.push_back(a0 / a1);
        }
        if (!ratios.empty()) {
            std::size_t tail = ratios.size() > 4 ? ratios.size() - 4 : 0;
            double acc = 0.0;
            for (std::size_t i = tail; i < ratios.size(); ++i) acc += ratios[i];
            radius = acc / static_cast<double>(ratios.size() - tail);
        }
    }
    const double safe = 0.8 * radius;

    SpiralSampler s;
    s.anchor = lambda;
    s.lo = -200;
    s.hi = 200;
    s.at = [series_in_zeta, Q, lambda, safe](long k) {
        Complex zeta = ipow(Q, k) * lambda;
        if (!(std::abs(zeta) < safe))
            throw std::domain_error(
                "series sampler: spiral point outside 0.8x the empirical convergence radius; "
                "supply a continued representation");
        return series_in_zeta.evaluate(zeta);
    };
    return s;
}

}  // namespace qsum
