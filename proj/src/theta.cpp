#include "qsum/theta.hpp"

#include <cmath>

namespace qsum {

namespace {

// k with |Q|^{1/2} <= |z / Q^k| < |Q|^{3/2}
long annulus_shift(Complex Q, Complex z) {
    double t = std::log(std::abs(z)) / std::log(std::abs(Q)) - 0.5;
    return static_cast<long>(std::floor(t));
}

}  // namespace

ThetaEval theta_eval_full(Complex Q, Complex z, const NumericContext& ctx) {
    if (!(std::abs(Q) > 1.0)) throw std::domain_error("theta_eval: |Q| must be > 1");
    if (z == Complex(0.0)) throw std::domain_error("theta_eval: z must be nonzero");
    ctx.validate();

    const long k = annulus_shift(Q, z);
    const Complex zr = z * ipow(Q, -k);

    // T_l = Q^{-l(l+1)/2} zr^l; ratios T_l/T_{l-1} = zr/Q^l, T_{-l}/T_{-(l-1)} = 1/(zr Q^{l-1}).
    Complex sum(1.0);
    double scale = 1.0;
    int used = 1;

    Complex t(1.0);
    Complex fac = zr / Q;
    int small = 0;
    for (int l = 1;; ++l) {
        t *= fac;
        fac /= Q;
        sum += t;
        scale += std::abs(t);
        ++used;
        small = (std::abs(t) < ctx.term_tol * scale) ? small + 1 : 0;
        if (small >= 3) break;
        if (used > ctx.max_terms)
            throw convergence_error("theta_eval: no convergence within max_terms", used);
    }
    t = Complex(1.0);
    fac = Complex(1.0) / zr;
    small = 0;
    for (int l = 1;; ++l) {
        t *= fac;
        fac /= Q;
        sum += t;
        scale += std::abs(t);
        ++used;
        small = (std::abs(t) < ctx.term_tol * scale) ? small + 1 : 0;
        if (small >= 3) break;
        if (used > ctx.max_terms)
            throw convergence_error("theta_eval: no convergence within max_terms", used);
    }

    const Complex factor = theta_quasiperiod_factor(Q, k, zr);
    return ThetaEval{sum * factor, scale * std::abs(factor), used};
}

Complex theta_eval(Complex Q, Complex z, const NumericContext& ctx) {
    return theta_eval_full(Q, z, ctx).value;
}

Complex theta_quasiperiod_factor(Complex Q, long k, Complex z) {
    return ipow(Q, k * (k - 1) / 2) * ipow(z, k);
}

Complex theta_triple_product(Complex Q, Complex z, const NumericContext& ctx) {
    if (!(std::abs(Q) > 1.0)) throw std::domain_error("theta_triple_product: |Q| must be > 1");
    if (z == Complex(0.0)) throw std::domain_error("theta_triple_product: z must be nonzero");
    ctx.validate();

    const long k = annulus_shift(Q, z);
    const Complex zr = z * ipow(Q, -k);

    Complex prod(1.0);
    Complex qinv = Complex(1.0) / Q;  // Q^{-l-1} at l=0
    int small = 0;
    for (int l = 0; l < ctx.max_terms; ++l) {
        Complex f = (Complex(1.0) - qinv) * (Complex(1.0) + qinv * zr) *
                    (Complex(1.0) + qinv * Q / zr);
        prod *= f;
        small = (std::abs(f - Complex(1.0)) < ctx.term_tol) ? small + 1 : 0;
        qinv /= Q;
        if (small >= 3) return prod * theta_quasiperiod_factor(Q, k, zr);
    }
    throw convergence_error("theta_triple_product: no convergence within max_terms",
                            ctx.max_terms);
}

}  // namespace qsum
