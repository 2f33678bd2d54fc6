#ifndef QSUM_THETA_HPP
#define QSUM_THETA_HPP

#include "qsum/numerics.hpp"

namespace qsum {

// Jacobi-type theta function
//
//   Theta_Q(z) = sum_{l in Z} Q^{-l(l+1)/2} z^l,   |Q| > 1, z != 0,
//
// analytic on C*, simple zeros exactly on -Q^Z, and
//
//   Theta_Q(Q^k z) = Q^{k(k-1)/2} z^k Theta_Q(z).
//
// Direct evaluation is trusted only after reducing the argument into the
// fundamental annulus |Q|^{1/2} <= |z| < |Q|^{3/2}; far arguments factor
// through the quasi-periodicity identity.

struct ThetaParams {
    Complex Q;
    double eval_radius_guard = 1e-9;

    void validate() const {
        if (!(std::abs(Q) > 1.0))
            throw std::domain_error("ThetaParams: |Q| must be > 1");
    }
};

struct ThetaEval {
    Complex value;
    double term_scale;  // sum of |term| over the annulus-reduced series
    int terms_used;
};

/// Bilateral series value, adaptively truncated (three consecutive terms
/// below term_tol * |partial sum| on each side).
Complex theta_eval(Complex Q, Complex z, const NumericContext& ctx);

/// Same, also reporting the local magnitude scale (used by zero tests).
ThetaEval theta_eval_full(Complex Q, Complex z, const NumericContext& ctx);

/// Exact ratio Theta_Q(Q^k z) / Theta_Q(z) = Q^{k(k-1)/2} z^k.
Complex theta_quasiperiod_factor(Complex Q, long k, Complex z);

/// Triple product form prod_{l>=0} (1-Q^{-l-1})(1+Q^{-l-1}z)(1+Q^{-l}/z),
/// used to cross-validate the series evaluator.
Complex theta_triple_product(Complex Q, Complex z, const NumericContext& ctx);

}  // namespace qsum

#endif
