#ifndef QSUM_NUMERICS_HPP
#define QSUM_NUMERICS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace qsum {

using Complex = std::complex<double>;

/// Tolerances shared by every adaptive computation in the library.
///
/// term_tol drives the stopping rule of bilateral series (theta sums,
/// Laplace sums); test_tol is the tolerance of identity checks built on
/// top of them. term_tol < test_tol is required so that truncation error
/// never masquerades as an identity violation.
struct NumericContext {
    double term_tol = 1e-14;
    double test_tol = 1e-10;
    int max_terms = 400;

    void validate() const {
        if (!(term_tol > 0.0))
            throw std::invalid_argument("NumericContext: term_tol must be positive");
        if (!(test_tol > 0.0))
            throw std::invalid_argument("NumericContext: test_tol must be positive");
        if (!(term_tol < test_tol))
            throw std::invalid_argument("NumericContext: term_tol must be < test_tol");
        if (max_terms < 16)
            throw std::invalid_argument("NumericContext: max_terms must be >= 16");
    }
};

/// Thrown when an adaptive bilateral sum fails to converge within
/// NumericContext::max_terms.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, int terms)
        : std::runtime_error(what), terms_used(terms) {}
    int terms_used;
};

/// Thrown when an evaluation point is too close to a (predicted or
/// detected) pole. Carries the offending pole.
class pole_proximity_error : public std::runtime_error {
public:
    pole_proximity_error(const std::string& what, Complex pole, double rel_distance)
        : std::runtime_error(what), nearest_pole(pole), distance(rel_distance) {}
    Complex nearest_pole;
    double distance;
};

/// b^alpha = exp(alpha log b) with the principal branch, arg in (-pi, pi].
/// 0^alpha is 0 when Re(alpha) > 0 and a domain error otherwise; the zero
/// convention is what makes coefficient-wise n-th roots of sparse series
/// meaningful.
Complex cpow(Complex b, Complex alpha);

/// Integer power by repeated squaring (exact for the exponent arithmetic,
/// no branch involved).
Complex ipow(Complex b, long e);

/// A complex number together with the fixed logarithm determination used
/// everywhere in the library.
struct BranchedComplex {
    Complex value;

    /// Principal logarithm, arg in (-pi, pi]. Domain error at 0.
    Complex log() const;
    /// Fixed-branch power through the principal logarithm.
    Complex pow(Complex alpha) const { return cpow(value, alpha); }
};

/// |a-b| / max(1, |a|, |b|).
double rel_err(Complex a, Complex b);

/// Binomial coefficient as a double (small arguments only).
double binomial(int nn, int kk);

}  // namespace qsum

#endif
