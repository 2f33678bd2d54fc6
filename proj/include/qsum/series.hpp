#ifndef QSUM_SERIES_HPP
#define QSUM_SERIES_HPP

#include <vector>

#include "qsum/numerics.hpp"

namespace qsum {

/// Variable tag of a truncated series. `w` denotes z^n, `zeta` the Borel
/// plane variable.
enum class Var { z, w, zeta };

/// A truncated formal power series: coefficient k is the coefficient of
/// var^k, known through trunc_order() = size()-1. Arithmetic never reads
/// beyond the stored coefficients and propagates truncation pessimistically.
class TruncatedSeries {
public:
    TruncatedSeries() : var_(Var::z), coeffs_(1, Complex(0.0)) {}
    TruncatedSeries(Var v, std::vector<Complex> coeffs);

    Var var() const { return var_; }
    int trunc_order() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::size_t size() const { return coeffs_.size(); }
    Complex at(int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }

    TruncatedSeries retag(Var v) const { return TruncatedSeries(v, coeffs_); }

    /// Horner evaluation of the truncated polynomial.
    Complex evaluate(Complex x) const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries scaled(Complex c) const;

    /// Multiply by var^k (shift coefficients up, keeping length bounded by
    /// the known information).
    TruncatedSeries shifted(int k) const;

    bool same_shape(const TruncatedSeries& o) const {
        return var_ == o.var_ && coeffs_.size() == o.coeffs_.size();
    }

private:
    Var var_;
    std::vector<Complex> coeffs_;
};

/// Section operator Y_(l): the sub-series of coefficients with index
/// l + nu*n of a series in z, re-indexed as a series in w = z^n.
TruncatedSeries section(const TruncatedSeries& Y, int ell, int n);

/// Inverse of the section decomposition: interleaves n sections (in w)
/// back into a series in z. Output length is the largest prefix for which
/// every requested coefficient is known.
TruncatedSeries recombine(const std::vector<TruncatedSeries>& sections, int n);

/// sigma_q^p acting coefficient-wise: coefficient k picks up q^{p k}.
TruncatedSeries apply_sigma(const TruncatedSeries& Y, Complex q, int p);

}  // namespace qsum

#endif
