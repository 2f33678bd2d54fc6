#include "qsum/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsum {

TruncatedSeries::TruncatedSeries(Var v, std::vector<Complex> coeffs)
    : var_(v), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty())
        throw std::invalid_argument("TruncatedSeries: need at least one coefficient");
    for (const auto& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("TruncatedSeries: coefficients must be finite");
}

Complex TruncatedSeries::evaluate(Complex x) const {
    Complex acc(0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    std::size_t len = std::min(coeffs_.size(), o.coeffs_.size());
    std::vector<Complex> out(len);
    for (std::size_t k = 0; k < len; ++k) out[k] = coeffs_[k] + o.coeffs_[k];
    return TruncatedSeries(var_, std::move(out));
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const {
    std::size_t len = std::min(coeffs_.size(), o.coeffs_.size());
    std::vector<Complex> out(len);
    for (std::size_t k = 0; k < len; ++k) out[k] = coeffs_[k] - o.coeffs_[k];
    return TruncatedSeries(var_, std::move(out));
}

TruncatedSeries TruncatedSeries::scaled(Complex c) const {
    std::vector<Complex> out(coeffs_);
    for (auto& v : out) v *= c;
    return TruncatedSeries(var_, std::move(out));
}

TruncatedSeries TruncatedSeries::shifted(int k) const {
    std::vector<Complex> out(coeffs_.size() + static_cast<std::size_t>(k), Complex(0.0));
    std::copy(coeffs_.begin(), coeffs_.end(), out.begin() + k);
    return TruncatedSeries(var_, std::move(out));
}

TruncatedSeries section(const TruncatedSeries& Y, int ell, int n) {
    if (n < 1) throw std::invalid_argument("section: n must be positive");
    if (ell < 0 || ell >= n) throw std::invalid_argument("section: need 0 <= ell < n");
    if (Y.var() != Var::z) throw std::invalid_argument("section: input must be a series in z");
    std::vector<Complex> out;
    for (int k = ell; k <= Y.trunc_order(); k += n) out.push_back(Y.at(k));
    if (out.empty()) out.push_back(Complex(0.0));
    return TruncatedSeries(Var::w, std::move(out));
}

TruncatedSeries recombine(const std::vector<TruncatedSeries>& sections, int n) {
    if (n < 1) throw std::invalid_argument("recombine: n must be positive");
    if (static_cast<int>(sections.size()) != n)
        throw std::invalid_argument("recombine: expected exactly n sections");
    // largest prefix of z-coefficients for which every source is known
    int len = std::numeric_limits<int>::max();
    for (int ell = 0; ell < n; ++ell)
        len = std::min(len, ell + n * static_cast<int>(sections[static_cast<std::size_t>(ell)].size()));
    std::vector<Complex> out(static_cast<std::size_t>(len), Complex(0.0));
    for (int k = 0; k < len; ++k)
        out[static_cast<std::size_t>(k)] = sections[static_cast<std::size_t>(k % n)].at(k / n);
    return TruncatedSeries(Var::z, std::move(out));
}

TruncatedSeries apply_sigma(const TruncatedSeries& Y, Complex q, int p) {
    if (q == Complex(0.0)) throw std::invalid_argument("apply_sigma: q must be nonzero");
    std::vector<Complex> out(Y.coeffs());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] *= ipow(q, static_cast<long>(p) * static_cast<long>(k));
    return TruncatedSeries(Y.var(), std::move(out));
}

}  // namespace qsum
