#include "qsum/numerics.hpp"

#include <cmath>

namespace qsum {

Complex cpow(Complex b, Complex alpha) {
    if (b == Complex(0.0)) {
        if (alpha.real() > 0.0) return Complex(0.0);
        throw std::domain_error("cpow: 0^alpha requires Re(alpha) > 0");
    }
    if (alpha == Complex(0.0)) return Complex(1.0);
    return std::exp(alpha * std::log(b));
}

Complex ipow(Complex b, long e) {
    if (e < 0) return Complex(1.0) / ipow(b, -e);
    Complex acc(1.0), p = b;
    while (e > 0) {
        if (e & 1) acc *= p;
        p *= p;
        e >>= 1;
    }
    return acc;
}

Complex BranchedComplex::log() const {
    if (value == Complex(0.0)) throw std::domain_error("BranchedComplex::log at 0");
    return std::log(value);
}

double rel_err(Complex a, Complex b) {
    double sc = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) / sc;
}

double binomial(int nn, int kk) {
    if (kk < 0 || kk > nn) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= kk; ++i) v = v * (nn - kk + i) / i;
    return v;
}

}  // namespace qsum
