#ifndef QSUM_SYSTEM_HPP
#define QSUM_SYSTEM_HPP

#include <vector>

#include "qsum/series.hpp"
#include "qsum/transforms.hpp"

namespace qsum {

// Two-slope normal form
//
//     B = ( E_{-n,d,a} (x) U_r   W )
//         ( 0                    1 ),
//
// with E the d x d companion block (superdiagonal ones, corner a z^{-n})
// and U_r the unipotent Jordan block. Rows of the size-(m-1) vector part
// are laid out with the Jordan depth j as the outer index and the
// companion level b as the inner one: flat i0 = j*d + b. Companion level
// 0 carries the sigma^d chain with corner multiplier exactly a z^{-n};
// level b+1 is the sigma-propagation of level b.

struct SystemSpec {
    Complex q;
    Slope slope;          // n, d
    Complex a;
    int r = 1;
    // W[i0] has exactly n coefficients (degree < n), i0 = j*d + b.
    std::vector<std::vector<Complex>> W;

    int m_minus_1() const { return slope.d * r; }
    int flat(int j, int b) const { return j * slope.d + b; }

    const std::vector<Complex>& W_at(int j, int b) const { return W[static_cast<std::size_t>(flat(j, b))]; }
    Complex W_eval(int j, int b, Complex z) const;

    void validate() const;
};

/// Euclidean division i = quot * base + rem, 0 <= rem < base.
struct IndexParts {
    long rem;
    long quot;
};
IndexParts index_parts(long i, long base);

// ---------------------------------------------------------------------
// Laurent series / matrices over them (gauge-action arithmetic).
// A LaurentSeries stores coefficients for exponents [lo, lo+len) and is
// always interpreted modulo a truncation window.
// ---------------------------------------------------------------------

class LaurentSeries {
public:
    LaurentSeries() = default;
    LaurentSeries(int lo, std::vector<Complex> coeffs) : lo_(lo), c_(std::move(coeffs)) { trim(); }
    static LaurentSeries constant(Complex v) { return LaurentSeries(0, {v}); }
    static LaurentSeries monomial(Complex v, int k) { return LaurentSeries(k, {v}); }

    bool is_zero(double tol = 0.0) const;
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }  // valid when nonempty
    Complex coeff(int k) const;

    LaurentSeries operator+(const LaurentSeries& o) const;
    LaurentSeries operator-(const LaurentSeries& o) const;
    LaurentSeries operator*(const LaurentSeries& o) const;
    LaurentSeries scaled(Complex v) const;

    /// z -> qz: coefficient of z^k picks up q^k.
    LaurentSeries sigma(Complex q) const;

    /// Multiplicative inverse as a Laurent series, computed through the
    /// truncation window [*, lo_of_result + window_len).
    LaurentSeries inverse(int window_len) const;

    /// Drop exponents above cutoff (inclusive).
    LaurentSeries truncated_above(int cutoff) const;

    Complex evaluate(Complex z) const;
    double max_abs_coeff() const;

private:
    void trim();
    int lo_ = 0;
    std::vector<Complex> c_;  // empty = zero
};

class LaurentMatrix {
public:
    LaurentMatrix() = default;
    LaurentMatrix(int rows, int cols);
    static LaurentMatrix identity(int nn);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    LaurentSeries& at(int i, int j);
    const LaurentSeries& at(int i, int j) const;

    LaurentMatrix operator*(const LaurentMatrix& o) const;
    LaurentMatrix operator-(const LaurentMatrix& o) const;
    LaurentMatrix sigma(Complex q) const;

    /// Inverse by adjugate over Laurent series (small matrices only).
    LaurentMatrix inverse(int window_len) const;

    /// Largest |coefficient| over all entries after truncating every entry
    /// above the cutoff exponent.
    double max_abs_through(int cutoff) const;

private:
    LaurentSeries det_recursive(const std::vector<int>& rows, const std::vector<int>& cols) const;
    int rows_ = 0, cols_ = 0;
    std::vector<LaurentSeries> e_;
};

// ---------------------------------------------------------------------

/// The m x m block matrix B of the normal form.
LaurentMatrix build_B(const SystemSpec& spec);

/// Top-left (m-1) x (m-1) block E_{-n,d,a} (x) U_r alone.
LaurentMatrix build_top_left(const SystemSpec& spec);

/// Gauge action P[A]_{sigma_q} = (sigma_q P) A P^{-1}.
LaurentMatrix gauge_action(const LaurentMatrix& P, const LaurentMatrix& A, Complex q,
                           int window_len = 48);

/// Sign convention of the formal equation sigma_q(H) = (E (x) U_r) H + sign*W.
/// select_sign_convention determines the sign making the gauge-reproduction
/// identity hold on a 1x1 witness (the defining identity gives +1).
int select_sign_convention();

struct ForbiddenScan {
    bool forbidden;
    double margin;  // min over k of |lambda^n - a q^{dk}| / |a q^{dk}|
};

/// Membership test for Sigma = { lambda : lambda^n in a q^{dZ} }, scanning
/// k in [-K, K].
ForbiddenScan sigma_forbidden(const Direction& lambda, const SystemSpec& spec, int K = 64,
                              double tol = 1e-10);

/// Relative margin of the pipeline's Borel-plane sampling spiral to the
/// chain pole set; for odd n this coincides with the Sigma margin.
double sampling_margin(const Direction& lambda, const SystemSpec& spec, int K = 64);

/// Unique formal power-series solution of sigma_q(H) = (E (x) U_r) H + sign*W
/// through order N, flat row order i0 = j*d + b, assembled and solved as one
/// global sparse linear system.
std::vector<TruncatedSeries> solve_formal(const SystemSpec& spec, int N, int sign = +1);

/// Data of the d-step transfer sigma^d h_0 = a z^{-n} U^d h_0 + V:
/// per-level corner multipliers a q^{-n s_b}, the unipotent coupling U^d,
/// the accumulated forcing V (r polynomials of degree < n), and the
/// per-chain-row constants / forcing polynomial of the scalar chain.
struct TransferData {
    std::vector<long> level_exponents;            // s_b = b, multiplier a q^{-n s_b} z^{-n}
    std::vector<std::vector<double>> coupling;    // (U^d)_{j,j'} = C(d, j'-j)
    std::vector<std::vector<Complex>> forcing;    // V_j, degree < n
    std::vector<std::vector<Complex>> chain_constants;  // c_{j,j'} = a C(d, j'-j), j' > j
    std::vector<std::vector<Complex>> chain_forcing;    // w_j = z^n V_j (degree <= 2n-1)
};

TransferData d_step_transfer(const SystemSpec& spec);

}  // namespace qsum

#endif
