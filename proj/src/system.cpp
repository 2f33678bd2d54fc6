#include "qsum/system.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace qsum {

Complex SystemSpec::W_eval(int j, int b, Complex z) const {
    const auto& w = W_at(j, b);
    Complex acc(0.0);
    for (auto it = w.rbegin(); it != w.rend(); ++it) acc = acc * z + *it;
    return acc;
}

void SystemSpec::validate() const {
    slope.validate();
    if (!(std::abs(q) > 1.0)) throw std::invalid_argument("SystemSpec: |q| must be > 1");
    if (a == Complex(0.0)) throw std::invalid_argument("SystemSpec: a must be nonzero");
    if (r < 1) throw std::invalid_argument("SystemSpec: r must be positive");
    if (static_cast<int>(W.size()) != m_minus_1())
        throw std::invalid_argument("SystemSpec: W must have m-1 = d*r rows");
    for (const auto& row : W)
        if (static_cast<int>(row.size()) != slope.n)
            throw std::invalid_argument("SystemSpec: every W entry must have exactly n coefficients");
}

IndexParts index_parts(long i, long base) {
    if (base < 1) throw std::invalid_argument("index_parts: base must be positive");
    if (i < 0) throw std::invalid_argument("index_parts: i must be nonnegative");
    return IndexParts{i % base, i / base};
}

// ---------------------------------------------------------------------
// Laurent series
// ---------------------------------------------------------------------

void LaurentSeries::trim() {
    std::size_t b = 0;
    while (b < c_.size() && c_[b] == Complex(0.0)) ++b;
    std::size_t e = c_.size();
    while (e > b && c_[e - 1] == Complex(0.0)) --e;
    if (b == e) {
        c_.clear();
        lo_ = 0;
        return;
    }
    if (b > 0) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(b));
        lo_ += static_cast<int>(b);
    }
    c_.resize(e - b);
}

bool LaurentSeries::is_zero(double tol) const {
    for (const auto& v : c_)
        if (std::abs(v) > tol) return false;
    return true;
}

Complex LaurentSeries::coeff(int k) const {
    if (c_.empty() || k < lo_ || k > hi()) return Complex(0.0);
    return c_[static_cast<std::size_t>(k - lo_)];
}

LaurentSeries LaurentSeries::operator+(const LaurentSeries& o) const {
    if (c_.empty()) return o;
    if (o.c_.empty()) return *this;
    int nlo = std::min(lo_, o.lo_), nhi = std::max(hi(), o.hi());
    std::vector<Complex> out(static_cast<std::size_t>(nhi - nlo + 1), Complex(0.0));
    for (int k = nlo; k <= nhi; ++k) out[static_cast<std::size_t>(k - nlo)] = coeff(k) + o.coeff(k);
    return LaurentSeries(nlo, std::move(out));
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& o) const {
    return *this + o.scaled(Complex(-1.0));
}

LaurentSeries LaurentSeries::operator*(const LaurentSeries& o) const {
    if (c_.empty() || o.c_.empty()) return LaurentSeries();
    std::vector<Complex> out(c_.size() + o.c_.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) out[i + j] += c_[i] * o.c_[j];
    return LaurentSeries(lo_ + o.lo_, std::move(out));
}

LaurentSeries LaurentSeries::scaled(Complex v) const {
    std::vector<Complex> out(c_);
    for (auto& x : out) x *= v;
    return LaurentSeries(lo_, std::move(out));
}

LaurentSeries LaurentSeries::sigma(Complex q) const {
    std::vector<Complex> out(c_);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] *= ipow(q, lo_ + static_cast<long>(i));
    return LaurentSeries(lo_, std::move(out));
}

LaurentSeries LaurentSeries::inverse(int window_len) const {
    // leading (lowest-exponent) coefficient must dominate: 1/(c z^m (1+u))
    // with u strictly higher order; geometric expansion through the window.
    std::size_t lead = 0;
    double ma = max_abs_coeff();
    while (lead < c_.size() && std::abs(c_[lead]) <= 1e-14 * ma) ++lead;
    if (c_.empty() || lead == c_.size())
        throw std::domain_error("LaurentSeries::inverse of (numerically) zero series");
    const int m = lo_ + static_cast<int>(lead);
    const Complex cl = c_[lead];

    std::vector<Complex> u(c_.begin() + static_cast<long>(lead), c_.end());
    for (auto& x : u) x /= cl;  // u[0] == 1
    // v = 1/(1+t) where t = u - 1 (t[0] == 0)
    std::vector<Complex> v(static_cast<std::size_t>(window_len), Complex(0.0));
    v[0] = Complex(1.0);
    for (int k = 1; k < window_len; ++k) {
        Complex acc(0.0);
        for (int i = 1; i <= k; ++i) {
            Complex t = (static_cast<std::size_t>(i) < u.size() ? u[static_cast<std::size_t>(i)]
                                                                : Complex(0.0));
            acc += t * v[static_cast<std::size_t>(k - i)];
        }
        v[static_cast<std::size_t>(k)] = -acc;
    }
    for (auto& x : v) x /= cl;
    return LaurentSeries(-m, std::move(v));
}

LaurentSeries LaurentSeries::truncated_above(int cutoff) const {
    if (c_.empty() || lo_ > cutoff) return LaurentSeries();
    std::vector<Complex> out(c_.begin(),
                             c_.begin() + std::min<long>(static_cast<long>(c_.size()), cutoff - lo_ + 1));
    return LaurentSeries(lo_, std::move(out));
}

Complex LaurentSeries::evaluate(Complex z) const {
    Complex acc(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc * ipow(z, lo_);
}

double LaurentSeries::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

// ---------------------------------------------------------------------
// Laurent matrices
// ---------------------------------------------------------------------

LaurentMatrix::LaurentMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)) {}

LaurentMatrix LaurentMatrix::identity(int nn) {
    LaurentMatrix m(nn, nn);
    for (int i = 0; i < nn; ++i) m.at(i, i) = LaurentSeries::constant(Complex(1.0));
    return m;
}

LaurentSeries& LaurentMatrix::at(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
const LaurentSeries& LaurentMatrix::at(int i, int j) const {
    return e_[static_cast<std::size_t>(i * cols_ + j)];
}

LaurentMatrix LaurentMatrix::operator*(const LaurentMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("LaurentMatrix: dimension mismatch");
    LaurentMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < o.cols_; ++j) {
            LaurentSeries acc;
            for (int k = 0; k < cols_; ++k) acc = acc + at(i, k) * o.at(k, j);
            out.at(i, j) = acc;
        }
    return out;
}

LaurentMatrix LaurentMatrix::operator-(const LaurentMatrix& o) const {
    LaurentMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out.at(i, j) = at(i, j) - o.at(i, j);
    return out;
}

LaurentMatrix LaurentMatrix::sigma(Complex q) const {
    LaurentMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out.at(i, j) = at(i, j).sigma(q);
    return out;
}

LaurentSeries LaurentMatrix::det_recursive(const std::vector<int>& rows,
                                           const std::vector<int>& cols) const {
    if (rows.size() == 1) return at(rows[0], cols[0]);
    LaurentSeries acc;
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::vector<int> sub_cols;
        for (std::size_t t = 0; t < cols.size(); ++t)
            if (t != j) sub_cols.push_back(cols[t]);
        LaurentSeries term = at(rows[0], cols[j]) * det_recursive(sub_rows, sub_cols);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

LaurentMatrix LaurentMatrix::inverse(int window_len) const {
    if (rows_ != cols_) throw std::invalid_argument("LaurentMatrix::inverse: not square");
    if (rows_ > 7) throw std::invalid_argument("LaurentMatrix::inverse: matrix too large");
    std::vector<int> all(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) all[static_cast<std::size_t>(i)] = i;
    LaurentSeries det = det_recursive(all, all);
    if (det.is_zero(1e-13 * std::max(1.0, det.max_abs_coeff())))
        throw std::domain_error("LaurentMatrix::inverse: singular matrix");
    LaurentSeries det_inv = det.inverse(window_len);

    LaurentMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            std::vector<int> rs, cs;
            for (int t = 0; t < rows_; ++t)
                if (t != j) rs.push_back(t);
            for (int t = 0; t < cols_; ++t)
                if (t != i) cs.push_back(t);
            LaurentSeries cof =
                rows_ == 1 ? LaurentSeries::constant(Complex(1.0)) : det_recursive(rs, cs);
            if ((i + j) % 2 == 1) cof = cof.scaled(Complex(-1.0));
            LaurentSeries prod = cof * det_inv;
            out.at(i, j) = prod.is_zero() ? prod : prod.truncated_above(prod.lo() + window_len - 1);
        }
    return out;
}

double LaurentMatrix::max_abs_through(int cutoff) const {
    double m = 0.0;
    for (const auto& s : e_) m = std::max(m, s.truncated_above(cutoff).max_abs_coeff());
    return m;
}

// ---------------------------------------------------------------------

LaurentMatrix build_top_left(const SystemSpec& spec) {
    spec.validate();
    const int d = spec.slope.d, r = spec.r, n = spec.slope.n, m1 = spec.m_minus_1();
    LaurentMatrix M(m1, m1);
    // (E (x) U)[(j,b),(j',b')] = U_{j j'} E_{b b'}, flat i0 = j*d + b
    for (int j = 0; j < r; ++j)
        for (int jp = j; jp <= std::min(j + 1, r - 1); ++jp)
            for (int b = 0; b < d; ++b) {
                if (b + 1 < d)
                    M.at(spec.flat(j, b), spec.flat(jp, b + 1)) = LaurentSeries::constant(Complex(1.0));
                else
                    M.at(spec.flat(j, d - 1), spec.flat(jp, 0)) = LaurentSeries::monomial(spec.a, -n);
            }
    return M;
}

LaurentMatrix build_B(const SystemSpec& spec) {
    const int m1 = spec.m_minus_1();
    LaurentMatrix top = build_top_left(spec);
    LaurentMatrix B(m1 + 1, m1 + 1);
    for (int i = 0; i < m1; ++i)
        for (int j = 0; j < m1; ++j) B.at(i, j) = top.at(i, j);
    for (int i = 0; i < m1; ++i) {
        std::vector<Complex> w = spec.W[static_cast<std::size_t>(i)];
        B.at(i, m1) = LaurentSeries(0, std::move(w));
    }
    B.at(m1, m1) = LaurentSeries::constant(Complex(1.0));
    return B;
}

LaurentMatrix gauge_action(const LaurentMatrix& P, const LaurentMatrix& A, Complex q,
                           int window_len) {
    return P.sigma(q) * A * P.inverse(window_len);
}

int select_sign_convention() {
    // 1x1 witness: sigma h = a z^{-1} h + s*W. The convention is the s for
    // which P = (1, h; 0, 1) reproduces build_B under the gauge action.
    SystemSpec w;
    w.q = Complex(2.0);
    w.slope = Slope{1, 1};
    w.a = Complex(2.0);
    w.r = 1;
    w.W = {{Complex(3.0)}};
    const int N = 12;
    LaurentMatrix B = build_B(w);
    LaurentMatrix M(2, 2);
    M.at(0, 0) = LaurentSeries::monomial(w.a, -1);
    M.at(1, 1) = LaurentSeries::constant(Complex(1.0));
    for (int s : {+1, -1}) {
        auto H = solve_formal(w, N, s);
        LaurentMatrix P = LaurentMatrix::identity(2);
        std::vector<Complex> hc = H[0].coeffs();
        P.at(0, 1) = LaurentSeries(0, std::move(hc));
        LaurentMatrix G = gauge_action(P, M, w.q, N);
        double err = (G - B).max_abs_through(N - 2);
        if (err < 1e-9) return s;
    }
    throw std::runtime_error("select_sign_convention: no convention reproduces B");
}

ForbiddenScan sigma_forbidden(const Direction& lambda, const SystemSpec& spec, int K, double tol) {
    lambda.validate();
    const Complex ln = ipow(lambda.lambda, spec.slope.n);
    double margin = std::numeric_limits<double>::infinity();
    bool forbidden = false;
    for (int k = -K; k <= K; ++k) {
        Complex t = spec.a * ipow(spec.q, static_cast<long>(k) * spec.slope.d);
        double at = std::abs(t);
        if (at == 0.0 || !std::isfinite(at)) continue;
        double rel = std::abs(ln - t) / at;
        margin = std::min(margin, rel);
        if (rel < tol) forbidden = true;
    }
    return ForbiddenScan{forbidden, margin};
}

double sampling_margin(const Direction& lambda, const SystemSpec& spec, int K) {
    // the pipeline samples the Borel plane along -(-lambda)^n Q^Z; collision
    // set is lambda^n in (-1)^{n+1} a q^{dZ}.
    const Complex ln = ipow(lambda.lambda, spec.slope.n);
    const Complex target = (spec.slope.n % 2 == 0) ? -spec.a : spec.a;
    double margin = std::numeric_limits<double>::infinity();
    for (int k = -K; k <= K; ++k) {
        Complex t = target * ipow(spec.q, static_cast<long>(k) * spec.slope.d);
        double at = std::abs(t);
        if (at == 0.0 || !std::isfinite(at)) continue;
        margin = std::min(margin, std::abs(ln - t) / at);
    }
    return margin;
}

std::vector<TruncatedSeries> solve_formal(const SystemSpec& spec, int N, int sign) {
    spec.validate();
    if (N < spec.slope.n) throw std::invalid_argument("solve_formal: need N >= n");
    const int d = spec.slope.d, r = spec.r, n = spec.slope.n, m1 = spec.m_minus_1();
    const Complex q = spec.q, a = spec.a;
    const double s = static_cast<double>(sign);
    const int per = N + 1;
    const int dim = m1 * per;

    auto X = [&](int j, int b, int t) { return (j * d + b) * per + t; };
    auto Wc = [&](int j, int b, int t) -> Complex {
        if (t < 0 || t >= n) return Complex(0.0);
        return spec.W_at(j, b)[static_cast<std::size_t>(t)];
    };

    std::vector<Eigen::Triplet<Complex>> trip;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    int row = 0;
    for (int j = 0; j < r; ++j) {
        // non-corner relations: q^t h[j][b]_t - h[j][b+1]_t - h[j+1][b+1]_t = s W[j][b]_t
        for (int b = 0; b + 1 < d; ++b)
            for (int t = 0; t <= N; ++t, ++row) {
                trip.emplace_back(row, X(j, b, t), ipow(q, t));
                trip.emplace_back(row, X(j, b + 1, t), Complex(-1.0));
                if (j + 1 < r) trip.emplace_back(row, X(j + 1, b + 1, t), Complex(-1.0));
                rhs[row] = s * Wc(j, b, t);
            }
        // corner relations, coefficient of z^t in z^n sigma h[j][d-1] = a(h[j][0]+h[j+1][0]) + s z^n W
        for (int t = 0; t <= N; ++t, ++row) {
            if (t >= n) trip.emplace_back(row, X(j, d - 1, t - n), ipow(q, t - n));
            trip.emplace_back(row, X(j, 0, t), -a);
            if (j + 1 < r) trip.emplace_back(row, X(j + 1, 0, t), -a);
            rhs[row] = s * Wc(j, d - 1, t - n);
        }
    }

    Eigen::SparseMatrix<Complex> A(dim, dim);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_formal: singular coefficient system (normal-form assumptions violated)");
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_formal: linear solve failed");

    std::vector<TruncatedSeries> out;
    out.reserve(static_cast<std::size_t>(m1));
    for (int i0 = 0; i0 < m1; ++i0) {
        std::vector<Complex> c(static_cast<std::size_t>(per));
        for (int t = 0; t <= N; ++t) c[static_cast<std::size_t>(t)] = x[i0 * per + t];
        out.emplace_back(Var::z, std::move(c));
    }
    return out;
}

TransferData d_step_transfer(const SystemSpec& spec) {
    spec.validate();
    const int d = spec.slope.d, r = spec.r, n = spec.slope.n;
    const Complex q = spec.q;
    TransferData td;
    td.level_exponents.resize(static_cast<std::size_t>(d));
    for (int b = 0; b < d; ++b) td.level_exponents[static_cast<std::size_t>(b)] = b;

    td.coupling.assign(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(r), 0.0));
    for (int j = 0; j < r; ++j)
        for (int jp = j; jp < r; ++jp) td.coupling[j][jp] = binomial(d, jp - j);

    // V_j = sum_{b} sum_{j' >= j} C(b, j'-j) sigma^{d-1-b} W[j'][b]
    td.forcing.assign(static_cast<std::size_t>(r), std::vector<Complex>(static_cast<std::size_t>(n), Complex(0.0)));
    for (int j = 0; j < r; ++j)
        for (int b = 0; b < d; ++b)
            for (int jp = j; jp < r; ++jp) {
                double c = binomial(b, jp - j);
                if (c == 0.0) continue;
                const auto& w = spec.W_at(jp, b);
                for (int nu = 0; nu < n; ++nu)
                    td.forcing[j][nu] += c * ipow(q, static_cast<long>(d - 1 - b) * nu) * w[static_cast<std::size_t>(nu)];
            }

    td.chain_constants.assign(static_cast<std::size_t>(r), {});
    td.chain_forcing.assign(static_cast<std::size_t>(r), {});
    for (int j = 0; j < r; ++j) {
        for (int jp = j + 1; jp < r; ++jp)
            td.chain_constants[j].push_back(spec.a * binomial(d, jp - j));
        std::vector<Complex> w(static_cast<std::size_t>(2 * n), Complex(0.0));
        for (int nu = 0; nu < n; ++nu) w[static_cast<std::size_t>(n + nu)] = td.forcing[j][nu];
        td.chain_forcing[j] = std::move(w);
    }
    return td;
}

}  // namespace qsum
