#include "qsum/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace qsum {

Complex RationalBorelFn::operator()(Complex zeta) const {
    Complex nv(0.0);
    for (auto it = num.rbegin(); it != num.rend(); ++it) nv = nv * zeta + *it;
    return nv / ipow(alpha * zeta - beta, order);
}

std::vector<Complex> RationalBorelFn::taylor(int M) const {
    // 1/(alpha z - beta)^p = (-beta)^{-p} sum_k C(p+k-1, k) (alpha/beta)^k z^k
    std::vector<Complex> base(static_cast<std::size_t>(M));
    const Complex ratio = alpha / beta;
    const Complex lead = Complex(1.0) / ipow(-beta, order);
    Complex pw(1.0);
    for (int k = 0; k < M; ++k) {
        base[static_cast<std::size_t>(k)] = lead * binomial(order + k - 1, k) * pw;
        pw *= ratio;
    }
    std::vector<Complex> out(static_cast<std::size_t>(M), Complex(0.0));
    for (std::size_t i = 0; i < num.size() && i < static_cast<std::size_t>(M); ++i)
        for (std::size_t k = 0; i + k < static_cast<std::size_t>(M); ++k)
            out[i + k] += num[i] * base[k];
    return out;
}

namespace {

std::vector<Complex> poly_mul(const std::vector<Complex>& p1, const std::vector<Complex>& p2) {
    std::vector<Complex> out(p1.size() + p2.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < p1.size(); ++i)
        for (std::size_t j = 0; j < p2.size(); ++j) out[i + j] += p1[i] * p2[j];
    return out;
}

std::vector<Complex> poly_pow(const std::vector<Complex>& p, int k) {
    std::vector<Complex> out{Complex(1.0)};
    for (int i = 0; i < k; ++i) out = poly_mul(out, p);
    return out;
}

void poly_acc(std::vector<Complex>& dst, const std::vector<Complex>& src) {
    if (dst.size() < src.size()) dst.resize(src.size(), Complex(0.0));
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

}  // namespace

std::vector<RationalBorelFn> borel_plane_rational(const SystemSpec& spec,
                                                  const TransferData& transfer, int ell,
                                                  BorelMode mode) {
    const int n = spec.slope.n, d = spec.slope.d, r = spec.r;
    if (ell < 0 || ell >= n) throw std::invalid_argument("borel_plane_rational: need 0 <= ell < n");
    if (spec.a == Complex(0.0)) throw std::domain_error("borel_plane_rational: degenerate spec, a = 0");

    Complex alpha, beta;
    if (mode == BorelMode::WPlane) {
        alpha = ipow(spec.q, static_cast<long>(d) * ell);
        beta = spec.a;
    } else {
        alpha = cpow(spec.q, Complex(static_cast<double>(d) * ell / n));
        beta = cpow(spec.a, Complex(1.0 / n));
    }
    const std::vector<Complex> lin{-beta, alpha};  // alpha*zeta - beta

    // back-substitution from the deepest Jordan row:
    //   N_j = v_j * zeta * lin^{r-1-j} + sum_{j'>j} c_{j,j'} N_{j'} lin^{j'-j-1}
    std::vector<std::vector<Complex>> nums(static_cast<std::size_t>(r));
    for (int j = r - 1; j >= 0; --j) {
        Complex vj = transfer.forcing[static_cast<std::size_t>(j)][static_cast<std::size_t>(ell)];
        Complex cj = (mode == BorelMode::WPlane) ? vj : cpow(vj, Complex(1.0 / n));
        std::vector<Complex> acc =
            poly_mul({Complex(0.0), cj}, poly_pow(lin, r - 1 - j));
        for (int jp = j + 1; jp < r; ++jp) {
            Complex c = spec.a * binomial(d, jp - j);
            Complex cc = (mode == BorelMode::WPlane) ? c : cpow(c, Complex(1.0 / n));
            std::vector<Complex> contrib =
                poly_mul(nums[static_cast<std::size_t>(jp)], poly_pow(lin, jp - j - 1));
            for (auto& x : contrib) x *= cc;
            poly_acc(acc, contrib);
        }
        nums[static_cast<std::size_t>(j)] = std::move(acc);
    }

    std::vector<RationalBorelFn> out;
    out.reserve(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j)
        out.push_back(RationalBorelFn{nums[static_cast<std::size_t>(j)], alpha, beta, r - j});
    return out;
}

SpiralDescriptor predicted_poles(const SystemSpec& spec, const Direction& lambda, int i) {
    spec.validate();
    lambda.validate();
    const int m1 = spec.m_minus_1();
    if (i < 1 || i > m1) throw std::invalid_argument("predicted_poles: need 1 <= i < m");
    const int n = spec.slope.n, d = spec.slope.d;
    const int level = static_cast<int>((i - 1) % d);

    SpiralDescriptor sd;
    sd.ratio = ipow(spec.q, d);
    sd.order_bound = n;
    sd.level = level;
    const Complex base0 = -lambda.lambda * ipow(spec.q, -level);
    for (int t = 0; t < n; ++t) {
        Complex om = std::exp(Complex(0.0, 2.0 * M_PI * t / n));
        sd.bases.push_back(om * base0);
    }
    return sd;
}

MeromorphicSolution::MeromorphicSolution(SystemSpec spec, Direction lambda, NumericContext ctx,
                                         BorelMode mode, long laplace_window)
    : spec_(std::move(spec)), lambda_(lambda), ctx_(ctx), mode_(mode),
      transfer_(d_step_transfer(spec_)), window_(laplace_window) {
    const int n = spec_.slope.n, d = spec_.slope.d;
    rats_.resize(static_cast<std::size_t>(n));
    for (int ell = 0; ell < n; ++ell)
        rats_[static_cast<std::size_t>(ell)] = borel_plane_rational(spec_, transfer_, ell, mode_);
    if (mode_ == BorelMode::WPlane) {
        Q_ = ipow(spec_.q, static_cast<long>(d) * n);
        lam_sum_ = -ipow(-lambda_.lambda, n);
    } else {
        Q_ = ipow(spec_.q, d);
        lam_sum_ = lambda_.lambda;
    }
    for (int i = 1; i <= spec_.m_minus_1(); ++i) poles_.push_back(predicted_poles(spec_, lambda_, i));
    lambda_.margin = std::min(sigma_forbidden(lambda_, spec_).margin, sampling_margin(lambda_, spec_));
    validity_radius_ = std::abs(lambda_.lambda) * std::pow(std::abs(spec_.q), d);
}

Complex MeromorphicSolution::chain_value(int j, int ell, Complex z) const {
    const auto& rat = rats_[static_cast<std::size_t>(ell)][static_cast<std::size_t>(j)];
    SpiralSampler s;
    s.anchor = lam_sum_;
    s.lo = -window_;
    s.hi = window_;
    s.at = [&rat, this](long k) { return rat(ipow(Q_, k) * lam_sum_); };
    if (mode_ == BorelMode::WPlane)
        return bilateral_theta_sum(Q_, lam_sum_, s, ipow(z, spec_.slope.n), ctx_);
    return ipow(bilateral_theta_sum(Q_, lam_sum_, s, z, ctx_), spec_.slope.n);
}

Complex MeromorphicSolution::grid_value(int j, int b, Complex z) const {
    if (b == 0) {
        Complex acc(0.0);
        for (int ell = 0; ell < spec_.slope.n; ++ell)
            acc += ipow(z, ell) * chain_value(j, ell, z);
        return acc;
    }
    Complex v = grid_value(j, b - 1, spec_.q * z);
    if (j + 1 < spec_.r) v -= grid_value(j + 1, b, z);
    v -= spec_.W_eval(j, b - 1, z);
    return v;
}

Complex MeromorphicSolution::entry_unguarded(int i0, Complex z) const {
    const int d = spec_.slope.d;
    return grid_value(i0 / d, i0 % d, z);
}

double MeromorphicSolution::pole_margin(int i0, Complex z) const {
    const auto& sd = poles_[static_cast<std::size_t>(i0)];
    const double lr = std::log(std::abs(sd.ratio));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& base : sd.bases) {
        double t = std::log(std::abs(z) / std::abs(base)) / lr;
        long k0 = static_cast<long>(std::llround(t));
        for (long k = k0 - 1; k <= k0 + 1; ++k) {
            Complex p = base * ipow(sd.ratio, k);
            best = std::min(best, std::abs(z - p) / std::abs(p));
        }
    }
    return best;
}

Complex MeromorphicSolution::nearest_pole(int i0, Complex z) const {
    const auto& sd = poles_[static_cast<std::size_t>(i0)];
    const double lr = std::log(std::abs(sd.ratio));
    double best = std::numeric_limits<double>::infinity();
    Complex arg(0.0);
    for (const auto& base : sd.bases) {
        double t = std::log(std::abs(z) / std::abs(base)) / lr;
        long k0 = static_cast<long>(std::llround(t));
        for (long k = k0 - 1; k <= k0 + 1; ++k) {
            Complex p = base * ipow(sd.ratio, k);
            double rel = std::abs(z - p) / std::abs(p);
            if (rel < best) {
                best = rel;
                arg = p;
            }
        }
    }
    return arg;
}

Complex MeromorphicSolution::entry(int i0, Complex z) const {
    if (i0 < 0 || i0 >= spec_.m_minus_1())
        throw std::invalid_argument("MeromorphicSolution::entry: index out of range");
    if (z == Complex(0.0)) throw std::domain_error("MeromorphicSolution::entry: z = 0");
    if (!(std::abs(z) < validity_radius_))
        throw std::domain_error("MeromorphicSolution::entry: z outside the validity annulus");
    const double guard = 1e-6;
    double m = pole_margin(i0, z);
    if (m < guard)
        throw pole_proximity_error("MeromorphicSolution::entry " + std::to_string(i0) +
                                       ": z too close to a declared pole",
                                   nearest_pole(i0, z), m);
    return entry_unguarded(i0, z);
}

MeromorphicSolution summation_assemble(const SystemSpec& spec, const Direction& lambda,
                                       const std::vector<TruncatedSeries>& formal,
                                       const NumericContext& ctx, BorelMode mode,
                                       long laplace_window) {
    spec.validate();
    lambda.validate();
    ctx.validate();

    ForbiddenScan fs = sigma_forbidden(lambda, spec);
    if (fs.forbidden)
        throw std::domain_error(
            "summation_assemble: lambda lies in the forbidden set Sigma = {lambda : lambda^n in a q^{dZ}}");
    if (fs.margin <= 10.0 * ctx.test_tol)
        throw std::domain_error("summation_assemble: lambda margin to Sigma too small");
    if (sampling_margin(lambda, spec) <= 10.0 * ctx.test_tol)
        throw std::domain_error("summation_assemble: lambda margin to the Borel sampling spiral too small");

    MeromorphicSolution sol(spec, lambda, ctx, mode, laplace_window);

    // growth admission of every chain sampler along the summation spiral
    {
        TransferData td = d_step_transfer(spec);
        for (int ell = 0; ell < spec.slope.n; ++ell) {
            auto rats = borel_plane_rational(spec, td, ell, mode);
            for (int j = 0; j < spec.r; ++j) {
                const RationalBorelFn rat = rats[static_cast<std::size_t>(j)];
                Complex Q = (mode == BorelMode::WPlane)
                                ? ipow(spec.q, static_cast<long>(spec.slope.d) * spec.slope.n)
                                : ipow(spec.q, spec.slope.d);
                Complex anchor = (mode == BorelMode::WPlane) ? -ipow(-lambda.lambda, spec.slope.n)
                                                             : lambda.lambda;
                SpiralSampler s;
                s.anchor = anchor;
                s.at = [rat, Q, anchor](long k) { return rat(ipow(Q, k) * anchor); };
                GrowthFit gf = growth_check(s, spec.slope.d, spec.q, -24, 24, ctx);
                if (!gf.pass)
                    throw std::runtime_error("summation_assemble: growth admission failed for a chain sampler");
            }
        }
    }

    // Taylor consistency against the formal solution (diagnostic here; the
    // verify suite gates on it)
    if (!formal.empty()) (void)taylor_consistency(spec, formal, mode);

    return sol;
}

std::vector<Complex> evaluate_solution(const MeromorphicSolution& sol, Complex z) {
    std::vector<Complex> out;
    const int m1 = sol.spec().m_minus_1();
    out.reserve(static_cast<std::size_t>(m1));
    for (int i = 0; i < m1; ++i) out.push_back(sol.entry(i, z));
    return out;
}

double taylor_consistency(const SystemSpec& spec, const std::vector<TruncatedSeries>& formal,
                          BorelMode mode, int max_order) {
    const int n = spec.slope.n, d = spec.slope.d, r = spec.r;
    if (static_cast<int>(formal.size()) != spec.m_minus_1())
        throw std::invalid_argument("taylor_consistency: formal solution size mismatch");
    TransferData td = d_step_transfer(spec);
    const Complex Q = ipow(spec.q, static_cast<long>(d) * n);
    double worst = 0.0;
    for (int ell = 0; ell < n; ++ell) {
        auto rats = borel_plane_rational(spec, td, ell, mode);
        for (int j = 0; j < r; ++j) {
            TruncatedSeries sec = section(formal[static_cast<std::size_t>(spec.flat(j, 0))], ell, n);
            int M = std::min<int>(static_cast<int>(sec.size()), max_order);
            std::vector<Complex> target(static_cast<std::size_t>(M));
            for (int k = 0; k < M; ++k) {
                Complex uk = sec.at(k);
                if (mode == BorelMode::WPlane)
                    target[static_cast<std::size_t>(k)] = uk * ipow(Q, -static_cast<long>(k) * (k - 1) / 2);
                else
                    target[static_cast<std::size_t>(k)] =
                        cpow(uk, Complex(1.0 / n)) * ipow(spec.q, -static_cast<long>(k) * (k - 1) * d / 2);
            }
            std::vector<Complex> got = rats[static_cast<std::size_t>(j)].taylor(M);
            for (int k = 0; k < M; ++k) {
                Complex t = target[static_cast<std::size_t>(k)];
                if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) continue;
                double sc = std::max(1.0, std::abs(t));
                worst = std::max(worst, std::abs(got[static_cast<std::size_t>(k)] - t) / sc);
            }
        }
    }
    return worst;
}

}  // namespace qsum
