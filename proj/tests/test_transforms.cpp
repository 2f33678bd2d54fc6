#include <doctest.h>

#include <cmath>
#include <random>

#include "qsum/transforms.hpp"

using namespace qsum;

namespace {
const NumericContext ctx{};

SpiralSampler fn_sampler(std::function<Complex(Complex)> f, Complex Q, Complex lambda) {
    SpiralSampler s;
    s.anchor = lambda;
    s.at = [f = std::move(f), Q, lambda](long k) { return f(ipow(Q, k) * lambda); };
    return s;
}
}  // namespace

TEST_CASE("Slope validation") {
    CHECK_NOTHROW((Slope{3, 2}.validate()));
    CHECK_THROWS_AS((Slope{2, 4}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Slope{0, 1}.validate()), std::invalid_argument);
}

TEST_CASE("qborel_literal on zero, monomials, and the q-Euler series") {
    Slope mu{1, 1};
    Complex q(2.0);
    TruncatedSeries zero(Var::w, std::vector<Complex>(5, Complex(0.0)));
    TruncatedSeries bz = qborel_literal(mu, zero, q);
    for (int k = 0; k <= bz.trunc_order(); ++k) CHECK(bz.at(k) == Complex(0.0));

    // monomial a w^l -> cpow(a,1/n) q^{-l(l-1)d/2} zeta^l
    Slope mu32{3, 2};
    std::vector<Complex> mono(5, Complex(0.0));
    mono[4] = Complex(0.7, 0.2);
    TruncatedSeries bm = qborel_literal(mu32, TruncatedSeries(Var::w, mono), q);
    for (int k = 0; k < 4; ++k) CHECK(bm.at(k) == Complex(0.0));
    Complex want = cpow(Complex(0.7, 0.2), Complex(1.0 / 3)) * ipow(q, -4 * 3 * 2 / 2);
    CHECK(std::abs(bm.at(4) - want) < 1e-15 * std::abs(want));

    // q-Euler: B(h) = zeta/(1+zeta), coefficients (-1)^l on zeta^{l+1}
    std::vector<Complex> h{0};
    for (int l = 0; l <= 9; ++l)
        h.push_back(Complex((l % 2 ? -1.0 : 1.0) * std::pow(2.0, l * (l + 1) / 2.0)));
    TruncatedSeries bh = qborel_literal(mu, TruncatedSeries(Var::w, h), q);
    for (int l = 0; l <= 9; ++l) {
        Complex want_l((l % 2 ? -1.0 : 1.0));
        CHECK(std::abs(bh.at(l + 1) - want_l) < 1e-12);
    }
}

TEST_CASE("qborel_linear: n=1 equals literal, additivity exact, monomial oracle") {
    Complex q(2.0);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> U(-2, 2);
    Slope mu11{1, 1};
    std::vector<Complex> c(8);
    for (auto& x : c) x = Complex(U(rng), U(rng));
    TruncatedSeries f(Var::w, c);
    TruncatedSeries a = qborel_literal(mu11, f, q), b = qborel_linear(mu11, f, q);
    for (int k = 0; k <= 7; ++k) CHECK(std::abs(a.at(k) - b.at(k)) < 1e-13 * std::abs(b.at(k)));

    Slope mu21{2, 1};
    std::vector<Complex> c2(8);
    for (auto& x : c2) x = Complex(U(rng), U(rng));
    TruncatedSeries g(Var::w, c2);
    TruncatedSeries sum = qborel_linear(mu21, f + g, q);
    TruncatedSeries parts = qborel_linear(mu21, f, q) + qborel_linear(mu21, g, q);
    for (int k = 0; k <= 7; ++k) CHECK(sum.at(k) == parts.at(k));

    // monomial: linear output equals literal with the coefficient pre-raised to the n-th power
    std::vector<Complex> mono(6, Complex(0.0));
    Complex av(1.3, 0.4);
    mono[3] = av;
    TruncatedSeries lin = qborel_linear(mu21, TruncatedSeries(Var::w, mono), q);
    std::vector<Complex> mono_pow(6, Complex(0.0));
    mono_pow[3] = ipow(av, 2);
    TruncatedSeries lit = qborel_literal(mu21, TruncatedSeries(Var::w, mono_pow), q);
    CHECK(std::abs(lin.at(3) - lit.at(3)) < 1e-13 * std::abs(lin.at(3)));
}

TEST_CASE("inner Laplace sum: L(1) = 1 for d in {1,2,3}") {
    Complex q(2.0);
    for (int d : {1, 2, 3}) {
        Complex Q = ipow(q, d);
        for (Complex lam : {Complex(1.0), Complex(0.8, 0.4), Complex(-0.3, 0.9)}) {
            SpiralSampler one = fn_sampler([](Complex) { return Complex(1.0); }, Q, lam);
            Direction dir{lam, d};
            Complex v = inner_laplace_sum(d, dir, one, q, Complex(0.23, -0.11), ctx);
            CHECK(std::abs(v - Complex(1.0)) < 1e-12);
        }
    }
}

TEST_CASE("inner Laplace sum on monomials: zeta^l -> q^{dl(l-1)/2} z^l") {
    Complex q(2.0);
    for (int d : {1, 2}) {
        Complex Q = ipow(q, d);
        Complex lam(1.0);
        Direction dir{lam, d};
        Complex z(0.27, 0.13);
        // induction oracle: I[zeta^l](z) = z * I[zeta^{l-1}](q^d z), seeded by I[1] = 1
        std::vector<Complex> by_induction{Complex(1.0)};
        for (int l = 1; l <= 6; ++l) {
            std::function<Complex(Complex)> f = [l](Complex zeta) { return ipow(zeta, l - 1); };
            Complex prev = inner_laplace_sum(d, dir, fn_sampler(f, Q, lam), q, Q * z, ctx);
            by_induction.push_back(z * prev);
        }
        for (int l = 0; l <= 6; ++l) {
            std::function<Complex(Complex)> f = [l](Complex zeta) { return ipow(zeta, l); };
            Complex got = inner_laplace_sum(d, dir, fn_sampler(f, Q, lam), q, z, ctx);
            Complex closed = ipow(q, static_cast<long>(d) * l * (l - 1) / 2) * ipow(z, l);
            CHECK(std::abs(got - closed) < 1e-11 * std::abs(closed));
            CHECK(std::abs(got - by_induction[static_cast<std::size_t>(l)]) <
                  1e-11 * std::abs(got));
        }
    }
}

TEST_CASE("Euler composite at z = 0.1 hits the frozen bilateral-series oracle") {
    // L(B(h)) for the q-Euler series, fed by the rational continuation of the
    // Borel sum (the truncated series only converges on |zeta| < 1)
    Complex q(2.0), lam(1.0);
    Slope mu{1, 1};
    Direction dir{lam, 1};
    SpiralSampler samp = fn_sampler([](Complex zeta) { return zeta / (Complex(1.0) + zeta); }, q, lam);
    Complex got = qlaplace_literal(mu, dir, samp, q, Complex(0.1), ctx);
    CHECK(std::abs(got - Complex(0.084971299105904508)) < 1e-13);
}

TEST_CASE("window self-consistency 30 vs 60 on the rational Euler sampler") {
    Complex q(2.0), lam(1.0);
    auto euler = [](Complex zeta) { return zeta / (Complex(1.0) + zeta); };
    SpiralSampler s30 = fn_sampler(euler, q, lam);
    s30.lo = -30;
    s30.hi = 30;
    SpiralSampler s60 = fn_sampler(euler, q, lam);
    s60.lo = -60;
    s60.hi = 60;
    Direction dir{lam, 1};
    for (Complex z : {Complex(0.1), Complex(0.05, 0.2), Complex(-0.17, 0.06)}) {
        Complex a = inner_laplace_sum(1, dir, s30, q, z, ctx);
        Complex b = inner_laplace_sum(1, dir, s60, q, z, ctx);
        CHECK(std::abs(a - b) < ctx.term_tol * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("monomial round-trip L(B(a z^{ln})) = a z^{ln}") {
    Complex q(2.0);
    std::vector<std::pair<int, int>> slopes{{1, 1}, {2, 1}, {1, 2}, {3, 2}};
    for (auto [n, d] : slopes) {
        Slope mu{n, d};
        Direction dir{Complex(1.0), d};
        for (int l = 0; l <= 5; ++l) {
            for (Complex a : {Complex(2.0), Complex(0.7), Complex(1.0, 0.5)}) {
                std::vector<Complex> mono(static_cast<std::size_t>(l + 1), Complex(0.0));
                mono[static_cast<std::size_t>(l)] = a;
                TruncatedSeries bor = qborel_literal(mu, TruncatedSeries(Var::w, mono), q);
                SpiralSampler samp = make_series_sampler(bor, ipow(q, d), dir.lambda, ctx);
                for (Complex z : {Complex(0.31, 0.11), Complex(0.12, -0.22)}) {
                    Complex got = qlaplace_literal(mu, dir, samp, q, z, ctx);
                    Complex want = a * ipow(z, static_cast<long>(l) * n);
                    CHECK(std::abs(got - want) < 1e-9 * std::max(1.0, std::abs(want)));
                }
            }
        }
    }
}

TEST_CASE("Borel shift intertwining: exact coefficientwise for positive-real data") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    Complex q(2.0);
    for (auto [n, d] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 2}}) {
        Slope mu{n, d};
        std::vector<Complex> c(7);
        for (auto& x : c) x = Complex(U(rng));
        TruncatedSeries f(Var::w, c);
        // z^n sigma_q^d f in w-coefficients: shift by one w-slot after scaling by q^{dn k}
        TruncatedSeries shifted = apply_sigma(f, q, d * n).shifted(1);
        TruncatedSeries lhs = qborel_literal(mu, shifted, q);
        TruncatedSeries rhs = qborel_literal(mu, f, q).retag(Var::zeta).shifted(1);
        REQUIRE(lhs.size() >= rhs.size());
        for (int k = 0; k < static_cast<int>(rhs.size()); ++k)
            CHECK(std::abs(lhs.at(k) - rhs.at(k)) <= 1e-12 * std::max(1.0, std::abs(rhs.at(k))));
    }
}

TEST_CASE("inner-sum shift intertwining: I[zeta g](z) = z I[g](q^d z)") {
    Complex q(2.0);
    for (int d : {1, 2}) {
        Complex Q = ipow(q, d);
        Complex lam(0.9, 0.3);
        Direction dir{lam, d};
        std::vector<std::function<Complex(Complex)>> gs{
            [](Complex zeta) { return zeta / (Complex(1.0) + zeta); },
            [](Complex zeta) { return Complex(1.0) / (Complex(2.0) - zeta); },
            [](Complex zeta) { return (zeta * zeta + Complex(0.5)) / (Complex(3.0) + zeta * zeta); }};
        for (auto& g : gs) {
            std::function<Complex(Complex)> zg = [g](Complex zeta) { return zeta * g(zeta); };
            for (Complex z : {Complex(0.2, 0.1), Complex(-0.15, 0.23)}) {
                Complex lhs = inner_laplace_sum(d, dir, fn_sampler(zg, Q, lam), q, z, ctx);
                Complex rhs = z * inner_laplace_sum(d, dir, fn_sampler(g, Q, lam), q, Q * z, ctx);
                CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("growth_check admits bounded/rational samplers and rejects order-2 growth") {
    Complex q(2.0), lam(1.0);
    int d = 1;
    Complex Q = ipow(q, d);

    SpiralSampler cst = fn_sampler([](Complex) { return Complex(0.4, 1.0); }, Q, lam);
    CHECK(growth_check(cst, d, q, -20, 20, ctx).pass);

    SpiralSampler rat = fn_sampler([](Complex zeta) { return zeta / (Complex(1.0) + zeta); }, Q, lam);
    CHECK(growth_check(rat, d, q, -20, 20, ctx).pass);

    // order-2 theta growth violates the order-1 bound
    SpiralSampler sq = fn_sampler(
        [&](Complex zeta) {
            Complex t = theta_eval(Complex(std::abs(Q)), Complex(std::abs(zeta)), ctx);
            return t * t;
        },
        Q, lam);
    CHECK_FALSE(growth_check(sq, d, q, -20, 20, ctx).pass);
}

TEST_CASE("series sampler refuses points beyond 0.8x its convergence radius") {
    // Euler Borel series: radius 1
    std::vector<Complex> c{0};
    for (int l = 0; l <= 20; ++l) c.push_back(Complex(l % 2 ? -1.0 : 1.0));
    SpiralSampler s = make_series_sampler(TruncatedSeries(Var::zeta, c), Complex(2.0), Complex(1.0), ctx);
    CHECK_THROWS_AS(s.at(0), std::domain_error);   // |zeta| = 1 > 0.8
    CHECK_NOTHROW(s.at(-1));                        // |zeta| = 0.5
}

TEST_CASE("pole proximity and convergence guards") {
    Complex q(2.0), lam(1.0);
    SpiralSampler one = fn_sampler([](Complex) { return Complex(1.0); }, q, lam);
    Direction dir{lam, 1};
    // z on the pole spiral -lambda q^Z
    CHECK_THROWS_AS(inner_laplace_sum(1, dir, one, q, Complex(-1.0) * (1.0 + 1e-12), ctx),
                    pole_proximity_error);
    NumericContext tiny;
    tiny.max_terms = 16;
    tiny.term_tol = 1e-30;
    tiny.test_tol = 1e-20;
    CHECK_THROWS_AS(inner_laplace_sum(1, dir, one, Complex(1.02), Complex(0.2), tiny),
                    convergence_error);
}

TEST_CASE("qlaplace output has bounded pole order on the predicted spiral") {
    // multiply by (z + lambda q^{dk})^n near the pole and watch it stay bounded
    Complex q(2.0), lam(1.0);
    Slope mu{1, 1};
    Direction dir{lam, 1};
    auto euler = [](Complex zeta) { return zeta / (Complex(1.0) + zeta); };
    SpiralSampler samp = fn_sampler(euler, q, lam);
    Complex pole(-1.0);  // k = 0 on -lambda q^Z
    double prev = std::numeric_limits<double>::infinity();
    bool shrinking_ok = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        Complex z = pole + Complex(eps, eps);
        Complex v = qlaplace_literal(mu, dir, samp, q, z, ctx);
        double bounded = std::abs(ipow(z - pole, mu.n) * v);
        if (bounded > 2.0 * prev + 1.0) shrinking_ok = false;
        prev = bounded;
    }
    CHECK(shrinking_ok);
}
