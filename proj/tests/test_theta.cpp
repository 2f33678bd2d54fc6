#include <doctest.h>

#include <cmath>
#include <random>

#include "qsum/theta.hpp"

using namespace qsum;

namespace {
const NumericContext ctx{};

// 121-term direct fixed-window oracle for Theta_2(1), frozen before the build
const double kTheta2At1 = 3.2832651213103077;
}  // namespace

TEST_CASE("quasi-periodicity sigma_q Theta = z Theta on random annulus points") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> R(0.5, 2.0), A(0.0, 2 * M_PI);
    for (Complex q : {Complex(2.0), Complex(1.5, 0.5)}) {
        for (int i = 0; i < 50; ++i) {
            Complex z = std::polar(R(rng), A(rng));
            Complex lhs = theta_eval(q, q * z, ctx);
            Complex rhs = z * theta_eval(q, z, ctx);
            CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
            // inversion: z Theta(z) = Theta(1/z)
            Complex inv = theta_eval(q, Complex(1.0) / z, ctx);
            CHECK(std::abs(rhs - inv) < 1e-12 * std::max(std::abs(rhs), std::abs(inv)));
        }
    }
}

TEST_CASE("zeros sit exactly on -Q^Z") {
    for (Complex q : {Complex(2.0), Complex(1.5, 0.5)}) {
        for (int k = -2; k <= 2; ++k) {
            Complex zk = -ipow(q, k);
            ThetaEval on = theta_eval_full(q, zk, ctx);
            CHECK(std::abs(on.value) < 1e-12 * on.term_scale);
            // a small rotation off the spiral must be clearly nonzero
            ThetaEval off = theta_eval_full(q, zk * std::polar(1.0, M_PI / 8), ctx);
            CHECK(std::abs(off.value) > 10.0 * 1e-12 * off.term_scale);
        }
    }
}

TEST_CASE("frozen window oracle at z = 1") {
    // recompute the |l| <= 60 window directly
    double acc = 0.0;
    for (int l = -60; l <= 60; ++l) acc += std::pow(2.0, -0.5 * l * (l + 1));
    CHECK(std::abs(acc - kTheta2At1) < 1e-15 * kTheta2At1);
    CHECK(std::abs(theta_eval(Complex(2.0), Complex(1.0), ctx) - kTheta2At1) <
          1e-13 * kTheta2At1);
}

TEST_CASE("theta at -1 vanishes relative to Theta(1)") {
    double scale = std::abs(theta_eval(Complex(2.0), Complex(1.0), ctx));
    CHECK(std::abs(theta_eval(Complex(2.0), Complex(-1.0), ctx)) < 1e-10 * scale);
}

TEST_CASE("quasi-period factor") {
    Complex q(2.0);
    CHECK(theta_quasiperiod_factor(q, 0, Complex(0.3, 1.0)) == Complex(1.0));
    Complex z(0.7, -0.2);
    CHECK(theta_quasiperiod_factor(q, 1, z) == z);

    // k = 3 at z = 1+i: Q^3 (1+i)^3, checked against the theta ratio
    Complex z2(1.0, 1.0);
    Complex fac = theta_quasiperiod_factor(q, 3, z2);
    CHECK(std::abs(fac - ipow(q, 3) * ipow(z2, 3)) < 1e-12 * std::abs(fac));
    Complex ratio = theta_eval(q, ipow(q, 3) * z2, ctx) / theta_eval(q, z2, ctx);
    CHECK(std::abs(fac - ratio) < 1e-11 * std::abs(fac));
}

TEST_CASE("quasi-periodicity across k in [-5,5]") {
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> R(0.5, 2.0), A(0.0, 2 * M_PI);
    Complex q(2.0);
    for (int i = 0; i < 20; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        Complex tz = theta_eval(q, z, ctx);
        for (int k = -5; k <= 5; ++k) {
            Complex lhs = theta_eval(q, ipow(q, k) * z, ctx);
            Complex rhs = theta_quasiperiod_factor(q, k, z) * tz;
            CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(std::abs(lhs), std::abs(rhs)));
        }
    }
}

TEST_CASE("triple product cross-validation") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> R(0.5, 2.0), A(0.0, 2 * M_PI);
    for (Complex q : {Complex(2.0), Complex(1.5, 0.5)}) {
        for (int i = 0; i < 12; ++i) {
            Complex z = std::polar(R(rng), A(rng));
            Complex s = theta_eval(q, z, ctx);
            Complex p = theta_triple_product(q, z, ctx);
            CHECK(std::abs(s - p) < 1e-11 * std::max(std::abs(s), std::abs(p)));
        }
    }
}

TEST_CASE("domain and convergence errors") {
    CHECK_THROWS_AS(theta_eval(Complex(2.0), Complex(0.0), ctx), std::domain_error);
    CHECK_THROWS_AS(theta_eval(Complex(0.5), Complex(1.0), ctx), std::domain_error);
    NumericContext tiny;
    tiny.max_terms = 16;
    tiny.term_tol = 1e-30;
    tiny.test_tol = 1e-20;
    CHECK_THROWS_AS(theta_eval(Complex(1.01), Complex(1.0), tiny), convergence_error);
}
