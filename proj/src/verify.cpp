#include "qsum/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsum/specfile.hpp"
#include "qsum/theta.hpp"

namespace qsum {

std::string ResidualReport::to_json() const {
    std::ostringstream os;
    os << "{\"name\":\"" << name << "\",\"grid\":\"" << grid << "\",\"params\":{";
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) os << ",";
        first = false;
        os << "\"" << k << "\":" << fmt_double(v);
    }
    os << "},\"max_abs\":" << fmt_double(max_abs) << ",\"max_rel\":" << fmt_double(max_rel)
       << ",\"tol\":" << fmt_double(tol) << ",\"pass\":" << (pass ? "true" : "false")
       << ",\"gating\":" << (gating ? "true" : "false") << ",\"dropped_points\":" << dropped_points
       << ",\"sign_convention\":\"" << (sign_convention > 0 ? "+W" : "-W") << "\"}";
    return os.str();
}

std::vector<Complex> default_grid(const MeromorphicSolution& sol, int count, double margin) {
    const SystemSpec& spec = sol.spec();
    const double la = std::abs(sol.direction().lambda);
    const double step = std::pow(std::abs(spec.q), spec.slope.d / 2.0);  // half a q^d radial period
    const double r_lo = 0.12 * la;
    std::vector<Complex> grid;
    for (int i = 0; i < count; ++i) {
        double rad = r_lo * std::pow(step, static_cast<double>(i) / count);
        double base_angle = M_PI * (static_cast<double>(i) + 0.37) / count;
        for (int tries = 0; tries < 64; ++tries) {
            Complex z = std::polar(rad, base_angle + 0.09 * tries);
            double m = std::numeric_limits<double>::infinity();
            for (int e = 0; e < spec.m_minus_1(); ++e) m = std::min(m, sol.pole_margin(e, z));
            // the functional equation also samples q z
            for (int e = 0; e < spec.m_minus_1(); ++e)
                m = std::min(m, sol.pole_margin(e, spec.q * z));
            if (m >= margin) {
                grid.push_back(z);
                break;
            }
        }
    }
    return grid;
}

ResidualReport residual_functional_eq(const MeromorphicSolution& sol, const SystemSpec& spec,
                                      const std::vector<Complex>& grid) {
    ResidualReport rep;
    rep.name = "functional_equation";
    rep.grid = "caller grid, " + std::to_string(grid.size()) + " points";
    rep.params["points"] = static_cast<double>(grid.size());
    rep.tol = 1e-7;

    const int d = spec.slope.d, r = spec.r, n = spec.slope.n;
    for (Complex z : grid) {
        bool usable = true;
        for (int e = 0; e < spec.m_minus_1() && usable; ++e)
            if (sol.pole_margin(e, z) < 0.02 || sol.pole_margin(e, spec.q * z) < 0.02) usable = false;
        if (!usable) {
            ++rep.dropped_points;
            continue;
        }
        for (int j = 0; j < r; ++j)
            for (int b = 0; b < d; ++b) {
                Complex lhs = sol.entry_unguarded(spec.flat(j, b), spec.q * z);
                Complex rhs;
                if (b + 1 < d) {
                    rhs = sol.entry_unguarded(spec.flat(j, b + 1), z);
                    if (j + 1 < r) rhs += sol.entry_unguarded(spec.flat(j + 1, b + 1), z);
                    rhs += spec.W_eval(j, b, z);
                } else {
                    rhs = sol.entry_unguarded(spec.flat(j, 0), z);
                    if (j + 1 < r) rhs += sol.entry_unguarded(spec.flat(j + 1, 0), z);
                    rhs = spec.a * ipow(z, -n) * rhs + spec.W_eval(j, d - 1, z);
                }
                double ab = std::abs(lhs - rhs);
                rep.max_abs = std::max(rep.max_abs, ab);
                rep.max_rel = std::max(rep.max_rel, ab / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
            }
    }
    rep.pass = rep.max_rel < rep.tol;
    return rep;
}

ResidualReport check_lb_identity(const Slope& mu, const Direction& lambda,
                                 const TruncatedSeries& f, Complex q, const NumericContext& ctx) {
    mu.validate();
    int nonzero = 0;
    for (int k = 0; k <= f.trunc_order(); ++k)
        if (f.at(k) != Complex(0.0)) ++nonzero;
    const bool monomial_like = nonzero <= 1;

    ResidualReport rep;
    rep.name = "laplace_borel_identity";
    rep.params["n"] = mu.n;
    rep.params["d"] = mu.d;
    rep.params["terms"] = nonzero;
    rep.tol = 1e-8;
    rep.gating = monomial_like || mu.n == 1;

    // f is a polynomial germ, so its Borel transform is the polynomial itself
    TruncatedSeries bor = qborel_literal(mu, f, q);
    const Complex Qd = ipow(q, mu.d);
    SpiralSampler samp;
    samp.anchor = lambda.lambda;
    samp.at = [bor, Qd, lam = lambda.lambda](long k) { return bor.evaluate(ipow(Qd, k) * lam); };

    std::vector<Complex> zs;
    for (int i = 0; i < 5; ++i) zs.push_back(std::polar(0.08 + 0.07 * i, 0.5 + 1.1 * i));
    rep.grid = "5 points, 0 < |z| < 0.5";
    for (Complex z : zs) {
        Complex got = qlaplace_literal(mu, lambda, samp, q, z, ctx);
        Complex want = f.evaluate(ipow(z, mu.n));
        double ab = std::abs(got - want);
        rep.max_abs = std::max(rep.max_abs, ab);
        rep.max_rel = std::max(rep.max_rel, ab / std::max({1.0, std::abs(got), std::abs(want)}));
    }
    rep.pass = !rep.gating || rep.max_rel < rep.tol;
    return rep;
}

namespace {

// independent q-Euler oracle: truncated double sum with direct theta
// evaluations: the bilateral series solving z sigma y + y = z with simple
// poles on -lambda q^Z
Complex euler_oracle(Complex q, Complex lambda, Complex z, const NumericContext& ctx, int K = 24) {
    Complex acc(0.0);
    for (int k = -K; k <= K; ++k) {
        Complex p = ipow(q, k) * lambda;
        acc += (p / (Complex(1.0) + p)) / theta_eval(q, ipow(q, k + 1) * lambda / z, ctx);
    }
    return acc;
}

}  // namespace

ResidualReport euler_crosscheck(Complex q, const Direction& lambda,
                                const std::vector<Complex>& grid, const NumericContext& ctx) {
    SystemSpec spec;
    spec.q = q;
    spec.slope = Slope{1, 1};
    spec.a = Complex(-1.0);
    spec.r = 1;
    spec.W = {{Complex(1.0)}};

    ResidualReport rep;
    rep.name = "euler_crosscheck";
    rep.grid = std::to_string(grid.size()) + " caller points";
    rep.tol = 1e-8;
    rep.params["K_oracle"] = 24;

    ForbiddenScan fs = sigma_forbidden(lambda, spec);
    if (fs.forbidden)
        throw std::domain_error("euler_crosscheck: lambda in the forbidden class -q^Z");

    auto formal = solve_formal(spec, 24, +1);
    MeromorphicSolution sol = summation_assemble(spec, lambda, formal, ctx);

    for (Complex z : grid) {
        Complex y = sol.entry_unguarded(0, z);
        Complex want = euler_oracle(q, lambda.lambda, z, ctx);
        rep.max_rel = std::max(rep.max_rel, std::abs(y - want) / std::max({1.0, std::abs(y), std::abs(want)}));
        // the equation z sigma y + y = z itself
        Complex res = z * sol.entry_unguarded(0, q * z) + y - z;
        rep.max_abs = std::max(rep.max_abs, std::abs(res));
        rep.max_rel = std::max(rep.max_rel, std::abs(res) / std::max(1.0, std::abs(z)));
    }
    rep.pass = rep.max_rel < rep.tol;
    return rep;
}

double estimate_pole_order(const std::function<Complex(Complex)>& f, Complex pole, double r0,
                           int levels) {
    std::vector<double> xs, ys;
    for (int m = 0; m < levels; ++m) {
        double delta = r0 * std::pow(0.5, m);
        for (int ang = 0; ang < 4; ++ang) {
            Complex z = pole + std::polar(delta, 0.3 + ang * M_PI / 2.0);
            double v = std::abs(f(z));
            if (v <= 0.0 || !std::isfinite(v)) continue;
            xs.push_back(std::log(delta));
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 4) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return -(num / den);
}

PoleScan pole_order_scan(const MeromorphicSolution& sol, int entry_flat,
                         const SpiralDescriptor& spiral, int n, int k_lo, int k_hi) {
    PoleScan out;
    out.report.name = "pole_order_scan";
    out.report.grid = "shrinking circles, 4 directions";
    out.report.params["entry"] = entry_flat;
    out.report.params["k_lo"] = k_lo;
    out.report.params["k_hi"] = k_hi;
    out.report.tol = n + 0.5;  // estimated order must stay <= n

    for (const Complex& base : spiral.bases)
        for (int k = k_lo; k <= k_hi; ++k) {
            Complex p = base * ipow(spiral.ratio, k);
            if (!(std::abs(p) < sol.validity_radius() * 0.8)) continue;
            double ord = estimate_pole_order(
                [&](Complex z) { return sol.entry_unguarded(entry_flat, z); }, p,
                0.06 * std::abs(p));
            out.estimated_orders.push_back(ord);
            out.report.max_abs = std::max(out.report.max_abs, ord);
        }
    out.report.pass = out.report.max_abs < out.report.tol;
    return out;
}

ResidualReport asymptotic_slope(const MeromorphicSolution& sol,
                                const std::vector<TruncatedSeries>& formal, double ray_angle,
                                const std::vector<int>& orders, std::vector<double>* slopes_out) {
    ResidualReport rep;
    rep.name = "asymptotic_slope";
    rep.grid = "8 log-spaced radii per order";
    rep.tol = 0.0;
    rep.pass = true;
    if (slopes_out) slopes_out->clear();

    for (int N : orders) {
        // window where the leading remainder term dominates every nearby
        // coefficient but stays above the bilateral-sum noise floor
        int order_max = formal[0].trunc_order();
        auto A = [&](int k) {
            double m = 0.0;
            for (const auto& f : formal)
                if (k <= f.trunc_order()) m = std::max(m, std::abs(f.at(k)));
            return m;
        };
        // leading remainder power, ignoring solver roundoff residue
        double scale = 0.0;
        for (int k = 0; k <= std::min(order_max, 12); ++k) scale = std::max(scale, A(k));
        int K = N + 1;
        while (K <= order_max && A(K) <= 1e-12 * scale) ++K;
        double t1 = 0.25;
        for (int k = K + 1; k <= std::min(K + 4, order_max); ++k) {
            if (A(k) == 0.0) continue;
            t1 = std::min(t1, std::pow(0.3 * A(K) / A(k), 1.0 / (k - K)));
        }
        double t0 = t1 / 16.0;

        std::vector<double> xs, ys;
        for (int i = 0; i < 8; ++i) {
            double t = t0 * std::pow(t1 / t0, i / 7.0);
            Complex z = std::polar(t, ray_angle);
            double worst = 0.0;
            for (std::size_t e = 0; e < formal.size(); ++e) {
                Complex trunc(0.0);
                for (int k = std::min(N, formal[e].trunc_order()); k >= 0; --k)
                    trunc = trunc * z + formal[e].at(k);
                worst = std::max(worst, std::abs(sol.entry_unguarded(static_cast<int>(e), z) - trunc));
            }
            if (worst <= 0 || !std::isfinite(worst)) continue;
            xs.push_back(std::log(t));
            ys.push_back(std::log(worst));
        }
        double slope = 0.0;
        if (xs.size() >= 4) {
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= xs.size();
            my /= ys.size();
            double num = 0, den = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                num += (xs[i] - mx) * (ys[i] - my);
                den += (xs[i] - mx) * (xs[i] - mx);
            }
            slope = num / den;
        }
        if (slopes_out) slopes_out->push_back(slope);
        rep.params["slope_N" + std::to_string(N)] = slope;
        if (!(slope >= N + 0.5)) rep.pass = false;
    }
    return rep;
}

ResidualReport cross_construction(const SystemSpec& spec, const Direction& lambda,
                                  const std::vector<TruncatedSeries>& formal,
                                  const NumericContext& ctx, double tol) {
    ResidualReport rep;
    rep.name = "cross_construction";
    rep.tol = tol;
    rep.gating = (spec.slope.n == 1);

    MeromorphicSolution sa = summation_assemble(spec, lambda, formal, ctx, BorelMode::WPlane);
    MeromorphicSolution sb = summation_assemble(spec, lambda, formal, ctx, BorelMode::Literal);
    std::vector<Complex> grid = default_grid(sa, 12, 0.1);
    rep.grid = "12-point default grid";

    for (Complex z : grid)
        for (int e = 0; e < spec.m_minus_1(); ++e) {
            Complex va = sa.entry_unguarded(e, z);
            Complex vb = sb.entry_unguarded(e, z);
            double ab = std::abs(va - vb);
            rep.max_abs = std::max(rep.max_abs, ab);
            rep.max_rel = std::max(rep.max_rel, ab / std::max({1.0, std::abs(va), std::abs(vb)}));
        }
    rep.pass = !rep.gating || rep.max_rel < tol;
    return rep;
}

std::string SuiteResult::to_json() const {
    std::ostringstream os;
    os << "{\"all_gating_pass\":" << (all_gating_pass ? "true" : "false") << ",\"reports\":[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) os << ",";
        os << reports[i].to_json();
    }
    os << "]}";
    return os.str();
}

SuiteResult run_suite(const SystemSpec& spec, const Direction& lambda, const NumericContext& ctx) {
    spec.validate();
    SuiteResult out;
    auto push = [&](ResidualReport r) {
        if (r.gating && !r.pass) out.all_gating_pass = false;
        out.reports.push_back(std::move(r));
    };

    const int N = 40;
    auto formal = solve_formal(spec, N, +1);

    // theta evaluator vs its triple-product form on sampled annulus points
    {
        ResidualReport rep;
        rep.name = "theta_triple_product_crosscheck";
        rep.grid = "8 annulus points";
        rep.tol = 1e-10;
        for (int i = 0; i < 8; ++i) {
            Complex z = std::polar(0.6 + 0.15 * i, 0.4 + 0.7 * i);
            Complex s = theta_eval(spec.q, z, ctx);
            Complex p = theta_triple_product(spec.q, z, ctx);
            rep.max_rel = std::max(rep.max_rel,
                                   std::abs(s - p) / std::max({1.0, std::abs(s), std::abs(p)}));
        }
        rep.pass = rep.max_rel < rep.tol;
        push(std::move(rep));
    }

    // formal solver residual at the coefficient level
    {
        ResidualReport rep;
        rep.name = "formal_residual";
        rep.grid = "coefficients through order N-n";
        rep.params["N"] = N;
        rep.tol = 1e-12;
        const int d = spec.slope.d, r = spec.r, n = spec.slope.n;
        for (int j = 0; j < r; ++j)
            for (int b = 0; b < d; ++b)
                for (int t = 0; t + n <= N; ++t) {
                    Complex lhs, rhs;
                    const auto& h = formal[static_cast<std::size_t>(spec.flat(j, b))];
                    auto wc = [&](int jj, int bb, int tt) -> Complex {
                        if (tt < 0 || tt >= n) return Complex(0.0);
                        return spec.W_at(jj, bb)[static_cast<std::size_t>(tt)];
                    };
                    if (b + 1 < d) {
                        lhs = ipow(spec.q, t) * h.at(t);
                        rhs = formal[static_cast<std::size_t>(spec.flat(j, b + 1))].at(t) + wc(j, b, t);
                        if (j + 1 < r) rhs += formal[static_cast<std::size_t>(spec.flat(j + 1, b + 1))].at(t);
                    } else {
                        lhs = ipow(spec.q, t) * h.at(t);
                        rhs = formal[static_cast<std::size_t>(spec.flat(j, 0))].at(t + n);
                        if (j + 1 < r) rhs += formal[static_cast<std::size_t>(spec.flat(j + 1, 0))].at(t + n);
                        rhs = spec.a * rhs + wc(j, d - 1, t);
                        // z^n sigma h = a(...) + z^n W at coefficient t+n
                    }
                    double sc = std::max({1.0, std::abs(lhs), std::abs(rhs)});
                    rep.max_rel = std::max(rep.max_rel, std::abs(lhs - rhs) / sc);
                }
        rep.pass = rep.max_rel < rep.tol;
        push(std::move(rep));
    }

    // Taylor consistency of the pipeline's Borel-plane closed forms
    {
        ResidualReport rep;
        rep.name = "taylor_consistency";
        rep.grid = "coefficients through order min(N/n, 30)";
        rep.tol = 1e-10;
        rep.max_rel = taylor_consistency(spec, formal, BorelMode::WPlane);
        rep.pass = rep.max_rel < rep.tol;
        push(std::move(rep));
        if (spec.slope.n > 1) {
            ResidualReport diag;
            diag.name = "taylor_consistency_literal";
            diag.grid = "coefficients through order min(N/n, 30)";
            diag.gating = false;
            diag.max_rel = taylor_consistency(spec, formal, BorelMode::Literal);
            diag.pass = true;
            push(std::move(diag));
        }
    }

    // L o B composite on monomials of this spec's slope (gating)
    {
        for (int l : {0, 1, 3}) {
            std::vector<Complex> cf(static_cast<std::size_t>(l + 1), Complex(0.0));
            cf[static_cast<std::size_t>(l)] = Complex(0.8, 0.3);
            ResidualReport r =
                check_lb_identity(spec.slope, lambda, TruncatedSeries(Var::w, cf), spec.q, ctx);
            r.name += "_monomial_l" + std::to_string(l);
            push(std::move(r));
        }
        if (spec.slope.n > 1) {
            // two-term diagnostic: records the literal composite's deviation
            std::vector<Complex> cf{Complex(1.0), Complex(0.5)};
            ResidualReport r =
                check_lb_identity(spec.slope, lambda, TruncatedSeries(Var::w, cf), spec.q, ctx);
            r.name += "_two_term_diagnostic";
            push(std::move(r));
        }
    }

    MeromorphicSolution sol = summation_assemble(spec, lambda, formal, ctx);
    std::vector<Complex> grid = default_grid(sol, 20, 0.1);
    push(residual_functional_eq(sol, spec, grid));

    // detector sensitivity: a perturbed solution must trip the residual
    {
        ResidualReport rep;
        rep.name = "detector_perturbation";
        rep.grid = "same grid, entry 0 perturbed by 1e-3";
        rep.tol = 1e-4;
        double worst = 0.0;
        for (Complex z : grid) {
            Complex lhs = sol.entry_unguarded(0, spec.q * z) + Complex(1e-3);
            int j = 0, b = 0;
            Complex rhs;
            if (spec.slope.d > 1) {
                rhs = sol.entry_unguarded(spec.flat(j, b + 1), z);
                if (j + 1 < spec.r) rhs += sol.entry_unguarded(spec.flat(j + 1, b + 1), z);
                rhs += spec.W_eval(j, b, z);
            } else {
                rhs = sol.entry_unguarded(spec.flat(j, 0), z);
                if (j + 1 < spec.r) rhs += sol.entry_unguarded(spec.flat(j + 1, 0), z);
                rhs = spec.a * ipow(z, -spec.slope.n) * rhs + spec.W_eval(j, 0, z);
            }
            worst = std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
        }
        rep.max_rel = worst;
        rep.pass = worst > rep.tol;  // the detector must fire
        push(std::move(rep));
    }

    // pole scans per entry
    for (int e = 0; e < spec.m_minus_1(); ++e) {
        PoleScan ps = pole_order_scan(sol, e, sol.declared_poles()[static_cast<std::size_t>(e)],
                                      spec.slope.n, -2, 0);
        ps.report.name += "_entry" + std::to_string(e);
        push(std::move(ps.report));
    }

    // planted-defect validation of the pole-order detector
    {
        ResidualReport rep;
        rep.name = "detector_planted_pole";
        rep.grid = "synthetic (z-p)^{-(n+1)}";
        const Complex p(0.4, 0.2);
        const int want = spec.slope.n + 1;
        double ord = estimate_pole_order(
            [&](Complex z) { return Complex(1.0) / ipow(z - p, want); }, p, 0.05);
        rep.max_abs = ord;
        rep.tol = 0.3;
        rep.pass = std::abs(ord - want) < rep.tol;
        push(std::move(rep));
    }

    push(asymptotic_slope(sol, formal, 0.4, {0, 2}));
    push(cross_construction(spec, lambda, formal, ctx));

    for (auto& r : out.reports) {
        r.sign_convention = +1;
        r.params["term_tol"] = ctx.term_tol;
        r.params["test_tol"] = ctx.test_tol;
    }
    return out;
}

}  // namespace qsum
