// qsum: q-Borel-Laplace summation of two-slope q-difference systems.
//
// Subcommands: theta, borel, laplace, solve-formal, sum, poles, verify, euler.
// Spec files are JSON (see README); complex numbers are [re, im] pairs.
// Grid samples are CSV with columns
//   z_re, z_im, entry, value_re, value_im, nearest_pole_distance.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsum/pipeline.hpp"
#include "qsum/specfile.hpp"
#include "qsum/verify.hpp"

using namespace qsum;

namespace {

Complex parse_pair(const std::string& s, const std::string& what) {
    double re = 0, im = 0;
    char extra = 0;
    int matched = std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &extra);
    if (matched == 1) {
        if (std::sscanf(s.c_str(), "%lf%c", &re, &extra) != 1)
            throw CLI::ValidationError(what, "expected 're' or 're,im'");
        im = 0;
    } else if (matched != 2) {
        throw CLI::ValidationError(what, "expected 're' or 're,im'");
    }
    return Complex(re, im);
}

std::string fmt_complex_csv(Complex v) {
    return fmt_double(v.real()) + "," + fmt_double(v.imag());
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    out << content;
}

int cmd_theta(const std::string& q_s, const std::vector<std::string>& z_s, const NumericContext& ctx,
              const std::string& out_path) {
    Complex Q = parse_pair(q_s, "--q");
    std::ostringstream os;
    os << "z_re,z_im,value_re,value_im\n";
    for (const auto& zs : z_s) {
        Complex z = parse_pair(zs, "--z");
        Complex v = theta_eval(Q, z, ctx);
        os << fmt_complex_csv(z) << "," << fmt_complex_csv(v) << "\n";
    }
    write_out(out_path, os.str());
    return 0;
}

std::vector<Complex> load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto j = nlohmann::json::parse(ss.str());
    std::vector<Complex> c;
    for (const auto& e : j.at("coeffs")) c.emplace_back(e[0].get<double>(), e[1].get<double>());
    if (c.empty()) c.emplace_back(0.0);
    return c;
}

int cmd_borel(const std::string& series_path, int n, int d, const std::string& q_s, bool linear,
              const std::string& out_path) {
    Slope mu{n, d};
    TruncatedSeries f(Var::w, load_series(series_path));
    Complex q = parse_pair(q_s, "--q");
    TruncatedSeries bor = linear ? qborel_linear(mu, f, q) : qborel_literal(mu, f, q);
    nlohmann::json j;
    j["variable"] = "zeta";
    auto arr = nlohmann::json::array();
    for (int k = 0; k <= bor.trunc_order(); ++k)
        arr.push_back({bor.at(k).real(), bor.at(k).imag()});
    j["coeffs"] = arr;
    write_out(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_laplace(const std::string& series_path, int n, int d, const std::string& q_s,
                const std::string& lambda_s, const std::vector<std::string>& z_s,
                const NumericContext& ctx, const std::string& out_path) {
    Slope mu{n, d};
    Complex q = parse_pair(q_s, "--q");
    Direction lam{parse_pair(lambda_s, "--lambda"), d};
    TruncatedSeries g(Var::zeta, load_series(series_path));
    SpiralSampler samp = make_series_sampler(g, ipow(q, d), lam.lambda, ctx);
    std::ostringstream os;
    os << "z_re,z_im,value_re,value_im\n";
    for (const auto& zs : z_s) {
        Complex z = parse_pair(zs, "--z");
        Complex v = qlaplace_literal(mu, lam, samp, q, z, ctx);
        os << fmt_complex_csv(z) << "," << fmt_complex_csv(v) << "\n";
    }
    write_out(out_path, os.str());
    return 0;
}

int cmd_solve_formal(const SpecFile& sf, const std::string& out_path) {
    auto formal = solve_formal(sf.spec, sf.N, +1);
    nlohmann::json j;
    j["N"] = sf.N;
    j["sign_convention"] = "+W";
    auto rows = nlohmann::json::array();
    for (const auto& h : formal) {
        auto arr = nlohmann::json::array();
        for (int k = 0; k <= h.trunc_order(); ++k) arr.push_back({h.at(k).real(), h.at(k).imag()});
        rows.push_back(arr);
    }
    j["entries"] = rows;
    write_out(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_sum(const SpecFile& sf, const std::vector<std::string>& z_s, int grid_count,
            const std::string& out_path) {
    ForbiddenScan fs = sigma_forbidden(sf.lambda, sf.spec);
    if (fs.forbidden) {
        std::cerr << "sum: lambda is in the forbidden set Sigma = {lambda : lambda^n in a q^{dZ}} "
                     "(margin "
                  << fmt_double(fs.margin) << ")\n";
        return 1;
    }
    auto formal = solve_formal(sf.spec, sf.N, +1);
    MeromorphicSolution sol = summation_assemble(sf.spec, sf.lambda, formal, sf.ctx,
                                                 BorelMode::WPlane, sf.laplace_window);

    std::vector<Complex> pts;
    for (const auto& zs : z_s) pts.push_back(parse_pair(zs, "--z"));
    if (pts.empty()) pts = default_grid(sol, grid_count, 0.1);

    std::ostringstream os;
    os << "z_re,z_im,entry,value_re,value_im,nearest_pole_distance\n";
    for (Complex z : pts)
        for (int e = 0; e < sf.spec.m_minus_1(); ++e) {
            Complex v = sol.entry_unguarded(e, z);
            double mdist = sol.pole_margin(e, z);
            os << fmt_complex_csv(z) << "," << e << "," << fmt_complex_csv(v) << ","
               << fmt_double(mdist) << "\n";
        }
    write_out(out_path, os.str());
    return 0;
}

int cmd_poles(const SpecFile& sf, const std::string& out_path) {
    auto formal = solve_formal(sf.spec, sf.N, +1);
    MeromorphicSolution sol = summation_assemble(sf.spec, sf.lambda, formal, sf.ctx);
    nlohmann::json j;
    auto rows = nlohmann::json::array();
    for (int i = 1; i <= sf.spec.m_minus_1(); ++i) {
        SpiralDescriptor sd = predicted_poles(sf.spec, sf.lambda, i);
        nlohmann::json r;
        r["row"] = i;
        r["level"] = sd.level;
        r["ratio"] = {sd.ratio.real(), sd.ratio.imag()};
        r["order_bound"] = sd.order_bound;
        auto bases = nlohmann::json::array();
        for (Complex b : sd.bases) bases.push_back({b.real(), b.imag()});
        r["bases"] = bases;
        PoleScan ps = pole_order_scan(sol, i - 1, sd, sf.spec.slope.n, -1, 0);
        auto orders = nlohmann::json::array();
        for (double o : ps.estimated_orders) orders.push_back(o);
        r["scanned_orders"] = orders;
        rows.push_back(r);
    }
    j["poles"] = rows;
    write_out(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_verify(const SpecFile& sf, const std::string& out_path) {
    SuiteResult res = run_suite(sf.spec, sf.lambda, sf.ctx);
    write_out(out_path, res.to_json() + "\n");
    return res.all_gating_pass ? 0 : 1;
}

int cmd_euler(const std::string& q_s, const std::string& lambda_s, const NumericContext& ctx,
              const std::string& out_path) {
    Complex q = parse_pair(q_s, "--q");
    Direction lam{parse_pair(lambda_s, "--lambda"), 1};

    SystemSpec spec;
    spec.q = q;
    spec.slope = Slope{1, 1};
    spec.a = Complex(-1.0);
    spec.r = 1;
    spec.W = {{Complex(1.0)}};
    ForbiddenScan fs = sigma_forbidden(lam, spec);
    if (fs.forbidden) {
        std::cerr << "euler: lambda is in the forbidden class -q^Z\n";
        return 1;
    }

    auto formal = solve_formal(spec, 24, +1);
    MeromorphicSolution sol = summation_assemble(spec, lam, formal, ctx);
    std::vector<Complex> grid = default_grid(sol, 20, 0.1);
    ResidualReport rep = euler_crosscheck(q, lam, grid, ctx);
    write_out(out_path, rep.to_json() + "\n");
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-Borel-Laplace summation of two-slope q-difference systems"};
    app.require_subcommand(1);
    app.fallthrough();

    NumericContext ctx;
    std::string out_path;
    int N_override = -1, window_override = -1;
    app.add_option("--term-tol", ctx.term_tol, "bilateral-series stopping threshold");
    app.add_option("--test-tol", ctx.test_tol, "identity-check tolerance");
    app.add_option("--max-terms", ctx.max_terms, "hard cap on adaptive sums");
    app.add_option("--N", N_override, "formal truncation order (overrides the spec file)");
    app.add_option("--laplace-window", window_override, "Laplace summation window (overrides the spec file)");
    app.add_option("-o,--out", out_path, "output path (default: stdout)");

    std::string q_s = "2", lambda_s = "1", spec_path, series_path;
    std::vector<std::string> z_s;
    int n = 1, d = 1, grid_count = 20;
    bool linear = false;

    auto* c_theta = app.add_subcommand("theta", "evaluate Theta_Q at points");
    c_theta->add_option("--q", q_s, "base Q as re[,im], |Q| > 1")->required();
    c_theta->add_option("--z", z_s, "evaluation point re[,im] (repeatable)")->required();

    auto* c_borel = app.add_subcommand("borel", "q-Borel transform of a series in w = z^n");
    c_borel->add_option("--series", series_path, "JSON file with {coeffs: [[re,im],...]}")->required();
    c_borel->add_option("--n", n)->required();
    c_borel->add_option("--d", d)->required();
    c_borel->add_option("--q", q_s)->required();
    c_borel->add_flag("--linear", linear, "root-free linear variant");

    auto* c_lap = app.add_subcommand("laplace", "q-Laplace transform of a Borel-plane series");
    c_lap->add_option("--series", series_path, "JSON file with {coeffs: [[re,im],...]} in zeta")->required();
    c_lap->add_option("--n", n)->required();
    c_lap->add_option("--d", d)->required();
    c_lap->add_option("--q", q_s)->required();
    c_lap->add_option("--lambda", lambda_s)->required();
    c_lap->add_option("--z", z_s, "evaluation point (repeatable)")->required();

    auto* c_solve = app.add_subcommand("solve-formal", "emit the formal solution coefficients");
    c_solve->add_option("--spec", spec_path, "system spec JSON")->required();

    auto* c_sum = app.add_subcommand("sum", "full summation pipeline; emit solution samples");
    c_sum->add_option("--spec", spec_path, "system spec JSON")->required();
    c_sum->add_option("--z", z_s, "sample point (repeatable; default: generated grid)");
    c_sum->add_option("--grid", grid_count, "generated grid size");

    auto* c_poles = app.add_subcommand("poles", "predicted and scanned pole data");
    c_poles->add_option("--spec", spec_path, "system spec JSON")->required();

    auto* c_verify = app.add_subcommand("verify", "run the certification suite");
    c_verify->add_option("--spec", spec_path, "system spec JSON")->required();

    auto* c_euler = app.add_subcommand("euler", "q-Euler worked example end-to-end");
    c_euler->add_option("--q", q_s);
    c_euler->add_option("--lambda", lambda_s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ctx.validate();
        auto load = [&](const std::string& path) {
            SpecFile sf = parse_spec(path);
            if (N_override > 0) sf.N = N_override;
            if (window_override > 0) sf.laplace_window = window_override;
            if (*app.get_option("--term-tol")) sf.ctx.term_tol = ctx.term_tol;
            if (*app.get_option("--test-tol")) sf.ctx.test_tol = ctx.test_tol;
            if (*app.get_option("--max-terms")) sf.ctx.max_terms = ctx.max_terms;
            sf.ctx.validate();
            return sf;
        };
        if (c_theta->parsed()) return cmd_theta(q_s, z_s, ctx, out_path);
        if (c_borel->parsed()) return cmd_borel(series_path, n, d, q_s, linear, out_path);
        if (c_lap->parsed()) return cmd_laplace(series_path, n, d, q_s, lambda_s, z_s, ctx, out_path);
        if (c_solve->parsed()) return cmd_solve_formal(load(spec_path), out_path);
        if (c_sum->parsed()) return cmd_sum(load(spec_path), z_s, grid_count, out_path);
        if (c_poles->parsed()) return cmd_poles(load(spec_path), out_path);
        if (c_verify->parsed()) return cmd_verify(load(spec_path), out_path);
        if (c_euler->parsed()) return cmd_euler(q_s, lambda_s, ctx, out_path);
    } catch (const spec_parse_error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
