#ifndef QSUM_VERIFY_HPP
#define QSUM_VERIFY_HPP

#include <map>
#include <string>
#include <vector>

#include "qsum/pipeline.hpp"

namespace qsum {

/// One certification check: what was tested, on which grid, with which
/// truncation parameters, and the residuals against the tolerance.
/// gating == false marks diagnostic checks that record magnitudes without
/// failing the run.
struct ResidualReport {
    std::string name;
    std::string grid;
    std::map<std::string, double> params;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double tol = 0.0;
    bool pass = true;
    bool gating = true;
    int dropped_points = 0;
    int sign_convention = +1;

    std::string to_json() const;
};

/// Deterministic evaluation grid: points log-spaced in radius over half a
/// q^d-period in angle, filtered to pole margin >= margin.
std::vector<Complex> default_grid(const MeromorphicSolution& sol, int count = 20,
                                  double margin = 0.1);

/// Residual of sigma_q(H^[lambda]) = (E (x) U_r) H^[lambda] + sign W over
/// the grid (entrywise, relative to local scale).
ResidualReport residual_functional_eq(const MeromorphicSolution& sol, const SystemSpec& spec,
                                      const std::vector<Complex>& grid);

/// Composite L o B on an analytic germ f (series in w): gating on
/// monomials, diagnostic on multi-term inputs for n > 1.
ResidualReport check_lb_identity(const Slope& mu, const Direction& lambda,
                                 const TruncatedSeries& f, Complex q, const NumericContext& ctx);

/// End-to-end q-Euler certification: pipeline vs the direct bilateral
/// series oracle, plus the equation residual of z sigma_q y + y = z.
ResidualReport euler_crosscheck(Complex q, const Direction& lambda,
                                const std::vector<Complex>& grid, const NumericContext& ctx);

/// Pole order estimates from log|entry| vs log|z - pole| slopes on
/// shrinking circles; asserts every estimate <= n.
struct PoleScan {
    ResidualReport report;
    std::vector<double> estimated_orders;
};
PoleScan pole_order_scan(const MeromorphicSolution& sol, int entry_flat,
                         const SpiralDescriptor& spiral, int n, int k_lo, int k_hi);

/// Scan an arbitrary function around a known pole (detector validation).
double estimate_pole_order(const std::function<Complex(Complex)>& f, Complex pole,
                           double r0, int levels = 5);

/// q-Gevrey asymptotic agreement: log-log slope of |sol - H_{<=N}| along a
/// ray as z -> 0, for each truncation order in `orders`; asserts slope >=
/// N + 0.5.
ResidualReport asymptotic_slope(const MeromorphicSolution& sol, const std::vector<TruncatedSeries>& formal,
                                double ray_angle, const std::vector<int>& orders,
                                std::vector<double>* slopes_out = nullptr);

/// Cross-construction agreement between the WPlane default and the literal
/// order-mu route on a grid; gating (< tol) when n == 1, diagnostic
/// otherwise.
ResidualReport cross_construction(const SystemSpec& spec, const Direction& lambda,
                                  const std::vector<TruncatedSeries>& formal,
                                  const NumericContext& ctx, double tol = 1e-7);

/// The full certification suite on one spec. Gating checks decide `pass`.
struct SuiteResult {
    std::vector<ResidualReport> reports;
    bool all_gating_pass = true;

    std::string to_json() const;
};
SuiteResult run_suite(const SystemSpec& spec, const Direction& lambda, const NumericContext& ctx);

}  // namespace qsum

#endif
