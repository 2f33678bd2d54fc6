#ifndef QSUM_PIPELINE_HPP
#define QSUM_PIPELINE_HPP

#include <memory>
#include <vector>

#include "qsum/system.hpp"

namespace qsum {

/// Closed form of the Borel transform of a solution section: numerator
/// polynomial over a power of one linear factor, N(zeta)/(alpha zeta - beta)^p.
struct RationalBorelFn {
    std::vector<Complex> num;
    Complex alpha = Complex(1.0);
    Complex beta = Complex(1.0);
    int order = 1;

    Complex operator()(Complex zeta) const;
    Complex pole() const { return beta / alpha; }
    /// Taylor coefficients at 0 through order M-1 (requires beta != 0).
    std::vector<Complex> taylor(int M) const;
};

/// Which Borel-plane normalization backs the chain resummation.
///  - WPlane: order-1 transform in w = z^n with base Q = q^{dn}; linear in
///    the coefficients, inverts exactly, and is the pipeline default.
///  - Literal: the order-mu weights and coefficient n-th roots of the
///    literal transform; coincides with WPlane for n = 1 and is kept as a
///    cross-construction diagnostic for n > 1.
enum class BorelMode { WPlane, Literal };

/// Borel-plane closed forms of the chain-row sections for a fixed section
/// index ell: solves the triangular chain by back-substitution from the
/// deepest Jordan row. Entry j of the result is the transform of the
/// section of chain row (j, b=0).
std::vector<RationalBorelFn> borel_plane_rational(const SystemSpec& spec,
                                                  const TransferData& transfer, int ell,
                                                  BorelMode mode = BorelMode::WPlane);

/// Pole spiral descriptor of one solution entry: for each of the n root
/// branches a base point, common ratio q^d, and the order bound n.
struct SpiralDescriptor {
    std::vector<Complex> bases;  // omega_n^t * (-lambda) * q^{-level}
    Complex ratio;               // q^d
    int order_bound;             // n
    int level;                   // companion level of the row (propagation steps)
};

/// Predicted pole spirals of row i (1-based, as in the source statements).
SpiralDescriptor predicted_poles(const SystemSpec& spec, const Direction& lambda, int i);

/// The assembled meromorphic gauge column H^[lambda]: per-entry evaluators
/// with declared pole spirals and a validity annulus.
class MeromorphicSolution {
public:
    MeromorphicSolution(SystemSpec spec, Direction lambda, NumericContext ctx, BorelMode mode,
                        long laplace_window = 200);

    const SystemSpec& spec() const { return spec_; }
    const Direction& direction() const { return lambda_; }
    BorelMode mode() const { return mode_; }
    double validity_radius() const { return validity_radius_; }
    const std::vector<SpiralDescriptor>& declared_poles() const { return poles_; }

    /// Entry i0 (0-based flat index) at z; guarded against declared poles.
    Complex entry(int i0, Complex z) const;

    /// Entry without the pole/annulus guards (used by pole scans, which
    /// deliberately approach the poles).
    Complex entry_unguarded(int i0, Complex z) const;

    /// Relative distance of z to the nearest declared pole of entry i0.
    double pole_margin(int i0, Complex z) const;
    Complex nearest_pole(int i0, Complex z) const;

private:
    Complex chain_value(int j, int ell, Complex z) const;
    Complex grid_value(int j, int b, Complex z) const;

    SystemSpec spec_;
    Direction lambda_;
    NumericContext ctx_;
    BorelMode mode_;
    TransferData transfer_;
    std::vector<std::vector<RationalBorelFn>> rats_;  // [ell][j]
    std::vector<SpiralDescriptor> poles_;             // per flat row
    Complex Q_;        // Laplace base of the chain resummation
    Complex lam_sum_;  // summation direction in the Borel plane
    long window_;      // summation window [-window, window] for the chain sums
    double validity_radius_;
};

/// Full summation assembly: admission checks (forbidden set, margins,
/// growth of every chain sampler), Borel-plane closed forms, Laplace
/// summation along lambda, and sigma-propagation to every row.
MeromorphicSolution summation_assemble(const SystemSpec& spec, const Direction& lambda,
                                       const std::vector<TruncatedSeries>& formal,
                                       const NumericContext& ctx,
                                       BorelMode mode = BorelMode::WPlane,
                                       long laplace_window = 200);

/// All entries at z (guarded). Throws pole_proximity_error near declared
/// poles, carrying the nearest one.
std::vector<Complex> evaluate_solution(const MeromorphicSolution& sol, Complex z);

/// Worst relative deviation between the pipeline's rational Borel functions
/// and the Borel series of the formal solution sections, through order
/// min(N/n, 30). Exact (roundoff-level) for the WPlane mode.
double taylor_consistency(const SystemSpec& spec, const std::vector<TruncatedSeries>& formal,
                          BorelMode mode = BorelMode::WPlane, int max_order = 30);

}  // namespace qsum

#endif
