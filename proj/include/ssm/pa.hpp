#pragma once
#include <algorithm>
#include <functional>
#include <string>
#include <ssm/secrecy.hpp>

namespace ssm {

struct BetaBracket
{
    double lo = 0.05;
    double hi = 0.95;

    bool contains(double beta) const { return beta >= lo && beta <= hi; }
    double clamp(double beta) const { return std::min(hi, std::max(lo, beta)); }
};

enum class PaStrategy
{
    fixed,
    grid_search,
    sr_gradient,
    max_p_sinr_ansnr,
    dnn
};

std::string to_string(PaStrategy s);

struct PaResult
{
    double beta = 0.5;
    /// SR at beta on the caller's noise stream; NaN when the strategy never
    /// evaluates the secrecy rate.
    double sr_at_beta = 0.0;
    PaStrategy strategy = PaStrategy::fixed;
    int evaluations = 0;
    bool converged = true;
};

PaResult pa_fixed(double beta, const BetaBracket& bracket = {});

/// lo, lo + step, ..., hi (rounded to 1e-9 so grid values are reproducible).
std::vector<double> beta_grid(double step, const BetaBracket& bracket = {});

/// SR values closer than this (bits) count as ties.
inline constexpr double sr_tie_tolerance = 1e-12;

/// Argmax of the secrecy rate over the beta grid; all points share `rng`,
/// ties go to the smaller beta.
PaResult pa_grid_search(const SelectedScenario& ss, const Constellation& c, double grid_step, int noise_samples,
                        const RngStream& rng, const BetaBracket& bracket = {});

struct GradientOptions
{
    double beta0 = 0.5;
    /// Step at iteration k is step0 / (k + 1)^decay times the gradient.
    double step0 = 0.1;
    double decay = 0.6;
    double max_step = 0.25;
    double fd_width = 0.025;
    double tol = 1e-3;
    int max_iters = 8;
    BetaBracket bracket{};
};

/// Projected gradient ascent on beta using a central finite-difference
/// gradient of the Monte Carlo SR (common noise stream for every probe).
/// Returns the best probed point.
PaResult pa_sr_gradient(const SelectedScenario& ss, const Constellation& c, int noise_samples,
                        const RngStream& rng, const GradientOptions& opts = {});

/// SINR_b(beta) * ANSNR_e(beta) with the per-antenna gains averaged over j.
double p_sinr_ansnr_objective(const SelectedScenario& ss, double beta);

/// Maximiser of p_sinr_ansnr_objective by golden-section search.
PaResult pa_max_p_sinr_ansnr(const SelectedScenario& ss, const BetaBracket& bracket = {}, double tol = 1e-6);

struct ScalarOptimum
{
    double x;
    double value;
    int evaluations;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tol);

} // namespace ssm
