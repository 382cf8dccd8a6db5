#include <cmath>
#include <limits>
#include <ssm/errors.hpp>
#include <ssm/pa.hpp>

namespace ssm {

std::string to_string(PaStrategy s)
{
    switch (s) {
    case PaStrategy::fixed: return "fixed";
    case PaStrategy::grid_search: return "grid-es";
    case PaStrategy::sr_gradient: return "sr-gd";
    case PaStrategy::max_p_sinr_ansnr: return "max-p-sinr-ansnr";
    case PaStrategy::dnn: return "dnn";
    }
    return "?";
}

PaResult pa_fixed(double beta, const BetaBracket& bracket)
{
    if (!bracket.contains(beta)) {
        throw InvalidArgumentError("beta " + std::to_string(beta) + " outside [" + std::to_string(bracket.lo) + ", "
                                   + std::to_string(bracket.hi) + "]");
    }
    PaResult r;
    r.beta = beta;
    r.sr_at_beta = std::numeric_limits<double>::quiet_NaN();
    r.strategy = PaStrategy::fixed;
    return r;
}

std::vector<double> beta_grid(double step, const BetaBracket& bracket)
{
    require(step > 0, "grid step must be positive");
    const double span = bracket.hi - bracket.lo;
    const long long n = std::llround(span / step);
    if (std::abs(static_cast<double>(n) * step - span) > 1e-9) {
        throw InvalidArgumentError("grid step does not divide the beta bracket");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n + 1));
    for (long long i = 0; i <= n; ++i) grid.push_back(std::round((bracket.lo + i * step) * 1e9) / 1e9);
    return grid;
}

PaResult pa_grid_search(const SelectedScenario& ss, const Constellation& c, double grid_step, int noise_samples,
                        const RngStream& rng, const BetaBracket& bracket)
{
    PaResult best;
    best.strategy = PaStrategy::grid_search;
    best.sr_at_beta = -std::numeric_limits<double>::infinity();
    const MiNoise noise = draw_sr_noise(rng, ss.base.n_b(), ss.base.n_e(), ss.n_t() * c.order(), noise_samples);
    for (double beta : beta_grid(grid_step, bracket)) {
        const double sr = secrecy_rate(ss, {beta, ss.base.power}, c, noise).sr;
        ++best.evaluations;
        if (sr > best.sr_at_beta + sr_tie_tolerance) {
            best.sr_at_beta = sr;
            best.beta = beta;
        }
    }
    return best;
}

PaResult pa_sr_gradient(const SelectedScenario& ss, const Constellation& c, int noise_samples,
                        const RngStream& rng, const GradientOptions& opts)
{
    const BetaBracket& br = opts.bracket;
    require(br.contains(opts.beta0), "beta0 outside the bracket");
    PaResult best;
    best.strategy = PaStrategy::sr_gradient;
    best.sr_at_beta = -std::numeric_limits<double>::infinity();
    best.converged = false;

    const MiNoise noise = draw_sr_noise(rng, ss.base.n_b(), ss.base.n_e(), ss.n_t() * c.order(), noise_samples);
    auto evaluate = [&](double beta) {
        const double sr = secrecy_rate(ss, {beta, ss.base.power}, c, noise).sr;
        ++best.evaluations;
        if (sr > best.sr_at_beta || (sr == best.sr_at_beta && beta < best.beta)) {
            best.sr_at_beta = sr;
            best.beta = beta;
        }
        return sr;
    };

    double beta = opts.beta0;
    for (int k = 0; k < opts.max_iters; ++k) {
        const double up = br.clamp(beta + opts.fd_width);
        const double down = br.clamp(beta - opts.fd_width);
        const double grad = (evaluate(up) - evaluate(down)) / (up - down);
        const double rate = opts.step0 / std::pow(k + 1.0, opts.decay);
        const double delta = std::clamp(rate * grad, -opts.max_step, opts.max_step);
        const double next = br.clamp(beta + delta);
        const bool small = std::abs(next - beta) < opts.tol;
        beta = next;
        if (small) {
            best.converged = true;
            break;
        }
    }
    return best;
}

double p_sinr_ansnr_objective(const SelectedScenario& ss, double beta)
{
    const double p = ss.base.power;
    const double s2 = ss.base.sigma2;
    const double n_t = ss.n_t();
    const double bob_gain = ss.hb_s.squaredNorm() / n_t;
    const double eve_gain = ss.he_s.squaredNorm() / n_t;
    const double an_gain = (ss.he_s * ss.an_basis).squaredNorm();
    const double sinr_b = beta * p * bob_gain / (ss.base.n_b() * s2);
    const double ansnr_e = ((1.0 - beta) * p / ss.an_dim()) * an_gain / (beta * p * eve_gain + ss.base.n_e() * s2);
    return sinr_b * ansnr_e;
}

PaResult pa_max_p_sinr_ansnr(const SelectedScenario& ss, const BetaBracket& bracket, double tol)
{
    if (ss.an_dim() < 1) throw NullSpaceEmptyError("no AN dimensions: N_t must exceed N_b");
    const ScalarOptimum opt = golden_section_maximize(
        [&](double b) { return p_sinr_ansnr_objective(ss, b); }, bracket.lo, bracket.hi, tol);
    PaResult r;
    r.beta = opt.x;
    r.sr_at_beta = std::numeric_limits<double>::quiet_NaN();
    r.strategy = PaStrategy::max_p_sinr_ansnr;
    return r;
}

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    require(lo <= hi, "golden section: empty interval");
    const double c = 2.0 / (1.0 + std::sqrt(5.0));
    double a = lo, b = hi;
    double u = b - c * (b - a), fu = f(u);
    double v = a + c * (b - a), fv = f(v);
    int evals = 2;
    while (b - a > tol) {
        if (fu < fv) {
            a = u;
            u = v;
            fu = fv;
            v = a + c * (b - a);
            fv = f(v);
        } else {
            b = v;
            v = u;
            fv = fu;
            u = b - c * (b - a);
            fu = f(u);
        }
        ++evals;
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    ++evals;
    // The optimum may sit on the boundary of the bracket.
    for (double edge : {lo, hi}) {
        const double fe = f(edge);
        ++evals;
        if (fe > fx) {
            fx = fe;
            x = edge;
        }
    }
    return {x, fx, evals};
}

} // namespace ssm
