#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ssm/errors.hpp>
#include <ssm/linalg.hpp>
#include <ssm/secrecy.hpp>

namespace ssm {

ComplexMatrix draw_mi_noise(RngStream rng, Eigen::Index dim, Eigen::Index n_candidates, int noise_samples)
{
    require(noise_samples >= 1, "need at least one noise sample");
    ComplexMatrix w(dim, n_candidates * noise_samples);
    for (Eigen::Index col = 0; col < w.cols(); ++col)
        for (Eigen::Index r = 0; r < dim; ++r) w(r, col) = rng.complex_normal(1.0);
    return w;
}

MiNoise draw_sr_noise(const RngStream& rng, int n_b, int n_e, int n_candidates, int noise_samples)
{
    return {draw_mi_noise(rng.split(0), std::max(n_b, n_e), n_candidates, noise_samples), noise_samples};
}

MiEstimate mi_finite_alphabet(const ComplexMatrix& candidates, int noise_samples, RngStream rng)
{
    require(noise_samples >= 1, "mi_finite_alphabet: need at least one noise sample");
    require(candidates.cols() >= 1, "mi_finite_alphabet: need at least one candidate");
    if (candidates.cols() == 1) return {0.0, 0.0, noise_samples};
    return mi_finite_alphabet(candidates, draw_mi_noise(rng, candidates.rows(), candidates.cols(), noise_samples),
                              noise_samples);
}

MiEstimate mi_finite_alphabet(const ComplexMatrix& candidates, const ComplexMatrix& noise, int noise_samples)
{
    require(noise_samples >= 1, "mi_finite_alphabet: need at least one noise sample");
    const Eigen::Index n = candidates.cols();
    const Eigen::Index dim = candidates.rows();
    require(n >= 1, "mi_finite_alphabet: need at least one candidate");

    MiEstimate out;
    out.noise_samples = static_cast<long long>(n) * noise_samples;
    if (n == 1) return out;
    if (noise.rows() < dim || noise.cols() != n * noise_samples) {
        throw DimensionMismatchError("noise must be at least dim x (N * K)");
    }

    // diff[(i * n + j) * dim + r] = u_i - u_j
    std::vector<cdouble> diff(static_cast<std::size_t>(n * n * dim));
    std::vector<double> dist(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (Eigen::Index r = 0; r < dim; ++r) {
                const cdouble d = candidates(r, i) - candidates(r, j);
                diff[(i * n + j) * dim + r] = d;
                d2 += std::norm(d);
            }
            dist[i * n + j] = d2;
        }
    }

    std::vector<double> expo(static_cast<std::size_t>(n));
    double sum = 0.0, sum_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cdouble* di = &diff[i * n * dim];
        const double* disti = &dist[i * n];
        for (int k = 0; k < noise_samples; ++k) {
            const cdouble* w = &noise(0, i * noise_samples + k);
            double peak = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n; ++j) {
                double cross = 0.0;
                const cdouble* dij = di + j * dim;
                for (Eigen::Index r = 0; r < dim; ++r) {
                    cross += dij[r].real() * w[r].real() + dij[r].imag() * w[r].imag();
                }
                const double e = -disti[j] - 2.0 * cross;
                expo[j] = e;
                if (e > peak) peak = e;
            }
            // Terms below exp(-40) relative to the peak cannot change the sum in double precision.
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double rel = expo[j] - peak;
                if (rel > -40.0) acc += std::exp(rel);
            }
            const double term = (peak + std::log(acc)) / std::numbers::ln2;
            sum += term;
            sum_sq += term * term;
        }
    }
    const double count = static_cast<double>(out.noise_samples);
    const double mean = sum / count;
    const double var = count > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1)) : 0.0;
    out.value = std::log2(static_cast<double>(n)) - mean;
    out.std_error = std::sqrt(var / count);
    return out;
}

ComplexMatrix sm_candidates(const ComplexMatrix& h, const Constellation& c, double amplitude)
{
    const Eigen::Index n_t = h.cols();
    const int order = c.order();
    ComplexMatrix u(h.rows(), n_t * order);
    for (Eigen::Index j = 0; j < n_t; ++j)
        for (int m = 0; m < order; ++m) u.col(j * order + m) = (amplitude * c.point(m)) * h.col(j);
    return u;
}

ComplexMatrix eve_noise_covariance(const SelectedScenario& ss, const PaSplit& pa)
{
    const Eigen::Index n_e = ss.he_s.rows();
    ComplexMatrix k = ss.base.sigma2 * ComplexMatrix::Identity(n_e, n_e);
    if (pa.beta < 1.0 && ss.an_dim() > 0) {
        const ComplexMatrix g = ss.he_s * ss.an_basis;
        k += ((1.0 - pa.beta) * pa.power / ss.an_dim()) * (g * g.adjoint());
    }
    return k;
}

SrEstimate secrecy_rate(const SelectedScenario& ss, const PaSplit& pa, const Constellation& c,
                        int noise_samples, const RngStream& rng)
{
    return secrecy_rate(ss, pa, c,
                        draw_sr_noise(rng, ss.base.n_b(), ss.base.n_e(), ss.n_t() * c.order(), noise_samples));
}

SrEstimate secrecy_rate(const SelectedScenario& ss, const PaSplit& pa, const Constellation& c, const MiNoise& noise)
{
    require(pa.beta >= 0 && pa.beta <= 1, "beta must lie in [0, 1]");
    const double amplitude = std::sqrt(pa.beta * pa.power);

    const ComplexMatrix bob = sm_candidates(ss.hb_s, c, amplitude / std::sqrt(ss.base.sigma2));
    const ComplexMatrix w = cholesky_whitener(eve_noise_covariance(ss, pa));
    const ComplexMatrix eve = w * sm_candidates(ss.he_s, c, amplitude);

    SrEstimate out;
    out.mi_bob = mi_finite_alphabet(bob, noise.w, noise.noise_samples);
    out.mi_eve = mi_finite_alphabet(eve, noise.w, noise.noise_samples);
    out.sr = std::max(0.0, out.mi_bob.value - out.mi_eve.value);
    return out;
}

RealVector slnr_per_antenna(const Scenario& s, const PaSplit& pa, const ComplexMatrix& an_basis_full)
{
    const double signal = pa.beta * pa.power;
    double an_leak = 0.0;
    if (pa.beta < 1.0 && an_basis_full.cols() > 0) {
        if (an_basis_full.rows() != s.n_a()) throw DimensionMismatchError("AN basis must have N_a rows");
        an_leak = (1.0 - pa.beta) * pa.power / an_basis_full.cols() * (s.he * an_basis_full).squaredNorm();
    }
    const double noise = s.n_b() * s.sigma2;
    RealVector out(s.n_a());
    for (int j = 0; j < s.n_a(); ++j) {
        out(j) = signal * s.hb.col(j).squaredNorm() / (signal * s.he.col(j).squaredNorm() + an_leak + noise);
    }
    return out;
}

} // namespace ssm
