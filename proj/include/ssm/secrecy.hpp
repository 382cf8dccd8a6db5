#pragma once
#include <ssm/channel.hpp>
#include <ssm/constellation.hpp>
#include <ssm/sm_link.hpp>

namespace ssm {

/// Mutual information in bits per channel use.
struct MiEstimate
{
    double value = 0.0;
    double std_error = 0.0;
    long long noise_samples = 0;
};

struct SrEstimate
{
    double sr = 0.0;
    MiEstimate mi_bob;
    MiEstimate mi_eve;
};

/// Monte Carlo MI of an equiprobable discrete input observed in unit-variance
/// complex Gaussian noise:
///
///   I = log2 N - 1/(N K) sum_{i,k} log2 sum_j exp(-||u_i - u_j + w_ik||^2 + ||w_ik||^2)
///
/// `candidates` holds one noiseless received point per column. Noise vectors
/// are drawn in (i, k) order from `rng`, so a copy of the same stream
/// reproduces the same draws.
MiEstimate mi_finite_alphabet(const ComplexMatrix& candidates, int noise_samples, RngStream rng);

/// Same estimator on pre-drawn unit-variance noise: column i * K + k of
/// `noise` holds w_ik in its leading rows (extra rows are ignored). Draws made
/// by `draw_mi_noise` from a stream reproduce the stream overload exactly.
MiEstimate mi_finite_alphabet(const ComplexMatrix& candidates, const ComplexMatrix& noise, int noise_samples);

ComplexMatrix draw_mi_noise(RngStream rng, Eigen::Index dim, Eigen::Index n_candidates, int noise_samples);

/// Noise bank shared by Bob and Eve (each reads the leading rows), reusable
/// across beta values and antenna subsets of the same size.
struct MiNoise
{
    ComplexMatrix w;
    int noise_samples = 0;
};

/// max(n_b, n_e) rows drawn from child stream 0 of `rng`.
MiNoise draw_sr_noise(const RngStream& rng, int n_b, int n_e, int n_candidates, int noise_samples);

/// Received candidate points sqrt(beta P) * H * e_j * x_m, column index j * M + m.
ComplexMatrix sm_candidates(const ComplexMatrix& h, const Constellation& c, double amplitude);

/// Noise covariance at Eve: sigma2 I + ((1 - beta) P / (N_t - N_b)) (He_S T)(He_S T)^H.
ComplexMatrix eve_noise_covariance(const SelectedScenario& ss, const PaSplit& pa);

/// [I_bob - I_eve]^+ with Eve's candidates whitened against AN plus thermal
/// noise. Bob and Eve see the same unit noise draws, and passing the same
/// stream to several calls couples them with common random numbers.
SrEstimate secrecy_rate(const SelectedScenario& ss, const PaSplit& pa, const Constellation& c,
                        int noise_samples, const RngStream& rng);

SrEstimate secrecy_rate(const SelectedScenario& ss, const PaSplit& pa, const Constellation& c, const MiNoise& noise);

/// SLNR_j = beta P ||h_b,j||^2 /
///          (beta P ||h_e,j||^2 + ((1 - beta) P / dim T) ||H_e T||_F^2 + N_b sigma2)
/// with T the AN basis of the full desired channel (may have zero columns
/// when beta = 1).
RealVector slnr_per_antenna(const Scenario& s, const PaSplit& pa, const ComplexMatrix& an_basis_full);

} // namespace ssm
