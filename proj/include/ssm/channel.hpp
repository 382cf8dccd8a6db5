#pragma once
#include <json.hpp>
#include <ssm/rng.hpp>
#include <ssm/types.hpp>

namespace ssm {

/// One wiretap-channel realisation.
struct Scenario
{
    ComplexMatrix hb;      ///< desired channel, N_b x N_a
    ComplexMatrix he;      ///< eavesdropper channel, N_e x N_a
    double sigma2 = 1.0;   ///< per-receive-antenna noise variance (Bob and Eve)
    double power = 1.0;    ///< total transmit power P

    int n_a() const { return static_cast<int>(hb.cols()); }
    int n_b() const { return static_cast<int>(hb.rows()); }
    int n_e() const { return static_cast<int>(he.rows()); }
};

/// A scenario restricted to an ordered antenna subset, with the AN projector
/// for the selected desired channel.
struct SelectedScenario
{
    Scenario base;
    IndexList selection;
    ComplexMatrix hb_s;    ///< N_b x N_t
    ComplexMatrix he_s;    ///< N_e x N_t
    ComplexMatrix an_basis;///< N_t x (N_t - N_b), orthonormal, Hb_S * T = 0

    int n_t() const { return static_cast<int>(selection.size()); }
    int an_dim() const { return static_cast<int>(an_basis.cols()); }
};

enum class Receiver
{
    bob,
    eve
};

/// sigma2 = P / 10^(snr_db / 10): SNR is total transmit power over the
/// per-receive-antenna noise variance.
double noise_variance(double snr_db, double power);

/// Rayleigh draw: H_b then H_e, each filled row-major with CN(0, 1).
Scenario gen_scenario(RngStream& rng, int n_a, int n_b, int n_e, double snr_db, double power);

SelectedScenario select(const Scenario& s, const IndexList& subset);

/// Full set {0, ..., N_a - 1}.
SelectedScenario select_all(const Scenario& s);

/// y = H t + n with H = Hb_S or He_S and n ~ CN(0, sigma2 I).
ComplexVector receive(const SelectedScenario& ss, const ComplexVector& t, RngStream& rng, Receiver at);

/// Largest power of two not exceeding n_a.
int default_active_antennas(int n_a);

// JSON form: {"hb": [[[re, im], ...], ...], "he": ..., "sigma2": x, "power": x}
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

} // namespace ssm
