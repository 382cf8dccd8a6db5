#pragma once
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>
#include <ssm/detectors.hpp>
#include <ssm/dnn_pa.hpp>
#include <ssm/tas.hpp>

namespace ssm::harness {

inline constexpr const char* code_version = "0.1.0";

/// Every experiment is driven by one of these; the full struct is echoed
/// into the metadata sidecar of each output.
struct ExperimentConfig
{
    std::string kind = "ber-sweep";

    int n_a = 4;
    int n_t = 0;          ///< 0: largest power of two <= n_a
    int n_b = 2;
    int n_e = 2;
    int n_r = 4;          ///< receive antennas for BER sweeps
    std::string constellation = "16qam";
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
    double power = 4.0;
    double beta = 1.0;

    long long trials = 10000;   ///< SM symbols per SNR point (BER sweeps)
    int burst = 1;              ///< symbols per channel draw (BER sweeps)
    int channels = 200;         ///< channel draws per SNR point (SR sweeps)
    int noise_samples = 500;
    long long subset_cap = default_sr_subset_cap;

    std::vector<std::string> strategies;  ///< empty: per-experiment default
    std::vector<double> fixed_betas{0.1, 0.3, 0.5};
    double grid_step = 0.05;

    std::vector<int> cx_n_t{2, 4, 8};
    std::vector<int> cx_n_r{2, 4};
    std::vector<int> cx_orders{4, 16, 64, 256};

    // learned PA
    std::string dataset;
    std::string test_dataset;
    std::string model;
    int n_samples = 1000;
    double snr_lo_db = 0.0;
    double snr_hi_db = 30.0;
    int epochs = 100;
    int batch_size = 32;
    double val_fraction = 0.1;
    double lr = 1e-3;

    std::uint64_t seed = 1;
    int workers = 1;
    std::string output;

    int active_antennas() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Defaults for `kind` (pinned to the reference configurations), then the
/// given JSON object applied on top.
ExperimentConfig make_config(const std::string& kind, const nlohmann::json& overrides = nlohmann::json::object());

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

std::string fmt(double v);

// ---------------------------------------------------------------- BER

struct BerPoint
{
    double snr_db;
    std::string detector;
    long long trials;
    long long bit_errors;
    double ber;
    double ci95;
};

struct BerSweepResult
{
    std::vector<BerPoint> points;           ///< detector-major within each SNR
    std::vector<std::string> gate_failures;

    const BerPoint& at(double snr_db, const std::string& detector) const;
    Table table() const;
};

/// Columns: snr_db, detector, trials, bit_errors, ber, ci95.
/// All three detectors see identical channel, noise and bits. The AN term is
/// omitted because it lies in the null space of Bob's channel.
BerSweepResult run_ber_sweep(const ExperimentConfig& cfg);

// ---------------------------------------------------------------- SR

struct SrSummary
{
    double snr_db;
    std::string strategy;
    double mean;
    double stderr_;
    int n;
    double beta_mean = 0.0;
    double evaluations_mean = 0.0;
};

/// Per-draw values indexed [snr][strategy][draw].
struct SrSweepResult
{
    std::vector<double> snr_db;
    std::vector<std::string> strategies;
    std::vector<std::vector<std::vector<double>>> sr;
    std::vector<std::vector<std::vector<double>>> beta;
    std::vector<std::vector<std::vector<double>>> evaluations;
    bool with_pa_columns = false;
    std::vector<std::string> gate_failures;

    int strategy_index(const std::string& name) const;
    std::vector<SrSummary> summaries() const;
    Table table() const;
};

/// TAS strategies ("es", "max-slnr", "edas", "edas-secure", "random")
/// evaluated on common channel and noise draws. Draw d uses stream (seed, d):
/// child 0 for the channel (shared across SNR points), 1 for MI noise, 2 for
/// random selection.
/// Columns: snr_db, strategy, sr_mean, sr_stderr, n_channels.
SrSweepResult run_tas_compare(const ExperimentConfig& cfg);
SrSweepResult run_sr_snr_sweep(const ExperimentConfig& cfg);

/// PA strategies ("grid-es", "sr-gd", "max-p-sinr-ansnr", "fixed-<beta>",
/// "dnn") on common draws; adds beta_mean and evaluations_mean columns.
SrSweepResult run_pa_compare(const ExperimentConfig& cfg);

// ---------------------------------------------------------------- complexity

struct ComplexityRow
{
    int n_t, n_r, order;
    std::string detector;
    std::int64_t measured, formula;
};

struct ComplexityResult
{
    std::vector<ComplexityRow> rows;
    std::vector<std::string> gate_failures;
    Table table() const;
};

/// Columns: n_t, n_r, M, detector, measured_cm, formula_cm, match.
ComplexityResult run_complexity_table(const ExperimentConfig& cfg);

/// Columns: index, label, bits, re, im.
Table constellation_table(const Constellation& c);

// ---------------------------------------------------------------- output

/// Writes `csv` to `path` and `<path>.meta.json` with the config echo,
/// code version, seed, wall time and gate status.
void write_with_sidecar(const std::string& path, const std::string& csv, const ExperimentConfig& cfg,
                        double wall_seconds, const std::vector<std::string>& gate_failures);

} // namespace ssm::harness
