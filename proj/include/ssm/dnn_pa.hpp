#pragma once
#include <functional>
#include <string>
#include <vector>
#include <ssm/dnn_model.hpp>
#include <ssm/pa.hpp>

namespace ssm::dnn {

/// One labelled example: channels of the selected antennas plus the
/// grid-search PA factor.
struct PaSample
{
    Scenario scenario;
    double snr_db = 0.0;
    double beta_star = 0.5;
};

/// {Re H_b, Im H_b, Re H_e, Im H_e}, each N x N_t row-major.
std::vector<double> channel_planes(const Scenario& s);

struct DatasetConfig
{
    int n_samples = 0;
    int n_t = 4;
    int n_b = 2;
    int n_e = 2;
    double snr_lo_db = 0.0;
    double snr_hi_db = 30.0;
    double power = 1.0;
    std::string constellation = "qpsk";
    double grid_step = 0.05;
    int noise_samples = 500;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Sample i uses stream (seed, i): SNR uniform over the range, a Rayleigh
/// draw, and a grid-search label on child stream 1.
std::vector<PaSample> generate_dataset(const DatasetConfig& cfg);

nlohmann::json sample_to_json(const PaSample& s);
PaSample sample_from_json(const nlohmann::json& j);

/// JSON lines, one sample per line.
void write_dataset(const std::string& path, const std::vector<PaSample>& samples);
std::vector<PaSample> read_dataset(const std::string& path);

struct TrainConfig
{
    int epochs = 100;
    int batch_size = 32;
    double val_fraction = 0.1;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    int conv1_filters = 8;
    int conv2_filters = 16;
    int kernel = 2;
    int hidden = 32;
    BetaBracket bracket{};
    NoiseFeature noise_feature = NoiseFeature::log10;
};

struct EpochLog
{
    int epoch;
    double train_mse;
    double val_mse;
};

struct TrainResult
{
    PaNet net;
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_val_mse = 0.0;
};

NetConfig net_config_for(const PaSample& example, const TrainConfig& cfg);

/// Adam on mean squared error; keeps the weights of the best validation epoch.
TrainResult train(const std::vector<PaSample>& dataset, const TrainConfig& cfg);

double mse(const PaNet& net, const std::vector<PaSample>& samples);

/// CSV with header epoch,train_mse,val_mse.
std::string training_log_csv(const std::vector<EpochLog>& log);

struct EvalReport
{
    std::size_t n = 0;
    double beta_mse = 0.0;
    double sr_predicted = 0.0;   ///< mean SR at the predicted beta
    double sr_label = 0.0;       ///< mean SR at the grid-search label
    double sr_midpoint = 0.0;    ///< mean SR at the bracket midpoint
    double sr_ratio = 0.0;       ///< sr_predicted / sr_label
    double midpoint_ratio = 0.0; ///< sr_midpoint / sr_label
};

using BetaPredictor = std::function<double(const PaSample&)>;

/// SR at predicted, labelled, and midpoint beta on a common noise stream
/// (seed, i) per sample.
EvalReport evaluate(const BetaPredictor& predict, const std::vector<PaSample>& test, const Constellation& c,
                    int noise_samples, std::uint64_t seed, const BetaBracket& bracket = {}, int workers = 1);

EvalReport evaluate(const PaNet& net, const std::vector<PaSample>& test, const Constellation& c,
                    int noise_samples, std::uint64_t seed, int workers = 1);

} // namespace ssm::dnn
