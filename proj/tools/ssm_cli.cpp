#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <ssm/errors.hpp>
#include <ssm/harness.hpp>

namespace {

using ssm::harness::ExperimentConfig;

struct Overrides
{
    std::string config_file;
    std::vector<double> snr;
    long long trials = -1;
    int channels = -1;
    int noise_samples = -1;
    long long seed = -1;
    int workers = -1;
    std::string constellation;
    std::vector<std::string> strategies;
    double beta = -1;
    std::string output;
    std::string dataset, test_dataset, model;
    int n_samples = -1;
    int epochs = -1;
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("-c,--config", o.config_file, "JSON config file; flags override its fields");
    app->add_option("--snr", o.snr, "SNR grid in dB");
    app->add_option("--trials", o.trials, "symbols per SNR point");
    app->add_option("--channels", o.channels, "channel draws per SNR point");
    app->add_option("--noise-samples", o.noise_samples, "MI noise samples per candidate");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--workers", o.workers, "worker threads");
    app->add_option("--constellation", o.constellation, "qpsk, 16qam, 8psk, ...");
    app->add_option("--strategies", o.strategies, "strategy list");
    app->add_option("--beta", o.beta, "PA factor");
    app->add_option("-o,--output", o.output, "output path");
    app->add_option("--dataset", o.dataset, "dataset path (JSON lines)");
    app->add_option("--test-dataset", o.test_dataset, "held-out dataset path");
    app->add_option("--model", o.model, "model path (JSON)");
    app->add_option("--samples", o.n_samples, "dataset size");
    app->add_option("--epochs", o.epochs, "training epochs");
}

ExperimentConfig resolve(const std::string& kind, const Overrides& o)
{
    nlohmann::json j = nlohmann::json::object();
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw ssm::Error("cannot read " + o.config_file);
        in >> j;
    }
    if (!o.snr.empty()) j["snr_db"] = o.snr;
    if (o.trials >= 0) j["trials"] = o.trials;
    if (o.channels >= 0) j["channels"] = o.channels;
    if (o.noise_samples > 0) j["noise_samples"] = o.noise_samples;
    if (o.seed >= 0) j["seed"] = o.seed;
    if (o.workers > 0) j["workers"] = o.workers;
    if (!o.constellation.empty()) j["constellation"] = o.constellation;
    if (!o.strategies.empty()) j["strategies"] = o.strategies;
    if (o.beta >= 0) j["beta"] = o.beta;
    if (!o.output.empty()) j["output"] = o.output;
    if (!o.dataset.empty()) j["dataset"] = o.dataset;
    if (!o.test_dataset.empty()) j["test_dataset"] = o.test_dataset;
    if (!o.model.empty()) j["model"] = o.model;
    if (o.n_samples >= 0) j["n_samples"] = o.n_samples;
    if (o.epochs > 0) j["epochs"] = o.epochs;
    return ssm::harness::make_config(kind, j);
}

int emit(const ExperimentConfig& cfg, const std::string& csv, double seconds, const std::vector<std::string>& gates)
{
    if (cfg.output.empty()) std::cout << csv;
    else ssm::harness::write_with_sidecar(cfg.output, csv, cfg, seconds, gates);
    for (const auto& g : gates) std::cerr << "gate failed: " << g << '\n';
    return gates.empty() ? 0 : 2;
}

int run(const std::string& kind, const Overrides& o)
{
    using namespace ssm;
    const ExperimentConfig cfg = resolve(kind, o);
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    if (kind == "ber-sweep") {
        const auto r = harness::run_ber_sweep(cfg);
        return emit(cfg, r.table().to_csv(), elapsed(), r.gate_failures);
    }
    if (kind == "sr-snr-sweep" || kind == "tas-compare") {
        const auto r = kind == "tas-compare" ? harness::run_tas_compare(cfg) : harness::run_sr_snr_sweep(cfg);
        return emit(cfg, r.table().to_csv(), elapsed(), r.gate_failures);
    }
    if (kind == "pa-compare") {
        const auto r = harness::run_pa_compare(cfg);
        return emit(cfg, r.table().to_csv(), elapsed(), r.gate_failures);
    }
    if (kind == "complexity-table") {
        const auto r = harness::run_complexity_table(cfg);
        return emit(cfg, r.table().to_csv(), elapsed(), r.gate_failures);
    }
    if (kind == "constellation") {
        return emit(cfg, harness::constellation_table(parse_constellation(cfg.constellation)).to_csv(), elapsed(), {});
    }
    if (kind == "dnn-gen") {
        if (cfg.output.empty()) throw Error("dnn-gen needs --output");
        dnn::DatasetConfig dc;
        dc.n_samples = cfg.n_samples;
        dc.n_t = cfg.active_antennas();
        dc.n_b = cfg.n_b;
        dc.n_e = cfg.n_e;
        dc.snr_lo_db = cfg.snr_lo_db;
        dc.snr_hi_db = cfg.snr_hi_db;
        dc.power = cfg.power;
        dc.constellation = cfg.constellation;
        dc.grid_step = cfg.grid_step;
        dc.noise_samples = cfg.noise_samples;
        dc.seed = cfg.seed;
        dc.workers = cfg.workers;
        dnn::write_dataset(cfg.output, dnn::generate_dataset(dc));
        return 0;
    }
    if (kind == "dnn-train") {
        if (cfg.output.empty() || cfg.dataset.empty()) throw Error("dnn-train needs --dataset and --output");
        dnn::TrainConfig tc;
        tc.epochs = cfg.epochs;
        tc.batch_size = cfg.batch_size;
        tc.val_fraction = cfg.val_fraction;
        tc.lr = cfg.lr;
        tc.seed = cfg.seed;
        const auto result = dnn::train(dnn::read_dataset(cfg.dataset), tc);
        dnn::save_net(result.net, cfg.output);
        harness::write_with_sidecar(cfg.output + ".log.csv", dnn::training_log_csv(result.log), cfg, elapsed(), {});
        return 0;
    }
    if (kind == "dnn-eval") {
        if (cfg.model.empty() || cfg.test_dataset.empty()) throw Error("dnn-eval needs --model and --test-dataset");
        const auto net = dnn::load_net(cfg.model);
        const auto rep = dnn::evaluate(net, dnn::read_dataset(cfg.test_dataset), parse_constellation(cfg.constellation),
                                       cfg.noise_samples, cfg.seed, cfg.workers);
        harness::Table t{{"metric", "value"}, {}};
        t.rows = {{"n", std::to_string(rep.n)},
                  {"beta_mse", harness::fmt(rep.beta_mse)},
                  {"sr_predicted", harness::fmt(rep.sr_predicted)},
                  {"sr_label", harness::fmt(rep.sr_label)},
                  {"sr_midpoint", harness::fmt(rep.sr_midpoint)},
                  {"sr_ratio", harness::fmt(rep.sr_ratio)},
                  {"midpoint_ratio", harness::fmt(rep.midpoint_ratio)}};
        return emit(cfg, t.to_csv(), elapsed(), {});
    }
    throw Error("unknown subcommand " + kind);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Secure spatial modulation link-level laboratory"};
    app.require_subcommand(1);
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ber-sweep", "BER versus SNR for the three detectors"},
        {"sr-snr-sweep", "ergodic secrecy rate versus SNR for TAS strategies"},
        {"tas-compare", "secrecy rate of the TAS strategies on common draws"},
        {"pa-compare", "secrecy rate of the PA strategies on common draws"},
        {"complexity-table", "measured versus formula complex-multiplication counts"},
        {"constellation", "dump constellation points and labels"},
        {"dnn-gen", "generate a labelled PA dataset"},
        {"dnn-train", "train the PA network"},
        {"dnn-eval", "evaluate a trained PA network"},
    };
    Overrides overrides;
    std::string chosen;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, overrides);
        sub->callback([&chosen, name = name] { chosen = name; });
    }
    CLI11_PARSE(app, argc, argv);
    try {
        return run(chosen, overrides);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
