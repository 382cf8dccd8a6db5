#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <ssm/dnn_pa.hpp>
#include <ssm/errors.hpp>
#include <ssm/parallel.hpp>

namespace ssm::dnn {

std::vector<double> channel_planes(const Scenario& s)
{
    if (s.hb.rows() != s.he.rows()) {
        throw DimensionMismatchError("channel planes need N_b == N_e");
    }
    const Eigen::Index rows = s.hb.rows(), cols = s.hb.cols();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(4 * rows * cols));
    for (const ComplexMatrix* m : {&s.hb, &s.he}) {
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) out.push_back((*m)(r, c).real());
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) out.push_back((*m)(r, c).imag());
    }
    return out;
}

std::vector<PaSample> generate_dataset(const DatasetConfig& cfg)
{
    require(cfg.n_samples >= 0, "n_samples must be >= 0");
    require(cfg.snr_hi_db >= cfg.snr_lo_db, "empty SNR range");
    const Constellation c = parse_constellation(cfg.constellation);
    std::vector<PaSample> out(static_cast<std::size_t>(cfg.n_samples));
    parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
        RngStream rng(cfg.seed, i);
        PaSample& s = out[i];
        s.snr_db = cfg.snr_lo_db + (cfg.snr_hi_db - cfg.snr_lo_db) * rng.uniform();
        s.scenario = gen_scenario(rng, cfg.n_t, cfg.n_b, cfg.n_e, s.snr_db, cfg.power);
        s.beta_star = pa_grid_search(select_all(s.scenario), c, cfg.grid_step, cfg.noise_samples, rng.split(1)).beta;
    });
    return out;
}

nlohmann::json sample_to_json(const PaSample& s)
{
    nlohmann::json j = scenario_to_json(s.scenario);
    j["snr_db"] = s.snr_db;
    j["beta_star"] = s.beta_star;
    return j;
}

PaSample sample_from_json(const nlohmann::json& j)
{
    PaSample s;
    s.scenario = scenario_from_json(j);
    try {
        s.snr_db = j.at("snr_db").get<double>();
        s.beta_star = j.at("beta_star").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
    return s;
}

void write_dataset(const std::string& path, const std::vector<PaSample>& samples)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
}

std::vector<PaSample> read_dataset(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<PaSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("line " + std::to_string(out.size() + 1) + ": " + e.what());
        }
    }
    return out;
}

NetConfig net_config_for(const PaSample& example, const TrainConfig& cfg)
{
    NetConfig nc;
    nc.in_channels = 4;
    nc.height = example.scenario.n_b();
    nc.width = example.scenario.n_a();
    nc.conv1_filters = cfg.conv1_filters;
    nc.conv2_filters = cfg.conv2_filters;
    nc.kernel = cfg.kernel;
    nc.hidden = cfg.hidden;
    nc.beta_min = cfg.bracket.lo;
    nc.beta_max = cfg.bracket.hi;
    nc.noise_feature = cfg.noise_feature;
    return nc;
}

double mse(const PaNet& net, const std::vector<PaSample>& samples)
{
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : samples) {
        const double e = net.forward(channel_planes(s.scenario), s.scenario.sigma2) - s.beta_star;
        acc += e * e;
    }
    return acc / static_cast<double>(samples.size());
}

TrainResult train(const std::vector<PaSample>& dataset, const TrainConfig& cfg)
{
    if (dataset.empty()) throw EmptyDatasetError("cannot train on an empty dataset");
    require(cfg.batch_size >= 1 && cfg.epochs >= 1, "batch size and epochs must be >= 1");
    require(cfg.val_fraction >= 0 && cfg.val_fraction < 1, "val_fraction must lie in [0, 1)");

    RngStream rng(cfg.seed, 0);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);

    std::size_t n_val = static_cast<std::size_t>(std::llround(cfg.val_fraction * dataset.size()));
    if (cfg.val_fraction > 0 && n_val == 0 && dataset.size() > 1) n_val = 1;
    std::vector<PaSample> val, tr;
    for (std::size_t i = 0; i < order.size(); ++i) (i < n_val ? val : tr).push_back(dataset[order[i]]);
    if (tr.empty()) throw EmptyDatasetError("no training samples left after the validation split");
    const std::vector<PaSample>& val_set = val.empty() ? tr : val;

    // Inputs never change, so precompute them once.
    std::vector<std::vector<double>> planes(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) planes[i] = channel_planes(tr[i].scenario);

    PaNet net(net_config_for(tr.front(), cfg));
    RngStream init_rng = rng.split(1);
    net.init_random(init_rng);

    AdamState adam;
    adam.lr = cfg.lr;
    RngStream shuffle_rng = rng.split(2);

    TrainResult result{net, {}, 0, mse(net, val_set)};
    std::vector<std::size_t> idx(tr.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> grad(net.params().size());
    ForwardCache cache;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[shuffle_rng.uniform_index(i)]);
        double train_sq = 0.0;
        for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double scale = 1.0 / static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = start; b < end; ++b) {
                const PaSample& s = tr[idx[b]];
                const double out = net.forward(planes[idx[b]], s.scenario.sigma2, cache);
                const double err = out - s.beta_star;
                train_sq += err * err;
                net.backward(cache, 2.0 * err * scale, grad);
            }
            adam.update(net.params(), grad);
        }
        const double val_mse = mse(net, val_set);
        result.log.push_back({epoch, train_sq / static_cast<double>(tr.size()), val_mse});
        if (val_mse < result.best_val_mse || result.best_epoch == 0) {
            result.best_val_mse = val_mse;
            result.best_epoch = epoch;
            result.net = net;
        }
    }
    return result;
}

std::string training_log_csv(const std::vector<EpochLog>& log)
{
    std::ostringstream out;
    out << "epoch,train_mse,val_mse\n";
    char buf[128];
    for (const auto& e : log) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", e.epoch, e.train_mse, e.val_mse);
        out << buf;
    }
    return out.str();
}

EvalReport evaluate(const BetaPredictor& predict, const std::vector<PaSample>& test, const Constellation& c,
                    int noise_samples, std::uint64_t seed, const BetaBracket& bracket, int workers)
{
    struct Row { double err2, pred, label, mid; };
    std::vector<Row> rows(test.size());
    const double midpoint = 0.5 * (bracket.lo + bracket.hi);
    parallel_for(test.size(), workers, [&](std::size_t i) {
        const PaSample& s = test[i];
        const SelectedScenario ss = select_all(s.scenario);
        const double beta = predict(s);
        if (!bracket.contains(beta)) throw InvalidArgumentError("predicted beta outside the bracket");
        const MiNoise noise = draw_sr_noise(RngStream(seed, i), ss.base.n_b(), ss.base.n_e(), ss.n_t() * c.order(),
                                            noise_samples);
        const double p = s.scenario.power;
        rows[i].err2 = (beta - s.beta_star) * (beta - s.beta_star);
        rows[i].pred = secrecy_rate(ss, {beta, p}, c, noise).sr;
        rows[i].label = secrecy_rate(ss, {s.beta_star, p}, c, noise).sr;
        rows[i].mid = secrecy_rate(ss, {midpoint, p}, c, noise).sr;
    });
    EvalReport r;
    r.n = test.size();
    if (test.empty()) return r;
    for (const Row& row : rows) {
        r.beta_mse += row.err2;
        r.sr_predicted += row.pred;
        r.sr_label += row.label;
        r.sr_midpoint += row.mid;
    }
    const double n = static_cast<double>(test.size());
    r.beta_mse /= n;
    r.sr_predicted /= n;
    r.sr_label /= n;
    r.sr_midpoint /= n;
    r.sr_ratio = r.sr_label > 0 ? r.sr_predicted / r.sr_label : 1.0;
    r.midpoint_ratio = r.sr_label > 0 ? r.sr_midpoint / r.sr_label : 1.0;
    return r;
}

EvalReport evaluate(const PaNet& net, const std::vector<PaSample>& test, const Constellation& c,
                    int noise_samples, std::uint64_t seed, int workers)
{
    const BetaBracket bracket{net.config().beta_min, net.config().beta_max};
    return evaluate([&](const PaSample& s) { return net.forward(channel_planes(s.scenario), s.scenario.sigma2); },
                    test, c, noise_samples, seed, bracket, workers);
}

} // namespace ssm::dnn
