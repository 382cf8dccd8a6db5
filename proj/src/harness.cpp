#include <cmath>
#include <fstream>
#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <ssm/errors.hpp>
#include <ssm/harness.hpp>
#include <ssm/pa.hpp>
#include <ssm/parallel.hpp>
#include <ssm/sm_link.hpp>

namespace ssm::harness {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    ExperimentConfig, kind, n_a, n_t, n_b, n_e, n_r, constellation, snr_db, power, beta, trials, burst, channels,
    noise_samples, subset_cap, strategies, fixed_betas, grid_step, cx_n_t, cx_n_r, cx_orders, dataset, test_dataset,
    model, n_samples, snr_lo_db, snr_hi_db, epochs, batch_size, val_fraction, lr, seed, workers, output)

int ExperimentConfig::active_antennas() const
{
    return n_t > 0 ? n_t : default_active_antennas(n_a);
}

namespace {

std::vector<double> snr_range(double lo, double hi, double step)
{
    std::vector<double> out;
    for (double s = lo; s <= hi + 1e-9; s += step) out.push_back(std::round(s * 1e6) / 1e6);
    return out;
}

} // namespace

ExperimentConfig make_config(const std::string& kind, const nlohmann::json& overrides)
{
    ExperimentConfig c;
    c.kind = kind;
    if (kind == "ber-sweep") {
        c.n_a = c.n_t = 4;
        c.n_r = 4;
        c.constellation = "16qam";
        c.snr_db = snr_range(0, 20, 2);
        c.trials = 100000;
    } else if (kind == "sr-snr-sweep" || kind == "tas-compare") {
        c.n_a = 6;
        c.n_b = c.n_e = 2;
        c.constellation = "qpsk";
        c.beta = 1.0;
        c.snr_db = kind == "tas-compare" ? std::vector<double>{10.0} : snr_range(-10, 40, 5);
        c.strategies = kind == "tas-compare"
                           ? std::vector<std::string>{"es", "max-slnr", "edas", "random"}
                           : std::vector<std::string>{"max-slnr"};
    } else if (kind == "pa-compare") {
        c.n_a = c.n_t = 4;
        c.n_b = c.n_e = 2;
        c.constellation = "qpsk";
        c.snr_db = {0.0, 10.0, 20.0, 30.0};
        c.strategies = {"grid-es", "sr-gd", "max-p-sinr-ansnr", "fixed-0.1", "fixed-0.3", "fixed-0.5"};
    } else if (kind == "complexity-table") {
        c.n_a = c.n_t = 4;
    } else if (kind == "dnn-gen" || kind == "dnn-train" || kind == "dnn-eval") {
        c.n_a = c.n_t = 4;
        c.n_b = c.n_e = 2;
        c.constellation = "qpsk";
    } else if (kind != "constellation") {
        throw InvalidArgumentError("unknown experiment kind '" + kind + "'");
    }
    if (!overrides.is_null() && !overrides.empty()) {
        nlohmann::json j = c;
        j.merge_patch(overrides);
        c = j.get<ExperimentConfig>();
        c.kind = kind;
    }
    return c;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string Table::to_csv() const
{
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
}

// ---------------------------------------------------------------- BER

const BerPoint& BerSweepResult::at(double snr_db, const std::string& detector) const
{
    for (const auto& p : points)
        if (p.snr_db == snr_db && p.detector == detector) return p;
    throw InvalidArgumentError("no BER point for " + detector + " at " + fmt(snr_db) + " dB");
}

Table BerSweepResult::table() const
{
    Table t{{"snr_db", "detector", "trials", "bit_errors", "ber", "ci95"}, {}};
    for (const auto& p : points) {
        t.rows.push_back({fmt(p.snr_db), p.detector, std::to_string(p.trials), std::to_string(p.bit_errors),
                          fmt(p.ber), fmt(p.ci95)});
    }
    return t;
}

BerSweepResult run_ber_sweep(const ExperimentConfig& cfg)
{
    const Constellation c = parse_constellation(cfg.constellation);
    const int n_t = cfg.active_antennas();
    const int n_r = cfg.n_r;
    const int bits = sm_bits_per_symbol(n_t, c);
    const int burst = std::max(1, cfg.burst);
    require(cfg.trials >= 0, "trials must be >= 0");
    const long long blocks = (cfg.trials + burst - 1) / burst;
    static const char* names[3] = {"joint-ml", "proposed", "suboptimal"};

    BerSweepResult result;
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double snr = cfg.snr_db[si];
        const double sigma2 = noise_variance(snr, cfg.power);
        const double amp = std::sqrt(cfg.beta * cfg.power);
        const RngStream snr_rng(cfg.seed, si);

        struct Block { long long err[3] = {0, 0, 0}; long long sq[3] = {0, 0, 0}; bool same = true; };
        std::vector<Block> out(static_cast<std::size_t>(blocks));
        parallel_for(out.size(), cfg.workers, [&](std::size_t b) {
            RngStream rng = snr_rng.split(b);
            const ComplexMatrix h_eff = amp * sample_cn_matrix(rng, n_r, n_t);
            const long long first = static_cast<long long>(b) * burst;
            const long long count = std::min<long long>(burst, cfg.trials - first);
            Block& blk = out[b];
            BitWord word(static_cast<std::size_t>(bits));
            for (long long s = 0; s < count; ++s) {
                for (auto& bit : word) bit = static_cast<std::uint8_t>(rng() >> 63);
                const SmSymbol sym = map_bits(word, n_t, c);
                ComplexVector y = h_eff.col(sym.antenna) * c.point(sym.point_index);
                for (Eigen::Index r = 0; r < n_r; ++r) y(r) += rng.complex_normal(sigma2);
                const DetectionResult d[3] = {detect_joint_ml(y, h_eff, c), detect_proposed(y, h_eff, c),
                                              detect_suboptimal(y, h_eff, c)};
                for (int k = 0; k < 3; ++k) {
                    long long e = 0;
                    for (int i = 0; i < bits; ++i) e += d[k].bits[i] != word[i];
                    blk.err[k] += e;
                    blk.sq[k] += e * e;
                }
                if (d[0].antenna != d[1].antenna || d[0].point_index != d[1].point_index) blk.same = false;
            }
        });

        long long err[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
        bool same = true;
        for (const Block& blk : out) {
            for (int k = 0; k < 3; ++k) {
                err[k] += blk.err[k];
                sq[k] += blk.sq[k];
            }
            same = same && blk.same;
        }
        for (int k = 0; k < 3; ++k) {
            const double t = static_cast<double>(cfg.trials);
            const double total_bits = t * bits;
            BerPoint p{snr, names[k], cfg.trials, err[k], 0.0, 0.0};
            if (cfg.trials > 0) {
                p.ber = static_cast<double>(err[k]) / total_bits;
                if (cfg.trials > 1) {
                    const double mean = static_cast<double>(err[k]) / t;
                    const double var = std::max(0.0, (static_cast<double>(sq[k]) - t * mean * mean) / (t - 1));
                    p.ci95 = 1.96 * std::sqrt(var / t) / bits;
                }
            }
            result.points.push_back(p);
        }
        if (!same || err[0] != err[1]) {
            result.gate_failures.push_back("proposed and joint-ml decisions differ at " + fmt(snr) + " dB");
        }
    }
    return result;
}

// ---------------------------------------------------------------- SR

int SrSweepResult::strategy_index(const std::string& name) const
{
    for (std::size_t i = 0; i < strategies.size(); ++i)
        if (strategies[i] == name) return static_cast<int>(i);
    throw InvalidArgumentError("strategy '" + name + "' not in result");
}

namespace {

std::pair<double, double> mean_stderr(const std::vector<double>& v)
{
    if (v.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : v) sum += x;
    const double n = static_cast<double>(v.size());
    const double mean = sum / n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1) / n)};
}

double mean_of(const std::vector<double>& v)
{
    return mean_stderr(v).first;
}

} // namespace

std::vector<SrSummary> SrSweepResult::summaries() const
{
    std::vector<SrSummary> out;
    for (std::size_t s = 0; s < snr_db.size(); ++s) {
        for (std::size_t k = 0; k < strategies.size(); ++k) {
            const auto [m, se] = mean_stderr(sr[s][k]);
            SrSummary row{snr_db[s], strategies[k], m, se, static_cast<int>(sr[s][k].size())};
            if (with_pa_columns) {
                row.beta_mean = mean_of(beta[s][k]);
                row.evaluations_mean = mean_of(evaluations[s][k]);
            }
            out.push_back(row);
        }
    }
    return out;
}

Table SrSweepResult::table() const
{
    Table t{{"snr_db", "strategy", "sr_mean", "sr_stderr", "n_channels"}, {}};
    if (with_pa_columns) {
        t.header.push_back("beta_mean");
        t.header.push_back("evaluations_mean");
    }
    // Nothing to summarise without channel draws.
    const bool empty = sr.empty() || sr.front().empty() || sr.front().front().empty();
    if (empty) return t;
    for (const auto& s : summaries()) {
        std::vector<std::string> row{fmt(s.snr_db), s.strategy, fmt(s.mean), fmt(s.stderr_), std::to_string(s.n)};
        if (with_pa_columns) {
            row.push_back(fmt(s.beta_mean));
            row.push_back(fmt(s.evaluations_mean));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

SrSweepResult make_sweep(const ExperimentConfig& cfg, const std::vector<std::string>& strategies)
{
    require(cfg.channels >= 0, "channels must be >= 0");
    SrSweepResult r;
    r.snr_db = cfg.snr_db;
    r.strategies = strategies;
    const auto draws = static_cast<std::size_t>(cfg.channels);
    auto shape = [&] {
        return std::vector<std::vector<std::vector<double>>>(
            cfg.snr_db.size(), std::vector<std::vector<double>>(strategies.size(), std::vector<double>(draws)));
    };
    r.sr = shape();
    r.beta = shape();
    r.evaluations = shape();
    return r;
}

} // namespace

SrSweepResult run_tas_compare(const ExperimentConfig& cfg)
{
    const std::vector<std::string> strategies =
        cfg.strategies.empty() ? std::vector<std::string>{"es", "max-slnr", "edas", "random"} : cfg.strategies;
    const Constellation c = parse_constellation(cfg.constellation);
    const int n_t = cfg.active_antennas();
    for (const auto& s : strategies) {
        if (s != "edas-secure") parse_tas_strategy(s);
    }
    SrSweepResult r = make_sweep(cfg, strategies);
    const std::size_t draws = static_cast<std::size_t>(cfg.channels);
    const PaSplit pa{cfg.beta, cfg.power};

    parallel_for(cfg.snr_db.size() * draws, cfg.workers, [&](std::size_t job) {
        const std::size_t si = job / draws, d = job % draws;
        const RngStream base(cfg.seed, d);
        RngStream channel_rng = base.split(0);
        const RngStream mi_rng = base.split(1);
        RngStream pick_rng = base.split(2);
        const Scenario s = gen_scenario(channel_rng, cfg.n_a, cfg.n_b, cfg.n_e, cfg.snr_db[si], cfg.power);
        for (std::size_t k = 0; k < strategies.size(); ++k) {
            const std::string& name = strategies[k];
            double sr;
            if (name == "es") {
                sr = tas_exhaustive_sr(s, pa, c, cfg.noise_samples, mi_rng, n_t, cfg.subset_cap).score;
            } else {
                IndexList sel;
                if (name == "max-slnr") sel = tas_max_slnr(s, pa, n_t).selection;
                else if (name == "edas") sel = tas_edas(s, c, EdasMode::desired, n_t).selection;
                else if (name == "edas-secure") sel = tas_edas(s, c, EdasMode::secure_ratio, n_t).selection;
                else sel = tas_random(pick_rng, cfg.n_a, n_t).selection;
                // Ascending order pairs each candidate with the same noise draws as in the ES scan.
                std::sort(sel.begin(), sel.end());
                sr = secrecy_rate(select(s, sel), pa, c, cfg.noise_samples, mi_rng).sr;
            }
            r.sr[si][k][d] = sr;
            r.beta[si][k][d] = cfg.beta;
        }
    });

    const auto it = std::find(strategies.begin(), strategies.end(), "es");
    if (it != strategies.end()) {
        const auto es = static_cast<std::size_t>(it - strategies.begin());
        for (std::size_t si = 0; si < cfg.snr_db.size(); ++si)
            for (std::size_t k = 0; k < strategies.size(); ++k)
                for (std::size_t d = 0; d < draws; ++d)
                    if (r.sr[si][k][d] > r.sr[si][es][d]) {
                        r.gate_failures.push_back("es dominated by " + strategies[k] + " at " + fmt(cfg.snr_db[si])
                                                  + " dB, draw " + std::to_string(d));
                    }
    }
    return r;
}

SrSweepResult run_sr_snr_sweep(const ExperimentConfig& cfg)
{
    ExperimentConfig c = cfg;
    if (c.strategies.empty()) c.strategies = {"max-slnr"};
    return run_tas_compare(c);
}

SrSweepResult run_pa_compare(const ExperimentConfig& cfg)
{
    const std::vector<std::string> strategies =
        cfg.strategies.empty()
            ? std::vector<std::string>{"grid-es", "sr-gd", "max-p-sinr-ansnr", "fixed-0.1", "fixed-0.3", "fixed-0.5"}
            : cfg.strategies;
    const Constellation c = parse_constellation(cfg.constellation);
    const int n_t = cfg.active_antennas();

    std::vector<double> fixed(strategies.size(), std::numeric_limits<double>::quiet_NaN());
    bool needs_net = false;
    for (std::size_t k = 0; k < strategies.size(); ++k) {
        const std::string& s = strategies[k];
        if (s.rfind("fixed-", 0) == 0) fixed[k] = pa_fixed(std::stod(s.substr(6))).beta;
        else if (s == "dnn") needs_net = true;
        else if (s != "grid-es" && s != "sr-gd" && s != "max-p-sinr-ansnr")
            throw InvalidArgumentError("unknown PA strategy '" + s + "'");
    }
    std::optional<dnn::PaNet> net;
    if (needs_net) {
        require(!cfg.model.empty(), "strategy 'dnn' needs a model path");
        net = dnn::load_net(cfg.model);
    }

    SrSweepResult r = make_sweep(cfg, strategies);
    r.with_pa_columns = true;
    const std::size_t draws = static_cast<std::size_t>(cfg.channels);
    const std::vector<double> grid = beta_grid(cfg.grid_step);

    parallel_for(cfg.snr_db.size() * draws, cfg.workers, [&](std::size_t job) {
        const std::size_t si = job / draws, d = job % draws;
        const RngStream base(cfg.seed, d);
        RngStream channel_rng = base.split(0);
        const RngStream mi_rng = base.split(1);
        const Scenario s = gen_scenario(channel_rng, cfg.n_a, cfg.n_b, cfg.n_e, cfg.snr_db[si], cfg.power);
        // With more antennas than N_t, pick them by no-AN SLNR before allocating power.
        IndexList chosen;
        if (n_t < cfg.n_a) {
            chosen = tas_max_slnr(s, {1.0, cfg.power}, n_t).selection;
            std::sort(chosen.begin(), chosen.end());
        }
        const SelectedScenario ss = n_t == cfg.n_a ? select_all(s) : select(s, chosen);
        const Scenario selected{ss.hb_s, ss.he_s, ss.base.sigma2, ss.base.power};

        for (std::size_t k = 0; k < strategies.size(); ++k) {
            const std::string& name = strategies[k];
            PaResult pr;
            if (name == "grid-es") {
                pr = pa_grid_search(ss, c, cfg.grid_step, cfg.noise_samples, mi_rng);
            } else if (name == "sr-gd") {
                pr = pa_sr_gradient(ss, c, cfg.noise_samples, mi_rng);
            } else {
                if (name == "max-p-sinr-ansnr") pr = pa_max_p_sinr_ansnr(ss);
                else if (name == "dnn") {
                    pr.beta = net->forward(dnn::channel_planes(selected), ss.base.sigma2);
                    pr.strategy = PaStrategy::dnn;
                } else pr = pa_fixed(fixed[k]);
                pr.sr_at_beta = secrecy_rate(ss, {pr.beta, cfg.power}, c, cfg.noise_samples, mi_rng).sr;
                pr.evaluations = 0;
            }
            r.sr[si][k][d] = pr.sr_at_beta;
            r.beta[si][k][d] = pr.beta;
            r.evaluations[si][k][d] = pr.evaluations;
        }
    });

    const auto it = std::find(strategies.begin(), strategies.end(), "grid-es");
    if (it != strategies.end()) {
        const auto g = static_cast<std::size_t>(it - strategies.begin());
        for (std::size_t k = 0; k < strategies.size(); ++k) {
            if (std::isnan(fixed[k]) || std::find(grid.begin(), grid.end(), fixed[k]) == grid.end()) continue;
            for (std::size_t si = 0; si < cfg.snr_db.size(); ++si)
                for (std::size_t d = 0; d < draws; ++d)
                    if (r.sr[si][k][d] > r.sr[si][g][d] + sr_tie_tolerance) {
                        r.gate_failures.push_back("grid-es below " + strategies[k] + " at " + fmt(cfg.snr_db[si])
                                                  + " dB, draw " + std::to_string(d));
                    }
        }
    }
    return r;
}

// ---------------------------------------------------------------- complexity

Table ComplexityResult::table() const
{
    Table t{{"n_t", "n_r", "M", "detector", "measured_cm", "formula_cm", "match"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({std::to_string(r.n_t), std::to_string(r.n_r), std::to_string(r.order), r.detector,
                          std::to_string(r.measured), std::to_string(r.formula), r.measured == r.formula ? "1" : "0"});
    }
    return t;
}

ComplexityResult run_complexity_table(const ExperimentConfig& cfg)
{
    ComplexityResult out;
    RngStream rng(cfg.seed, 0);
    for (int n_t : cfg.cx_n_t) {
        for (int n_r : cfg.cx_n_r) {
            for (int order : cfg.cx_orders) {
                const Constellation c = Constellation::build(ConstellationKind::square_qam, order);
                const ComplexMatrix h = sample_cn_matrix(rng, n_r, n_t);
                const ComplexVector y = sample_cn(rng, n_r, 1.0);
                const std::pair<std::string, std::pair<std::int64_t, std::int64_t>> rows[3] = {
                    {"joint-ml", {detect_joint_ml(y, h, c).cm_count, cm_formula_joint_ml(n_t, n_r, order)}},
                    {"proposed", {detect_proposed(y, h, c).cm_count, cm_formula_proposed(n_t, n_r, order)}},
                    {"suboptimal", {detect_suboptimal(y, h, c).cm_count, cm_formula_suboptimal(n_t, n_r, order)}},
                };
                for (const auto& [name, v] : rows) {
                    out.rows.push_back({n_t, n_r, order, name, v.first, v.second});
                    if (v.first != v.second) {
                        out.gate_failures.push_back(name + " measured " + std::to_string(v.first) + " != formula "
                                                    + std::to_string(v.second));
                    }
                }
            }
        }
    }
    return out;
}

Table constellation_table(const Constellation& c)
{
    Table t{{"index", "label", "bits", "re", "im"}, {}};
    for (int m = 0; m < c.order(); ++m) {
        std::string bits;
        for (auto b : point_to_bits(c, m)) bits.push_back(b ? '1' : '0');
        t.rows.push_back({std::to_string(m), std::to_string(m), bits, fmt(c.point(m).real()), fmt(c.point(m).imag())});
    }
    return t;
}

// ---------------------------------------------------------------- output

void write_with_sidecar(const std::string& path, const std::string& csv, const ExperimentConfig& cfg,
                        double wall_seconds, const std::vector<std::string>& gate_failures)
{
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path);
        out << csv;
    }
    nlohmann::json meta;
    meta["config"] = cfg;
    meta["code_version"] = code_version;
    meta["seed"] = cfg.seed;
    meta["wall_time_s"] = wall_seconds;
    meta["gates_passed"] = gate_failures.empty();
    meta["gate_failures"] = gate_failures;
    std::ofstream out(path + ".meta.json", std::ios::binary);
    if (!out) throw Error("cannot write " + path + ".meta.json");
    out << meta.dump(2) << '\n';
}

} // namespace ssm::harness
