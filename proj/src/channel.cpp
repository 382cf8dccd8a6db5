#include <algorithm>
#include <cmath>
#include <ssm/channel.hpp>
#include <ssm/errors.hpp>
#include <ssm/linalg.hpp>

namespace ssm {

double noise_variance(double snr_db, double power)
{
    return power / std::pow(10.0, snr_db / 10.0);
}

int default_active_antennas(int n_a)
{
    require(n_a >= 1, "need at least one antenna");
    int n = 1;
    while (2 * n <= n_a) n *= 2;
    return n;
}

Scenario gen_scenario(RngStream& rng, int n_a, int n_b, int n_e, double snr_db, double power)
{
    require(n_a >= 1 && n_b >= 1 && n_e >= 1, "gen_scenario: dimensions must be >= 1");
    require(power > 0, "gen_scenario: power must be positive");
    Scenario s;
    s.hb = sample_cn_matrix(rng, n_b, n_a);
    s.he = sample_cn_matrix(rng, n_e, n_a);
    s.power = power;
    s.sigma2 = noise_variance(snr_db, power);
    return s;
}

SelectedScenario select(const Scenario& s, const IndexList& subset)
{
    const int n_a = s.n_a();
    for (std::size_t i = 0; i < subset.size(); ++i) {
        require(subset[i] >= 0 && subset[i] < n_a, "select: antenna index out of range");
        for (std::size_t k = 0; k < i; ++k) require(subset[k] != subset[i], "select: repeated antenna index");
    }
    const int n_t = static_cast<int>(subset.size());
    if (n_t <= s.n_b()) {
        throw NullSpaceEmptyError("need more selected antennas (" + std::to_string(n_t)
                                  + ") than desired receive antennas (" + std::to_string(s.n_b()) + ")");
    }
    SelectedScenario ss;
    ss.base = s;
    ss.selection = subset;
    ss.hb_s.resize(s.n_b(), n_t);
    ss.he_s.resize(s.n_e(), n_t);
    for (int k = 0; k < n_t; ++k) {
        ss.hb_s.col(k) = s.hb.col(subset[k]);
        ss.he_s.col(k) = s.he.col(subset[k]);
    }
    ss.an_basis = null_space_basis(ss.hb_s);
    return ss;
}

SelectedScenario select_all(const Scenario& s)
{
    IndexList all(s.n_a());
    for (int i = 0; i < s.n_a(); ++i) all[i] = i;
    return select(s, all);
}

ComplexVector receive(const SelectedScenario& ss, const ComplexVector& t, RngStream& rng, Receiver at)
{
    const ComplexMatrix& h = at == Receiver::bob ? ss.hb_s : ss.he_s;
    if (t.size() != h.cols()) throw DimensionMismatchError("receive: transmit vector length != N_t");
    ComplexVector y = h * t;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.complex_normal(ss.base.sigma2);
    return y;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw FormatError("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols) throw FormatError("ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& e = j[r][c];
            if (!e.is_array() || e.size() != 2) throw FormatError("complex entry must be [re, im]");
            m(r, c) = cdouble(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

nlohmann::json scenario_to_json(const Scenario& s)
{
    nlohmann::json j;
    j["hb"] = matrix_to_json(s.hb);
    j["he"] = matrix_to_json(s.he);
    j["sigma2"] = s.sigma2;
    j["power"] = s.power;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j)
{
    Scenario s;
    try {
        s.hb = matrix_from_json(j.at("hb"));
        s.he = matrix_from_json(j.at("he"));
        s.sigma2 = j.at("sigma2").get<double>();
        s.power = j.at("power").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
    if (s.hb.cols() != s.he.cols()) throw FormatError("hb and he must have the same antenna count");
    return s;
}

} // namespace ssm
