#include <algorithm>
#include <limits>
#include <numeric>
#include <ssm/errors.hpp>
#include <ssm/linalg.hpp>
#include <ssm/tas.hpp>

namespace ssm {

std::string to_string(TasStrategy s)
{
    switch (s) {
    case TasStrategy::random: return "random";
    case TasStrategy::exhaustive_sr: return "es";
    case TasStrategy::max_slnr: return "max-slnr";
    case TasStrategy::edas: return "edas";
    }
    return "?";
}

TasStrategy parse_tas_strategy(const std::string& name)
{
    if (name == "random") return TasStrategy::random;
    if (name == "es" || name == "exhaustive") return TasStrategy::exhaustive_sr;
    if (name == "max-slnr" || name == "slnr") return TasStrategy::max_slnr;
    if (name == "edas") return TasStrategy::edas;
    throw InvalidArgumentError("unknown TAS strategy '" + name + "'");
}

long long binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<IndexList> enumerate_subsets(int n, int k)
{
    std::vector<IndexList> out;
    if (k < 0 || k > n) return out;
    IndexList cur(k);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

TasResult tas_random(RngStream& rng, int n_a, int n_t)
{
    if (n_t > n_a || n_t < 1) {
        throw InvalidArgumentError("cannot select " + std::to_string(n_t) + " of " + std::to_string(n_a) + " antennas");
    }
    IndexList pool(n_a);
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates.
    for (int i = 0; i < n_t; ++i) {
        const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_a - i)));
        std::swap(pool[i], pool[j]);
    }
    TasResult r;
    r.selection.assign(pool.begin(), pool.begin() + n_t);
    std::sort(r.selection.begin(), r.selection.end());
    r.strategy = TasStrategy::random;
    return r;
}

namespace {

void check_budget(int n_a, int n_t, long long cap)
{
    require(n_t >= 1 && n_t <= n_a, "invalid subset size");
    const long long count = binomial(n_a, n_t);
    if (count > cap) {
        throw BudgetError("C(" + std::to_string(n_a) + ", " + std::to_string(n_t) + ") = " + std::to_string(count)
                          + " subsets exceeds cap " + std::to_string(cap));
    }
}

ComplexMatrix columns(const ComplexMatrix& h, const IndexList& subset)
{
    ComplexMatrix out(h.rows(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = h.col(subset[k]);
    return out;
}

} // namespace

TasResult tas_exhaustive_sr(const Scenario& s, const PaSplit& pa, const Constellation& c, int noise_samples,
                            const RngStream& rng, int n_t, long long subset_cap)
{
    check_budget(s.n_a(), n_t, subset_cap);
    TasResult best;
    best.strategy = TasStrategy::exhaustive_sr;
    best.score = -std::numeric_limits<double>::infinity();
    const MiNoise noise = draw_sr_noise(rng, s.n_b(), s.n_e(), n_t * c.order(), noise_samples);
    for (const auto& subset : enumerate_subsets(s.n_a(), n_t)) {
        const double sr = secrecy_rate(select(s, subset), pa, c, noise).sr;
        if (sr > best.score) {
            best.score = sr;
            best.selection = subset;
        }
    }
    return best;
}

TasResult tas_max_slnr(const Scenario& s, const PaSplit& pa, int n_t)
{
    require(n_t >= 1 && n_t <= s.n_a(), "invalid subset size");
    ComplexMatrix t_full(s.n_a(), 0);
    if (pa.beta < 1.0 && s.n_a() > s.n_b()) t_full = null_space_basis(s.hb);
    const RealVector slnr = slnr_per_antenna(s, pa, t_full);

    IndexList order(s.n_a());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return slnr(a) > slnr(b); });

    TasResult r;
    r.strategy = TasStrategy::max_slnr;
    r.selection.assign(order.begin(), order.begin() + n_t);
    r.score = 0.0;
    for (int j : r.selection) r.score += slnr(j);
    return r;
}

double min_candidate_distance(const ComplexMatrix& h, const Constellation& c)
{
    const ComplexMatrix u = sm_candidates(h, c, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < u.cols(); ++a)
        for (Eigen::Index b = a + 1; b < u.cols(); ++b) best = std::min(best, (u.col(a) - u.col(b)).squaredNorm());
    return best;
}

TasResult tas_edas(const Scenario& s, const Constellation& c, EdasMode mode, int n_t, long long subset_cap)
{
    check_budget(s.n_a(), n_t, subset_cap);
    TasResult best;
    best.strategy = TasStrategy::edas;
    best.score = -std::numeric_limits<double>::infinity();
    for (const auto& subset : enumerate_subsets(s.n_a(), n_t)) {
        double score = min_candidate_distance(columns(s.hb, subset), c);
        if (mode == EdasMode::secure_ratio) {
            const double de = min_candidate_distance(columns(s.he, subset), c);
            score = de > 0 ? score / de : std::numeric_limits<double>::infinity();
        }
        if (score > best.score) {
            best.score = score;
            best.selection = subset;
        }
    }
    return best;
}

} // namespace ssm
