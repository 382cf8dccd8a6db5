#pragma once
#include <string>
#include <ssm/secrecy.hpp>

namespace ssm {

enum class TasStrategy
{
    random,
    exhaustive_sr,
    max_slnr,
    edas
};

std::string to_string(TasStrategy s);
TasStrategy parse_tas_strategy(const std::string& name);

struct TasResult
{
    IndexList selection;
    double score = 0.0;
    TasStrategy strategy = TasStrategy::random;
};

enum class EdasMode
{
    desired,      ///< maximise d_min over Bob's channel
    secure_ratio  ///< maximise d_min(Bob) / d_min(Eve)
};

inline constexpr long long default_sr_subset_cap = 1000;
inline constexpr long long default_edas_subset_cap = 10000;

long long binomial(int n, int k);

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<IndexList> enumerate_subsets(int n, int k);

/// Uniform over the C(N_a, N_t) subsets; returned in ascending order.
TasResult tas_random(RngStream& rng, int n_a, int n_t);

/// Subset with the largest Monte Carlo secrecy rate. Every subset is scored
/// with the same noise stream; the first subset in lexicographic order wins
/// ties.
TasResult tas_exhaustive_sr(const Scenario& s, const PaSplit& pa, const Constellation& c, int noise_samples,
                            const RngStream& rng, int n_t, long long subset_cap = default_sr_subset_cap);

/// Top-N_t antennas by SLNR (descending, ties to the lower index). The SLNR
/// uses the AN basis of the full desired channel.
TasResult tas_max_slnr(const Scenario& s, const PaSplit& pa, int n_t);

/// Minimum squared distance between distinct received candidates H e_j x_m.
double min_candidate_distance(const ComplexMatrix& h, const Constellation& c);

TasResult tas_edas(const Scenario& s, const Constellation& c, EdasMode mode, int n_t,
                   long long subset_cap = default_edas_subset_cap);

} // namespace ssm
