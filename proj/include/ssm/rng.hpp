#pragma once
#include <cstdint>
#include <limits>
#include <ssm/types.hpp>

namespace ssm {

/// Counter-based random stream keyed by (seed, stream id).
///
/// The n-th output is a SplitMix64 finalisation of key + n * golden, so the
/// sequence depends only on the key and never on scheduling. Child streams
/// are derived with `split`, which hashes the parent key with the child id.
class RngStream
{
public:
    using result_type = std::uint64_t;

    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Independent child stream; does not advance this stream.
    RngStream split(std::uint64_t child) const;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on {0, ..., n-1}, unbiased.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal (Marsaglia polar method); the second variate of each pair is cached.
    double normal();

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cdouble complex_normal(double variance = 1.0);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// n i.i.d. CN(0, variance) entries.
ComplexVector sample_cn(RngStream& rng, Eigen::Index n, double variance);

/// rows x cols matrix of i.i.d. CN(0, variance) entries, filled row-major.
ComplexMatrix sample_cn_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                               double variance = 1.0);

} // namespace ssm
