#include <cmath>
#include <ssm/errors.hpp>
#include <ssm/rng.hpp>

namespace ssm {
namespace {

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t a, std::uint64_t b)
{
    return mix64(mix64(a + golden) ^ (b * 0xD6E8FEB86659FD93ull + 0x632BE59BD9B4E019ull));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(derive_key(seed, stream))
{}

RngStream::result_type RngStream::operator()()
{
    ++counter_;
    return mix64(key_ + counter_ * golden);
}

RngStream RngStream::split(std::uint64_t child) const
{
    RngStream out(seed_, stream_);
    out.key_ = derive_key(key_, child);
    return out;
}

double RngStream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n)
{
    require(n > 0, "uniform_index: empty range");
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
        v = (*this)();
    } while (v >= limit);
    return v % n;
}

double RngStream::normal()
{
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * f;
    has_cached_ = true;
    return u * f;
}

cdouble RngStream::complex_normal(double variance)
{
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

ComplexVector sample_cn(RngStream& rng, Eigen::Index n, double variance)
{
    require(variance > 0, "sample_cn: variance must be positive");
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal(variance);
    return v;
}

ComplexMatrix sample_cn_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                               double variance)
{
    require(variance > 0, "sample_cn_matrix: variance must be positive");
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.complex_normal(variance);
    return m;
}

} // namespace ssm
