#include <cmath>
#include <ssm/errors.hpp>
#include <ssm/sm_link.hpp>

namespace ssm {

int sm_bits_per_symbol(int n_t, const Constellation& c)
{
    const int a = ilog2_exact(n_t);
    require(a >= 0, "N_t must be a power of two");
    return a + c.bits_per_symbol();
}

SmSymbol map_bits(const BitWord& bits, int n_t, const Constellation& c)
{
    const int width = sm_bits_per_symbol(n_t, c);
    if (static_cast<int>(bits.size()) != width) {
        throw InvalidArgumentError("SM word needs " + std::to_string(width) + " bits, got "
                                   + std::to_string(bits.size()));
    }
    const int a = ilog2_exact(n_t);
    SmSymbol s;
    s.antenna = static_cast<int>(read_bits(bits, 0, a));
    s.point_index = static_cast<int>(read_bits(bits, a, c.bits_per_symbol()));
    s.bits = bits;
    return s;
}

BitWord unmap_bits(int antenna, int point_index, int n_t, const Constellation& c)
{
    const int a = ilog2_exact(n_t);
    require(a >= 0, "N_t must be a power of two");
    require(antenna >= 0 && antenna < n_t, "antenna index out of range");
    require(point_index >= 0 && point_index < c.order(), "point index out of range");
    BitWord out;
    out.reserve(a + c.bits_per_symbol());
    append_bits(out, static_cast<unsigned>(antenna), a);
    append_bits(out, static_cast<unsigned>(point_index), c.bits_per_symbol());
    return out;
}

ComplexVector transmit_vector(const SelectedScenario& ss, const SmSymbol& sym, const Constellation& c,
                              const PaSplit& pa, RngStream& rng)
{
    require(pa.beta >= 0 && pa.beta <= 1, "beta must lie in [0, 1]");
    require(sym.antenna >= 0 && sym.antenna < ss.n_t(), "antenna index out of range");
    ComplexVector t = ComplexVector::Zero(ss.n_t());
    t(sym.antenna) = std::sqrt(pa.beta * pa.power) * c.point(sym.point_index);
    if (pa.beta < 1.0 && ss.an_dim() > 0) {
        const ComplexVector z = sample_cn(rng, ss.an_dim(), 1.0 / ss.an_dim());
        t += std::sqrt((1.0 - pa.beta) * pa.power) * (ss.an_basis * z);
    }
    return t;
}

} // namespace ssm
