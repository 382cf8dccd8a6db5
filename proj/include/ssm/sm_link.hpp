#pragma once
#include <ssm/channel.hpp>
#include <ssm/constellation.hpp>

namespace ssm {

struct SmSymbol
{
    int antenna = 0;
    int point_index = 0;
    BitWord bits;
};

/// Fraction `beta` of the power budget carries the confidential message, the
/// rest is artificial noise.
struct PaSplit
{
    double beta = 1.0;
    double power = 1.0;
};

/// log2(N_t) + log2(M).
int sm_bits_per_symbol(int n_t, const Constellation& c);

/// Leading log2(N_t) bits pick the antenna (natural binary), the remaining
/// log2(M) bits the constellation label.
SmSymbol map_bits(const BitWord& bits, int n_t, const Constellation& c);
BitWord unmap_bits(int antenna, int point_index, int n_t, const Constellation& c);

/// t = sqrt(beta P) e_j x + sqrt((1 - beta) P) T z, z ~ CN(0, I / (N_t - N_b)).
ComplexVector transmit_vector(const SelectedScenario& ss, const SmSymbol& sym, const Constellation& c,
                              const PaSplit& pa, RngStream& rng);

} // namespace ssm
