#pragma once
#include <string>
#include <ssm/types.hpp>

namespace ssm {

enum class ConstellationKind
{
    square_qam,
    psk
};

struct DemapResult
{
    int index;
    cdouble point;
};

/// Unit-energy Gray-labelled constellation.
///
/// Labelling contract: the point index *is* the bit label read as an unsigned
/// integer, most significant bit first.
///
/// - Square QAM (M = 4, 16, 64, 256): with L = sqrt(M) levels per axis and
///   h = log2(L), the upper h bits select the in-phase level and the lower h
///   bits the quadrature level. Level i in {0..L-1} has amplitude 2i - L + 1
///   and carries the reflected Gray code i ^ (i >> 1). All points are scaled by
///   1 / sqrt(2(M-1)/3).
/// - PSK (M = 2, 4, 8, ...): ring position k sits at angle phi0 + 2 pi k / M
///   and carries label k ^ (k >> 1), with phi0 = pi/M for M >= 4 and 0 for
///   BPSK. QPSK therefore labels (1+j)/sqrt2, (-1+j)/sqrt2, (-1-j)/sqrt2,
///   (1-j)/sqrt2 as 00, 01, 11, 10.
class Constellation
{
public:
    static Constellation build(ConstellationKind kind, int order);

    ConstellationKind kind() const { return kind_; }
    int order() const { return order_; }
    int bits_per_symbol() const { return bits_; }
    const ComplexVector& points() const { return points_; }
    cdouble point(int index) const { return points_(index); }
    /// |x_m|^2 for every point.
    const RealVector& energies() const { return energies_; }

    /// Nearest point to g; ties resolve to the lowest index. Per-axis slicing
    /// for QAM, angular slicing for PSK.
    DemapResult demap_nearest(cdouble g) const;

    /// Exhaustive nearest-point search (reference path).
    DemapResult demap_exhaustive(cdouble g) const;

    std::string name() const;

private:
    Constellation() = default;

    int qam_axis_level(double v, int levels) const;

    ConstellationKind kind_{};
    int order_ = 0;
    int bits_ = 0;
    double scale_ = 1.0;
    ComplexVector points_;
    RealVector energies_;
};

/// Parses "qpsk", "bpsk", "8psk", "16qam", "qam16", ...
Constellation parse_constellation(const std::string& name);

int bits_to_point(const Constellation& c, const BitWord& bits);
BitWord point_to_bits(const Constellation& c, int index);

/// Appends `width` bits of `value`, MSB first.
void append_bits(BitWord& out, unsigned value, int width);
/// Reads `width` bits starting at `offset`, MSB first.
unsigned read_bits(const BitWord& bits, std::size_t offset, int width);

inline unsigned gray_encode(unsigned i) { return i ^ (i >> 1); }
unsigned gray_decode(unsigned g);

int ilog2_exact(long long n);

} // namespace ssm
