#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <ssm/constellation.hpp>
#include <ssm/errors.hpp>

namespace ssm {

int ilog2_exact(long long n)
{
    if (n <= 0 || (n & (n - 1)) != 0) return -1;
    int k = 0;
    while ((1ll << k) < n) ++k;
    return k;
}

unsigned gray_decode(unsigned g)
{
    unsigned i = g;
    for (unsigned s = g >> 1; s != 0; s >>= 1) i ^= s;
    return i;
}

void append_bits(BitWord& out, unsigned value, int width)
{
    for (int b = width - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((value >> b) & 1u));
}

unsigned read_bits(const BitWord& bits, std::size_t offset, int width)
{
    unsigned v = 0;
    for (int b = 0; b < width; ++b) v = (v << 1) | (bits[offset + b] & 1u);
    return v;
}

namespace {

double psk_offset(int order) { return order == 2 ? 0.0 : std::numbers::pi / order; }

} // namespace

Constellation Constellation::build(ConstellationKind kind, int order)
{
    const int bits = ilog2_exact(order);
    Constellation c;
    c.kind_ = kind;
    c.order_ = order;
    c.bits_ = bits;
    c.points_.resize(order);

    if (kind == ConstellationKind::square_qam) {
        if (bits < 2 || bits % 2 != 0 || order > 256) {
            throw InvalidArgumentError("square QAM needs M in {4, 16, 64, 256}, got "
                                       + std::to_string(order));
        }
        const int levels = 1 << (bits / 2);
        c.scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
        for (int m = 0; m < order; ++m) {
            const int i_re = static_cast<int>(gray_decode(static_cast<unsigned>(m) >> (bits / 2)));
            const int i_im = static_cast<int>(gray_decode(static_cast<unsigned>(m) & (levels - 1)));
            c.points_(m) = cdouble(2 * i_re - levels + 1, 2 * i_im - levels + 1) * c.scale_;
        }
    } else {
        if (bits < 1) {
            throw InvalidArgumentError("PSK needs M a power of two >= 2, got " + std::to_string(order));
        }
        const double phi0 = psk_offset(order);
        for (int k = 0; k < order; ++k) {
            const double a = phi0 + 2.0 * std::numbers::pi * k / order;
            c.points_(gray_encode(static_cast<unsigned>(k))) = std::polar(1.0, a);
        }
    }
    c.energies_ = c.points_.cwiseAbs2();
    return c;
}

int Constellation::qam_axis_level(double v, int levels) const
{
    const double f = (v / scale_ + levels - 1) / 2.0;
    if (f <= 0) return 0;
    if (f >= levels - 1) return levels - 1;
    const double lo = std::floor(f);
    const int lo_i = static_cast<int>(lo);
    const double frac = f - lo;
    if (frac < 0.5) return lo_i;
    if (frac > 0.5) return lo_i + 1;
    // Exactly on the boundary: the smaller Gray label gives the lower index.
    return gray_encode(lo_i) < gray_encode(lo_i + 1) ? lo_i : lo_i + 1;
}

DemapResult Constellation::demap_nearest(cdouble g) const
{
    int index;
    if (kind_ == ConstellationKind::square_qam) {
        const int half = bits_ / 2;
        const int levels = 1 << half;
        const unsigned w_re = gray_encode(qam_axis_level(g.real(), levels));
        const unsigned w_im = gray_encode(qam_axis_level(g.imag(), levels));
        index = static_cast<int>((w_re << half) | w_im);
    } else {
        if (g == cdouble(0.0, 0.0)) {
            index = 0;
        } else {
            const double pos = (std::arg(g) - psk_offset(order_)) * order_ / (2.0 * std::numbers::pi);
            const double lo = std::floor(pos);
            const double frac = pos - lo;
            auto wrap = [this](long long k) {
                return static_cast<unsigned>(((k % order_) + order_) % order_);
            };
            const unsigned k_lo = wrap(static_cast<long long>(lo));
            const unsigned k_hi = wrap(static_cast<long long>(lo) + 1);
            unsigned k;
            if (frac < 0.5) k = k_lo;
            else if (frac > 0.5) k = k_hi;
            else k = gray_encode(k_lo) < gray_encode(k_hi) ? k_lo : k_hi;
            index = static_cast<int>(gray_encode(k));
        }
    }
    return {index, points_(index)};
}

DemapResult Constellation::demap_exhaustive(cdouble g) const
{
    int best = 0;
    double best_d = std::norm(g - points_(0));
    for (int m = 1; m < order_; ++m) {
        const double d = std::norm(g - points_(m));
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return {best, points_(best)};
}

std::string Constellation::name() const
{
    if (kind_ == ConstellationKind::square_qam) return std::to_string(order_) + "qam";
    if (order_ == 2) return "bpsk";
    if (order_ == 4) return "qpsk";
    return std::to_string(order_) + "psk";
}

Constellation parse_constellation(const std::string& name)
{
    std::string s;
    for (char ch : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (s == "bpsk") return Constellation::build(ConstellationKind::psk, 2);
    if (s == "qpsk") return Constellation::build(ConstellationKind::psk, 4);
    auto number = [&](const std::string& digits) {
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            throw InvalidArgumentError("unknown constellation '" + name + "'");
        }
        return std::stoi(digits);
    };
    auto ends_with = [&](const std::string& suffix) {
        return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("qam")) return Constellation::build(ConstellationKind::square_qam, number(s.substr(0, s.size() - 3)));
    if (ends_with("psk")) return Constellation::build(ConstellationKind::psk, number(s.substr(0, s.size() - 3)));
    if (s.rfind("qam", 0) == 0) return Constellation::build(ConstellationKind::square_qam, number(s.substr(3)));
    if (s.rfind("psk", 0) == 0) return Constellation::build(ConstellationKind::psk, number(s.substr(3)));
    throw InvalidArgumentError("unknown constellation '" + name + "'");
}

int bits_to_point(const Constellation& c, const BitWord& bits)
{
    if (static_cast<int>(bits.size()) != c.bits_per_symbol()) {
        throw InvalidArgumentError("bit width " + std::to_string(bits.size()) + " != log2 M = "
                                   + std::to_string(c.bits_per_symbol()));
    }
    return static_cast<int>(read_bits(bits, 0, c.bits_per_symbol()));
}

BitWord point_to_bits(const Constellation& c, int index)
{
    require(index >= 0 && index < c.order(), "point index out of range");
    BitWord out;
    out.reserve(c.bits_per_symbol());
    append_bits(out, static_cast<unsigned>(index), c.bits_per_symbol());
    return out;
}

} // namespace ssm
