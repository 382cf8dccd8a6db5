#include <doctest.h>
#include <Eigen/LU>
#include <numbers>
#include <ssm/errors.hpp>
#include <ssm/linalg.hpp>
#include <ssm/secrecy.hpp>

using namespace ssm;

TEST_CASE("single candidate carries no information")
{
    RngStream rng(1, 0);
    const MiEstimate mi = mi_finite_alphabet(sample_cn_matrix(rng, 2, 1), 100, rng);
    CHECK(mi.value == 0.0);
    CHECK(mi.std_error == 0.0);
}

TEST_CASE("duplicate candidates are indistinguishable")
{
    ComplexMatrix u(2, 2);
    u.col(0) << cdouble(0.3, -1.0), cdouble(2.0, 0.5);
    u.col(1) = u.col(0);
    const MiEstimate mi = mi_finite_alphabet(u, 500, RngStream(2, 0));
    CHECK(std::abs(mi.value) <= 3 * mi.std_error + 1e-12);
}

TEST_CASE("well separated candidates saturate at log2 N")
{
    ComplexMatrix u = ComplexMatrix::Zero(1, 8);
    for (int i = 0; i < 8; ++i) u(0, i) = std::polar(1000.0, 2 * std::numbers::pi * i / 8);
    const MiEstimate mi = mi_finite_alphabet(u, 500, RngStream(3, 0));
    CHECK(mi.value == doctest::Approx(3.0).epsilon(0.01 / 3));
}

TEST_CASE("MI stays within [0, log2 N]")
{
    RngStream rng(4, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(15));
        const double scale = std::pow(10.0, rng.uniform() * 3 - 1.5);
        const ComplexMatrix u = scale * sample_cn_matrix(rng, 2, n);
        const MiEstimate mi = mi_finite_alphabet(u, 200, rng.split(trial));
        CHECK(mi.value <= std::log2(n) + 1e-12);
        CHECK(mi.value >= -3 * mi.std_error);
    }
}

TEST_CASE("BPSK MI matches numerical integration")
{
    // Real +-a in complex noise of unit variance: only the real part is
    // informative, with noise variance 1/2 per dimension.
    const double a = 1.0;
    const double s2 = 0.5;
    double integral = 0.0;
    const double step = 1e-3;
    for (double y = -12.0; y <= 12.0; y += step) {
        const double p = std::exp(-(y - a) * (y - a) / (2 * s2)) / std::sqrt(2 * std::numbers::pi * s2);
        integral += p * std::log2(1.0 + std::exp(-2.0 * a * y / s2)) * step;
    }
    const double exact = 1.0 - integral;

    ComplexMatrix u(1, 2);
    u << cdouble(a, 0.0), cdouble(-a, 0.0);
    const MiEstimate mi = mi_finite_alphabet(u, 200000, RngStream(5, 0));
    CHECK(std::abs(mi.value - exact) <= 4 * mi.std_error);
    CHECK(mi.std_error < 2e-3);
}

TEST_CASE("pre-drawn noise reproduces the stream overload")
{
    RngStream rng(6, 0);
    const ComplexMatrix u = sample_cn_matrix(rng, 3, 12);
    const RngStream noise_rng(6, 1);
    const MiEstimate a = mi_finite_alphabet(u, 300, noise_rng);
    const MiEstimate b = mi_finite_alphabet(u, draw_mi_noise(noise_rng, 3, 12, 300), 300);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK_THROWS_AS(mi_finite_alphabet(u, draw_mi_noise(noise_rng, 3, 12, 299), 300), DimensionMismatchError);
}

namespace {

SelectedScenario random_selected(std::uint64_t seed, double snr_db, int n_a = 4)
{
    RngStream rng(seed, 0);
    return select_all(gen_scenario(rng, n_a, 2, 2, snr_db, 1.0));
}

} // namespace

TEST_CASE("whitened Eve MI equals a direct colored-noise evaluation")
{
    const SelectedScenario ss = random_selected(7, 10.0);
    const auto c = parse_constellation("qpsk");
    const PaSplit pa{0.4, 1.0};
    const int k_samples = 200;
    const RngStream rng(7, 9);
    const MiNoise noise = draw_sr_noise(rng, 2, 2, 16, k_samples);
    const SrEstimate sr = secrecy_rate(ss, pa, c, noise);

    // Direct form: n = L w ~ CN(0, K), metric (v + n)^H K^{-1} (v + n) - n^H K^{-1} n.
    const ComplexMatrix k = eve_noise_covariance(ss, pa);
    const ComplexMatrix l = k.llt().matrixL();
    const ComplexMatrix k_inv = k.inverse();
    const ComplexMatrix v = sm_candidates(ss.he_s, c, std::sqrt(pa.beta * pa.power));
    double sum = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int kk = 0; kk < k_samples; ++kk) {
            const ComplexVector n = l * noise.w.col(i * k_samples + kk).head(2);
            const double base = (n.adjoint() * k_inv * n)(0, 0).real();
            double acc = 0.0;
            for (int j = 0; j < 16; ++j) {
                const ComplexVector d = v.col(i) - v.col(j) + n;
                acc += std::exp(-(d.adjoint() * k_inv * d)(0, 0).real() + base);
            }
            sum += std::log2(acc);
        }
    const double direct = 4.0 - sum / (16.0 * k_samples);
    CHECK(sr.mi_eve.value == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("stream and pre-drawn secrecy rates agree")
{
    const SelectedScenario ss = random_selected(8, 15.0);
    const auto c = parse_constellation("qpsk");
    const RngStream rng(8, 3);
    const SrEstimate a = secrecy_rate(ss, {0.3, 1.0}, c, 100, rng);
    const SrEstimate b = secrecy_rate(ss, {0.3, 1.0}, c, draw_sr_noise(rng, 2, 2, 16, 100));
    CHECK(a.sr == b.sr);
    CHECK(a.mi_eve.value == b.mi_eve.value);
}

TEST_CASE("Eve with Bob's channel has no secrecy")
{
    RngStream rng(9, 0);
    Scenario s = gen_scenario(rng, 4, 2, 2, 10.0, 1.0);
    s.he = s.hb;
    const SrEstimate sr = secrecy_rate(select_all(s), {1.0, 1.0}, parse_constellation("qpsk"), 500, RngStream(9, 1));
    const double se = std::hypot(sr.mi_bob.std_error, sr.mi_eve.std_error);
    CHECK(sr.sr <= 3 * se);
}

TEST_CASE("vanishing SNR gives vanishing secrecy")
{
    const SelectedScenario ss = random_selected(10, -40.0);
    const SrEstimate sr = secrecy_rate(ss, {0.5, 1.0}, parse_constellation("qpsk"), 300, RngStream(10, 1));
    CHECK(sr.sr < 1e-3);
    CHECK(sr.mi_bob.value < 1e-2);
}

TEST_CASE("small beta wins at high SNR")
{
    const auto c = parse_constellation("qpsk");
    double low = 0.0, mid = 0.0;
    for (std::uint64_t d = 0; d < 10; ++d) {
        const SelectedScenario ss = random_selected(100 + d, 30.0);
        const RngStream rng(11, d);
        low += secrecy_rate(ss, {0.1, 1.0}, c, 300, rng).sr;
        mid += secrecy_rate(ss, {0.5, 1.0}, c, 300, rng).sr;
    }
    CHECK(low > mid);
}

TEST_CASE("Eve covariance")
{
    const SelectedScenario ss = random_selected(12, 5.0);
    const ComplexMatrix k1 = eve_noise_covariance(ss, {1.0, 1.0});
    CHECK((k1 - ss.base.sigma2 * ComplexMatrix::Identity(2, 2)).norm() == 0.0);
    const ComplexMatrix k = eve_noise_covariance(ss, {0.25, 1.0});
    const ComplexMatrix g = ss.he_s * ss.an_basis;
    const ComplexMatrix expect = ss.base.sigma2 * ComplexMatrix::Identity(2, 2) + 0.75 / 2 * g * g.adjoint();
    CHECK((k - expect).norm() <= 1e-12);
    CHECK((k - k.adjoint()).norm() <= 1e-14);
}

TEST_CASE("candidate layout")
{
    RngStream rng(13, 0);
    const ComplexMatrix h = sample_cn_matrix(rng, 2, 4);
    const auto c = parse_constellation("16qam");
    const ComplexMatrix u = sm_candidates(h, c, 2.0);
    CHECK(u.cols() == 64);
    CHECK((u.col(2 * 16 + 5) - 2.0 * c.point(5) * h.col(2)).norm() <= 1e-15);
}

TEST_CASE("SLNR by hand")
{
    RngStream rng(14, 0);
    const Scenario s = gen_scenario(rng, 5, 2, 3, 7.0, 2.0);
    const ComplexMatrix t = null_space_basis(s.hb);
    const double beta = 0.6;
    const RealVector slnr = slnr_per_antenna(s, {beta, 2.0}, t);

    double hb0 = 0, he0 = 0, leak = 0;
    for (int r = 0; r < 2; ++r) hb0 += std::norm(s.hb(r, 0));
    for (int r = 0; r < 3; ++r) he0 += std::norm(s.he(r, 0));
    const ComplexMatrix g = s.he * t;
    for (int r = 0; r < g.rows(); ++r)
        for (int q = 0; q < g.cols(); ++q) leak += std::norm(g(r, q));
    const double expect = beta * 2.0 * hb0 / (beta * 2.0 * he0 + (1 - beta) * 2.0 / 3.0 * leak + 2 * s.sigma2);
    CHECK(std::abs(slnr(0) - expect) <= 1e-12 * expect);
}

TEST_CASE("SLNR leakage-free limit and scale invariance")
{
    RngStream rng(15, 0);
    Scenario s = gen_scenario(rng, 6, 2, 2, 3.0, 1.5);
    s.he.setZero();
    const RealVector slnr = slnr_per_antenna(s, {1.0, 1.5}, ComplexMatrix(6, 0));
    for (int j = 0; j < 6; ++j)
        CHECK(slnr(j) == doctest::Approx(1.5 * s.hb.col(j).squaredNorm() / (2 * s.sigma2)));

    RngStream rng2(16, 0);
    Scenario a = gen_scenario(rng2, 6, 2, 2, 3.0, 1.0);
    Scenario b = a;
    b.hb *= cdouble(0.0, 3.0);
    const RealVector ra = slnr_per_antenna(a, {1.0, 1.0}, ComplexMatrix(6, 0));
    const RealVector rb = slnr_per_antenna(b, {1.0, 1.0}, ComplexMatrix(6, 0));
    Eigen::Index ia, ib;
    ra.maxCoeff(&ia);
    rb.maxCoeff(&ib);
    CHECK(ia == ib);
    CHECK((rb - 9.0 * ra).norm() <= 1e-10 * rb.norm());
}
