#include <doctest.h>
#include <limits>
#include <ssm/detectors.hpp>
#include <ssm/errors.hpp>
#include <ssm/rng.hpp>
#include <ssm/sm_link.hpp>

using namespace ssm;

namespace {

// Direct ||y - h_j x_m||^2 search, lexicographic ties.
std::pair<int, int> brute_force(const ComplexVector& y, const ComplexMatrix& h, const Constellation& c)
{
    std::pair<int, int> best{0, 0};
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < h.cols(); ++j)
        for (int m = 0; m < c.order(); ++m) {
            const double d = (y - h.col(j) * c.point(m)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = {j, m};
            }
        }
    return best;
}

} // namespace

TEST_CASE("noiseless exact hit")
{
    const auto c = parse_constellation("16qam");
    RngStream rng(1, 0);
    const ComplexMatrix h = sample_cn_matrix(rng, 4, 4);
    const ComplexVector y = h.col(2) * c.point(7);
    for (auto det : {detect_joint_ml, detect_proposed, detect_suboptimal}) {
        const DetectionResult r = det(y, h, c);
        CHECK(r.antenna == 2);
        CHECK(r.point_index == 7);
        CHECK(r.bits == unmap_bits(2, 7, 4, c));
    }
    CHECK(std::abs(detect_proposed(y, h, c).metric) <= 1e-12);
}

TEST_CASE("CM counts match the closed forms")
{
    CHECK(cm_formula_joint_ml(4, 4, 16) == 176);
    CHECK(cm_formula_proposed(4, 4, 16) == 56);
    CHECK(cm_formula_suboptimal(4, 4, 16) == 52);
    CHECK(cm_formula_joint_ml(4, 4, 256) == 2336);
    CHECK(cm_formula_proposed(4, 4, 256) == 72);
    CHECK(cm_formula_suboptimal(4, 4, 256) == 292);

    RngStream rng(2, 0);
    for (int n_t : {2, 4, 8})
        for (int n_r : {2, 4})
            for (int m : {4, 16, 64, 256}) {
                const auto c = Constellation::build(ConstellationKind::square_qam, m);
                const ComplexMatrix h = sample_cn_matrix(rng, n_r, n_t);
                const ComplexVector y = sample_cn(rng, n_r, 1.0);
                CHECK(detect_joint_ml(y, h, c).cm_count == cm_formula_joint_ml(n_t, n_r, m));
                CHECK(detect_proposed(y, h, c).cm_count == cm_formula_proposed(n_t, n_r, m));
                CHECK(detect_suboptimal(y, h, c).cm_count == cm_formula_suboptimal(n_t, n_r, m));
            }
}

TEST_CASE("ML detectors agree with the brute-force oracle")
{
    RngStream rng(3, 0);
    int mismatches_ml = 0, mismatches_prop = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        const auto c = Constellation::build(i % 2 ? ConstellationKind::square_qam : ConstellationKind::psk,
                                            i % 2 ? 16 : 8);
        const double sigma2 = std::pow(10.0, -(i % 4) * 0.5);
        const ComplexMatrix h = sample_cn_matrix(rng, 4, 4);
        const int j = static_cast<int>(rng.uniform_index(4));
        const int m = static_cast<int>(rng.uniform_index(c.order()));
        const ComplexVector y = h.col(j) * c.point(m) + sample_cn(rng, 4, sigma2);
        const auto oracle = brute_force(y, h, c);
        const DetectionResult a = detect_joint_ml(y, h, c);
        const DetectionResult b = detect_proposed(y, h, c);
        mismatches_ml += std::pair{a.antenna, a.point_index} != oracle;
        mismatches_prop += std::pair{b.antenna, b.point_index} != oracle;
    }
    CHECK(mismatches_ml == 0);
    CHECK(mismatches_prop == 0);
}

TEST_CASE("metric is the residual energy of the decision")
{
    RngStream rng(4, 0);
    const auto c = parse_constellation("64qam");
    const ComplexMatrix h = sample_cn_matrix(rng, 2, 4);
    const ComplexVector y = sample_cn(rng, 2, 1.0);
    for (auto det : {detect_joint_ml, detect_proposed, detect_suboptimal}) {
        const DetectionResult r = det(y, h, c);
        CHECK(r.metric == doctest::Approx((y - h.col(r.antenna) * c.point(r.point_index)).squaredNorm()));
    }
}

TEST_CASE("suboptimal detector can pick the wrong antenna where ML does not")
{
    // Search low-SNR draws for a transmission from antenna 3 whose received
    // vector correlates best with another column.
    const auto c = parse_constellation("16qam");
    RngStream rng(5, 0);
    bool found = false;
    for (int i = 0; i < 100000 && !found; ++i) {
        const ComplexMatrix h = sample_cn_matrix(rng, 4, 4);
        const int m = static_cast<int>(rng.uniform_index(16));
        const ComplexVector y = h.col(3) * c.point(m) + sample_cn(rng, 4, 0.3);
        const DetectionResult sub = detect_suboptimal(y, h, c);
        const DetectionResult ml = detect_joint_ml(y, h, c);
        if (sub.antenna != 3 && ml.antenna == 3 && ml.point_index == m) {
            found = true;
            CHECK(detect_proposed(y, h, c).antenna == 3);
            CHECK(sub.metric > ml.metric);
        }
    }
    CHECK(found);
}

TEST_CASE("zero columns and size mismatch")
{
    const auto c = parse_constellation("qpsk");
    RngStream rng(6, 0);
    ComplexMatrix h = sample_cn_matrix(rng, 2, 4);
    h.col(1).setZero();
    const ComplexVector y = sample_cn(rng, 2, 1.0);
    CHECK_THROWS_AS(detect_proposed(y, h, c), ZeroColumnError);
    CHECK_THROWS_AS(detect_suboptimal(y, h, c), ZeroColumnError);
    CHECK_NOTHROW(detect_joint_ml(y, h, c));
    CHECK_THROWS_AS(detect_joint_ml(sample_cn(rng, 3, 1.0), h, c), DimensionMismatchError);
}
