#include <doctest.h>
#include <map>
#include <ssm/linalg.hpp>
#include <ssm/rng.hpp>

using namespace ssm;

TEST_CASE("null space basis annihilates random wide matrices")
{
    RngStream rng(11, 0);
    double worst = 0.0, worst_orth = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int cols = 2 + static_cast<int>(rng.uniform_index(7));
        const int rows = 1 + static_cast<int>(rng.uniform_index(cols - 1));
        const ComplexMatrix a = sample_cn_matrix(rng, rows, cols);
        const ComplexMatrix t = null_space_basis(a);
        REQUIRE(t.rows() == cols);
        REQUIRE(t.cols() == cols - rows);
        worst = std::max(worst, (a * t).cwiseAbs().maxCoeff());
        const ComplexMatrix gram = t.adjoint() * t;
        worst_orth = std::max(worst_orth, (gram - ComplexMatrix::Identity(t.cols(), t.cols())).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
    CHECK(worst_orth <= 1e-10);
}

TEST_CASE("null space of a rank-deficient matrix is larger")
{
    RngStream rng(3, 1);
    ComplexMatrix a = sample_cn_matrix(rng, 3, 5);
    a.row(2) = a.row(0) * cdouble(2.0, -1.0);
    const ComplexMatrix t = null_space_basis(a);
    CHECK(t.cols() == 3);
    CHECK((a * t).norm() <= 1e-10);
}

TEST_CASE("null space of a 2x4 identity block")
{
    ComplexMatrix a = ComplexMatrix::Zero(2, 4);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    const ComplexMatrix t = null_space_basis(a);
    REQUIRE(t.cols() == 2);
    CHECK(t.topRows(2).norm() <= 1e-12);
    const ComplexMatrix p = t * t.adjoint();
    CHECK(std::abs(p(2, 2) - 1.0) <= 1e-12);
    CHECK(std::abs(p(3, 3) - 1.0) <= 1e-12);
}

TEST_CASE("full column rank has no null space")
{
    RngStream rng(5, 0);
    CHECK_THROWS_AS(null_space_basis(sample_cn_matrix(rng, 3, 3)), DegenerateRankError);
    CHECK_THROWS_AS(null_space_basis(sample_cn_matrix(rng, 4, 2)), DegenerateRankError);
    CHECK_THROWS_AS(null_space_basis(sample_cn_matrix(rng, 2, 3), -1.0), InvalidArgumentError);
}

TEST_CASE("null space works in single precision")
{
    Eigen::MatrixXcf a = Eigen::MatrixXcf::Random(2, 4);
    const Eigen::MatrixXcf t = null_space_basis(a, 1e-5f);
    CHECK(t.cols() == 2);
    CHECK((a * t).norm() <= 1e-5f);
}

TEST_CASE("whitener round trip")
{
    RngStream rng(17, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(6));
        const ComplexMatrix g = sample_cn_matrix(rng, n, n + 2);
        const ComplexMatrix k = g * g.adjoint() + 0.1 * ComplexMatrix::Identity(n, n);
        const ComplexMatrix w = cholesky_whitener(k);
        worst = std::max(worst, (w * k * w.adjoint() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("whitener of a scaled identity")
{
    const ComplexMatrix w = cholesky_whitener(ComplexMatrix(4.0 * ComplexMatrix::Identity(3, 3)));
    CHECK((w - 0.5 * ComplexMatrix::Identity(3, 3)).norm() <= 1e-15);
}

TEST_CASE("whitener rejects bad input")
{
    ComplexMatrix k = ComplexMatrix::Identity(2, 2);
    k(1, 1) = -1.0;
    CHECK_THROWS_AS(cholesky_whitener(k), NotPositiveDefiniteError);
    CHECK_THROWS_AS(cholesky_whitener(ComplexMatrix(ComplexMatrix::Zero(2, 2))), NotPositiveDefiniteError);
    CHECK_THROWS_AS(cholesky_whitener(ComplexMatrix(ComplexMatrix::Identity(2, 3))), DimensionMismatchError);
}

TEST_CASE("rng streams are reproducible and distinct")
{
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a();
        CHECK(va == b());
        differs |= va != c();
    }
    CHECK(differs);

    RngStream p(9, 0);
    const RngStream child = p.split(3);
    p();
    CHECK(p.split(3)() == RngStream(child)());
    CHECK(p.split(3)() != p.split(4)());
}

TEST_CASE("uniform and uniform_index ranges")
{
    RngStream rng(1, 2);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < 60000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        ++counts[rng.uniform_index(6)];
    }
    REQUIRE(counts.size() == 6);
    for (const auto& [k, n] : counts) CHECK(std::abs(n / 60000.0 - 1.0 / 6) < 0.01);
}

TEST_CASE("complex normal moments")
{
    RngStream rng(8, 8);
    const int n = 400000;
    const double var = 2.5;
    const ComplexVector z = sample_cn(rng, n, var);
    const cdouble mean = z.mean();
    double power = 0, re2 = 0, im2 = 0;
    cdouble pseudo = 0;
    for (int i = 0; i < n; ++i) {
        power += std::norm(z(i));
        re2 += z(i).real() * z(i).real();
        im2 += z(i).imag() * z(i).imag();
        pseudo += z(i) * z(i);
    }
    CHECK(std::abs(mean) < 0.01);
    CHECK(power / n == doctest::Approx(var).epsilon(0.01));
    CHECK(re2 / n == doctest::Approx(var / 2).epsilon(0.01));
    CHECK(im2 / n == doctest::Approx(var / 2).epsilon(0.01));
    CHECK(std::abs(pseudo / double(n)) < 0.02 * var);
}

TEST_CASE("null space of a 2x3 identity block is e3")
{
    ComplexMatrix a = ComplexMatrix::Zero(2, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    const ComplexMatrix t = null_space_basis(a);
    REQUIRE(t.cols() == 1);
    CHECK(std::abs(std::abs(t(2, 0)) - 1.0) <= 1e-12);
    CHECK(std::abs(t(0, 0)) + std::abs(t(1, 0)) <= 1e-12);
}

TEST_CASE("duplicated row of a 2x4 leaves nullity 3")
{
    RngStream rng(21, 0);
    ComplexMatrix a = sample_cn_matrix(rng, 2, 4);
    a.row(1) = a.row(0);
    CHECK(null_space_basis(a).cols() == 3);
}

TEST_CASE("identity whitens to identity; rank-one update round trip")
{
    const ComplexMatrix w = cholesky_whitener(ComplexMatrix(ComplexMatrix::Identity(3, 3)));
    CHECK((w - ComplexMatrix::Identity(3, 3)).norm() <= 1e-15);

    RngStream rng(4, 4);
    const ComplexVector v = sample_cn(rng, 4, 1.0);
    const ComplexMatrix k = 0.3 * ComplexMatrix::Identity(4, 4) + 2.0 * v * v.adjoint();
    const ComplexMatrix wk = cholesky_whitener(k);
    CHECK((wk * k * wk.adjoint() - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("sample_cn: unit variance over a million draws, determinism")
{
    RngStream a(77, 1), b(77, 1);
    const ComplexVector x = sample_cn(a, 1000000, 1.0);
    const double p = x.squaredNorm() / 1e6;
    CHECK(p >= 0.995);
    CHECK(p <= 1.005);
    const ComplexVector y = sample_cn(b, 1000000, 1.0);
    CHECK(x == y);
}
