#pragma once
#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <ssm/errors.hpp>
#include <ssm/types.hpp>

namespace ssm {

/// Orthonormal basis of the right null space of a (typically wide) matrix.
///
/// Computed from a column-pivoted Householder QR of A^H: range(A^H) is spanned
/// by the leading `rank` columns of Q, so the trailing columns span null(A).
/// A diagonal entry of R counts towards the rank when it exceeds
/// `rel_tol * ||A||_F`.
template <class Derived>
cmat_type<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
null_space_basis(const Eigen::MatrixBase<Derived>& a,
                 typename Eigen::NumTraits<typename Derived::Scalar>::Real rel_tol = 1e-10)
{
    using real_t = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    using mat_t = cmat_type<real_t>;
    require(rel_tol > 0, "null_space_basis: tolerance must be positive");

    const Eigen::Index cols = a.cols();
    const mat_t ah = a.adjoint().template cast<complex_type<real_t>>();
    Eigen::ColPivHouseholderQR<mat_t> qr(ah);

    const real_t threshold = rel_tol * a.norm();
    const auto& r = qr.matrixR();
    Eigen::Index rank = 0;
    const Eigen::Index diag = std::min(r.rows(), r.cols());
    for (Eigen::Index i = 0; i < diag; ++i) {
        if (std::abs(r(i, i)) > threshold) ++rank;
    }
    if (rank >= cols) {
        throw DegenerateRankError("matrix has full column rank " + std::to_string(rank)
                                  + "; no null space");
    }
    const mat_t q = qr.householderQ() * mat_t::Identity(cols, cols);
    return q.rightCols(cols - rank);
}

/// W = L^{-1} for the lower Cholesky factor of a Hermitian positive definite
/// matrix, so that W K W^H = I.
template <class Derived>
cmat_type<typename Eigen::NumTraits<typename Derived::Scalar>::Real>
cholesky_whitener(const Eigen::MatrixBase<Derived>& k)
{
    using real_t = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    using mat_t = cmat_type<real_t>;
    if (k.rows() != k.cols()) {
        throw DimensionMismatchError("cholesky_whitener: matrix must be square");
    }
    const mat_t km = k.template cast<complex_type<real_t>>();
    // LLT does not report every non-positive pivot, so check the factor too.
    Eigen::LLT<mat_t> llt(km);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError("leading minor is not positive");
    }
    const mat_t l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const real_t d = l(i, i).real();
        if (!(d > 0) || !std::isfinite(d)) {
            throw NotPositiveDefiniteError("leading minor " + std::to_string(i + 1)
                                           + " is not positive");
        }
    }
    return l.template triangularView<Eigen::Lower>().solve(
        mat_t::Identity(k.rows(), k.cols()));
}

} // namespace ssm
