#pragma once
#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <vector>

namespace ssm {

template <class Scalar_>
using complex_type = std::complex<Scalar_>;

template <class Scalar_, int Rows_ = Eigen::Dynamic, int Cols_ = Eigen::Dynamic>
using cmat_type = Eigen::Matrix<complex_type<Scalar_>, Rows_, Cols_>;

template <class Scalar_, int Rows_ = Eigen::Dynamic>
using cvec_type = Eigen::Matrix<complex_type<Scalar_>, Rows_, 1>;

template <class Scalar_, int Rows_ = Eigen::Dynamic>
using rvec_type = Eigen::Matrix<Scalar_, Rows_, 1>;

using cdouble = complex_type<double>;
using ComplexMatrix = cmat_type<double>;
using ComplexVector = cvec_type<double>;
using RealVector = rvec_type<double>;

/// Bits are stored one per byte, most significant first.
using BitWord = std::vector<std::uint8_t>;

using IndexList = std::vector<int>;

} // namespace ssm
