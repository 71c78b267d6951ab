#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace phoband {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;

using SparseReal = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using SparseCplx = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using VecC = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace phoband
