#pragma once

#include <Eigen/Dense>

namespace usde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Matrices whose estimated condition number exceeds this are rejected.
inline constexpr double kMaxConditionNumber = 1e12;

// Inverse of a square matrix by partial-pivot LU. Throws NumericError when
// the reciprocal condition estimate is below 1/kMaxConditionNumber.
Mat guarded_inverse(const Mat& m);

// (mᵀ)⁻¹, computed as guarded_inverse(m)ᵀ.
Mat inverse_transpose(const Mat& m);

// A : B = Tr(A Bᵀ).
inline double frobenius_product(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

}  // namespace usde
