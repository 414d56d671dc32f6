#include "usde/linalg.hpp"

#include <cmath>
#include <sstream>

#include "usde/errors.hpp"

namespace usde {

Mat guarded_inverse(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NumericError("guarded_inverse: matrix must be square and non-empty");
  }
  Eigen::PartialPivLU<Mat> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond * kMaxConditionNumber >= 1.0) || !std::isfinite(rcond)) {
    std::ostringstream os;
    os << "singular or ill-conditioned matrix (rcond=" << rcond << ")";
    throw NumericError(os.str());
  }
  return lu.inverse();
}

Mat inverse_transpose(const Mat& m) { return guarded_inverse(m).transpose(); }

}  // namespace usde
