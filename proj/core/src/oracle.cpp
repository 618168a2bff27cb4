#include <algorithm>
#include <limits>

#include "compest/error.hpp"
#include "compest/evaluation.hpp"

namespace compest {

OracleResult exact_linear_oracle(const Eigen::MatrixXd& realizations, const Eigen::VectorXd& truth) {
  OracleResult out;
  const Eigen::Index r = realizations.rows();
  if (r == 0) throw DomainError("oracle needs at least one realization");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(realizations, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double tol = static_cast<double>(std::max(realizations.rows(), realizations.cols())) *
                     std::numeric_limits<double>::epsilon() * smax;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) {
      inv(i) = 1.0 / s(i);
      ++out.rank;
    }
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(r);
  out.combination = svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().transpose() * ones));
  out.residual = (realizations * out.combination - ones).cwiseAbs().maxCoeff();
  out.exact = out.residual <= 1e-8;
  out.weights = truth * out.combination.transpose();
  return out;
}

}  // namespace compest
