#include "compest/arrays.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "compest/error.hpp"

namespace compest {

std::size_t dims_product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

std::size_t flat_position(std::span<const std::size_t> dims, std::span<const std::size_t> index) {
  if (index.size() != dims.size()) {
    throw ShapeError("index has " + std::to_string(index.size()) + " components, array has " +
                     std::to_string(dims.size()) + " axes");
  }
  std::size_t pos = 0;
  std::size_t stride = 1;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    if (index[l] < 1 || index[l] > dims[l]) {
      throw ShapeError("index component " + std::to_string(l + 1) + " = " + std::to_string(index[l]) +
                       " outside 1.." + std::to_string(dims[l]));
    }
    pos += (index[l] - 1) * stride;
    stride *= dims[l];
  }
  return pos + 1;
}

std::size_t flat_position(std::span<const std::size_t> dims, std::initializer_list<std::size_t> index) {
  return flat_position(dims, std::span<const std::size_t>(index.begin(), index.size()));
}

std::vector<std::size_t> multi_index(std::span<const std::size_t> dims, std::size_t position) {
  if (position < 1 || position > dims_product(dims)) {
    throw ShapeError("flat position " + std::to_string(position) + " out of range");
  }
  std::vector<std::size_t> index(dims.size());
  std::size_t rest = position - 1;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    index[l] = rest % dims[l] + 1;
    rest /= dims[l];
  }
  return index;
}

LabeledArray::LabeledArray(Dims dims) : dims_(std::move(dims)), data_(dims_product(dims_), 0.0) {}

LabeledArray::LabeledArray(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.size() != dims_product(dims_)) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match product of axis sizes " + std::to_string(dims_product(dims_)));
  }
}

double LabeledArray::operator()(std::initializer_list<std::size_t> index) const {
  return data_[flat_position(dims_, index) - 1];
}

double& LabeledArray::operator()(std::initializer_list<std::size_t> index) {
  return data_[flat_position(dims_, index) - 1];
}

std::vector<double> flatten(const LabeledArray& a) {
  return {a.data().begin(), a.data().end()};
}

LabeledArray unflatten(Dims dims, std::span<const double> values) {
  return LabeledArray(std::move(dims), std::vector<double>(values.begin(), values.end()));
}

ArrayMatrix::ArrayMatrix(Dims row_dims, Dims col_dims)
    : row_dims_(std::move(row_dims)),
      col_dims_(std::move(col_dims)),
      m_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dims_product(row_dims_)),
                               static_cast<Eigen::Index>(dims_product(col_dims_)))) {}

ArrayMatrix::ArrayMatrix(Dims row_dims, Dims col_dims, Eigen::MatrixXd matrix)
    : row_dims_(std::move(row_dims)), col_dims_(std::move(col_dims)), m_(std::move(matrix)) {
  if (static_cast<std::size_t>(m_.rows()) != dims_product(row_dims_) ||
      static_cast<std::size_t>(m_.cols()) != dims_product(col_dims_)) {
    throw ShapeError("matrix is " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                     ", labels require " + std::to_string(dims_product(row_dims_)) + "x" +
                     std::to_string(dims_product(col_dims_)));
  }
}

double ArrayMatrix::operator()(std::initializer_list<std::size_t> row,
                               std::initializer_list<std::size_t> col) const {
  return m_(static_cast<Eigen::Index>(flat_position(row_dims_, row) - 1),
            static_cast<Eigen::Index>(flat_position(col_dims_, col) - 1));
}

double& ArrayMatrix::operator()(std::initializer_list<std::size_t> row,
                                std::initializer_list<std::size_t> col) {
  return m_(static_cast<Eigen::Index>(flat_position(row_dims_, row) - 1),
            static_cast<Eigen::Index>(flat_position(col_dims_, col) - 1));
}

Eigen::VectorXd ArrayMatrix::apply(std::span<const double> v) const {
  if (static_cast<Eigen::Index>(v.size()) != m_.cols()) {
    throw ShapeError("vector of length " + std::to_string(v.size()) + " applied to matrix with " +
                     std::to_string(m_.cols()) + " columns");
  }
  return m_ * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ArrayMatrix array_mult(const ArrayMatrix& a, const ArrayMatrix& b) {
  if (a.col_dims() != b.row_dims()) {
    throw ShapeError("array_mult: column axes of the left operand differ from row axes of the right");
  }
  return ArrayMatrix(a.row_dims(), b.col_dims(), a.matrix() * b.matrix());
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_cutoff) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (smax > 0.0 && s(i) > rel_cutoff * smax) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd symmetric_pseudo_inverse(const Eigen::MatrixXd& m, double rel_cutoff) {
  if (m.rows() != m.cols()) throw ShapeError("symmetric_pseudo_inverse: matrix is not square");
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (emax > 0.0 && std::abs(ev(i)) > rel_cutoff * emax) inv(i) = 1.0 / ev(i);
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  return v * inv.asDiagonal() * v.transpose();
}

ArrayMatrix pseudo_inverse(const ArrayMatrix& m, double rel_cutoff) {
  return ArrayMatrix(m.col_dims(), m.row_dims(), pseudo_inverse(m.matrix(), rel_cutoff));
}

}  // namespace compest
