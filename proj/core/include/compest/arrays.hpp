#pragma once

// Labeled multi-dimensional arrays.
//
// Arrays are flattened with the first axis varying fastest: the element at the
// 1-based multi-index (i_1, ..., i_p) of an (a_1, ..., a_p)-sized array sits at
// position 1 + sum_l (i_l - 1) * prod_{l' < l} a_{l'}. A two-index array
// ((a_1..a_p), (b_1..b_q)) is the matrix whose rows are flattened row indices
// and whose columns are flattened column indices. All public indices are 1-based.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace compest {

using Dims = std::vector<std::size_t>;

std::size_t dims_product(std::span<const std::size_t> dims);

// 1-based position of a 1-based multi-index.
std::size_t flat_position(std::span<const std::size_t> dims, std::span<const std::size_t> index);
std::size_t flat_position(std::span<const std::size_t> dims, std::initializer_list<std::size_t> index);

// Inverse of flat_position.
std::vector<std::size_t> multi_index(std::span<const std::size_t> dims, std::size_t position);

class LabeledArray {
 public:
  LabeledArray() = default;
  explicit LabeledArray(Dims dims);
  LabeledArray(Dims dims, std::vector<double> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::initializer_list<std::size_t> index) const;
  double& operator()(std::initializer_list<std::size_t> index);

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const LabeledArray&, const LabeledArray&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

std::vector<double> flatten(const LabeledArray& a);
LabeledArray unflatten(Dims dims, std::span<const double> values);

class ArrayMatrix {
 public:
  ArrayMatrix() = default;
  ArrayMatrix(Dims row_dims, Dims col_dims);
  ArrayMatrix(Dims row_dims, Dims col_dims, Eigen::MatrixXd matrix);

  const Dims& row_dims() const noexcept { return row_dims_; }
  const Dims& col_dims() const noexcept { return col_dims_; }

  double operator()(std::initializer_list<std::size_t> row, std::initializer_list<std::size_t> col) const;
  double& operator()(std::initializer_list<std::size_t> row, std::initializer_list<std::size_t> col);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  Eigen::MatrixXd& matrix() noexcept { return m_; }

  Eigen::VectorXd apply(std::span<const double> v) const;

 private:
  Dims row_dims_;
  Dims col_dims_;
  Eigen::MatrixXd m_;
};

ArrayMatrix array_mult(const ArrayMatrix& a, const ArrayMatrix& b);

// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kPseudoInverseCutoff = 1e-12;

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_cutoff = kPseudoInverseCutoff);

// Same cutoff rule for symmetric input, through an eigendecomposition
// (singular values of a symmetric matrix are the absolute eigenvalues).
Eigen::MatrixXd symmetric_pseudo_inverse(const Eigen::MatrixXd& m,
                                         double rel_cutoff = kPseudoInverseCutoff);

ArrayMatrix pseudo_inverse(const ArrayMatrix& m, double rel_cutoff = kPseudoInverseCutoff);

}  // namespace compest
