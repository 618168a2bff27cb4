#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

#include "compest/arrays.hpp"
#include "compest/design.hpp"
#include "compest/sample.hpp"

namespace compest {

// (M, 8, 3) month-in-sample estimates, stored flattened (m fastest, then g, then e).
class MisEstimates {
 public:
  explicit MisEstimates(int months) : months_(months), v_(Eigen::VectorXd::Zero(24 * months)) {}
  MisEstimates(int months, Eigen::VectorXd values);

  int months() const noexcept { return months_; }
  double operator()(int m, int g, int e) const { return v_(index(m, g, e)); }
  double& operator()(int m, int g, int e) { return v_(index(m, g, e)); }
  const Eigen::VectorXd& vec() const noexcept { return v_; }
  LabeledArray as_array() const;

  Eigen::Index index(int m, int g, int e) const {
    return (m - 1) + static_cast<Eigen::Index>(months_) * ((g - 1) + 8 * (e - 1));
  }

 private:
  int months_;
  Eigen::VectorXd v_;
};

// Flattened (M,3) totals vector <-> (M,3) matrix (column-major storage agrees).
Eigen::MatrixXd as_totals(const Eigen::VectorXd& flat, int months);
Eigen::VectorXd flatten_totals(const Eigen::MatrixXd& totals);

// sum_k w_k y_k for one-hot statuses.
Eigen::Vector3d weighted_totals(std::span<const std::uint8_t> status, std::span<const double> weights);

Eigen::MatrixXd direct_estimator(const PanelSample& sample, const WeightSet& weights);
MisEstimates mis_estimator(const PanelSample& sample, const WeightSet& weights);

// Diagonal A = diag(a), K = diag(k). K weights the current direct estimate and
// I - K the updated previous composite.
struct AkCoefficients {
  std::array<double, 3> a{};
  std::array<double, 3> k{1.0, 1.0, 1.0};

  // Production coefficients: unemployed (a, k) = (0.3, 0.4), employed (0.4, 0.7);
  // NILF keeps the direct estimate.
  static AkCoefficients cps() { return {{0.4, 0.3, 0.0}, {0.7, 0.4, 1.0}}; }
  // p = (a_employed, k_employed, a_unemployed, k_unemployed)
  static AkCoefficients from_rate_parameters(std::span<const double, 4> p) {
    return {{p[0], p[2], 0.0}, {p[1], p[3], 1.0}};
  }
};

Eigen::MatrixXd ak_recursive(const PanelSample& sample, const WeightSet& weights, const AkCoefficients& coeffs);

using LinearWeights = ArrayMatrix;

// W^AK with row axes (M,3) and column axes (M,8,3).
LinearWeights ak_linear_weights(const AkCoefficients& coeffs, const RotationDesign& design);
// c_{m,m',g} for one status, as an (M, M, 8) array.
LabeledArray ak_coefficients(double a, double k, const RotationDesign& design);

Eigen::VectorXd apply_linear(const LinearWeights& w, const MisEstimates& mis);

struct DesignMatrices {
  ArrayMatrix x;        // ((M,8,3),(M,3))
  ArrayMatrix x_bias;   // ((M,8,3),(7,3))
};
DesignMatrices design_matrices(int months);

// Minimum-variance unbiased weights X+(I - Sigma (Q Sigma Q)+), Q = I - X X+.
// Dense reference evaluation of the closed form.
Eigen::MatrixXd blue_weights_dense(const Eigen::MatrixXd& x, const Eigen::MatrixXd& sigma);

// Same weights evaluated on an orthonormal basis of range(Q).
Eigen::MatrixXd blue_weights(int months, const Eigen::MatrixXd& sigma);
// Rotation-bias protected version, L X*+ (...), L = [I | 0].
Eigen::MatrixXd blue_bailar_weights(int months, const Eigen::MatrixXd& sigma);

Eigen::MatrixXd blue(const MisEstimates& mis, const Eigen::MatrixXd& sigma);
Eigen::MatrixXd blue_bailar(const MisEstimates& mis, const Eigen::MatrixXd& sigma);

// Orthonormal contrasts (n, n-1): column j is proportional to
// (1,...,1,-j,0,...,0) with j leading ones.
Eigen::MatrixXd helmert_contrasts(int n);

}  // namespace compest
