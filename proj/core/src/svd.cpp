#include "scenrep/svd.hpp"

#include <cmath>

namespace scenrep {

BasisFit fit_basis(const Dataset& train, const WeightVector& weights, int d) {
  const int n = train.size();
  const int n_x = train.layout.n_x();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty training set");
  if (weights.alpha.size() != n_x)
    throw Error(ErrorCode::LayoutMismatch, "weight vector length does not match layout");
  if ((weights.alpha.array() <= 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "weights must be strictly positive");
  const int n_bar = std::min(n_x, n);
  if (d < 1 || d > n_bar)
    throw Error(ErrorCode::DTooLarge,
                "d=" + std::to_string(d) + " exceeds min(n_x, N)=" + std::to_string(n_bar));

  // Rows of `centered` are (alpha .* x_i - mu)^T; its transpose is the
  // parameter matrix X, so the factorization swaps the roles of U and V.
  Eigen::MatrixXd weighted =
      train.vectors.array().rowwise() * weights.alpha.transpose().array();
  Eigen::VectorXd mu = weighted.colwise().mean().transpose();
  Eigen::MatrixXd centered = weighted.rowwise() - mu.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd coords_full = svd.matrixU();   // N x n_bar, rows of V in X = U S V^T
  Eigen::MatrixXd axes_full = svd.matrixV();     // n_x x n_bar, columns u_j

  // Resolve the sign ambiguity: largest-magnitude entry of each u_j positive.
  for (int j = 0; j < axes_full.cols(); ++j) {
    int arg_max = 0;
    axes_full.col(j).cwiseAbs().maxCoeff(&arg_max);
    if (axes_full(arg_max, j) < 0.0) {
      axes_full.col(j) = -axes_full.col(j);
      coords_full.col(j) = -coords_full.col(j);
    }
  }

  BasisFit fit;
  fit.basis.layout = train.layout;
  fit.basis.mu = std::move(mu);
  fit.basis.weights = weights;
  fit.basis.d = d;
  fit.basis.all_singular_values = svd.singularValues();
  fit.basis.singular_values = fit.basis.all_singular_values.head(d);
  fit.basis.left_vectors = axes_full.leftCols(d);
  fit.basis.n_train = n;
  fit.basis.total_variance = fit.basis.all_singular_values.squaredNorm();
  fit.train_coords = coords_full.leftCols(d);
  return fit;
}

ReducedBasis truncate_basis(const ReducedBasis& basis, int d_new) {
  if (d_new < 1 || d_new > basis.d)
    throw Error(ErrorCode::DTooLarge, "cannot truncate to d=" + std::to_string(d_new));
  ReducedBasis out = basis;
  out.d = d_new;
  out.singular_values = basis.singular_values.head(d_new);
  out.left_vectors = basis.left_vectors.leftCols(d_new);
  return out;
}

Eigen::VectorXd reduce(const ReducedBasis& basis, const Eigen::VectorXd& x) {
  if (x.size() != basis.mu.size())
    throw Error(ErrorCode::LayoutMismatch, "vector length does not match basis");
  for (int j = 0; j < basis.d; ++j)
    if (!(basis.singular_values(j) > 0.0))
      throw Error(ErrorCode::ZeroSingularValue,
                  "sigma_" + std::to_string(j + 1) + " is zero, projection undefined");

  Eigen::VectorXd weighted = basis.weights.alpha.cwiseProduct(x) - basis.mu;
  return (basis.left_vectors.transpose() * weighted).cwiseQuotient(basis.singular_values);
}

Eigen::VectorXd reconstruct(const ReducedBasis& basis, const Eigen::VectorXd& v) {
  if (v.size() != basis.d)
    throw Error(ErrorCode::LayoutMismatch, "coordinate length does not match basis d");
  Eigen::VectorXd weighted =
      basis.mu + basis.left_vectors * basis.singular_values.cwiseProduct(v);
  return weighted.cwiseQuotient(basis.weights.alpha);
}

double explained_variance(const ReducedBasis& basis, int d_query) {
  if (d_query < 1 || d_query > basis.all_singular_values.size())
    throw Error(ErrorCode::InvalidArgument, "d_query out of range");
  if (basis.total_variance <= 0.0) return 1.0;
  return basis.all_singular_values.head(d_query).squaredNorm() / basis.total_variance;
}

}  // namespace scenrep
