#ifndef SCENREP_SVD_HPP
#define SCENREP_SVD_HPP

#include <Eigen/Dense>

#include "scenrep/scenario.hpp"

namespace scenrep {

// Weighted, centered, truncated SVD basis fitted on a training set. Maps
// d-dimensional reduced coordinates to full parameter vectors through
// alpha .* x ~= mu + sum_j sigma_j v_j u_j.
struct ReducedBasis {
  Layout layout;
  Eigen::VectorXd mu;                   // mean of the weighted training vectors
  WeightVector weights;                 // the alpha used for scaling
  int d = 0;
  Eigen::VectorXd singular_values;      // first d, non-increasing
  Eigen::MatrixXd left_vectors;         // n_x x d, orthonormal columns u_j
  Eigen::VectorXd all_singular_values;  // all min(n_x, N) values
  int n_train = 0;
  double total_variance = 0.0;          // sum of all squared singular values
};

struct BasisFit {
  ReducedBasis basis;
  Eigen::MatrixXd train_coords;  // N x d, row i = reduced coordinates of x_i
};

// Builds the weighted centered data matrix, factorizes it, and keeps the
// first d singular triplets. Each kept pair (u_j, coordinate column j) is
// sign-flipped so the largest-magnitude entry of u_j is positive. Trailing
// zero singular values are not an error; d > min(n_x, N) is (DTooLarge).
BasisFit fit_basis(const Dataset& train, const WeightVector& weights, int d);

// First d_new triplets of an already-fitted basis; d_new <= basis.d. Lets a
// d-sweep reuse one factorization.
ReducedBasis truncate_basis(const ReducedBasis& basis, int d_new);

// Out-of-sample projection v_j = u_j . (alpha .* x - mu) / sigma_j.
// Requires sigma_j > 0 for all j <= d (ZeroSingularValue otherwise).
Eigen::VectorXd reduce(const ReducedBasis& basis, const Eigen::VectorXd& x);

// (mu + sum_j sigma_j v_j u_j) ./ alpha — the unweighted approximation.
Eigen::VectorXd reconstruct(const ReducedBasis& basis, const Eigen::VectorXd& v);

// Fraction of total weighted variance carried by the first d_query values.
// A zero-variance training set counts as fully explained.
double explained_variance(const ReducedBasis& basis, int d_query);

}  // namespace scenrep

#endif  // SCENREP_SVD_HPP
