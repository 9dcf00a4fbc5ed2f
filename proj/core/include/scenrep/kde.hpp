#ifndef SCENREP_KDE_HPP
#define SCENREP_KDE_HPP

#include <Eigen/Dense>

#include "scenrep/error.hpp"
#include "scenrep/rng.hpp"

namespace scenrep {

// Gaussian kernel density estimate with scalar bandwidth, H = h^2 I_d.
struct KdeModel {
  Eigen::MatrixXd points;  // N x d training coordinates
  double bandwidth = 0.0;  // h > 0

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// (1/N) sum_i (2 pi)^(-d/2) h^(-d) exp(-||v - v_i||^2 / (2 h^2)).
double density(const KdeModel& model, const Eigen::VectorXd& v);

// log density via log-sum-exp; finite wherever density underflows to 0 is
// impossible, -inf otherwise.
double log_density(const KdeModel& model, const Eigen::VectorXd& v);

// Mean over i of log f_{-i}(v_i), the leave-one-out log density. Finite for
// every h > 0, including datasets with duplicated points.
double loo_log_likelihood(const Eigen::MatrixXd& points, double h);

// Maximizes the leave-one-out score with a coarse log-grid scan plus
// golden-section refinement over [h_ref/20, 20 h_ref], where h_ref is the
// Gaussian reference bandwidth. Deterministic; relative tolerance 1e-4.
double select_bandwidth(const Eigen::MatrixXd& points);

KdeModel fit_kde(const Eigen::MatrixXd& points);

// Each draw: uniformly chosen training point plus h times a standard normal.
Eigen::MatrixXd sample(const KdeModel& model, int n, Rng& rng);
Eigen::MatrixXd sample(const KdeModel& model, int n, std::uint64_t seed);

}  // namespace scenrep

#endif  // SCENREP_KDE_HPP
