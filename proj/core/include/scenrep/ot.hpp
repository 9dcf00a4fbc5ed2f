#ifndef SCENREP_OT_HPP
#define SCENREP_OT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "scenrep/scenario.hpp"

namespace scenrep {

// Optimal coupling between two uniform empirical measures. Row sums are
// 1/n_z, column sums 1/n_w, and the support has at most n_z + n_w - 1
// entries (a basic feasible solution of the transportation LP).
struct TransportPlan {
  struct Entry {
    int i;
    int j;
    double mass;
  };
  std::vector<Entry> entries;
  int n_z = 0;
  int n_w = 0;
  double cost = 0.0;  // optimal LP objective, sum d(z_i, w_j)^p t_ij
  double p = 1.0;
  Eigen::VectorXd dual_z;  // LP potentials, handy for optimality audits
  Eigen::VectorXd dual_w;
};

struct WassersteinResult {
  double value = 0.0;  // cost^(1/p)
  TransportPlan plan;
};

// w_test = W_p(Z, W), w_train = W_p(X, W),
// sr = w_test + beta * (w_test - w_train).
struct MetricReport {
  double w_test = 0.0;
  double w_train = 0.0;
  double sr = 0.0;
  double beta = 0.0;
  double p = 1.0;
};

// ||alpha .* (a - b)||_2. The exponent p lives in the transport objective,
// not here; the parameter only documents the metric family in signatures.
double pairwise_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const WeightVector& weights, double p = 1.0);

// Exact empirical Wasserstein distance via the transportation network
// simplex. Deterministic; the cost matrix is held dense up to a size cap
// and evaluated on the fly above it.
WassersteinResult empirical_wasserstein(const Dataset& z, const Dataset& w,
                                        const WeightVector& weights, double p = 1.0);

MetricReport sr_metric(const Dataset& w, const Dataset& z, const Dataset& x,
                       const WeightVector& weights, double p, double beta);

// Entropic (Sinkhorn) approximation, offered for speed experiments only;
// never a substitute for the exact solver in contracts or acceptance runs.
double entropic_wasserstein(const Dataset& z, const Dataset& w, const WeightVector& weights,
                            double p = 1.0, double epsilon = 0.05, int max_iter = 2000);

namespace detail {
// Raw entry point used by the metric ops and the solver tests: supplies and
// demands are integer masses, the value is the optimal objective together
// with the integral flows.
struct RawPlan {
  double objective = 0.0;
  std::vector<std::tuple<int, int, std::int64_t>> flows;
  Eigen::VectorXd dual_source;
  Eigen::VectorXd dual_sink;
};
RawPlan solve_transport(const Eigen::MatrixXd& cost, std::vector<std::int64_t> supply,
                        std::vector<std::int64_t> demand);
}  // namespace detail

}  // namespace scenrep

#endif  // SCENREP_OT_HPP
