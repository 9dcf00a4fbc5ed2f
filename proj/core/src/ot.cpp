#include "scenrep/ot.hpp"

#include <cmath>

#include "network_simplex.hpp"

namespace scenrep {

namespace {

// Dense cost matrices up to this many entries; larger problems evaluate
// cost rows on demand from the weighted point sets.
constexpr std::int64_t kDenseCostCap = 40'000'000;

// Row-major cost buffer; pricing scans whole rows.
struct DenseCost {
  const std::vector<double>& data;
  int n;
  double max_abs;

  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
  const double* rows(int i0, int /*i1*/, std::vector<double>& /*scratch*/) const {
    return data.data() + static_cast<std::size_t>(i0) * n;
  }
  double scale() const { return max_abs; }
};

struct LazyCost {
  Eigen::MatrixXd az;  // n_z x dim, already weighted
  Eigen::MatrixXd aw;  // n_w x dim
  Eigen::VectorXd z2;  // squared row norms
  Eigen::VectorXd w2;
  double p = 1.0;
  double max_abs = 1.0;

  static double finish(double d2, double p) {
    d2 = d2 < 0.0 ? 0.0 : d2;
    if (p == 2.0) return d2;
    const double dist = std::sqrt(d2);
    return p == 1.0 ? dist : std::pow(dist, p);
  }

  double operator()(int i, int j) const {
    const double d2 = z2(i) + w2(j) - 2.0 * az.row(i).dot(aw.row(j));
    return finish(d2, p);
  }

  const double* rows(int i0, int i1, std::vector<double>& scratch) const {
    const int n = static_cast<int>(aw.rows());
    scratch.resize(static_cast<std::size_t>(i1 - i0) * n);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> block(
        scratch.data(), i1 - i0, n);
    block.noalias() = az.middleRows(i0, i1 - i0) * aw.transpose() * -2.0;
    block.colwise() += z2.segment(i0, i1 - i0);
    block.rowwise() += w2.transpose();
    for (double& v : scratch) v = finish(v, p);
    return scratch.data();
  }

  double scale() const { return max_abs; }
};

Eigen::MatrixXd weighted_rows(const Dataset& data, const WeightVector& weights) {
  return data.vectors.array().rowwise() * weights.alpha.transpose().array();
}

void check_layouts(const Dataset& z, const Dataset& w, const WeightVector& weights) {
  if (!z.layout.same_shape(w.layout))
    throw Error(ErrorCode::LayoutMismatch, "datasets have different layouts");
  if (weights.alpha.size() != z.layout.n_x())
    throw Error(ErrorCode::LayoutMismatch, "weight vector does not match layout");
  if (z.size() == 0 || w.size() == 0)
    throw Error(ErrorCode::InvalidArgument, "empty dataset in transport problem");
}

template <class Cost>
WassersteinResult run_simplex(const Cost& cost, int n_z, int n_w, double p) {
  std::vector<std::int64_t> supply(static_cast<std::size_t>(n_z), n_w);
  std::vector<std::int64_t> demand(static_cast<std::size_t>(n_w), n_z);
  detail::TransportSimplex<Cost> solver(std::move(supply), std::move(demand), cost);
  auto raw = solver.run();

  const double total_mass = static_cast<double>(n_z) * static_cast<double>(n_w);
  WassersteinResult result;
  result.plan.n_z = n_z;
  result.plan.n_w = n_w;
  result.plan.p = p;
  result.plan.cost = raw.objective / total_mass;
  result.plan.entries.reserve(raw.flows.size());
  for (const auto& [i, j, f] : raw.flows)
    result.plan.entries.push_back({i, j, static_cast<double>(f) / total_mass});
  result.plan.dual_z =
      Eigen::Map<const Eigen::VectorXd>(raw.dual_source.data(), n_z);
  result.plan.dual_w = Eigen::Map<const Eigen::VectorXd>(raw.dual_sink.data(), n_w);
  result.value = std::pow(result.plan.cost, 1.0 / p);
  if (p == 1.0) result.value = result.plan.cost;
  return result;
}

}  // namespace

double pairwise_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const WeightVector& weights, double /*p*/) {
  if (a.size() != b.size() || a.size() != weights.alpha.size())
    throw Error(ErrorCode::LayoutMismatch, "vector lengths differ");
  return (weights.alpha.cwiseProduct(a - b)).norm();
}

WassersteinResult empirical_wasserstein(const Dataset& z, const Dataset& w,
                                        const WeightVector& weights, double p) {
  check_layouts(z, w, weights);
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "order p must be >= 1");

  const int n_z = z.size();
  const int n_w = w.size();

  LazyCost lazy;
  lazy.az = weighted_rows(z, weights);
  lazy.aw = weighted_rows(w, weights);
  lazy.z2 = lazy.az.rowwise().squaredNorm();
  lazy.w2 = lazy.aw.rowwise().squaredNorm();
  lazy.p = p;
  const double reach = std::sqrt(lazy.z2.maxCoeff()) + std::sqrt(lazy.w2.maxCoeff());
  lazy.max_abs = std::max(1.0, std::pow(reach, p));

  if (static_cast<std::int64_t>(n_z) * n_w <= kDenseCostCap) {
    std::vector<double> dense(static_cast<std::size_t>(n_z) * n_w);
    std::vector<double> unused;
    for (int i = 0; i < n_z; i += 512) {
      const int hi = std::min(n_z, i + 512);
      const double* block = lazy.rows(i, hi, unused);
      std::copy(block, block + static_cast<std::size_t>(hi - i) * n_w,
                dense.begin() + static_cast<std::size_t>(i) * n_w);
    }
    double max_abs = 0.0;
    for (double v : dense) max_abs = std::max(max_abs, std::abs(v));
    DenseCost cost{dense, n_w, std::max(1.0, max_abs)};
    return run_simplex(cost, n_z, n_w, p);
  }
  return run_simplex(lazy, n_z, n_w, p);
}

namespace detail {

RawPlan solve_transport(const Eigen::MatrixXd& cost, std::vector<std::int64_t> supply,
                        std::vector<std::int64_t> demand) {
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  std::vector<double> dense(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) dense[static_cast<std::size_t>(i) * n + j] = cost(i, j);
  double max_abs = 0.0;
  for (double v : dense) max_abs = std::max(max_abs, std::abs(v));
  DenseCost provider{dense, n, std::max(1.0, max_abs)};
  TransportSimplex<DenseCost> solver(std::move(supply), std::move(demand), provider);
  auto res = solver.run();
  RawPlan plan;
  plan.objective = res.objective;
  plan.flows = std::move(res.flows);
  plan.dual_source = Eigen::Map<const Eigen::VectorXd>(res.dual_source.data(), m);
  plan.dual_sink = Eigen::Map<const Eigen::VectorXd>(res.dual_sink.data(), n);
  return plan;
}

}  // namespace detail

MetricReport sr_metric(const Dataset& w, const Dataset& z, const Dataset& x,
                       const WeightVector& weights, double p, double beta) {
  if (beta < 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be non-negative");
  MetricReport report;
  report.p = p;
  report.beta = beta;
  report.w_test = empirical_wasserstein(z, w, weights, p).value;
  report.w_train = empirical_wasserstein(x, w, weights, p).value;
  report.sr = report.w_test + beta * (report.w_test - report.w_train);
  return report;
}

double entropic_wasserstein(const Dataset& z, const Dataset& w, const WeightVector& weights,
                            double p, double epsilon, int max_iter) {
  check_layouts(z, w, weights);
  const int n_z = z.size();
  const int n_w = w.size();

  LazyCost lazy;
  lazy.az = weighted_rows(z, weights);
  lazy.aw = weighted_rows(w, weights);
  lazy.z2 = lazy.az.rowwise().squaredNorm();
  lazy.w2 = lazy.aw.rowwise().squaredNorm();
  lazy.p = p;

  Eigen::MatrixXd cost(n_z, n_w);
  std::vector<double> scratch;
  for (int i = 0; i < n_z; ++i) {
    const double* row = lazy.rows(i, i + 1, scratch);
    cost.row(i) = Eigen::Map<const Eigen::RowVectorXd>(row, n_w);
  }

  // Log-domain Sinkhorn with uniform marginals.
  const double reg = epsilon * std::max(1e-12, cost.maxCoeff());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n_z);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n_w);
  const double log_az = -std::log(static_cast<double>(n_z));
  const double log_bw = -std::log(static_cast<double>(n_w));

  auto lse_rows = [&](Eigen::VectorXd& out) {
    for (int i = 0; i < n_z; ++i) {
      Eigen::ArrayXd t = (g.array() - cost.row(i).transpose().array()) / reg;
      const double mx = t.maxCoeff();
      out(i) = reg * (mx + std::log((t - mx).exp().sum()));
    }
  };
  auto lse_cols = [&](Eigen::VectorXd& out) {
    for (int j = 0; j < n_w; ++j) {
      Eigen::ArrayXd t = (f.array() - cost.col(j).array()) / reg;
      const double mx = t.maxCoeff();
      out(j) = reg * (mx + std::log((t - mx).exp().sum()));
    }
  };

  Eigen::VectorXd tmp_z(n_z), tmp_w(n_w);
  for (int it = 0; it < max_iter; ++it) {
    lse_rows(tmp_z);
    f = reg * log_az * Eigen::VectorXd::Ones(n_z) - tmp_z;
    lse_cols(tmp_w);
    g = reg * log_bw * Eigen::VectorXd::Ones(n_w) - tmp_w;
  }

  // The marginal masses are already folded into the potentials.
  double objective = 0.0;
  for (int i = 0; i < n_z; ++i)
    for (int j = 0; j < n_w; ++j) {
      const double t = std::exp((f(i) + g(j) - cost(i, j)) / reg);
      objective += t * cost(i, j);
    }
  return p == 1.0 ? objective : std::pow(objective, 1.0 / p);
}

}  // namespace scenrep
