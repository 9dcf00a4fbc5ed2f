#include "scenrep/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace scenrep {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

// Pairwise squared distances, D2(i, j) = ||p_i - p_j||^2, clamped at zero.
Eigen::MatrixXd pairwise_sq_dist(const Eigen::MatrixXd& points) {
  const Eigen::VectorXd sq = points.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, points.rows());
  d2 += sq.transpose().replicate(points.rows(), 1);
  d2.noalias() -= 2.0 * points * points.transpose();
  return d2.cwiseMax(0.0);
}

struct LooCache {
  Eigen::MatrixXd d2;       // N x N
  Eigen::VectorXd row_min;  // min off-diagonal squared distance per row
};

LooCache make_loo_cache(const Eigen::MatrixXd& points) {
  LooCache cache;
  cache.d2 = pairwise_sq_dist(points);
  const int n = static_cast<int>(points.rows());
  cache.row_min.resize(n);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i) best = std::min(best, cache.d2(i, j));
    cache.row_min(i) = best;
  }
  return cache;
}

// Stable evaluation: per row, exponents are shifted by the off-diagonal
// minimum so the largest term is exp(0).
double loo_from_cache(const LooCache& cache, int d, double h) {
  const int n = static_cast<int>(cache.d2.rows());
  const double inv2h2 = 1.0 / (2.0 * h * h);
  const double norm_const = -0.5 * d * kLogTwoPi - d * std::log(h) -
                            std::log(static_cast<double>(n - 1));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double shift = cache.row_min(i);
    const Eigen::ArrayXd ex = ((shift - cache.d2.row(i).transpose().array()) * inv2h2).exp();
    // exp((shift - 0) * inv2h2) is the diagonal's contribution; remove it.
    const double sum = ex.sum() - std::exp(shift * inv2h2);
    total += norm_const - shift * inv2h2 + std::log(sum);
  }
  return total / static_cast<double>(n);
}

struct GridScan {
  double best_h;
  double lo;  // refinement bracket around the best grid point
  double hi;
};

GridScan scan_log_grid(const LooCache& cache, int d, double h_lo, double h_hi, int steps) {
  const double log_lo = std::log(h_lo), log_hi = std::log(h_hi);
  double best_score = -std::numeric_limits<double>::infinity();
  int best_index = 0;
  for (int k = 0; k < steps; ++k) {
    const double h = std::exp(log_lo + (log_hi - log_lo) * k / (steps - 1));
    const double score = loo_from_cache(cache, d, h);
    if (score > best_score) {
      best_score = score;
      best_index = k;
    }
  }
  auto grid_h = [&](int k) {
    k = std::clamp(k, 0, steps - 1);
    return std::exp(log_lo + (log_hi - log_lo) * k / (steps - 1));
  };
  return {grid_h(best_index), grid_h(best_index - 1), grid_h(best_index + 1)};
}

double golden_section_max(const LooCache& cache, int d, double lo, double hi, double rel_tol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(lo), b = std::log(hi);
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = loo_from_cache(cache, d, std::exp(c));
  double fe = loo_from_cache(cache, d, std::exp(e));
  while (b - a > rel_tol) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = loo_from_cache(cache, d, std::exp(c));
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = loo_from_cache(cache, d, std::exp(e));
    }
  }
  return std::exp(0.5 * (a + b));
}

double reference_bandwidth(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  const Eigen::RowVectorXd mu = points.colwise().mean();
  const Eigen::RowVectorXd var =
      (points.rowwise() - mu).array().square().colwise().mean();
  const double mean_std = var.array().sqrt().mean();
  if (!(mean_std > 0.0))
    throw Error(ErrorCode::AllPointsIdentical, "bandwidth selection needs spread-out points");
  return std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) *
         std::pow(static_cast<double>(n), -1.0 / (d + 4.0)) * mean_std;
}

}  // namespace

double log_density(const KdeModel& model, const Eigen::VectorXd& v) {
  const int n = model.size();
  const int d = model.dim();
  if (v.size() != d) throw Error(ErrorCode::LayoutMismatch, "query dimension mismatch");
  const double h = model.bandwidth;
  const double inv2h2 = 1.0 / (2.0 * h * h);

  const Eigen::VectorXd d2 =
      (model.points.rowwise() - v.transpose()).rowwise().squaredNorm();
  const double shift = d2.minCoeff();
  const double sum = ((shift - d2.array()) * inv2h2).exp().sum();
  return -0.5 * d * kLogTwoPi - d * std::log(h) - std::log(static_cast<double>(n)) -
         shift * inv2h2 + std::log(sum);
}

double density(const KdeModel& model, const Eigen::VectorXd& v) {
  return std::exp(log_density(model, v));
}

double loo_log_likelihood(const Eigen::MatrixXd& points, double h) {
  if (points.rows() < 2)
    throw Error(ErrorCode::InvalidArgument, "leave-one-out needs at least 2 points");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  const LooCache cache = make_loo_cache(points);
  return loo_from_cache(cache, static_cast<int>(points.cols()), h);
}

double select_bandwidth(const Eigen::MatrixXd& points) {
  if (points.rows() < 2)
    throw Error(ErrorCode::InvalidArgument, "bandwidth selection needs at least 2 points");
  const double h_ref = reference_bandwidth(points);
  const LooCache cache = make_loo_cache(points);
  const int d = static_cast<int>(points.cols());

  // The LOO score can have shallow local optima; a coarse scan picks the
  // basin, golden section polishes inside it.
  const GridScan scan = scan_log_grid(cache, d, h_ref / 20.0, h_ref * 20.0, 48);
  return golden_section_max(cache, d, scan.lo, scan.hi, 1e-4);
}

KdeModel fit_kde(const Eigen::MatrixXd& points) {
  return KdeModel{points, select_bandwidth(points)};
}

Eigen::MatrixXd sample(const KdeModel& model, int n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  const int d = model.dim();
  Eigen::MatrixXd out(n, d);
  for (int i = 0; i < n; ++i) {
    const auto pick = static_cast<Eigen::Index>(rng.uniform_index(
        static_cast<std::size_t>(model.size())));
    for (int j = 0; j < d; ++j)
      out(i, j) = model.points(pick, j) + model.bandwidth * rng.normal();
  }
  return out;
}

Eigen::MatrixXd sample(const KdeModel& model, int n, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "kde/sample");
  return sample(model, n, rng);
}

}  // namespace scenrep
