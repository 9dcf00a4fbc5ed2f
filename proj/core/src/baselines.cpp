#include "scenrep/baselines.hpp"

#include <cmath>

namespace scenrep {

namespace {

constexpr double kKmhPerMs = 3.6;

void require_lvd_layout(const Layout& layout) {
  if (layout.n_y() != 1 || layout.n_theta() != 3)
    throw Error(ErrorCode::LayoutMismatch,
                "fixed LVD parameterization expects 1 signal and 3 statics");
}

void require_cutin_layout(const Layout& layout) {
  if (layout.n_y() != 2 || layout.n_theta() != 3)
    throw Error(ErrorCode::LayoutMismatch,
                "fixed cut-in parameterization expects 2 signals and 3 statics");
}

// Half-cosine speed ramp: v(tau) = v_end + dv (1 + cos(pi tau)) / 2, so the
// acceleration channel is -(pi dv / 2T) sin(pi tau).
double accel_at(double speed_reduction, double duration, double tau) {
  return -(M_PI * speed_reduction / (2.0 * duration)) * std::sin(M_PI * tau);
}

}  // namespace

Dataset resample_training(const Dataset& x, int n_w, Rng& rng) {
  if (x.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty training set");
  if (n_w < 1) throw Error(ErrorCode::InvalidArgument, "n_w must be positive");
  std::vector<int> rows(static_cast<std::size_t>(n_w));
  for (auto& r : rows) r = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(x.size())));
  return select_rows(x, rows);
}

Dataset resample_training(const Dataset& x, int n_w, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "resample");
  return resample_training(x, n_w, rng);
}

FixedLvdParams fit_fixed_lvd(const Eigen::VectorXd& vector, const Layout& layout) {
  require_lvd_layout(layout);
  const int n_t = layout.n_t;
  const Eigen::VectorXd statics = statics_block(vector, layout);

  FixedLvdParams params;
  params.duration = statics(0);
  params.initial_time_gap = statics(2);
  if (!(params.duration > 0.0))
    throw Error(ErrorCode::NegativeDuration, "scenario duration must be positive");

  // Projection of the acceleration samples onto the half-cosine ramp's
  // derivative shape; exact for vectors produced by synth_fixed_lvd.
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n_t; ++k) {
    const double s = std::sin(M_PI * k / (n_t - 1));
    num += vector(k) * s;
    den += s * s;
  }
  params.speed_reduction = den > 0.0 ? -(2.0 * params.duration / M_PI) * (num / den) : 0.0;

  const double initial_speed_ms = statics(1) / kKmhPerMs;
  params.final_speed = initial_speed_ms - params.speed_reduction;
  return params;
}

Eigen::VectorXd synth_fixed_lvd(const FixedLvdParams& params, const Layout& layout) {
  require_lvd_layout(layout);
  if (!(params.duration > 0.0))
    throw Error(ErrorCode::NegativeDuration, "scenario duration must be positive");

  const int n_t = layout.n_t;
  Eigen::VectorXd vector(layout.n_x());
  for (int k = 0; k < n_t; ++k) {
    const double tau = static_cast<double>(k) / (n_t - 1);
    vector(k) = accel_at(params.speed_reduction, params.duration, tau);
  }
  vector(n_t) = params.duration;
  vector(n_t + 1) = (params.final_speed + params.speed_reduction) * kKmhPerMs;
  vector(n_t + 2) = params.initial_time_gap;
  return vector;
}

FixedCutinParams fit_fixed_cutin(const Eigen::VectorXd& vector, const Layout& layout) {
  require_cutin_layout(layout);
  const int n_t = layout.n_t;
  const Eigen::VectorXd statics = statics_block(vector, layout);

  FixedCutinParams params;
  params.duration = statics(0);
  params.ego_initial_speed = statics(1);
  params.initial_longitudinal_position = statics(2);
  if (!(params.duration > 0.0))
    throw Error(ErrorCode::NegativeDuration, "scenario duration must be positive");

  // Signal 0 is the cutting vehicle's speed, signal 1 its lateral position.
  double speed_sum = 0.0;
  for (int k = 0; k < n_t; ++k) speed_sum += vector(2 * k);
  params.mean_speed = speed_sum / n_t;
  params.initial_lateral_position = vector(1);  // y(t0) = y0 on the model
  return params;
}

Eigen::VectorXd synth_fixed_cutin(const FixedCutinParams& params, const Layout& layout) {
  require_cutin_layout(layout);
  if (!(params.duration > 0.0))
    throw Error(ErrorCode::NegativeDuration, "scenario duration must be positive");

  const int n_t = layout.n_t;
  Eigen::VectorXd vector(layout.n_x());
  for (int k = 0; k < n_t; ++k) {
    const double tau = static_cast<double>(k) / (n_t - 1);
    vector(2 * k) = params.mean_speed;
    vector(2 * k + 1) = params.initial_lateral_position * 0.5 * (1.0 + std::cos(M_PI * tau));
  }
  vector(2 * n_t) = params.duration;
  vector(2 * n_t + 1) = params.ego_initial_speed;
  vector(2 * n_t + 2) = params.initial_longitudinal_position;
  return vector;
}

GaussianModel fit_gaussian(const Eigen::MatrixXd& data, bool independent) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "fitting a Gaussian needs >= 2 rows");

  GaussianModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  model.covariance = (centered.transpose() * centered) / static_cast<double>(n);
  if (independent) {
    Eigen::VectorXd diag = model.covariance.diagonal();
    model.covariance = diag.asDiagonal();
  }

  const double trace = model.covariance.trace();
  if (trace <= 0.0) {
    model.chol = Eigen::MatrixXd::Zero(d, d);
    return model;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(model.covariance);
  if (llt.info() != Eigen::Success) {
    const double ridge = 1e-10 * trace / d;
    llt.compute(model.covariance + ridge * Eigen::MatrixXd::Identity(d, d));
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::SingularCovariance, "covariance not factorizable after ridge");
  }
  model.chol = llt.matrixL();
  return model;
}

Eigen::MatrixXd sample_gaussian(const GaussianModel& model, int n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  const int d = static_cast<int>(model.mean.size());
  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd g(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) g(j) = rng.normal();
    out.row(i) = (model.mean + model.chol * g).transpose();
  }
  return out;
}

std::vector<KdeModel> fit_independent_kde(const Eigen::MatrixXd& data) {
  std::vector<KdeModel> models;
  models.reserve(static_cast<std::size_t>(data.cols()));
  for (int j = 0; j < data.cols(); ++j) models.push_back(fit_kde(data.col(j)));
  return models;
}

Eigen::MatrixXd sample_independent_kde(const std::vector<KdeModel>& models, int n, Rng& rng) {
  const int d = static_cast<int>(models.size());
  Eigen::MatrixXd out(n, d);
  for (int j = 0; j < d; ++j) out.col(j) = sample(models[static_cast<std::size_t>(j)], n, rng);
  return out;
}

}  // namespace scenrep
