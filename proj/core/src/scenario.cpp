#include "scenrep/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scenrep/rng.hpp"

namespace scenrep {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::InsufficientSamplesForSpline: return "InsufficientSamplesForSpline";
    case ErrorCode::MissingStatic: return "MissingStatic";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::DTooLarge: return "DTooLarge";
    case ErrorCode::ZeroSingularValue: return "ZeroSingularValue";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::SolverNonConvergence: return "SolverNonConvergence";
    case ErrorCode::AllPointsIdentical: return "AllPointsIdentical";
    case ErrorCode::NegativeDuration: return "NegativeDuration";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::CorrelationDegenerate: return "CorrelationDegenerate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

const char* to_string(Category category) {
  switch (category) {
    case Category::LVD: return "LVD";
    case Category::CUT_IN: return "CUT_IN";
    case Category::CUSTOM: return "CUSTOM";
  }
  return "CUSTOM";
}

Category category_from_string(const std::string& name) {
  if (name == "LVD" || name == "lvd") return Category::LVD;
  if (name == "CUT_IN" || name == "cut-in" || name == "cutin" || name == "cut_in")
    return Category::CUT_IN;
  if (name == "CUSTOM" || name == "custom") return Category::CUSTOM;
  throw Error(ErrorCode::ParseError, "unknown category '" + name + "'");
}

const char* to_string(Interpolation method) {
  return method == Interpolation::Linear ? "linear" : "cubic_spline";
}

Interpolation interpolation_from_string(const std::string& name) {
  if (name == "linear") return Interpolation::Linear;
  if (name == "cubic_spline" || name == "spline") return Interpolation::CubicSpline;
  throw Error(ErrorCode::ParseError, "unknown interpolation '" + name + "'");
}

void Scenario::validate() const {
  if (!(t1 > t0))
    throw Error(ErrorCode::InvalidArgument, "scenario '" + id + "' needs t1 > t0");
  for (const auto& [name, samples] : signals) {
    if (samples.empty())
      throw Error(ErrorCode::EmptySignal, "signal '" + name + "' of scenario '" + id + "'");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      if (!(s.t > prev))
        throw Error(ErrorCode::NonMonotonicTimestamps,
                    "signal '" + name + "' of scenario '" + id + "'");
      prev = s.t;
    }
    if (samples.front().t < t0 || samples.back().t > t1)
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "signal '" + name + "' leaves [t0, t1] in scenario '" + id + "'");
  }
}

std::string Layout::column_name(int k) const {
  const int ny = n_y();
  if (k < n_t * ny) {
    const int time_index = k / ny;
    const int signal_index = k % ny;
    return "sig." + signal_names[signal_index] + "." + std::to_string(time_index);
  }
  return "static." + static_names[k - n_t * ny];
}

bool Layout::same_shape(const Layout& other) const {
  return n_t == other.n_t && signal_names == other.signal_names &&
         static_names == other.static_names;
}

namespace {

struct SignalView {
  std::vector<double> t;
  std::vector<double> y;
};

SignalView extract(const std::string& name, const std::vector<SignalSample>& samples,
                   const std::string& scenario_id) {
  if (samples.size() < 2)
    throw Error(ErrorCode::EmptySignal,
                "signal '" + name + "' of scenario '" + scenario_id + "' has fewer than 2 samples");
  SignalView view;
  view.t.reserve(samples.size());
  view.y.reserve(samples.size());
  for (const auto& s : samples) {
    view.t.push_back(s.t);
    view.y.push_back(s.v);
  }
  return view;
}

// Index of the segment [t_i, t_{i+1}) containing t; clamped to valid range.
std::size_t segment_of(const std::vector<double>& knots, double t) {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  if (it == knots.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(i, knots.size() - 2);
}

double eval_linear(const SignalView& sig, double t) {
  if (t <= sig.t.front()) return sig.y.front();
  if (t >= sig.t.back()) return sig.y.back();
  const std::size_t i = segment_of(sig.t, t);
  const double frac = (t - sig.t[i]) / (sig.t[i + 1] - sig.t[i]);
  return sig.y[i] + frac * (sig.y[i + 1] - sig.y[i]);
}

// Second derivatives of the natural cubic spline through (t, y).
std::vector<double> natural_spline_m(const SignalView& sig) {
  const std::size_t m = sig.t.size();
  std::vector<double> h(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) h[i] = sig.t[i + 1] - sig.t[i];

  // Thomas solve of the tridiagonal interior system, M_0 = M_{m-1} = 0.
  std::vector<double> diag(m, 0.0), upper(m, 0.0), rhs(m, 0.0), M(m, 0.0);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    diag[i] = (h[i - 1] + h[i]) / 3.0;
    upper[i] = h[i] / 6.0;
    rhs[i] = (sig.y[i + 1] - sig.y[i]) / h[i] - (sig.y[i] - sig.y[i - 1]) / h[i - 1];
  }
  for (std::size_t i = 2; i + 1 < m; ++i) {
    const double w = (h[i - 1] / 6.0) / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = m - 2; i >= 1; --i) {
    M[i] = (rhs[i] - upper[i] * M[i + 1]) / diag[i];
    if (i == 1) break;
  }
  return M;
}

double eval_spline(const SignalView& sig, const std::vector<double>& M, double t) {
  if (t <= sig.t.front()) return sig.y.front();
  if (t >= sig.t.back()) return sig.y.back();
  const std::size_t i = segment_of(sig.t, t);
  const double h = sig.t[i + 1] - sig.t[i];
  const double B = (t - sig.t[i]) / h;
  const double A = 1.0 - B;
  return sig.y[i] + B * (sig.y[i + 1] - sig.y[i]) +
         ((A * A * A - A) * M[i] + (B * B * B - B) * M[i + 1]) * h * h / 6.0;
}

}  // namespace

Eigen::MatrixXd resample_time_series(const Scenario& scenario, int n_t, Interpolation method) {
  if (n_t < 2) throw Error(ErrorCode::InvalidArgument, "n_t must be at least 2");
  scenario.validate();

  const int ny = static_cast<int>(scenario.signals.size());
  Eigen::MatrixXd grid(n_t, ny);
  const double dt = (scenario.t1 - scenario.t0) / static_cast<double>(n_t - 1);

  for (int s = 0; s < ny; ++s) {
    const auto& [name, samples] = scenario.signals[static_cast<std::size_t>(s)];
    SignalView view = extract(name, samples, scenario.id);
    std::vector<double> M;
    if (method == Interpolation::CubicSpline) {
      if (view.t.size() < 4)
        throw Error(ErrorCode::InsufficientSamplesForSpline,
                    "signal '" + name + "' has " + std::to_string(view.t.size()) +
                        " samples, cubic spline needs 4");
      M = natural_spline_m(view);
    }
    for (int k = 0; k < n_t; ++k) {
      const double t = (k == n_t - 1) ? scenario.t1 : scenario.t0 + k * dt;
      grid(k, s) = method == Interpolation::Linear ? eval_linear(view, t)
                                                   : eval_spline(view, M, t);
    }
  }
  return grid;
}

Eigen::VectorXd assemble_parameter_vector(const Scenario& scenario, int n_t,
                                          Interpolation method) {
  const Eigen::MatrixXd grid = resample_time_series(scenario, n_t, method);
  const int ny = static_cast<int>(grid.cols());
  const int ntheta = static_cast<int>(scenario.statics.size());

  Eigen::VectorXd x(n_t * ny + ntheta);
  for (int k = 0; k < n_t; ++k)
    for (int s = 0; s < ny; ++s) x(k * ny + s) = grid(k, s);
  for (int j = 0; j < ntheta; ++j)
    x(n_t * ny + j) = scenario.statics[static_cast<std::size_t>(j)].second;
  return x;
}

Layout layout_from_scenario(const Scenario& scenario, int n_t) {
  Layout layout;
  layout.n_t = n_t;
  layout.category = scenario.category;
  for (const auto& [name, samples] : scenario.signals) {
    (void)samples;
    layout.signal_names.push_back(name);
    layout.signal_units.emplace_back();
  }
  for (const auto& [name, value] : scenario.statics) {
    (void)value;
    layout.static_names.push_back(name);
    layout.static_units.emplace_back();
  }
  return layout;
}

Dataset assemble_dataset(const std::vector<Scenario>& scenarios, int n_t, Interpolation method) {
  if (scenarios.empty()) throw Error(ErrorCode::InvalidArgument, "no scenarios to assemble");

  Dataset dataset;
  dataset.layout = layout_from_scenario(scenarios.front(), n_t);
  dataset.vectors.resize(static_cast<Eigen::Index>(scenarios.size()), dataset.layout.n_x());
  dataset.ids.reserve(scenarios.size());

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    const Layout here = layout_from_scenario(sc, n_t);
    if (here.signal_names != dataset.layout.signal_names)
      throw Error(ErrorCode::LayoutMismatch,
                  "scenario '" + sc.id + "' has a different signal set");
    if (here.static_names != dataset.layout.static_names) {
      for (const auto& name : dataset.layout.static_names) {
        if (std::find(here.static_names.begin(), here.static_names.end(), name) ==
            here.static_names.end())
          throw Error(ErrorCode::MissingStatic,
                      "scenario '" + sc.id + "' lacks static '" + name + "'");
      }
      throw Error(ErrorCode::LayoutMismatch,
                  "scenario '" + sc.id + "' declares statics in a different order");
    }
    dataset.vectors.row(static_cast<Eigen::Index>(i)) =
        assemble_parameter_vector(sc, n_t, method).transpose();
    dataset.ids.push_back(sc.id);
  }
  return dataset;
}

Eigen::MatrixXd time_series_block(const Eigen::VectorXd& vector, const Layout& layout) {
  const int ny = layout.n_y();
  Eigen::MatrixXd grid(layout.n_t, ny);
  for (int k = 0; k < layout.n_t; ++k)
    for (int s = 0; s < ny; ++s) grid(k, s) = vector(k * ny + s);
  return grid;
}

Eigen::VectorXd statics_block(const Eigen::VectorXd& vector, const Layout& layout) {
  return vector.tail(layout.n_theta());
}

std::vector<std::pair<std::string, double>> default_group_constants(const Layout& layout) {
  std::vector<std::pair<std::string, double>> constants;
  const double wbar = 1.0 / std::sqrt(static_cast<double>(layout.n_t));
  for (const auto& name : layout.signal_names) constants.emplace_back("sig." + name, wbar);
  for (const auto& name : layout.static_names) constants.emplace_back("static." + name, 1.0);
  return constants;
}

WeightVector compute_weights(const Dataset& dataset,
                             const std::vector<std::pair<std::string, double>>& group_constants,
                             bool floor_zero_variance) {
  const Layout& layout = dataset.layout;
  const int n_x = layout.n_x();
  if (dataset.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty dataset");

  auto constant_of = [&](const std::string& group) {
    for (const auto& [name, value] : group_constants)
      if (name == group) return value;
    throw Error(ErrorCode::InvalidArgument, "no group constant for '" + group + "'");
  };

  WeightVector weights;
  weights.group_constants = group_constants;
  weights.alpha.resize(n_x);

  const double n = static_cast<double>(dataset.size());
  for (int k = 0; k < n_x; ++k) {
    const int ny = layout.n_y();
    const std::string group = k < layout.n_t * ny
                                  ? "sig." + layout.signal_names[static_cast<std::size_t>(k % ny)]
                                  : "static." + layout.static_names[static_cast<std::size_t>(
                                                    k - layout.n_t * ny)];
    const double wbar = constant_of(group);

    const auto column = dataset.vectors.col(k);
    const double mu = column.mean();
    double var = (column.array() - mu).square().sum() / n;
    double std_k = std::sqrt(var);
    if (std_k <= 0.0) {
      if (!floor_zero_variance)
        throw Error(ErrorCode::ZeroVariance,
                    "parameter " + std::to_string(k) + " (" + layout.column_name(k) +
                        ") has zero variance");
      const double scale = column.array().abs().mean();
      std_k = 1e-12 * (scale > 0.0 ? scale : 1.0);
    }
    weights.alpha(k) = wbar / std_k;
  }
  return weights;
}

WeightVector compute_weights(const Dataset& dataset, bool floor_zero_variance) {
  return compute_weights(dataset, default_group_constants(dataset.layout), floor_zero_variance);
}

Dataset select_rows(const Dataset& dataset, const std::vector<int>& rows) {
  Dataset out;
  out.layout = dataset.layout;
  out.vectors.resize(static_cast<Eigen::Index>(rows.size()), dataset.vectors.cols());
  out.ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.vectors.row(static_cast<Eigen::Index>(i)) = dataset.vectors.row(rows[i]);
    out.ids.push_back(dataset.ids[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double test_fraction,
                                          std::uint64_t seed) {
  const int n = dataset.size();
  if (n < 2) throw Error(ErrorCode::DegenerateSplit, "need at least 2 elements to split");
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  if (n_test < 1 || n_test >= n)
    throw Error(ErrorCode::DegenerateSplit,
                "fraction " + std::to_string(test_fraction) + " leaves an empty side for n=" +
                    std::to_string(n));

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::substream(seed, "split");
  for (int i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[rng.uniform_index(static_cast<std::size_t>(i) + 1)]);

  std::vector<int> test_rows(order.begin(), order.begin() + n_test);
  std::vector<int> train_rows(order.begin() + n_test, order.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {select_rows(dataset, train_rows), select_rows(dataset, test_rows)};
}

}  // namespace scenrep
