#include "scenrep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scenrep/parallel.hpp"
#include "scenrep/stats.hpp"

namespace scenrep {

namespace {

std::string indexed_id(const std::string& prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "-%06d", i);
  return prefix + buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  return Rng::substream(seed, name, index).next_u64();
}

Dataset dataset_from_coords(const ReducedBasis& basis, const Eigen::MatrixXd& coords,
                            const std::string& id_prefix) {
  Dataset out;
  out.layout = basis.layout;
  out.vectors.resize(coords.rows(), basis.layout.n_x());
  out.ids.reserve(static_cast<std::size_t>(coords.rows()));
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    out.vectors.row(i) = reconstruct(basis, coords.row(i).transpose()).transpose();
    out.ids.push_back(indexed_id(id_prefix, static_cast<int>(i)));
  }
  return out;
}

// Fixed-parameterization coordinate matrix: one row of extracted features
// per training vector.
Eigen::MatrixXd fixed_coordinates(const Dataset& train) {
  const bool lvd = train.layout.category == Category::LVD;
  if (!lvd && train.layout.category != Category::CUT_IN)
    throw Error(ErrorCode::InvalidArgument,
                "fixed parameterization needs an LVD or CUT_IN dataset");
  Eigen::MatrixXd coords(train.size(), lvd ? 4 : 5);
  for (int i = 0; i < train.size(); ++i) {
    const Eigen::VectorXd row = train.vectors.row(i).transpose();
    if (lvd) {
      const FixedLvdParams p = fit_fixed_lvd(row, train.layout);
      coords.row(i) << p.speed_reduction, p.final_speed, p.duration, p.initial_time_gap;
    } else {
      const FixedCutinParams p = fit_fixed_cutin(row, train.layout);
      coords.row(i) << p.mean_speed, p.initial_lateral_position, p.duration,
          p.ego_initial_speed, p.initial_longitudinal_position;
    }
  }
  return coords;
}

Dataset synth_fixed_rows(const Dataset& train, const Eigen::MatrixXd& rows) {
  const bool lvd = train.layout.category == Category::LVD;
  Dataset out;
  out.layout = train.layout;
  out.vectors.resize(rows.rows(), train.layout.n_x());
  out.ids.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (lvd) {
      FixedLvdParams p{rows(i, 0), rows(i, 1), rows(i, 2), rows(i, 3)};
      out.vectors.row(i) = synth_fixed_lvd(p, train.layout).transpose();
    } else {
      FixedCutinParams p{rows(i, 0), rows(i, 1), rows(i, 2), rows(i, 3), rows(i, 4)};
      out.vectors.row(i) = synth_fixed_cutin(p, train.layout).transpose();
    }
    out.ids.push_back(indexed_id("gen", static_cast<int>(i)));
  }
  return out;
}

// Draws n rows from `draw_one`, redrawing rows with a non-positive duration
// column (index `duration_col`). Capped retries keep bad models loud.
Eigen::MatrixXd sample_valid_rows(int n, int dim, int duration_col,
                                  const std::function<Eigen::MatrixXd(int)>& draw,
                                  int max_retries = 1000) {
  Eigen::MatrixXd out(n, dim);
  int filled = 0;
  int attempts = 0;
  while (filled < n) {
    if (++attempts > max_retries + n)
      throw Error(ErrorCode::NegativeDuration,
                  "fixed-parameter sampler keeps drawing non-positive durations");
    const Eigen::MatrixXd batch = draw(n - filled);
    for (Eigen::Index i = 0; i < batch.rows() && filled < n; ++i) {
      if (batch(i, duration_col) > 0.0) out.row(filled++) = batch.row(i);
    }
  }
  return out;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::SvdKdeDep: return "svd+kde+dep";
    case Method::SvdKdeIndep: return "svd+kde+indep";
    case Method::SvdGaussDep: return "svd+gauss+dep";
    case Method::SvdGaussIndep: return "svd+gauss+indep";
    case Method::FixedKdeDep: return "fixed+kde+dep";
    case Method::FixedKdeIndep: return "fixed+kde+indep";
    case Method::FixedGaussDep: return "fixed+gauss+dep";
    case Method::FixedGaussIndep: return "fixed+gauss+indep";
    case Method::Resample: return "resample";
  }
  return "resample";
}

Method method_from_string(const std::string& name) {
  for (Method m : all_methods())
    if (name == to_string(m)) return m;
  throw Error(ErrorCode::ParseError, "unknown method '" + name + "'");
}

std::vector<Method> all_methods() {
  return {Method::SvdKdeDep,   Method::SvdKdeIndep,   Method::SvdGaussDep,
          Method::SvdGaussIndep, Method::FixedKdeDep, Method::FixedKdeIndep,
          Method::FixedGaussDep, Method::FixedGaussIndep, Method::Resample};
}

GeneratorModel fit_pipeline(const Dataset& train, const WeightVector& weights, int d) {
  BasisFit fit = fit_basis(train, weights, d);
  return GeneratorModel{std::move(fit.basis), fit_kde(fit.train_coords)};
}

Dataset sample_pipeline(const GeneratorModel& model, int n, Rng& rng,
                        const std::string& id_prefix) {
  return dataset_from_coords(model.basis, sample(model.kde, n, rng), id_prefix);
}

Dataset generate_pipeline(const Dataset& train, int d, int n_t, int n_w, std::uint64_t seed) {
  if (n_w < 1) throw Error(ErrorCode::InvalidArgument, "n_w must be positive");
  if (n_t != train.layout.n_t)
    throw Error(ErrorCode::LayoutMismatch, "n_t does not match the dataset layout");
  const WeightVector weights = compute_weights(train);
  const GeneratorModel model = fit_pipeline(train, weights, d);
  Rng rng = Rng::substream(seed, "pipeline/sample");
  return sample_pipeline(model, n_w, rng);
}

Dataset generate_with_method(Method method, const Dataset& train, const WeightVector& weights,
                             int d, int n_w, Rng& rng) {
  switch (method) {
    case Method::Resample:
      return resample_training(train, n_w, rng);

    case Method::SvdKdeDep:
    case Method::SvdKdeIndep:
    case Method::SvdGaussDep:
    case Method::SvdGaussIndep: {
      BasisFit fit = fit_basis(train, weights, d);
      Eigen::MatrixXd coords;
      if (method == Method::SvdKdeDep) {
        coords = sample(fit_kde(fit.train_coords), n_w, rng);
      } else if (method == Method::SvdKdeIndep) {
        coords = sample_independent_kde(fit_independent_kde(fit.train_coords), n_w, rng);
      } else {
        const bool indep = method == Method::SvdGaussIndep;
        coords = sample_gaussian(fit_gaussian(fit.train_coords, indep), n_w, rng);
      }
      return dataset_from_coords(fit.basis, coords, "gen");
    }

    case Method::FixedKdeDep:
    case Method::FixedKdeIndep:
    case Method::FixedGaussDep:
    case Method::FixedGaussIndep: {
      const Eigen::MatrixXd coords = fixed_coordinates(train);
      const int dim = static_cast<int>(coords.cols());
      const int duration_col = train.layout.category == Category::LVD ? 2 : 2;

      std::function<Eigen::MatrixXd(int)> draw;
      if (method == Method::FixedKdeDep) {
        draw = [model = fit_kde(coords), &rng](int k) { return sample(model, k, rng); };
      } else if (method == Method::FixedKdeIndep) {
        draw = [models = fit_independent_kde(coords), &rng](int k) {
          return sample_independent_kde(models, k, rng);
        };
      } else {
        const bool indep = method == Method::FixedGaussIndep;
        draw = [model = fit_gaussian(coords, indep), &rng](int k) {
          return sample_gaussian(model, k, rng);
        };
      }
      return synth_fixed_rows(train, sample_valid_rows(n_w, dim, duration_col, draw));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled method");
}

double bootstrap_median_std(const std::vector<double>& values, int b, std::uint64_t seed) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no values to bootstrap");
  if (b < 100) throw Error(ErrorCode::InvalidArgument, "bootstrap needs b >= 100");
  Rng rng = Rng::substream(seed, "bootstrap");
  const std::size_t n = values.size();
  std::vector<double> medians(static_cast<std::size_t>(b));
  std::vector<double> draw(n);
  for (int k = 0; k < b; ++k) {
    for (std::size_t i = 0; i < n; ++i) draw[i] = values[rng.uniform_index(n)];
    medians[static_cast<std::size_t>(k)] = median(draw);
  }
  return population_std(medians);
}

namespace {

struct PointSpec {
  std::string label;
  int d;  // -1 = resample
};

std::vector<PointSpec> curve_points(const std::vector<int>& d_range) {
  std::vector<PointSpec> points{{"resample", -1}};
  for (int d : d_range) points.push_back({"d=" + std::to_string(d), d});
  return points;
}

int pick_argmin_d(const std::vector<CurvePoint>& points) {
  const CurvePoint* best = nullptr;
  for (const auto& pt : points)
    if (pt.d > 0 && (!best || pt.median_sr < best->median_sr)) best = &pt;
  if (!best) throw Error(ErrorCode::InvalidArgument, "empty d range");

  // Parsimony tie-break: smallest d within one bootstrap std of the minimum.
  const double threshold = best->median_sr + best->bootstrap_std_sr;
  int chosen = best->d;
  for (const auto& pt : points)
    if (pt.d > 0 && pt.d < chosen && pt.median_sr <= threshold) chosen = pt.d;
  return chosen;
}

}  // namespace

SelectionCurve select_d(const Dataset& full, const ExperimentConfig& config) {
  if (config.d_range.empty()) throw Error(ErrorCode::InvalidArgument, "empty d range");
  if (config.repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
  const int d_max = *std::max_element(config.d_range.begin(), config.d_range.end());
  const auto points = curve_points(config.d_range);

  std::vector<std::vector<RunTriple>> triples(points.size());
  for (auto& t : triples) t.resize(static_cast<std::size_t>(config.repeats));

  parallel_for(static_cast<std::size_t>(config.repeats), [&](std::size_t r) {
    const std::uint64_t rseed = derive_seed(config.seed, "select-d/repeat", r);
    auto [train, test] = split_dataset(full, config.test_fraction, rseed);
    const WeightVector weights = compute_weights(train);
    const BasisFit fit = fit_basis(train, weights, d_max);

    for (std::size_t pt = 0; pt < points.size(); ++pt) {
      Rng rng = Rng::substream(rseed, "generate", pt);
      Dataset generated;
      if (points[pt].d < 0) {
        generated = resample_training(train, config.n_w, rng);
      } else {
        const ReducedBasis basis = truncate_basis(fit.basis, points[pt].d);
        const KdeModel kde = fit_kde(fit.train_coords.leftCols(points[pt].d));
        generated = dataset_from_coords(basis, sample(kde, config.n_w, rng), "gen");
      }
      const MetricReport rep =
          sr_metric(generated, test, train, weights, config.p, config.beta);
      triples[pt][r] = {rep.w_test, rep.w_train, rep.sr};
    }
  });

  SelectionCurve curve;
  for (std::size_t pt = 0; pt < points.size(); ++pt) {
    CurvePoint point;
    point.label = points[pt].label;
    point.d = points[pt].d;
    point.runs = triples[pt];
    std::vector<double> sr, wt, pen;
    for (const auto& t : triples[pt]) {
      sr.push_back(t.sr);
      wt.push_back(t.w_test);
      pen.push_back(t.w_test - t.w_train);
    }
    point.median_sr = median(sr);
    point.median_w_test = median(wt);
    point.median_penalty = median(pen);
    point.bootstrap_std_sr =
        bootstrap_median_std(sr, config.bootstrap_b, derive_seed(config.seed, "select-d/boot", pt));
    curve.points.push_back(std::move(point));
  }
  curve.argmin_d = pick_argmin_d(curve.points);
  return curve;
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  return grid;
}

BetaCurve calibrate_beta(const Dataset& full, int d, const std::vector<double>& beta_grid,
                         const ExperimentConfig& config) {
  if (beta_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty beta grid");
  const int d_max = *std::max_element(config.d_range.begin(), config.d_range.end());
  const auto points = curve_points(config.d_range);

  std::vector<std::vector<std::array<double, 3>>> triples(points.size());
  for (auto& t : triples) t.resize(static_cast<std::size_t>(config.repeats));

  parallel_for(static_cast<std::size_t>(config.repeats), [&](std::size_t r) {
    const std::uint64_t rseed = derive_seed(config.seed, "calibrate/repeat", r);
    auto [train, test] = split_dataset(full, config.test_fraction, rseed);

    // Surrogate truth: the d-pipeline fitted on this partition's train set.
    const WeightVector weights = compute_weights(train);
    const GeneratorModel surrogate = fit_pipeline(train, weights, d);
    Rng sur_rng = Rng::substream(rseed, "surrogate");
    const Dataset x_star = sample_pipeline(surrogate, train.size(), sur_rng, "xstar");
    const Dataset z_star = sample_pipeline(surrogate, test.size(), sur_rng, "zstar");
    const Dataset z_large = sample_pipeline(surrogate, config.z_large, sur_rng, "zlarge");

    // Generated vectors vary in every direction the surrogate spans but can
    // be flat elsewhere; flooring keeps Eq-22 weights finite there.
    const WeightVector w_star = compute_weights(x_star, /*floor_zero_variance=*/true);
    const BasisFit fit = fit_basis(x_star, w_star, d_max);

    for (std::size_t pt = 0; pt < points.size(); ++pt) {
      Rng rng = Rng::substream(rseed, "generate", pt);
      Dataset generated;
      if (points[pt].d < 0) {
        generated = resample_training(x_star, config.n_w, rng);
      } else {
        const ReducedBasis basis = truncate_basis(fit.basis, points[pt].d);
        const KdeModel kde = fit_kde(fit.train_coords.leftCols(points[pt].d));
        generated = dataset_from_coords(basis, sample(kde, config.n_w, rng), "gen");
      }
      const double w_test = empirical_wasserstein(z_star, generated, w_star, config.p).value;
      const double w_train = empirical_wasserstein(x_star, generated, w_star, config.p).value;
      const double w_true = empirical_wasserstein(z_large, generated, w_star, config.p).value;
      triples[pt][r] = {w_test, w_train, w_true};
    }
  });

  BetaCurve curve;
  curve.beta_grid = beta_grid;
  std::vector<double> w_true_medians;
  for (std::size_t pt = 0; pt < points.size(); ++pt) {
    BetaCurvePoint point;
    point.label = points[pt].label;
    point.d = points[pt].d;
    point.runs = triples[pt];
    std::vector<double> wt, wtr, wl;
    for (const auto& t : triples[pt]) {
      wt.push_back(t[0]);
      wtr.push_back(t[1]);
      wl.push_back(t[2]);
    }
    point.median_w_test = median(wt);
    point.median_w_train = median(wtr);
    point.median_w_true = median(wl);
    w_true_medians.push_back(point.median_w_true);
    curve.points.push_back(std::move(point));
  }

  for (double beta : beta_grid) {
    std::vector<double> sr_medians;
    for (const auto& point : curve.points) {
      std::vector<double> sr;
      for (const auto& t : point.runs) sr.push_back(t[0] + beta * (t[0] - t[1]));
      sr_medians.push_back(median(sr));
    }
    curve.correlation.push_back(pearson_correlation(sr_medians, w_true_medians));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < beta_grid.size(); ++i)
    if (curve.correlation[i] > curve.correlation[best]) best = i;
  curve.argmax_beta = beta_grid[best];
  curve.correlation_at_argmax = curve.correlation[best];
  return curve;
}

IterationResult iterate_d_beta(const Dataset& full, double beta0,
                               const ExperimentConfig& config) {
  if (!(beta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta0 must be positive");

  IterationResult result;
  double beta = beta0;
  int previous_d = -1;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    ExperimentConfig step = config;
    step.beta = beta;
    step.seed = derive_seed(config.seed, "iterate/select", static_cast<std::uint64_t>(iter));
    const SelectionCurve curve = select_d(full, step);
    const int d_i = curve.argmin_d;
    result.trace.push_back({d_i, beta});

    if (d_i == previous_d) {
      result.d_star = d_i;
      result.beta_star = beta;
      return result;
    }
    previous_d = d_i;

    ExperimentConfig cal = config;
    cal.seed = derive_seed(config.seed, "iterate/calibrate", static_cast<std::uint64_t>(iter));
    try {
      beta = calibrate_beta(full, d_i, default_beta_grid(), cal).argmax_beta;
    } catch (const Error& e) {
      // A flat surrogate curve carries no information about beta.
      if (e.code() != ErrorCode::CorrelationDegenerate) throw;
    }
  }

  std::string trace_str;
  for (const auto& step : result.trace)
    trace_str += " (d=" + std::to_string(step.d) + ", beta=" + std::to_string(step.beta) + ")";
  throw Error(ErrorCode::NonConvergence, "d did not stabilize within " +
                                             std::to_string(config.max_iterations) +
                                             " iterations:" + trace_str);
}

std::vector<MethodScore> compare_methods(const Dataset& full, const std::vector<Method>& methods,
                                         const ExperimentConfig& config) {
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods to compare");

  std::vector<std::vector<RunTriple>> triples(methods.size());
  for (auto& t : triples) t.resize(static_cast<std::size_t>(config.repeats));

  parallel_for(static_cast<std::size_t>(config.repeats), [&](std::size_t r) {
    const std::uint64_t rseed = derive_seed(config.seed, "compare/repeat", r);
    auto [train, test] = split_dataset(full, config.test_fraction, rseed);
    const WeightVector weights = compute_weights(train);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      Rng rng = Rng::substream(rseed, "generate", m);
      const Dataset generated =
          generate_with_method(methods[m], train, weights, config.d, config.n_w, rng);
      const MetricReport rep =
          sr_metric(generated, test, train, weights, config.p, config.beta);
      triples[m][r] = {rep.w_test, rep.w_train, rep.sr};
    }
  });

  std::vector<MethodScore> scores;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodScore score;
    score.method = methods[m];
    score.runs = triples[m];
    std::vector<double> sr;
    for (const auto& t : triples[m]) sr.push_back(t.sr);
    score.median_sr = median(sr);
    score.bootstrap_std_sr =
        bootstrap_median_std(sr, config.bootstrap_b, derive_seed(config.seed, "compare/boot", m));
    scores.push_back(std::move(score));
  }
  std::sort(scores.begin(), scores.end(),
            [](const MethodScore& a, const MethodScore& b) { return a.median_sr < b.median_sr; });
  return scores;
}

}  // namespace scenrep
