#ifndef SCENREP_EXPERIMENTS_HPP
#define SCENREP_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scenrep/baselines.hpp"
#include "scenrep/kde.hpp"
#include "scenrep/ot.hpp"
#include "scenrep/svd.hpp"

namespace scenrep {

// The eight parameterization/density/dependency rows of the method
// comparison plus plain training-set resampling.
enum class Method {
  SvdKdeDep,
  SvdKdeIndep,
  SvdGaussDep,
  SvdGaussIndep,
  FixedKdeDep,
  FixedKdeIndep,
  FixedGaussDep,
  FixedGaussIndep,
  Resample,
};

const char* to_string(Method method);  // e.g. "svd+kde+dep"
Method method_from_string(const std::string& name);
std::vector<Method> all_methods();

struct ExperimentConfig {
  int n_t = 50;
  std::vector<int> d_range = {1, 2, 3, 4, 5, 6, 7, 8};
  int d = 4;  // dimension used by fixed-d operations (compare, surrogates)
  double beta = 0.25;
  double p = 1.0;
  int n_w = 2000;
  int repeats = 50;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  int z_large = 2500;      // size of the large surrogate test set
  int bootstrap_b = 1000;  // resamples for the bootstrap std of medians
  int max_iterations = 10;
};

// SVD basis plus the KDE over its training coordinates: everything needed
// to draw new parameter vectors.
struct GeneratorModel {
  ReducedBasis basis;
  KdeModel kde;
};

GeneratorModel fit_pipeline(const Dataset& train, const WeightVector& weights, int d);
Dataset sample_pipeline(const GeneratorModel& model, int n, Rng& rng,
                        const std::string& id_prefix = "gen");

// fit weights -> fit basis -> fit KDE -> sample -> reconstruct.
Dataset generate_pipeline(const Dataset& train, int d, int n_t, int n_w, std::uint64_t seed);

// One generated set for any comparison method. Fixed parameterizations
// redraw rows whose sampled duration is non-positive.
Dataset generate_with_method(Method method, const Dataset& train, const WeightVector& weights,
                             int d, int n_w, Rng& rng);

struct RunTriple {
  double w_test = 0.0;
  double w_train = 0.0;
  double sr = 0.0;
};

struct CurvePoint {
  std::string label;  // "resample" or "d=<k>"
  int d = -1;         // -1 marks the resample baseline
  double median_sr = 0.0;
  double median_w_test = 0.0;
  double median_penalty = 0.0;  // median of w_test - w_train
  double bootstrap_std_sr = 0.0;
  std::vector<RunTriple> runs;  // one triple per repeat, in repeat order
};

struct SelectionCurve {
  std::vector<CurvePoint> points;  // resample first, then d ascending
  int argmin_d = 0;
};

// Re-splits `repeats` times, generates per d (plus the resample baseline),
// scores everything with the SR metric and reports medians with bootstrap
// stds. The argmin takes the smallest d whose median lies within one
// bootstrap std of the minimum.
SelectionCurve select_d(const Dataset& full, const ExperimentConfig& config);

struct BetaCurvePoint {
  std::string label;
  int d = -1;
  double median_w_test = 0.0;
  double median_w_train = 0.0;
  double median_w_true = 0.0;  // empirical Wasserstein against the large set
  std::vector<std::array<double, 3>> runs;  // (w_test, w_train, w_true)
};

struct BetaCurve {
  std::vector<double> beta_grid;
  std::vector<double> correlation;  // per beta
  double argmax_beta = 0.0;
  double correlation_at_argmax = 0.0;
  std::vector<BetaCurvePoint> points;
};

std::vector<double> default_beta_grid();  // 0, 0.05, ..., 1.0

// The surrogate-truth experiment: per repeat the pipeline fitted on the
// train split acts as ground truth, fresh train/test/large-test sets are
// drawn from it, and every method point (resample + each d) is scored both
// by the SR triple and against the large set. The returned curve is the
// Pearson correlation between the per-point SR medians and the per-point
// large-set medians, per beta.
BetaCurve calibrate_beta(const Dataset& full, int d, const std::vector<double>& beta_grid,
                         const ExperimentConfig& config);

struct IterationStep {
  int d = 0;
  double beta = 0.0;
};

struct IterationResult {
  int d_star = 0;
  double beta_star = 0.0;
  std::vector<IterationStep> trace;
};

// Alternates d selection and beta calibration until the selected d repeats;
// NonConvergence past config.max_iterations. A degenerate correlation keeps
// the previous beta.
IterationResult iterate_d_beta(const Dataset& full, double beta0,
                               const ExperimentConfig& config);

// Standard deviation of the medians of b with-replacement resamples.
double bootstrap_median_std(const std::vector<double>& values, int b, std::uint64_t seed);

struct MethodScore {
  Method method = Method::Resample;
  double median_sr = 0.0;
  double bootstrap_std_sr = 0.0;
  std::vector<RunTriple> runs;
};

// Scores each method over `repeats` partitions; output sorted by median SR
// ascending (best first).
std::vector<MethodScore> compare_methods(const Dataset& full, const std::vector<Method>& methods,
                                         const ExperimentConfig& config);

}  // namespace scenrep

#endif  // SCENREP_EXPERIMENTS_HPP
