#ifndef SCENREP_SCENARIO_HPP
#define SCENREP_SCENARIO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scenrep/error.hpp"

namespace scenrep {

enum class Category { LVD, CUT_IN, CUSTOM };

const char* to_string(Category category);
Category category_from_string(const std::string& name);

struct SignalSample {
  double t;
  double v;
};

// One recorded scenario: multichannel time series over [t0, t1] plus static
// parameters. Signal and static order is the declaration order and is
// significant; every scenario of a dataset must share it.
struct Scenario {
  std::string id;
  double t0 = 0.0;
  double t1 = 0.0;
  Category category = Category::CUSTOM;
  std::vector<std::pair<std::string, std::vector<SignalSample>>> signals;
  std::vector<std::pair<std::string, double>> statics;

  // Checks t1 > t0 and per-signal timestamps (strictly increasing, inside
  // [t0, t1]). Throws Error on violation.
  void validate() const;
};

// Shape of an assembled parameter vector: n_t grid samples of n_y signals
// followed by n_theta statics. Units and category are schema metadata only.
struct Layout {
  int n_t = 0;
  Category category = Category::CUSTOM;
  std::vector<std::string> signal_names;
  std::vector<std::string> static_names;
  std::vector<std::string> signal_units;  // parallel to signal_names, may be empty
  std::vector<std::string> static_units;

  int n_y() const { return static_cast<int>(signal_names.size()); }
  int n_theta() const { return static_cast<int>(static_names.size()); }
  int n_x() const { return n_t * n_y() + n_theta(); }

  // Column k's export name: sig.<name>.<k> for time samples, static.<name>.
  std::string column_name(int k) const;

  bool same_shape(const Layout& other) const;
};

enum class Interpolation { Linear, CubicSpline };

const char* to_string(Interpolation method);
Interpolation interpolation_from_string(const std::string& name);

// A set of assembled parameter vectors with a shared layout, one per row.
struct Dataset {
  Layout layout;
  Eigen::MatrixXd vectors;  // N x n_x
  std::vector<std::string> ids;

  int size() const { return static_cast<int>(vectors.rows()); }
};

// Per-parameter scaling weights alpha with the group constants they were
// derived from (one constant per signal, one per static).
struct WeightVector {
  Eigen::VectorXd alpha;
  std::vector<std::pair<std::string, double>> group_constants;
};

// Evaluates all signals on the uniform n_t grid over [t0, t1]. Row k holds
// every signal at grid time k; outside a signal's recorded range the first
// or last sample is held constant.
Eigen::MatrixXd resample_time_series(const Scenario& scenario, int n_t, Interpolation method);

// Flattens the resampled grid (all signals at time k before time k+1) and
// appends the statics in declaration order.
Eigen::VectorXd assemble_parameter_vector(const Scenario& scenario, int n_t, Interpolation method);

// Assembles a uniform-layout dataset; scenario 0 fixes the schema and every
// other scenario must match it.
Dataset assemble_dataset(const std::vector<Scenario>& scenarios, int n_t, Interpolation method);

Layout layout_from_scenario(const Scenario& scenario, int n_t);

// Inverse views of an assembled vector.
Eigen::MatrixXd time_series_block(const Eigen::VectorXd& vector, const Layout& layout);
Eigen::VectorXd statics_block(const Eigen::VectorXd& vector, const Layout& layout);

// The natural constants: 1/sqrt(n_t) for every signal, 1 for every static,
// so each channel contributes one unit to the total weighted variance.
std::vector<std::pair<std::string, double>> default_group_constants(const Layout& layout);

// alpha_k = wbar(group of k) / population std of parameter k. A parameter
// with zero variance is an error unless floor_zero_variance is set, which
// floors the std at 1e-12 of the parameter's mean magnitude.
WeightVector compute_weights(const Dataset& dataset,
                             const std::vector<std::pair<std::string, double>>& group_constants,
                             bool floor_zero_variance = false);

WeightVector compute_weights(const Dataset& dataset, bool floor_zero_variance = false);

// Disjoint shuffle split; |test| = round(test_fraction * N).
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double test_fraction,
                                          std::uint64_t seed);

// Row-subset helper used by splits and resampling baselines.
Dataset select_rows(const Dataset& dataset, const std::vector<int>& rows);

}  // namespace scenrep

#endif  // SCENREP_SCENARIO_HPP
