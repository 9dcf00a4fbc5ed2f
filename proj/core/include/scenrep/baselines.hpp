#ifndef SCENREP_BASELINES_HPP
#define SCENREP_BASELINES_HPP

#include <Eigen/Dense>
#include <vector>

#include "scenrep/kde.hpp"
#include "scenrep/rng.hpp"
#include "scenrep/scenario.hpp"

namespace scenrep {

// Classic four-parameter description of a braking lead vehicle: the speed
// runs from final_speed + speed_reduction down to final_speed along a half
// cosine, so acceleration vanishes at both ends of the scenario.
struct FixedLvdParams {
  double speed_reduction = 0.0;   // m/s
  double final_speed = 0.0;       // m/s
  double duration = 0.0;          // s
  double initial_time_gap = 0.0;  // s
};

// Five-parameter cut-in: constant speed, half-cosine lateral motion ending
// on the ego lane's center.
struct FixedCutinParams {
  double mean_speed = 0.0;                     // m/s
  double initial_lateral_position = 0.0;       // m
  double duration = 0.0;                       // s
  double ego_initial_speed = 0.0;              // km/h
  double initial_longitudinal_position = 0.0;  // m
};

struct GaussianModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // population covariance; diagonal in independent mode
  Eigen::MatrixXd chol;        // factor used for sampling
};

// Selection with replacement of n_w rows.
Dataset resample_training(const Dataset& x, int n_w, std::uint64_t seed);
Dataset resample_training(const Dataset& x, int n_w, Rng& rng);

// Feature extraction from an assembled LVD vector (acceleration channel +
// duration / initial speed / time gap statics) and its inverse synthesis.
// Round-trips exactly on model-generated vectors.
FixedLvdParams fit_fixed_lvd(const Eigen::VectorXd& vector, const Layout& layout);
Eigen::VectorXd synth_fixed_lvd(const FixedLvdParams& params, const Layout& layout);

FixedCutinParams fit_fixed_cutin(const Eigen::VectorXd& vector, const Layout& layout);
Eigen::VectorXd synth_fixed_cutin(const FixedCutinParams& params, const Layout& layout);

// rows of `data` are observations. Independent mode zeroes the off-diagonal
// before factorization. Near-singular covariances get a trace-scaled ridge.
GaussianModel fit_gaussian(const Eigen::MatrixXd& data, bool independent);
Eigen::MatrixXd sample_gaussian(const GaussianModel& model, int n, Rng& rng);

// The "multiple univariate KDEs" variant: one kde per coordinate, sampled
// independently.
std::vector<KdeModel> fit_independent_kde(const Eigen::MatrixXd& data);
Eigen::MatrixXd sample_independent_kde(const std::vector<KdeModel>& models, int n, Rng& rng);

}  // namespace scenrep

#endif  // SCENREP_BASELINES_HPP
