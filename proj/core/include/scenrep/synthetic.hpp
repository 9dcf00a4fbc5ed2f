#ifndef SCENREP_SYNTHETIC_HPP
#define SCENREP_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "scenrep/scenario.hpp"

namespace scenrep {

// Synthetic ground-truth scenario generators. These stand in for recorded
// data and double as the true distribution in experiments, so the sampler
// is exposed directly.
//
// LVD: the lead vehicle's acceleration is a sum of three half-cosine
// harmonics A_m (1 + cos(m pi tau)) / 2 plus small correlated
// high-harmonic noise, with A3 a fixed blend of A1 and A2 and A1 tied to
// the initial speed. Statics are duration (lognormal, median 4.7 s),
// initial speed (two-component Gaussian mixture, km/h) and initial time
// gap (lognormal, median 1.5 s). Free coordinates: duration, speed, gap,
// the A1 shock and A2 — intrinsic dimension 5 up to the noise floor.
//
// Cut-in: constant-plus-harmonic speed of the cutting vehicle and a
// half-cosine lateral approach from a left/right mixture of start offsets,
// plus harmonic noise on both channels. Statics are duration, ego initial
// speed and initial longitudinal position. Intrinsic dimension 6.
std::vector<Scenario> synth_scenarios(Category category, int n, std::uint64_t seed);

// Convenience: generate and assemble in one step.
Dataset synth_dataset(Category category, int n, std::uint64_t seed, int n_t = 50,
                      Interpolation method = Interpolation::CubicSpline);

}  // namespace scenrep

#endif  // SCENREP_SYNTHETIC_HPP
