#include "scenrep/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "scenrep/rng.hpp"

namespace scenrep {

namespace {

std::string indexed_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06d", prefix, i);
  return buf;
}

std::vector<SignalSample> sample_curve(int count, double t1, const auto& f) {
  std::vector<SignalSample> samples(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double t = (k == count - 1) ? t1 : t1 * k / (count - 1);
    samples[static_cast<std::size_t>(k)] = {t, f(t / t1)};
  }
  return samples;
}

Scenario make_lvd(int i, Rng& rng) {
  const double duration = rng.lognormal(std::log(4.7), 0.25);
  const double speed_kmh =
      rng.uniform() < 0.65 ? rng.normal(18.0, 4.0) : rng.normal(32.0, 6.0);
  const double initial_speed = std::max(speed_kmh, 2.0);
  const double time_gap = rng.lognormal(std::log(1.5), 0.30);

  // Half-cosine harmonics phi_m(tau) = (1 + cos(m pi tau)) / 2. Braking
  // strength grows with the initial speed; the third amplitude is a fixed
  // blend of the first two so it adds no dimension of its own.
  const double a1 = -0.35 - 0.035 * initial_speed + rng.normal(0.0, 0.22);
  const double a2 = rng.normal(-0.45, 0.22);
  const double a3 = 0.4 * a1 + 0.15 * a2;
  double noise[6];
  for (int m = 0; m < 6; ++m) noise[m] = rng.normal(0.0, 0.08 / (m + 4));

  auto accel = [=](double tau) {
    double a = a1 * 0.5 * (1.0 + std::cos(M_PI * tau)) +
               a2 * 0.5 * (1.0 + std::cos(2.0 * M_PI * tau)) +
               a3 * 0.5 * (1.0 + std::cos(3.0 * M_PI * tau));
    for (int m = 0; m < 6; ++m) a += noise[m] * std::cos((m + 4) * M_PI * tau);
    return a;
  };

  Scenario sc;
  sc.id = indexed_id("lvd", i);
  sc.t0 = 0.0;
  sc.t1 = duration;
  sc.category = Category::LVD;
  const int count = 60 + static_cast<int>(rng.uniform_index(60));
  sc.signals.emplace_back("acceleration", sample_curve(count, duration, accel));
  sc.statics.emplace_back("duration", duration);
  sc.statics.emplace_back("initial_speed", initial_speed);
  sc.statics.emplace_back("initial_time_gap", time_gap);
  return sc;
}

Scenario make_cutin(int i, Rng& rng) {
  const double duration = rng.lognormal(std::log(5.0), 0.22);
  const double ego_speed_kmh = rng.normal(100.0, 10.0);
  const double longitudinal = rng.normal(18.0, 6.0);
  const double mean_speed = std::max(ego_speed_kmh / 3.6 + rng.normal(0.0, 2.0), 5.0);
  const double side = rng.uniform() < 0.5 ? 1.0 : -1.0;
  const double lateral0 = side * rng.normal(3.4, 0.35);
  const double b1 = rng.normal(0.0, 0.8);
  double speed_noise[4], lat_noise[4];
  for (int m = 0; m < 4; ++m) {
    speed_noise[m] = rng.normal(0.0, 0.05 / (m + 2));
    lat_noise[m] = rng.normal(0.0, 0.06 / (m + 2));
  }

  auto speed = [=](double tau) {
    double v = mean_speed + b1 * std::sin(M_PI * tau);
    for (int m = 0; m < 4; ++m) v += speed_noise[m] * std::cos((m + 2) * M_PI * tau);
    return v;
  };
  auto lateral = [=](double tau) {
    double y = lateral0 * 0.5 * (1.0 + std::cos(M_PI * tau));
    for (int m = 0; m < 4; ++m) y += lat_noise[m] * std::cos((m + 2) * M_PI * tau);
    return y;
  };

  Scenario sc;
  sc.id = indexed_id("cutin", i);
  sc.t0 = 0.0;
  sc.t1 = duration;
  sc.category = Category::CUT_IN;
  const int count = 60 + static_cast<int>(rng.uniform_index(60));
  sc.signals.emplace_back("speed", sample_curve(count, duration, speed));
  sc.signals.emplace_back("lateral_position", sample_curve(count, duration, lateral));
  sc.statics.emplace_back("duration", duration);
  sc.statics.emplace_back("ego_initial_speed", ego_speed_kmh);
  sc.statics.emplace_back("initial_longitudinal_position", longitudinal);
  return sc;
}

}  // namespace

std::vector<Scenario> synth_scenarios(Category category, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "scenario count must be positive");
  if (category == Category::CUSTOM)
    throw Error(ErrorCode::InvalidArgument, "no synthetic generator for CUSTOM");

  std::vector<Scenario> scenarios;
  scenarios.reserve(static_cast<std::size_t>(n));
  const char* stream = category == Category::LVD ? "synth/lvd" : "synth/cutin";
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, stream, static_cast<std::uint64_t>(i));
    scenarios.push_back(category == Category::LVD ? make_lvd(i, rng) : make_cutin(i, rng));
  }
  return scenarios;
}

Dataset synth_dataset(Category category, int n, std::uint64_t seed, int n_t,
                      Interpolation method) {
  Dataset data = assemble_dataset(synth_scenarios(category, n, seed), n_t, method);
  if (category == Category::LVD) {
    data.layout.signal_units = {"m/s^2"};
    data.layout.static_units = {"s", "km/h", "s"};
  } else {
    data.layout.signal_units = {"m/s", "m"};
    data.layout.static_units = {"s", "km/h", "m"};
  }
  return data;
}

}  // namespace scenrep
