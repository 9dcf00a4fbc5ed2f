#include <doctest.h>

#include <scenrep/experiments.hpp>
#include <scenrep/stats.hpp>
#include <scenrep/synthetic.hpp>

using namespace scenrep;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.n_t = 20;
  config.d_range = {1, 2, 3};
  config.d = 2;
  config.n_w = 60;
  config.repeats = 3;
  config.z_large = 120;
  config.bootstrap_b = 200;
  config.seed = 42;
  return config;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("synthetic generation is deterministic and valid") {
  const auto a = synth_scenarios(Category::LVD, 50, 9);
  const auto b = synth_scenarios(Category::LVD, 50, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].t1 == b[i].t1);
    CHECK(a[i].signals[0].second.size() == b[i].signals[0].second.size());
    for (std::size_t k = 0; k < a[i].signals[0].second.size(); ++k)
      CHECK(a[i].signals[0].second[k].v == b[i].signals[0].second[k].v);
  }
  const auto c = synth_scenarios(Category::LVD, 50, 10);
  CHECK(c[0].t1 != a[0].t1);  // different seed, different data
}

TEST_CASE("synthetic scenarios satisfy the domain constraints at scale") {
  const auto scenarios = synth_scenarios(Category::LVD, 10000, 3);
  for (const auto& sc : scenarios) {
    CHECK(sc.t1 > sc.t0);
    CHECK(sc.statics[0].second > 0.0);  // duration
    CHECK(sc.statics[2].second > 0.0);  // time gap
    sc.validate();
  }
  const Dataset data = assemble_dataset(
      std::vector<Scenario>(scenarios.begin(), scenarios.begin() + 200), 50,
      Interpolation::CubicSpline);
  CHECK(data.layout.n_x() == 53);
}

TEST_CASE("synthetic LVD data has intrinsic dimension about five") {
  const Dataset data = synth_dataset(Category::LVD, 1000, 2024, 50);
  const WeightVector weights = compute_weights(data);
  const BasisFit fit = fit_basis(data, weights, 10);
  CHECK(explained_variance(fit.basis, 5) > 0.9);
  // The noise floor keeps the remaining directions from being empty.
  CHECK(explained_variance(fit.basis, 5) < 1.0);
}

TEST_CASE("pipeline generation validates its arguments and produces layouts") {
  const Dataset train = synth_dataset(Category::LVD, 80, 4, 20);
  CHECK_THROWS_AS(generate_pipeline(train, 3, 20, 0, 1), Error);
  const Dataset one = generate_pipeline(train, 3, 20, 1, 1);
  CHECK(one.size() == 1);
  CHECK(one.layout.same_shape(train.layout));
  const Dataset again = generate_pipeline(train, 3, 20, 1, 1);
  CHECK((one.vectors - again.vectors).norm() == 0.0);
}

TEST_CASE("vanishing bandwidth and full rank degenerate to training resampling") {
  Eigen::MatrixXd rows(6, 3);
  rows << 1.0, 0.2, -0.5, 0.4, -1.0, 2.0, -0.3, 0.8, 1.1, 2.0, 0.0, -1.4, 0.6, 0.6,
      0.6, -1.2, 1.5, 0.3;
  Dataset train;
  train.layout.n_t = 3;
  train.layout.signal_names = {"y"};
  train.layout.signal_units = {""};
  train.vectors = rows;
  for (int i = 0; i < 6; ++i) train.ids.push_back("t" + std::to_string(i));

  WeightVector weights;
  weights.alpha = Eigen::VectorXd::Ones(3);
  weights.group_constants = {{"sig.y", 1.0}};

  GeneratorModel model = fit_pipeline(train, weights, 3);  // full rank
  model.kde.bandwidth = 1e-15;
  Rng rng(2);
  const Dataset generated = sample_pipeline(model, 40, rng);
  for (int i = 0; i < generated.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < train.size(); ++j)
      best = std::min(best, (generated.vectors.row(i) - train.vectors.row(j)).norm());
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("d=4 pipeline beats the d=1 pipeline on held-out data") {
  const Dataset full = synth_dataset(Category::LVD, 300, 11, 30);
  std::vector<double> w1_d4, w1_d1;
  for (int r = 0; r < 12; ++r) {
    auto [train, test] = split_dataset(full, 0.2, 1000 + static_cast<std::uint64_t>(r));
    const WeightVector weights = compute_weights(train);
    for (int d : {1, 4}) {
      const GeneratorModel model = fit_pipeline(train, weights, d);
      Rng rng(500 + static_cast<std::uint64_t>(r));
      const Dataset generated = sample_pipeline(model, 300, rng);
      const double w1 = empirical_wasserstein(test, generated, weights, 1.0).value;
      (d == 4 ? w1_d4 : w1_d1).push_back(w1);
    }
  }
  CHECK(median(w1_d4) < median(w1_d1));
}

TEST_CASE("bootstrap std of a constant sample is zero") {
  CHECK(bootstrap_median_std({2.5, 2.5, 2.5, 2.5}, 500, 1) == 0.0);
}

TEST_CASE("bootstrap std of {0,1} matches the enumerated distribution") {
  // Resamples of size 2: medians {0, 0.5, 0.5, 1}, std = sqrt(1/8) ~ 0.3536.
  const double std_hat = bootstrap_median_std({0.0, 1.0}, 10000, 7);
  CHECK(std_hat >= 0.33);
  CHECK(std_hat <= 0.38);
}

TEST_CASE("bootstrap validates its inputs") {
  CHECK_THROWS_AS(bootstrap_median_std({}, 500, 1), Error);
  CHECK_THROWS_AS(bootstrap_median_std({1.0, 2.0}, 50, 1), Error);
}

TEST_CASE("select_d produces a curve with the resample point first") {
  const Dataset full = synth_dataset(Category::LVD, 150, 5, 20);
  ExperimentConfig config = small_config();
  const SelectionCurve curve = select_d(full, config);
  REQUIRE(curve.points.size() == 4);
  CHECK(curve.points[0].label == "resample");
  CHECK(curve.points[0].d == -1);
  for (std::size_t pt = 1; pt < curve.points.size(); ++pt)
    CHECK(curve.points[pt].d == static_cast<int>(pt));
  for (const auto& point : curve.points) {
    CHECK(point.runs.size() == 3);
    // sr = w_test + beta (w_test - w_train) must be re-derivable per run.
    for (const auto& run : point.runs)
      CHECK(run.sr ==
            doctest::Approx(run.w_test + config.beta * (run.w_test - run.w_train))
                .epsilon(1e-12));
  }
  CHECK(curve.argmin_d >= 1);
  CHECK(curve.argmin_d <= 3);
}

TEST_CASE("repeats=1 medians equal the single run") {
  const Dataset full = synth_dataset(Category::LVD, 100, 6, 20);
  ExperimentConfig config = small_config();
  config.repeats = 1;
  const SelectionCurve curve = select_d(full, config);
  for (const auto& point : curve.points) {
    CHECK(point.median_sr == point.runs[0].sr);
    CHECK(point.median_w_test == point.runs[0].w_test);
  }
}

TEST_CASE("calibrate_beta reduces to the plain correlation at a singleton grid") {
  const Dataset full = synth_dataset(Category::LVD, 150, 5, 20);
  const ExperimentConfig config = small_config();
  const BetaCurve curve = calibrate_beta(full, 2, {0.0}, config);
  REQUIRE(curve.beta_grid.size() == 1);
  REQUIRE(curve.correlation.size() == 1);
  CHECK(curve.argmax_beta == 0.0);

  // beta = 0 correlation is between the w_test medians and w_true medians.
  std::vector<double> wt, wl;
  for (const auto& point : curve.points) {
    wt.push_back(point.median_w_test);
    wl.push_back(point.median_w_true);
  }
  CHECK(curve.correlation[0] == doctest::Approx(pearson_correlation(wt, wl)).epsilon(1e-12));
}

TEST_CASE("constant series make the correlation degenerate") {
  CHECK_THROWS_AS(pearson_correlation({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), Error);
  try {
    pearson_correlation({1.0, 1.0}, {3.0, 4.0});
    FAIL("expected CorrelationDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorrelationDegenerate);
  }
}

TEST_CASE("iterate converges quickly on synthetic data") {
  const Dataset full = synth_dataset(Category::LVD, 150, 5, 20);
  ExperimentConfig config = small_config();
  const IterationResult result = iterate_d_beta(full, 0.25, config);
  CHECK(result.trace.size() <= 3);
  CHECK(result.d_star >= 1);
  CHECK(result.d_star <= 3);
  CHECK(result.trace.back().d == result.d_star);
}

TEST_CASE("rank-deficient data selects the smallest d in one iteration") {
  // Rank-one data plus distinct statics: every d gives the same generator.
  const Dataset base = synth_dataset(Category::LVD, 60, 13, 10);
  Dataset degenerate = base;
  for (int i = 0; i < degenerate.size(); ++i) {
    const double c = 0.1 * i;
    for (int k = 0; k < 10; ++k) degenerate.vectors(i, k) = (1.0 + k) * (1.0 + c);
    degenerate.vectors(i, 10) = 2.0 + c;   // duration
    degenerate.vectors(i, 11) = 10.0 + c;  // speed
    degenerate.vectors(i, 12) = 1.0 + c;   // gap
  }
  ExperimentConfig config = small_config();
  config.d_range = {1};
  config.n_w = 30;
  const IterationResult result = iterate_d_beta(degenerate, 0.25, config);
  CHECK(result.d_star == 1);
  CHECK(result.trace.size() == 2);  // one selection confirmed by the next
}

TEST_CASE("the iteration cap raises NonConvergence with a trace") {
  const Dataset full = synth_dataset(Category::LVD, 100, 6, 20);
  ExperimentConfig config = small_config();
  config.max_iterations = 1;
  try {
    iterate_d_beta(full, 0.25, config);
    FAIL("expected NonConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(std::string(e.what()).find("d=") != std::string::npos);
  }
}

TEST_CASE("compare scores every method and ranks deterministically") {
  const Dataset full = synth_dataset(Category::LVD, 150, 5, 20);
  ExperimentConfig config = small_config();
  config.repeats = 2;
  const auto scores = compare_methods(full, all_methods(), config);
  CHECK(scores.size() == 9);
  for (std::size_t i = 1; i < scores.size(); ++i)
    CHECK(scores[i - 1].median_sr <= scores[i].median_sr);

  const auto again = compare_methods(full, all_methods(), config);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CHECK(scores[i].method == again[i].method);
    CHECK(scores[i].median_sr == again[i].median_sr);
  }
}

TEST_CASE("method names round-trip") {
  for (Method m : all_methods()) CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("svd+banana"), Error);
}

}  // TEST_SUITE
