#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <scenrep/io.hpp>
#include <scenrep/synthetic.hpp>

using namespace scenrep;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("scenrep-io-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("scenario jsonl round-trips exactly") {
  TempDir dir;
  const auto scenarios = synth_scenarios(Category::CUT_IN, 12, 77);
  save_scenarios_jsonl(scenarios, dir.file("scenarios.jsonl"));
  const auto back = load_scenarios_jsonl(dir.file("scenarios.jsonl"));
  REQUIRE(back.size() == scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    CHECK(back[i].id == scenarios[i].id);
    CHECK(back[i].t0 == scenarios[i].t0);
    CHECK(back[i].t1 == scenarios[i].t1);
    CHECK(back[i].category == scenarios[i].category);
    REQUIRE(back[i].signals.size() == scenarios[i].signals.size());
    for (std::size_t s = 0; s < scenarios[i].signals.size(); ++s) {
      CHECK(back[i].signals[s].first == scenarios[i].signals[s].first);
      REQUIRE(back[i].signals[s].second.size() == scenarios[i].signals[s].second.size());
      for (std::size_t k = 0; k < scenarios[i].signals[s].second.size(); ++k) {
        CHECK(back[i].signals[s].second[k].t == scenarios[i].signals[s].second[k].t);
        CHECK(back[i].signals[s].second[k].v == scenarios[i].signals[s].second[k].v);
      }
    }
    CHECK(back[i].statics == scenarios[i].statics);
  }
}

TEST_CASE("malformed scenario lines carry parse diagnostics") {
  TempDir dir;
  save_text(dir.file("bad.jsonl"), "{\"id\": \"x\", \"t0\": 0}\n");
  try {
    load_scenarios_jsonl(dir.file("bad.jsonl"));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("bad.jsonl:1") != std::string::npos);
  }
}

TEST_CASE("dataset csv round-trips bit-exactly") {
  TempDir dir;
  const Dataset data = synth_dataset(Category::CUT_IN, 9, 3, 7);
  save_dataset_csv(data, dir.file("data.csv"));
  const Dataset back = load_dataset_csv(dir.file("data.csv"));
  CHECK(back.layout.n_t == data.layout.n_t);
  CHECK(back.layout.signal_names == data.layout.signal_names);
  CHECK(back.layout.static_names == data.layout.static_names);
  REQUIRE(back.size() == data.size());
  CHECK((back.vectors - data.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv header validation rejects shuffled columns") {
  TempDir dir;
  save_text(dir.file("bad.csv"), "sig.a.1,sig.a.0\n1.0,2.0\n");
  CHECK_THROWS_AS(load_dataset_csv(dir.file("bad.csv")), Error);
}

TEST_CASE("model json round-trips bit-faithfully") {
  TempDir dir;
  const Dataset train = synth_dataset(Category::LVD, 60, 5, 20);
  const WeightVector weights = compute_weights(train);
  const GeneratorModel model = fit_pipeline(train, weights, 3);
  save_model_json(model, dir.file("model.json"));
  const GeneratorModel back = load_model_json(dir.file("model.json"));

  CHECK((back.basis.mu - model.basis.mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.basis.weights.alpha - model.basis.weights.alpha).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.basis.singular_values - model.basis.singular_values).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((back.basis.left_vectors - model.basis.left_vectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.basis.total_variance == model.basis.total_variance);
  CHECK(back.kde.bandwidth == model.kde.bandwidth);
  CHECK((back.kde.points - model.kde.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.basis.layout.same_shape(model.basis.layout));

  // And the reloaded model generates identical vectors.
  Rng rng1(5), rng2(5);
  const Dataset a = sample_pipeline(model, 10, rng1);
  const Dataset b = sample_pipeline(back, 10, rng2);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("plan csv lists sparse triples") {
  TempDir dir;
  TransportPlan plan;
  plan.n_z = 2;
  plan.n_w = 2;
  plan.entries = {{0, 0, 0.5}, {1, 1, 0.5}};
  save_plan_csv(plan, dir.file("plan.csv"));
  std::ifstream in(dir.file("plan.csv"));
  std::string header, line1;
  std::getline(in, header);
  std::getline(in, line1);
  CHECK(header == "i,j,mass");
  CHECK(line1 == "0,0,0.5");
}

TEST_CASE("format_double survives a parse round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 123456789.123456789}) {
    const double back = std::stod(format_double(v));
    CHECK(back == v);
  }
}

}  // TEST_SUITE
