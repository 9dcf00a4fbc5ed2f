// scenrep: generate driving-scenario parameter vectors from recorded data
// and score how representative a generated set is.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include <scenrep/experiments.hpp>
#include <scenrep/io.hpp>
#include <scenrep/synthetic.hpp>

using namespace scenrep;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverNonConvergence:
    case ErrorCode::NonConvergence:
    case ErrorCode::CorrelationDegenerate:
    case ErrorCode::ZeroSingularValue:
    case ErrorCode::SingularCovariance:
      return 2;
    default:
      return 1;  // input-side: files, schemas, shapes, degenerate data
  }
}

[[noreturn]] void fail(const Error& e) {
  std::fprintf(stderr, "error: code=%s msg=\"%s\"\n", error_code_name(e.code()),
               e.message().c_str());
  std::exit(exit_code_for(e.code()));
}

[[noreturn]] void fail_internal(const std::exception& e) {
  std::fprintf(stderr, "error: code=Internal msg=\"%s\"\n", e.what());
  std::exit(2);
}

std::string csv_sibling(const std::string& json_path) {
  const auto pos = json_path.rfind(".json");
  if (pos != std::string::npos && pos == json_path.size() - 5)
    return json_path.substr(0, pos) + ".csv";
  return json_path + ".csv";
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  const auto colon1 = spec.find(':');
  if (colon1 != std::string::npos) {
    const auto colon2 = spec.find(':', colon1 + 1);
    if (colon2 == std::string::npos)
      throw Error(ErrorCode::ParseError, "grid must be start:step:stop or a comma list");
    const double start = std::stod(spec.substr(0, colon1));
    const double step = std::stod(spec.substr(colon1 + 1, colon2 - colon1 - 1));
    const double stop = std::stod(spec.substr(colon2 + 1));
    if (!(step > 0.0)) throw Error(ErrorCode::ParseError, "grid step must be positive");
    for (double v = start; v <= stop + 1e-12; v += step) grid.push_back(v);
    return grid;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
  if (grid.empty()) throw Error(ErrorCode::ParseError, "empty grid");
  return grid;
}

std::vector<int> make_d_range(int d_min, int d_max) {
  if (d_min < 1 || d_max < d_min)
    throw Error(ErrorCode::InvalidArgument, "need 1 <= d-min <= d-max");
  std::vector<int> range;
  for (int d = d_min; d <= d_max; ++d) range.push_back(d);
  return range;
}

struct CommonOptions {
  std::uint64_t seed = 0;
  int n_t = 50;
  double p = 1.0;
  double beta = 0.25;
  int repeats = 50;
  double test_fraction = 0.2;
  int n_w = 2000;
  int z_large = 2500;
  int d_min = 1;
  int d_max = 8;
  std::string interp = "cubic_spline";
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_experiment_knobs) {
  cmd->add_option("--seed", opt.seed, "Master seed (echoed; all randomness derives from it)")
      ->capture_default_str();
  cmd->add_option("--n-t", opt.n_t, "Time-grid resolution")->capture_default_str();
  cmd->add_option("--interp", opt.interp, "Interpolation: cubic_spline or linear")
      ->capture_default_str();
  if (with_experiment_knobs) {
    cmd->add_option("--p", opt.p, "Wasserstein order")->capture_default_str();
    cmd->add_option("--beta", opt.beta, "SR overfitting penalty weight")->capture_default_str();
    cmd->add_option("--repeats", opt.repeats, "Partition re-draws")->capture_default_str();
    cmd->add_option("--test-fraction", opt.test_fraction, "Held-out fraction")
        ->capture_default_str();
    cmd->add_option("--n-w", opt.n_w, "Generated set size per run")->capture_default_str();
  }
}

ExperimentConfig to_config(const CommonOptions& opt) {
  ExperimentConfig config;
  config.seed = opt.seed;
  config.n_t = opt.n_t;
  config.p = opt.p;
  config.beta = opt.beta;
  config.repeats = opt.repeats;
  config.test_fraction = opt.test_fraction;
  config.n_w = opt.n_w;
  config.z_large = opt.z_large;
  config.d_range = make_d_range(opt.d_min, opt.d_max);
  return config;
}

void echo_seed(std::uint64_t seed) {
  std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario generation and representativeness toolkit"};
  app.require_subcommand(1);

  struct {
    std::string category = "lvd";
    int n = 1000;
    std::string out;
  } synth_opt;
  CommonOptions synth_common;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic ground-truth scenarios");
  synth_cmd->add_option("--category", synth_opt.category, "lvd or cut-in")
      ->capture_default_str();
  synth_cmd->add_option("--n", synth_opt.n, "Scenario count")->capture_default_str();
  synth_cmd->add_option("--out", synth_opt.out, "Output scenario JSONL")->required();
  add_common(synth_cmd, synth_common, false);

  struct {
    std::string input;
    int d = 4;
    std::string out;
  } fit_opt;
  CommonOptions fit_common;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the SVD basis and KDE on scenarios");
  fit_cmd->add_option("--input", fit_opt.input, "Scenario JSONL")->required();
  fit_cmd->add_option("--d", fit_opt.d, "Reduced dimension")->capture_default_str();
  fit_cmd->add_option("--out", fit_opt.out, "Output model JSON")->required();
  add_common(fit_cmd, fit_common, false);

  struct {
    std::string model;
    int n = 2000;
    std::string out;
  } gen_opt;
  CommonOptions gen_common;
  auto* gen_cmd = app.add_subcommand("generate", "Sample parameter vectors from a model");
  gen_cmd->add_option("--model", gen_opt.model, "Model JSON from fit")->required();
  gen_cmd->add_option("--n", gen_opt.n, "Sample count")->capture_default_str();
  gen_cmd->add_option("--out", gen_opt.out, "Output dataset CSV")->required();
  add_common(gen_cmd, gen_common, false);

  struct {
    std::string generated, test, train, out, plan_out, format = "json";
  } eval_opt;
  CommonOptions eval_common;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a generated set with the SR metric");
  eval_cmd->add_option("--generated", eval_opt.generated, "Generated CSV (or JSONL)")
      ->required();
  eval_cmd->add_option("--test", eval_opt.test, "Test set CSV/JSONL")->required();
  eval_cmd->add_option("--train", eval_opt.train, "Training set CSV/JSONL")->required();
  eval_cmd->add_option("--out", eval_opt.out, "Output report")->required();
  eval_cmd->add_option("--plan-out", eval_opt.plan_out, "Optional test-plan CSV");
  eval_cmd->add_option("--format", eval_opt.format, "json or csv")->capture_default_str();
  add_common(eval_cmd, eval_common, true);

  struct {
    std::string input, out;
  } seld_opt;
  CommonOptions seld_common;
  auto* seld_cmd = app.add_subcommand("select-d", "SR-metric d-selection curve");
  seld_cmd->add_option("--input", seld_opt.input, "Scenario JSONL")->required();
  seld_cmd->add_option("--out", seld_opt.out, "Output JSON (CSV sibling written too)")
      ->required();
  seld_cmd->add_option("--d-min", seld_common.d_min, "Smallest d")->capture_default_str();
  seld_cmd->add_option("--d-max", seld_common.d_max, "Largest d")->capture_default_str();
  add_common(seld_cmd, seld_common, true);

  struct {
    std::string input, out, beta_grid = "0:0.05:1";
    int d = 4;
  } calb_opt;
  CommonOptions calb_common;
  auto* calb_cmd =
      app.add_subcommand("calibrate-beta", "Correlation-vs-beta curve on surrogate truth");
  calb_cmd->add_option("--input", calb_opt.input, "Scenario JSONL")->required();
  calb_cmd->add_option("--d", calb_opt.d, "Surrogate pipeline dimension")
      ->capture_default_str();
  calb_cmd->add_option("--beta-grid", calb_opt.beta_grid, "start:step:stop or comma list")
      ->capture_default_str();
  calb_cmd->add_option("--z-large", calb_common.z_large, "Large test-set size")
      ->capture_default_str();
  calb_cmd->add_option("--out", calb_opt.out, "Output JSON (CSV sibling written too)")
      ->required();
  calb_cmd->add_option("--d-min", calb_common.d_min, "Smallest d of the inner sweep")
      ->capture_default_str();
  calb_cmd->add_option("--d-max", calb_common.d_max, "Largest d of the inner sweep")
      ->capture_default_str();
  add_common(calb_cmd, calb_common, true);

  struct {
    std::string input, out;
    double beta0 = 0.25;
    int max_iterations = 10;
  } auto_opt;
  CommonOptions auto_common;
  auto* auto_cmd = app.add_subcommand("auto", "Iterate d selection and beta calibration");
  auto_cmd->add_option("--input", auto_opt.input, "Scenario JSONL")->required();
  auto_cmd->add_option("--beta0", auto_opt.beta0, "Initial beta")->capture_default_str();
  auto_cmd->add_option("--max-iterations", auto_opt.max_iterations, "Iteration cap")
      ->capture_default_str();
  auto_cmd->add_option("--z-large", auto_common.z_large, "Large test-set size")
      ->capture_default_str();
  auto_cmd->add_option("--out", auto_opt.out, "Output JSON (CSV sibling written too)")
      ->required();
  auto_cmd->add_option("--d-min", auto_common.d_min, "Smallest candidate d")
      ->capture_default_str();
  auto_cmd->add_option("--d-max", auto_common.d_max, "Largest candidate d")
      ->capture_default_str();
  add_common(auto_cmd, auto_common, true);

  struct {
    std::string input, out, methods = "all";
    int d = 4;
  } cmp_opt;
  CommonOptions cmp_common;
  auto* cmp_cmd = app.add_subcommand("compare", "Rank generation methods by median SR");
  cmp_cmd->add_option("--input", cmp_opt.input, "Scenario JSONL")->required();
  cmp_cmd->add_option("--methods", cmp_opt.methods,
                      "all or comma list of method selectors (e.g. svd+kde+dep,resample)")
      ->capture_default_str();
  cmp_cmd->add_option("--d", cmp_opt.d, "Dimension for the svd methods")
      ->capture_default_str();
  cmp_cmd->add_option("--out", cmp_opt.out, "Output JSON (CSV sibling written too)")
      ->required();
  add_common(cmp_cmd, cmp_common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) {
      echo_seed(synth_common.seed);
      const Category category = category_from_string(synth_opt.category);
      const auto scenarios = synth_scenarios(category, synth_opt.n, synth_common.seed);
      save_scenarios_jsonl(scenarios, synth_opt.out);
      std::printf("wrote %s (%d scenarios)\n", synth_opt.out.c_str(), synth_opt.n);

    } else if (fit_cmd->parsed()) {
      echo_seed(fit_common.seed);
      const auto scenarios = load_scenarios_jsonl(fit_opt.input);
      const Dataset train = assemble_dataset(scenarios, fit_common.n_t,
                                             interpolation_from_string(fit_common.interp));
      const WeightVector weights = compute_weights(train);
      const GeneratorModel model = fit_pipeline(train, weights, fit_opt.d);
      save_model_json(model, fit_opt.out);
      std::printf("wrote %s (d=%d, h=%s)\n", fit_opt.out.c_str(), fit_opt.d,
                  format_double(model.kde.bandwidth).c_str());

    } else if (gen_cmd->parsed()) {
      echo_seed(gen_common.seed);
      const GeneratorModel model = load_model_json(gen_opt.model);
      Rng rng = Rng::substream(gen_common.seed, "pipeline/sample");
      const Dataset generated = sample_pipeline(model, gen_opt.n, rng);
      save_dataset_csv(generated, gen_opt.out);
      std::printf("wrote %s (%d vectors)\n", gen_opt.out.c_str(), gen_opt.n);

    } else if (eval_cmd->parsed()) {
      echo_seed(eval_common.seed);
      const Interpolation interp = interpolation_from_string(eval_common.interp);
      const Dataset generated = load_dataset_any(eval_opt.generated, eval_common.n_t, interp);
      const Dataset test = load_dataset_any(eval_opt.test, eval_common.n_t, interp);
      const Dataset train = load_dataset_any(eval_opt.train, eval_common.n_t, interp);
      const WeightVector weights = compute_weights(train);
      const MetricReport report =
          sr_metric(generated, test, train, weights, eval_common.p, eval_common.beta);
      if (eval_opt.format == "csv") {
        save_text(eval_opt.out, "w_test,w_train,sr,beta,p\n" + format_double(report.w_test) +
                                    "," + format_double(report.w_train) + "," +
                                    format_double(report.sr) + "," +
                                    format_double(report.beta) + "," +
                                    format_double(report.p) + "\n");
      } else {
        ordered_json j = report_to_json(report);
        j["seed"] = eval_common.seed;
        save_text(eval_opt.out, j.dump(2) + "\n");
      }
      if (!eval_opt.plan_out.empty()) {
        const auto result = empirical_wasserstein(test, generated, weights, eval_common.p);
        save_plan_csv(result.plan, eval_opt.plan_out);
      }
      std::printf("wrote %s (sr=%s)\n", eval_opt.out.c_str(),
                  format_double(report.sr).c_str());

    } else if (seld_cmd->parsed()) {
      echo_seed(seld_common.seed);
      const auto scenarios = load_scenarios_jsonl(seld_opt.input);
      const Dataset full = assemble_dataset(scenarios, seld_common.n_t,
                                            interpolation_from_string(seld_common.interp));
      const ExperimentConfig config = to_config(seld_common);
      const SelectionCurve curve = select_d(full, config);
      save_text(seld_opt.out, selection_curve_to_json(curve, config).dump(2) + "\n");
      save_text(csv_sibling(seld_opt.out), selection_curve_to_csv(curve));
      std::printf("wrote %s %s (argmin_d=%d)\n", seld_opt.out.c_str(),
                  csv_sibling(seld_opt.out).c_str(), curve.argmin_d);

    } else if (calb_cmd->parsed()) {
      echo_seed(calb_common.seed);
      const auto scenarios = load_scenarios_jsonl(calb_opt.input);
      const Dataset full = assemble_dataset(scenarios, calb_common.n_t,
                                            interpolation_from_string(calb_common.interp));
      const ExperimentConfig config = to_config(calb_common);
      const BetaCurve curve =
          calibrate_beta(full, calb_opt.d, parse_grid(calb_opt.beta_grid), config);
      save_text(calb_opt.out, beta_curve_to_json(curve, config).dump(2) + "\n");
      save_text(csv_sibling(calb_opt.out), beta_curve_to_csv(curve));
      std::printf("wrote %s %s (argmax_beta=%s)\n", calb_opt.out.c_str(),
                  csv_sibling(calb_opt.out).c_str(),
                  format_double(curve.argmax_beta).c_str());

    } else if (auto_cmd->parsed()) {
      echo_seed(auto_common.seed);
      const auto scenarios = load_scenarios_jsonl(auto_opt.input);
      const Dataset full = assemble_dataset(scenarios, auto_common.n_t,
                                            interpolation_from_string(auto_common.interp));
      ExperimentConfig config = to_config(auto_common);
      config.max_iterations = auto_opt.max_iterations;
      const IterationResult result = iterate_d_beta(full, auto_opt.beta0, config);
      save_text(auto_opt.out, iteration_to_json(result, config).dump(2) + "\n");
      std::string trace_csv = "iteration,d,beta\n";
      for (std::size_t i = 0; i < result.trace.size(); ++i)
        trace_csv += std::to_string(i) + "," + std::to_string(result.trace[i].d) + "," +
                     format_double(result.trace[i].beta) + "\n";
      save_text(csv_sibling(auto_opt.out), trace_csv);
      std::printf("wrote %s %s (d=%d, beta=%s)\n", auto_opt.out.c_str(),
                  csv_sibling(auto_opt.out).c_str(), result.d_star,
                  format_double(result.beta_star).c_str());

    } else if (cmp_cmd->parsed()) {
      echo_seed(cmp_common.seed);
      const auto scenarios = load_scenarios_jsonl(cmp_opt.input);
      const Dataset full = assemble_dataset(scenarios, cmp_common.n_t,
                                            interpolation_from_string(cmp_common.interp));
      std::vector<Method> methods;
      if (cmp_opt.methods == "all") {
        methods = all_methods();
      } else {
        std::stringstream ss(cmp_opt.methods);
        std::string item;
        while (std::getline(ss, item, ',')) methods.push_back(method_from_string(item));
      }
      ExperimentConfig config = to_config(cmp_common);
      config.d = cmp_opt.d;
      const auto scores = compare_methods(full, methods, config);
      save_text(cmp_opt.out, method_scores_to_json(scores, config).dump(2) + "\n");
      save_text(csv_sibling(cmp_opt.out), method_scores_to_csv(scores));
      std::printf("wrote %s %s (best=%s)\n", cmp_opt.out.c_str(),
                  csv_sibling(cmp_opt.out).c_str(), to_string(scores.front().method));
    }
  } catch (const Error& e) {
    fail(e);
  } catch (const std::exception& e) {
    fail_internal(e);
  }
  return 0;
}
