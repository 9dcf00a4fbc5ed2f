#ifndef SCENREP_IO_HPP
#define SCENREP_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "scenrep/experiments.hpp"
#include "scenrep/ot.hpp"
#include "scenrep/scenario.hpp"
#include "scenrep/svd.hpp"

namespace scenrep {

using ordered_json = nlohmann::ordered_json;

// Scenario files: JSON lines, one scenario per line:
// {"id", "t0", "t1", "category", "signals": {name: [[t, v], ...]},
//  "statics": {name: v}}
std::vector<Scenario> load_scenarios_jsonl(const std::string& path);
void save_scenarios_jsonl(const std::vector<Scenario>& scenarios, const std::string& path);

// Dataset matrices: CSV with one parameter vector per row and header
// columns sig.<name>.<k> / static.<name>.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& dataset, const std::string& path);

// Either format, chosen by extension (.jsonl assembles scenarios first).
Dataset load_dataset_any(const std::string& path, int n_t, Interpolation method);

ordered_json layout_to_json(const Layout& layout);
Layout layout_from_json(const ordered_json& j);

// Basis serialization round-trips bit-faithfully (shortest round-trip
// double formatting).
ordered_json basis_to_json(const ReducedBasis& basis);
ReducedBasis basis_from_json(const ordered_json& j);

ordered_json kde_to_json(const KdeModel& model);
KdeModel kde_from_json(const ordered_json& j);

ordered_json model_to_json(const GeneratorModel& model);
GeneratorModel model_from_json(const ordered_json& j);
void save_model_json(const GeneratorModel& model, const std::string& path);
GeneratorModel load_model_json(const std::string& path);

ordered_json report_to_json(const MetricReport& report);
ordered_json config_to_json(const ExperimentConfig& config);

void save_plan_csv(const TransportPlan& plan, const std::string& path);

ordered_json selection_curve_to_json(const SelectionCurve& curve, const ExperimentConfig& config);
std::string selection_curve_to_csv(const SelectionCurve& curve);

ordered_json beta_curve_to_json(const BetaCurve& curve, const ExperimentConfig& config);
std::string beta_curve_to_csv(const BetaCurve& curve);

ordered_json method_scores_to_json(const std::vector<MethodScore>& scores,
                                   const ExperimentConfig& config);
std::string method_scores_to_csv(const std::vector<MethodScore>& scores);

ordered_json iteration_to_json(const IterationResult& result, const ExperimentConfig& config);

void save_text(const std::string& path, const std::string& content);
std::string format_double(double v);  // %.17g, round-trip exact

}  // namespace scenrep

#endif  // SCENREP_IO_HPP
