#include "scenrep/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace scenrep {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  return out;
}

ordered_json parse_json(const std::string& text, const std::string& where) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }
}

double require_number(const ordered_json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error(ErrorCode::ParseError, where + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_text(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Scenario JSONL
// ---------------------------------------------------------------------------

std::vector<Scenario> load_scenarios_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::vector<Scenario> scenarios;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const ordered_json j = parse_json(line, where);

    Scenario sc;
    if (!j.contains("id") || !j["id"].is_string())
      throw Error(ErrorCode::ParseError, where + ": missing string field 'id'");
    sc.id = j["id"].get<std::string>();
    sc.t0 = require_number(j, "t0", where);
    sc.t1 = require_number(j, "t1", where);
    if (!j.contains("category") || !j["category"].is_string())
      throw Error(ErrorCode::ParseError, where + ": missing string field 'category'");
    sc.category = category_from_string(j["category"].get<std::string>());

    if (!j.contains("signals") || !j["signals"].is_object())
      throw Error(ErrorCode::ParseError, where + ": missing object field 'signals'");
    for (const auto& [name, samples] : j["signals"].items()) {
      if (!samples.is_array())
        throw Error(ErrorCode::ParseError, where + ": signal '" + name + "' is not an array");
      std::vector<SignalSample> sig;
      sig.reserve(samples.size());
      for (const auto& pair : samples) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
          throw Error(ErrorCode::ParseError,
                      where + ": signal '" + name + "' samples must be [t, v] pairs");
        sig.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      sc.signals.emplace_back(name, std::move(sig));
    }

    if (!j.contains("statics") || !j["statics"].is_object())
      throw Error(ErrorCode::ParseError, where + ": missing object field 'statics'");
    for (const auto& [name, value] : j["statics"].items()) {
      if (!value.is_number())
        throw Error(ErrorCode::ParseError, where + ": static '" + name + "' is not a number");
      sc.statics.emplace_back(name, value.get<double>());
    }

    sc.validate();
    scenarios.push_back(std::move(sc));
  }
  if (scenarios.empty())
    throw Error(ErrorCode::ParseError, path + ": no scenarios found");
  return scenarios;
}

void save_scenarios_jsonl(const std::vector<Scenario>& scenarios, const std::string& path) {
  auto out = open_out(path);
  for (const Scenario& sc : scenarios) {
    ordered_json j;
    j["id"] = sc.id;
    j["t0"] = sc.t0;
    j["t1"] = sc.t1;
    j["category"] = to_string(sc.category);
    ordered_json signals = ordered_json::object();
    for (const auto& [name, samples] : sc.signals) {
      ordered_json arr = ordered_json::array();
      for (const auto& s : samples) arr.push_back({s.t, s.v});
      signals[name] = std::move(arr);
    }
    j["signals"] = std::move(signals);
    ordered_json statics = ordered_json::object();
    for (const auto& [name, value] : sc.statics) statics[name] = value;
    j["statics"] = std::move(statics);
    out << j.dump() << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::ParseError, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_line(line);
  Layout layout;
  std::size_t col = 0;
  // Signal columns come first, all signals of time step k before k+1.
  for (; col < header.size(); ++col) {
    const std::string& name = header[col];
    if (name.rfind("sig.", 0) != 0) break;
    const auto last_dot = name.rfind('.');
    if (last_dot == 3)
      throw Error(ErrorCode::ParseError, path + ": malformed column '" + name + "'");
    const std::string signal = name.substr(4, last_dot - 4);
    const int k = std::stoi(name.substr(last_dot + 1));
    if (k == 0) {
      layout.signal_names.push_back(signal);
      layout.signal_units.emplace_back();
    }
    const int n_y = static_cast<int>(layout.signal_names.size());
    if (n_y == 0)
      throw Error(ErrorCode::ParseError,
                  path + ": column '" + name + "' appears before its k=0 sample");
    const int expect_k = static_cast<int>(col) / n_y;
    const std::string& expect_name = layout.signal_names[col % n_y];
    if (k != expect_k || signal != expect_name)
      throw Error(ErrorCode::ParseError,
                  path + ": column '" + name + "' out of order (expected sig." + expect_name +
                      "." + std::to_string(expect_k) + ")");
    layout.n_t = std::max(layout.n_t, k + 1);
  }
  for (; col < header.size(); ++col) {
    const std::string& name = header[col];
    if (name.rfind("static.", 0) != 0)
      throw Error(ErrorCode::ParseError, path + ": unexpected column '" + name + "'");
    layout.static_names.push_back(name.substr(7));
    layout.static_units.emplace_back();
  }
  if (layout.n_y() == 0 && layout.n_theta() == 0)
    throw Error(ErrorCode::ParseError, path + ": no columns");
  if (layout.n_y() > 0 && static_cast<int>(header.size()) != layout.n_x())
    throw Error(ErrorCode::ParseError, path + ": incomplete time-series block");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                             ": expected " + std::to_string(header.size()) +
                                             " fields, got " + std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      try {
        row[f] = std::stod(fields[f]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    path + ":" + std::to_string(line_no) + ": bad number '" + fields[f] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, path + ": no data rows");

  Dataset dataset;
  dataset.layout = layout;
  dataset.vectors.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < rows[i].size(); ++f)
      dataset.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = rows[i][f];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "row-%06zu", i + 1);
    dataset.ids.emplace_back(buf);
  }
  return dataset;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  auto out = open_out(path);
  const int n_x = dataset.layout.n_x();
  for (int k = 0; k < n_x; ++k) out << (k ? "," : "") << dataset.layout.column_name(k);
  out << "\n";
  for (int i = 0; i < dataset.size(); ++i) {
    for (int k = 0; k < n_x; ++k)
      out << (k ? "," : "") << format_double(dataset.vectors(i, k));
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

Dataset load_dataset_any(const std::string& path, int n_t, Interpolation method) {
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0)
    return assemble_dataset(load_scenarios_jsonl(path), n_t, method);
  return load_dataset_csv(path);
}

// ---------------------------------------------------------------------------
// Model JSON
// ---------------------------------------------------------------------------

ordered_json layout_to_json(const Layout& layout) {
  ordered_json j;
  j["n_t"] = layout.n_t;
  j["category"] = to_string(layout.category);
  ordered_json signals = ordered_json::array();
  for (std::size_t s = 0; s < layout.signal_names.size(); ++s)
    signals.push_back({{"name", layout.signal_names[s]},
                       {"unit", s < layout.signal_units.size() ? layout.signal_units[s] : ""}});
  j["signals"] = std::move(signals);
  ordered_json statics = ordered_json::array();
  for (std::size_t s = 0; s < layout.static_names.size(); ++s)
    statics.push_back({{"name", layout.static_names[s]},
                       {"unit", s < layout.static_units.size() ? layout.static_units[s] : ""}});
  j["statics"] = std::move(statics);
  return j;
}

Layout layout_from_json(const ordered_json& j) {
  Layout layout;
  layout.n_t = j.at("n_t").get<int>();
  layout.category = category_from_string(j.at("category").get<std::string>());
  for (const auto& s : j.at("signals")) {
    layout.signal_names.push_back(s.at("name").get<std::string>());
    layout.signal_units.push_back(s.value("unit", ""));
  }
  for (const auto& s : j.at("statics")) {
    layout.static_names.push_back(s.at("name").get<std::string>());
    layout.static_units.push_back(s.value("unit", ""));
  }
  return layout;
}

ordered_json basis_to_json(const ReducedBasis& basis) {
  ordered_json j;
  j["layout"] = layout_to_json(basis.layout);
  j["mu"] = to_vector(basis.mu);
  j["alpha"] = to_vector(basis.weights.alpha);
  ordered_json constants = ordered_json::object();
  for (const auto& [name, value] : basis.weights.group_constants) constants[name] = value;
  j["group_constants"] = std::move(constants);
  j["d"] = basis.d;
  j["singular_values"] = to_vector(basis.singular_values);
  j["all_singular_values"] = to_vector(basis.all_singular_values);
  ordered_json axes = ordered_json::array();
  for (int k = 0; k < basis.d; ++k) axes.push_back(to_vector(basis.left_vectors.col(k)));
  j["left_vectors"] = std::move(axes);
  j["n_train"] = basis.n_train;
  j["total_variance"] = basis.total_variance;
  return j;
}

ReducedBasis basis_from_json(const ordered_json& j) {
  ReducedBasis basis;
  basis.layout = layout_from_json(j.at("layout"));
  basis.mu = from_vector(j.at("mu").get<std::vector<double>>());
  basis.weights.alpha = from_vector(j.at("alpha").get<std::vector<double>>());
  for (const auto& [name, value] : j.at("group_constants").items())
    basis.weights.group_constants.emplace_back(name, value.get<double>());
  basis.d = j.at("d").get<int>();
  basis.singular_values = from_vector(j.at("singular_values").get<std::vector<double>>());
  basis.all_singular_values =
      from_vector(j.at("all_singular_values").get<std::vector<double>>());
  const auto& axes = j.at("left_vectors");
  basis.left_vectors.resize(basis.mu.size(), basis.d);
  for (int k = 0; k < basis.d; ++k)
    basis.left_vectors.col(k) = from_vector(axes.at(k).get<std::vector<double>>());
  basis.n_train = j.at("n_train").get<int>();
  basis.total_variance = j.at("total_variance").get<double>();
  return basis;
}

ordered_json kde_to_json(const KdeModel& model) {
  ordered_json j;
  ordered_json points = ordered_json::array();
  for (int i = 0; i < model.size(); ++i)
    points.push_back(to_vector(model.points.row(i).transpose()));
  j["points"] = std::move(points);
  j["h"] = model.bandwidth;
  j["d"] = model.dim();
  return j;
}

KdeModel kde_from_json(const ordered_json& j) {
  KdeModel model;
  const auto& points = j.at("points");
  const int d = j.at("d").get<int>();
  model.points.resize(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i)
    model.points.row(static_cast<Eigen::Index>(i)) =
        from_vector(points.at(i).get<std::vector<double>>()).transpose();
  model.bandwidth = j.at("h").get<double>();
  return model;
}

ordered_json model_to_json(const GeneratorModel& model) {
  ordered_json j;
  j["schema"] = "scenrep-model";
  j["basis"] = basis_to_json(model.basis);
  j["kde"] = kde_to_json(model.kde);
  return j;
}

GeneratorModel model_from_json(const ordered_json& j) {
  GeneratorModel model;
  model.basis = basis_from_json(j.at("basis"));
  model.kde = kde_from_json(j.at("kde"));
  return model;
}

void save_model_json(const GeneratorModel& model, const std::string& path) {
  save_text(path, model_to_json(model).dump(2) + "\n");
}

GeneratorModel load_model_json(const std::string& path) {
  auto in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return model_from_json(parse_json(buffer.str(), path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports and curves
// ---------------------------------------------------------------------------

ordered_json report_to_json(const MetricReport& report) {
  ordered_json j;
  j["w_test"] = report.w_test;
  j["w_train"] = report.w_train;
  j["sr"] = report.sr;
  j["beta"] = report.beta;
  j["p"] = report.p;
  return j;
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["seed"] = config.seed;
  j["n_t"] = config.n_t;
  j["d"] = config.d;
  j["d_range"] = config.d_range;
  j["beta"] = config.beta;
  j["p"] = config.p;
  j["n_w"] = config.n_w;
  j["repeats"] = config.repeats;
  j["test_fraction"] = config.test_fraction;
  j["z_large"] = config.z_large;
  j["bootstrap_b"] = config.bootstrap_b;
  return j;
}

void save_plan_csv(const TransportPlan& plan, const std::string& path) {
  std::string csv = "i,j,mass\n";
  for (const auto& e : plan.entries)
    csv += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_double(e.mass) + "\n";
  save_text(path, csv);
}

namespace {

ordered_json runs_to_json(const std::vector<RunTriple>& runs) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : runs) arr.push_back({t.w_test, t.w_train, t.sr});
  return arr;
}

}  // namespace

ordered_json selection_curve_to_json(const SelectionCurve& curve,
                                     const ExperimentConfig& config) {
  ordered_json j;
  j["config"] = config_to_json(config);
  ordered_json points = ordered_json::array();
  for (const auto& pt : curve.points) {
    ordered_json p;
    p["label"] = pt.label;
    p["d"] = pt.d;
    p["median_sr"] = pt.median_sr;
    p["median_w_test"] = pt.median_w_test;
    p["median_penalty"] = pt.median_penalty;
    p["bootstrap_std_sr"] = pt.bootstrap_std_sr;
    p["runs"] = runs_to_json(pt.runs);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  j["argmin_d"] = curve.argmin_d;
  return j;
}

std::string selection_curve_to_csv(const SelectionCurve& curve) {
  std::string csv = "label,d,median_sr,median_w_test,median_penalty,bootstrap_std_sr\n";
  for (const auto& pt : curve.points)
    csv += pt.label + "," + std::to_string(pt.d) + "," + format_double(pt.median_sr) + "," +
           format_double(pt.median_w_test) + "," + format_double(pt.median_penalty) + "," +
           format_double(pt.bootstrap_std_sr) + "\n";
  return csv;
}

ordered_json beta_curve_to_json(const BetaCurve& curve, const ExperimentConfig& config) {
  ordered_json j;
  j["config"] = config_to_json(config);
  j["beta_grid"] = curve.beta_grid;
  j["correlation"] = curve.correlation;
  j["argmax_beta"] = curve.argmax_beta;
  j["correlation_at_argmax"] = curve.correlation_at_argmax;
  ordered_json points = ordered_json::array();
  for (const auto& pt : curve.points) {
    ordered_json p;
    p["label"] = pt.label;
    p["d"] = pt.d;
    p["median_w_test"] = pt.median_w_test;
    p["median_w_train"] = pt.median_w_train;
    p["median_w_true"] = pt.median_w_true;
    ordered_json runs = ordered_json::array();
    for (const auto& t : pt.runs) runs.push_back({t[0], t[1], t[2]});
    p["runs"] = std::move(runs);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  return j;
}

std::string beta_curve_to_csv(const BetaCurve& curve) {
  std::string csv = "beta,correlation\n";
  for (std::size_t i = 0; i < curve.beta_grid.size(); ++i)
    csv += format_double(curve.beta_grid[i]) + "," + format_double(curve.correlation[i]) + "\n";
  return csv;
}

ordered_json method_scores_to_json(const std::vector<MethodScore>& scores,
                                   const ExperimentConfig& config) {
  ordered_json j;
  j["config"] = config_to_json(config);
  ordered_json ranking = ordered_json::array();
  for (const auto& s : scores) {
    ordered_json entry;
    entry["method"] = to_string(s.method);
    entry["median_sr"] = s.median_sr;
    entry["bootstrap_std_sr"] = s.bootstrap_std_sr;
    entry["runs"] = runs_to_json(s.runs);
    ranking.push_back(std::move(entry));
  }
  j["ranking"] = std::move(ranking);
  return j;
}

std::string method_scores_to_csv(const std::vector<MethodScore>& scores) {
  std::string csv = "method,median_sr,bootstrap_std_sr\n";
  for (const auto& s : scores)
    csv += std::string(to_string(s.method)) + "," + format_double(s.median_sr) + "," +
           format_double(s.bootstrap_std_sr) + "\n";
  return csv;
}

ordered_json iteration_to_json(const IterationResult& result, const ExperimentConfig& config) {
  ordered_json j;
  j["config"] = config_to_json(config);
  j["d_star"] = result.d_star;
  j["beta_star"] = result.beta_star;
  ordered_json trace = ordered_json::array();
  for (const auto& step : result.trace)
    trace.push_back({{"d", step.d}, {"beta", step.beta}});
  j["trace"] = std::move(trace);
  return j;
}

}  // namespace scenrep
