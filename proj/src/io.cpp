#include "riskvest/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace riskvest::io {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::SchemaError, where + ": " + message);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) schema_error(where + "." + key, "unknown key");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) schema_error(where + "." + key, "missing required key");
  }
}

double number_at(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) schema_error(where + "." + key, "expected a number");
  return v.get<double>();
}

std::string string_at(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) schema_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

// Line/column of a byte offset, for parse errors.
std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

CaseStudy case_from_json(const json& doc) {
  check_keys(doc, "$", {"controls", "targets", "sigma", "metadata"}, {"controls", "targets", "sigma"});
  CaseStudy study;
  study.sigma = number_at(doc, "sigma", "$");

  if (doc.contains("metadata")) {
    const auto& meta = doc.at("metadata");
    if (!meta.is_object()) schema_error("$.metadata", "expected an object");
    for (const auto& [key, value] : meta.items()) {
      if (!value.is_string()) schema_error("$.metadata." + key, "expected a string");
      study.metadata[key] = value.get<std::string>();
    }
  }

  const auto& targets = doc.at("targets");
  if (!targets.is_array()) schema_error("$.targets", "expected an array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "$.targets[" + std::to_string(i) + "]";
    const auto& t = targets[i];
    check_keys(t, where, {"id", "name", "impact", "threat"}, {"id", "impact", "threat"});
    Target target;
    target.id = string_at(t, "id", where);
    target.name = t.contains("name") ? string_at(t, "name", where) : target.id;
    target.impact = number_at(t, "impact", where);
    target.threat = number_at(t, "threat", where);
    study.targets.push_back(std::move(target));
  }

  const auto& controls = doc.at("controls");
  if (!controls.is_array()) schema_error("$.controls", "expected an array");
  for (std::size_t i = 0; i < controls.size(); ++i) {
    const std::string where = "$.controls[" + std::to_string(i) + "]";
    const auto& c = controls[i];
    check_keys(c, where, {"id", "name", "levels"}, {"id", "levels"});
    Control control;
    control.id = string_at(c, "id", where);
    control.name = c.contains("name") ? string_at(c, "name", where) : control.id;
    const auto& levels = c.at("levels");
    if (!levels.is_array()) schema_error(where + ".levels", "expected an array");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const std::string lw = where + ".levels[" + std::to_string(k) + "]";
      const auto& l = levels[k];
      check_keys(l, lw, {"level", "directCost", "indirectCost", "efficacy", "sigma"},
                 {"level", "directCost", "indirectCost", "efficacy"});
      ControlLevel level;
      const auto& lv = l.at("level");
      if (!lv.is_number_integer()) schema_error(lw + ".level", "expected an integer");
      level.level = lv.get<int>();
      level.directCost = number_at(l, "directCost", lw);
      level.indirectCost = number_at(l, "indirectCost", lw);
      if (l.contains("sigma")) level.sigma = number_at(l, "sigma", lw);
      const auto& eff = l.at("efficacy");
      if (!eff.is_object()) schema_error(lw + ".efficacy", "expected an object");
      for (const auto& [tid, value] : eff.items()) {
        if (!value.is_number()) schema_error(lw + ".efficacy." + tid, "expected a number");
        level.efficacy[tid] = value.get<double>();
      }
      control.levels.push_back(std::move(level));
    }
    std::stable_sort(control.levels.begin(), control.levels.end(),
                     [](const ControlLevel& a, const ControlLevel& b) { return a.level < b.level; });
    study.controls.push_back(std::move(control));
  }
  return study;
}

CaseStudy parse_case(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + position(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  try {
    return case_from_json(doc);
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what());
  }
}

json case_to_json(const CaseStudy& study) {
  json doc;
  doc["sigma"] = study.sigma;
  if (!study.metadata.empty()) doc["metadata"] = study.metadata;
  doc["targets"] = json::array();
  for (const auto& t : study.targets)
    doc["targets"].push_back({{"id", t.id}, {"name", t.name}, {"impact", t.impact}, {"threat", t.threat}});
  doc["controls"] = json::array();
  for (const auto& c : study.controls) {
    json levels = json::array();
    for (const auto& l : c.levels) {
      json level = {{"level", l.level},
                    {"directCost", l.directCost},
                    {"indirectCost", l.indirectCost},
                    {"efficacy", l.efficacy}};
      if (l.sigma) level["sigma"] = *l.sigma;
      levels.push_back(std::move(level));
    }
    doc["controls"].push_back({{"id", c.id}, {"name", c.name}, {"levels", std::move(levels)}});
  }
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

ValidatedCase load_case(const std::string& path) { return validate_case(parse_case(read_file(path), path)); }

void save_case(const std::string& path, const CaseStudy& study) { write_file(path, case_to_json(study).dump(2) + "\n"); }

json solve_payload(const ValidatedCase& validated, const SolveRequest& request, int threads) {
  EngineOptions options;
  options.solver.bins = request.bins;
  options.solver.kappa = request.kappa;
  options.threads = threads;
  PerturbationSpec spec;
  spec.level = request.uncertainty;
  spec.seed = request.seed;
  const TrialResult trial = run_trial(validated, request.budget, spec, options);

  json residual = json::object();
  for (std::size_t t = 0; t < validated.target_count(); ++t)
    residual[validated.target(t).id] = trial.portfolio.perTargetResidual[t];
  json controls = json::array();
  for (std::size_t j = 0; j < validated.control_count(); ++j) controls.push_back(validated.control(j).id);

  return json{
      {"metadata",
       {{"seed", request.seed},
        {"budget", request.budget},
        {"uncertainty", request.uncertainty},
        {"bins", request.bins},
        {"kappa", request.kappa}}},
      {"controls", std::move(controls)},
      {"levels", trial.portfolio.choice},
      {"objective", trial.objective},
      {"totalCost", trial.portfolio.totalCost},
      {"certainObjective", trial.certainObjective},
      {"trueCost", trial.trueCost},
      {"feasibleUnderTrueCosts", trial.feasibleUnderTrueCosts},
      {"perTargetResidual", std::move(residual)},
      {"warnings", trial.portfolio.warnings},
  };
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string levels_to_string(const std::vector<int>& levels) {
  std::string out;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (j) out += '-';
    out += std::to_string(levels[j]);
  }
  return out;
}

std::vector<int> levels_from_string(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, '-')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad level vector '" + text + "'");
    }
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "# riskvest sweep seed=" << result.seed << " trials=" << result.trials << "\n";
  out << kSweepHeader << "\n";
  for (const auto& c : result.cells) {
    out << format_number(c.budget) << ',' << format_number(c.uncertainty) << ',' << format_number(c.meanDamage)
        << ',' << format_number(c.stdDamage) << ',' << format_number(c.infeasibleRate) << ','
        << format_number(c.modalFrequency) << ',' << levels_to_string(c.modalLevels) << "\n";
  }
  return out.str();
}

SweepTable sweep_from_csv(const std::string& text) {
  SweepTable table;
  std::stringstream in(text);
  std::string line;
  bool header = false;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::stringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) table.metadata[token.substr(0, eq)] = token.substr(eq + 1);
      }
      continue;
    }
    if (!header) {
      if (line != kSweepHeader) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": expected 7 fields");
    SweepCell cell;
    try {
      cell.budget = std::stod(fields[0]);
      cell.uncertainty = std::stod(fields[1]);
      cell.meanDamage = std::stod(fields[2]);
      cell.stdDamage = std::stod(fields[3]);
      cell.infeasibleRate = std::stod(fields[4]);
      cell.modalFrequency = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineNo) + ": bad number");
    }
    cell.modalLevels = levels_from_string(fields[6]);
    table.cells.push_back(std::move(cell));
  }
  if (!header) throw Error(ErrorCode::ParseError, "missing sweep header");
  return table;
}

json plot_data(const std::vector<SweepCell>& cells) {
  std::map<double, std::vector<const SweepCell*>> byBudget;
  for (const auto& c : cells) byBudget[c.budget].push_back(&c);
  json series = json::array();
  for (auto& [budget, list] : byBudget) {
    std::stable_sort(list.begin(), list.end(),
                     [](const SweepCell* a, const SweepCell* b) { return a->uncertainty < b->uncertainty; });
    json points = json::array();
    for (const auto* c : list)
      points.push_back({{"uncertainty", c->uncertainty}, {"mean", c->meanDamage}, {"std", c->stdDamage}});
    series.push_back({{"budget", budget}, {"points", std::move(points)}});
  }
  return json{{"series", std::move(series)}};
}

json sweep_to_json(const SweepResult& result) {
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"budget", c.budget},
                     {"uncertainty", c.uncertainty},
                     {"meanDamage", c.meanDamage},
                     {"stdDamage", c.stdDamage},
                     {"infeasibleRate", c.infeasibleRate},
                     {"modalFrequency", c.modalFrequency},
                     {"modalLevels", c.modalLevels},
                     {"trials", c.trials}});
  }
  json base = json::array();
  for (const auto& [budget, levels] : result.baseSolutions) base.push_back({{"budget", budget}, {"levels", levels}});
  json certain = json::array();
  for (const auto& [budget, p] : result.certainBaseline)
    certain.push_back({{"budget", budget}, {"levels", p.choice}, {"objective", p.objective}, {"totalCost", p.totalCost}});
  return json{{"metadata", {{"seed", result.seed}, {"trials", result.trials}}},
              {"cells", std::move(cells)},
              {"baseSolutions", std::move(base)},
              {"certainBaseline", std::move(certain)},
              {"plot", plot_data(result.cells)}};
}

namespace {

std::string table(const std::string& label, const std::map<double, std::vector<int>>& rows, std::size_t controls,
                  bool percent) {
  std::ostringstream out;
  out << label << " |";
  for (std::size_t j = 1; j <= controls; ++j) out << ' ' << j;
  out << "\n";
  for (const auto& [key, levels] : rows) {
    out << (percent ? format_number(key * 100.0) + "%" : format_number(key)) << " |";
    for (std::size_t j = 0; j < controls; ++j) out << ' ' << (j < levels.size() ? levels[j] : 0);
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string solution_table(const std::map<double, std::vector<int>>& rows, std::size_t controls) {
  return table("Uncertainty", rows, controls, true);
}

std::string base_table(const std::map<double, std::vector<int>>& rows, std::size_t controls) {
  return table("Budget", rows, controls, false);
}

std::string render_report(const SweepTable& sweepTable) {
  if (sweepTable.cells.empty()) throw Error(ErrorCode::InvalidValue, "sweep has no cells");
  std::size_t controls = 0;
  std::map<double, std::map<double, std::vector<int>>> byBudget;
  for (const auto& c : sweepTable.cells) {
    controls = std::max(controls, c.modalLevels.size());
    byBudget[c.budget][c.uncertainty] = c.modalLevels;
  }

  std::ostringstream out;
  out << "# Investment sweep report\n\n";
  if (!sweepTable.metadata.empty()) {
    for (const auto& [k, v] : sweepTable.metadata) out << "- " << k << ": " << v << "\n";
    out << "\n";
  }
  std::map<double, std::vector<int>> base;
  for (const auto& [budget, rows] : byBudget) {
    out << "## Optimal solutions for budget " << format_number(budget) << "\n\n```\n"
        << solution_table(rows, controls) << "```\n\n";
    std::vector<std::vector<int>> modal;
    for (const auto& [u, levels] : rows) modal.push_back(levels);
    base[budget] = base_solution(modal);
  }
  out << "## Base solutions\n\n```\n" << base_table(base, controls) << "```\n\n";
  out << "## Expected damage against uncertainty\n\n```json\n" << plot_data(sweepTable.cells).dump(2) << "\n```\n";
  return out.str();
}

}  // namespace riskvest::io
