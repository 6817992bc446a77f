#pragma once

// Case files (JSON), solve reports (JSON), sweep cells (CSV), plot data and
// the markdown tables used by reports.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "riskvest/model.hpp"
#include "riskvest/uncertainty.hpp"

namespace riskvest::io {

using nlohmann::json;

/// Parse + schema check (unknown keys rejected). `source` names the document
/// in error messages. Throws Error(ParseError) or Error(SchemaError).
CaseStudy parse_case(const std::string& text, const std::string& source = "<case>");
CaseStudy case_from_json(const json& doc);
json case_to_json(const CaseStudy& study);

/// Parse, schema check, then validate. Throws Error(IoError) if unreadable.
ValidatedCase load_case(const std::string& path);
void save_case(const std::string& path, const CaseStudy& study);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

struct SolveRequest {
  double budget = 0.0;
  double uncertainty = 0.0;
  std::uint64_t seed = 0;
  int bins = 256;
  double kappa = 1.0;
};

/// Solves one (budget, uncertainty, seed) request; shared by the CLI and the
/// HTTP service so both emit identical payloads.
json solve_payload(const ValidatedCase& validated, const SolveRequest& request, int threads = 1);

/// "%.6g"
std::string format_number(double v);

std::string levels_to_string(const std::vector<int>& levels);  // "4-0-1-0"
std::vector<int> levels_from_string(const std::string& text);

inline constexpr const char* kSweepHeader =
    "budget,uncertainty,mean_damage,std_damage,infeasible_rate,modal_frequency,modal_levels";

/// A leading "# ..." metadata line, then the exact header, then one row per
/// cell, budget-major and uncertainty ascending.
std::string sweep_to_csv(const SweepResult& result);

struct SweepTable {
  std::map<std::string, std::string> metadata;
  std::vector<SweepCell> cells;
};

/// Throws Error(ParseError) on a malformed document.
SweepTable sweep_from_csv(const std::string& text);

json sweep_to_json(const SweepResult& result);

/// One series per budget of (uncertainty, mean, std) points, u ascending.
json plot_data(const std::vector<SweepCell>& cells);

/// Rows "0% | 4 0 1 0 ..." under a header "Uncertainty | 1 2 3 ...", keyed by
/// uncertainty ascending.
std::string solution_table(const std::map<double, std::vector<int>>& rows, std::size_t controls);

/// Rows "5 | 3 0 1 ..." under a header "Budget | 1 2 3 ...".
std::string base_table(const std::map<double, std::vector<int>>& rows, std::size_t controls);

/// Markdown report: one solution table per budget, the base-solution table
/// and the plot data. Throws Error(InvalidValue) if there are no cells.
std::string render_report(const SweepTable& table);

}  // namespace riskvest::io
