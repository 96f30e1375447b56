#pragma once

// ============================================================================
// File formats and results output
//
// The case format is a sectioned plain-text file: a [section] header opens
// a table, each row is whitespace-separated fields, '#' starts a comment,
// '-' marks an absent optional field, and 'inf' is accepted where an
// infinite resistance is meaningful. Sections: substation, bus, line,
// transformer, generator.
//
// Line voltage tables arrive as CSV with at least LineID and
// GICInducedDCVolt columns; extra columns are ignored.
//
// All writers are deterministic: fixed column order, 6 significant digits,
// '.' decimal separator, '\n' line endings.
// ============================================================================

#include <optional>
#include <string>
#include <vector>

#include "gicdc/blockers.hpp"
#include "gicdc/coupling.hpp"
#include "gicdc/model.hpp"
#include "gicdc/network.hpp"
#include "gicdc/solver.hpp"

namespace gicdc {

struct ParsedCase {
    std::optional<AcCase> ac_case;       // present only when no error diagnostics
    std::vector<Diagnostic> diagnostics; // parse and validation findings
};

// Parse from text. The name is used for messages only. Never throws on bad
// input; every failure is a diagnostic with a line number.
[[nodiscard]] ParsedCase parse_case(const std::string& text, const std::string& name = "case");

// Read the file and parse. An unreadable path yields an error diagnostic.
[[nodiscard]] ParsedCase load_case(const std::string& path);

// Serialize a case back to the sectioned format. Round-trip safe:
// parse(write(c)) reproduces c.
[[nodiscard]] std::string write_case(const AcCase& c);

struct ParsedLineVoltages {
    std::optional<LineVoltageTable> table;
    std::vector<Diagnostic> diagnostics;
};

[[nodiscard]] ParsedLineVoltages parse_line_voltages(const std::string& text,
                                                     const std::string& name = "csv");
[[nodiscard]] ParsedLineVoltages load_line_voltages(const std::string& path);

// 6-significant-digit number formatting shared by every writer.
[[nodiscard]] std::string format_num(double x);

// Network dump: a nodes table and a branches table in one document,
// separated by a blank line.
[[nodiscard]] std::string write_network(const GmdNetwork& net);

// Long-format transformer results, one row per (field, scenario, transformer):
// field_label,scenario_label,transformer_id,effective_gic_pu,qloss_mvar
[[nodiscard]] std::string write_results_csv(const std::vector<LabeledRun>& runs);

// Branch detail, one row per (field, scenario, branch):
// field_label,scenario_label,branch_id,origin,i_dc_amps
[[nodiscard]] std::string write_branches_csv(const std::vector<LabeledRun>& runs);

// Scenario totals: field_label,scenario_label,total_qloss_mvar
[[nodiscard]] std::string write_comparison_csv(const std::vector<LabeledRun>& runs);

// Bar-chart data: one row per transformer, one qloss column per scenario,
// within a single field. Columns: transformer_id, then scenario labels.
[[nodiscard]] std::string write_qloss_by_transformer_csv(const std::vector<LabeledRun>& runs);

// Write text to out_dir/name, creating out_dir if needed. Throws Error on
// an unwritable path.
void write_file(const std::string& out_dir, const std::string& name, const std::string& text);

} // namespace gicdc
