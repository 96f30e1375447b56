// ============================================================================
// gicdc command line tool
//
// Subcommands:
//   build-dc <case> [--out net.csv]      dump the dc network tables
//   solve <case> ... --out dir           one field, one blocker scenario
//   compare-blockers <case> ... --out dir  none / neutral@all / substation@all
//                                          / seriescap@all side by side
//
// Exit codes: 0 success, 1 usage error, 2 data error.
// ============================================================================

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gicdc/blockers.hpp"
#include "gicdc/builder.hpp"
#include "gicdc/coupling.hpp"
#include "gicdc/errors.hpp"
#include "gicdc/io.hpp"
#include "gicdc/model.hpp"
#include "gicdc/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void print_diagnostics(const std::vector<gicdc::Diagnostic>& diags) {
    for (const auto& d : diags) {
        const char* tag = d.severity == gicdc::Severity::Error ? "error" : "warning";
        if (d.line > 0) {
            std::cerr << tag << " (line " << d.line << "): " << d.message << "\n";
        } else {
            std::cerr << tag << ": " << d.message << "\n";
        }
    }
}

// Loads and validates, or reports and signals the data-error exit.
std::optional<gicdc::AcCase> load_or_report(const std::string& path) {
    gicdc::ParsedCase parsed = gicdc::load_case(path);
    print_diagnostics(parsed.diagnostics);
    return parsed.ac_case;
}

struct FieldArgs {
    std::vector<double> uniform;      // magnitude, bearing
    std::string line_volts_path;

    [[nodiscard]] bool given() const { return !uniform.empty() || !line_volts_path.empty(); }

    // Returns the field and its label, or reports a data error.
    [[nodiscard]] std::optional<std::pair<gicdc::FieldSource, std::string>> resolve() const {
        if (!uniform.empty()) {
            gicdc::UniformField f;
            f.magnitude_v_per_km = uniform[0];
            f.bearing_deg = std::fmod(uniform[1], 360.0);
            if (f.bearing_deg < 0.0) f.bearing_deg += 360.0;
            if (f.magnitude_v_per_km < 0.0) {
                std::cerr << "error: field magnitude must be >= 0\n";
                return std::nullopt;
            }
            const std::string label = "uniform_" + gicdc::format_num(f.magnitude_v_per_km) +
                                      "Vkm_" + gicdc::format_num(f.bearing_deg) + "deg";
            return std::make_pair(gicdc::FieldSource(f), label);
        }
        gicdc::ParsedLineVoltages parsed = gicdc::load_line_voltages(line_volts_path);
        print_diagnostics(parsed.diagnostics);
        if (!parsed.table) return std::nullopt;
        const std::string label =
            "table_" + std::filesystem::path(line_volts_path).stem().string();
        return std::make_pair(gicdc::FieldSource(*parsed.table), label);
    }
};

double parse_resistance_flag(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !(v > 0.0)) {
        throw CLI::ValidationError("--implicit-ground-r",
                                   "must be a positive resistance or 'inf'");
    }
    return v;
}

int run_build_dc(const std::string& case_path, const std::string& out_path,
                 const gicdc::BuilderConfig& cfg) {
    const auto ac = load_or_report(case_path);
    if (!ac) return kExitData;
    gicdc::BuildResult built = gicdc::build(*ac, cfg);
    print_diagnostics(built.notes);
    const std::string text = gicdc::write_network(built.network);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        const std::filesystem::path p(out_path);
        gicdc::write_file(p.parent_path().empty() ? "." : p.parent_path().string(),
                          p.filename().string(), text);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int run_solve(const std::string& case_path, const FieldArgs& field_args,
              const std::string& blocker, const std::vector<int>& locations,
              const std::string& out_dir, const gicdc::BuilderConfig& cfg) {
    const auto ac = load_or_report(case_path);
    if (!ac) return kExitData;
    const auto field = field_args.resolve();
    if (!field) return kExitData;

    gicdc::BlockerScenario scenario;
    if (blocker == "none") scenario.kind = gicdc::BlockerKind::None;
    else if (blocker == "neutral") scenario.kind = gicdc::BlockerKind::Neutral;
    else if (blocker == "substation") scenario.kind = gicdc::BlockerKind::Substation;
    else scenario.kind = gicdc::BlockerKind::SeriesCap;
    scenario.locations = locations;
    scenario.all_locations =
        scenario.kind != gicdc::BlockerKind::None && locations.empty();

    gicdc::SolveResult result = gicdc::run(*ac, cfg, field->first, scenario);
    print_diagnostics(result.notes);

    const std::vector<gicdc::LabeledRun> runs = {
        {field->second, scenario.label(), std::move(result)}};
    gicdc::write_file(out_dir, "results.csv", gicdc::write_results_csv(runs));
    gicdc::write_file(out_dir, "branches.csv", gicdc::write_branches_csv(runs));
    std::cout << "scenario " << runs[0].scenario_label << ": total qloss "
              << gicdc::format_num(runs[0].result.total_qloss_mvar) << " MVAr\n";
    std::cout << "wrote " << out_dir << "/results.csv and branches.csv\n";
    return kExitOk;
}

int run_compare(const std::string& case_path, const FieldArgs& field_args,
                const std::string& out_dir, const gicdc::BuilderConfig& cfg) {
    const auto ac = load_or_report(case_path);
    if (!ac) return kExitData;
    const auto field = field_args.resolve();
    if (!field) return kExitData;

    const std::vector<gicdc::BlockerScenario> scenarios = {
        {gicdc::BlockerKind::None, false, {}},
        {gicdc::BlockerKind::Neutral, true, {}},
        {gicdc::BlockerKind::Substation, true, {}},
        {gicdc::BlockerKind::SeriesCap, true, {}},
    };
    const std::vector<gicdc::LabeledField> fields = {{field->second, field->first}};
    const auto runs = gicdc::scenario_matrix(*ac, cfg, fields, scenarios);
    for (const auto& r : runs) print_diagnostics(r.result.notes);

    gicdc::write_file(out_dir, "results.csv", gicdc::write_results_csv(runs));
    gicdc::write_file(out_dir, "branches.csv", gicdc::write_branches_csv(runs));
    gicdc::write_file(out_dir, "comparison.csv", gicdc::write_comparison_csv(runs));
    gicdc::write_file(out_dir, "qloss_by_transformer.csv",
                      gicdc::write_qloss_by_transformer_csv(runs));
    for (const auto& r : runs) {
        std::cout << r.scenario_label << ": total qloss "
                  << gicdc::format_num(r.result.total_qloss_mvar) << " MVAr\n";
    }
    std::cout << "wrote 4 files under " << out_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dc network construction and GIC blocking analysis"};
    app.require_subcommand(1);

    std::string case_path;
    std::string out_path;
    std::string out_dir;
    std::string blocker = "none";
    std::string ground_r_flag;
    std::vector<int> locations;
    FieldArgs field_args;

    auto add_field_flags = [&](CLI::App* cmd) {
        auto* uf = cmd->add_option("--uniform-field", field_args.uniform,
                                   "uniform field: magnitude (V/km) and bearing (deg)")
                       ->expected(2);
        cmd->add_option("--line-volts", field_args.line_volts_path,
                        "CSV of per-line induced dc voltages")
            ->excludes(uf);
    };
    auto add_ground_flag = [&](CLI::App* cmd) {
        cmd->add_option("--implicit-ground-r", ground_r_flag,
                        "numerical grounding resistance in ohms, or 'inf' to disable");
    };

    CLI::App* build_cmd = app.add_subcommand("build-dc", "construct and dump the dc network");
    build_cmd->add_option("case", case_path, "case file")->required();
    build_cmd->add_option("--out", out_path, "output file (default: stdout)");
    add_ground_flag(build_cmd);

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one field and scenario");
    solve_cmd->add_option("case", case_path, "case file")->required();
    solve_cmd->add_option("--blocker", blocker, "blocking device kind")
        ->check(CLI::IsMember({"none", "neutral", "substation", "seriescap"}));
    solve_cmd->add_option("--locations", locations, "element ids for the blocker")
        ->delimiter(',');
    solve_cmd->add_option("--out", out_dir, "output directory")->required();

    CLI::App* compare_cmd =
        app.add_subcommand("compare-blockers", "run all four blocking scenarios");
    compare_cmd->add_option("case", case_path, "case file")->required();
    compare_cmd->add_option("--out", out_dir, "output directory")->required();

    add_field_flags(solve_cmd);
    add_field_flags(compare_cmd);
    add_ground_flag(solve_cmd);
    add_ground_flag(compare_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        gicdc::BuilderConfig cfg;
        if (app.got_subcommand(compare_cmd)) {
            // Scenario comparison defaults to the pure network: numerical
            // grounding paths would leak a few milliamps around blockers and
            // blur the zero-loss outcomes the comparison is after.
            cfg.implicit_ground_r = std::numeric_limits<double>::infinity();
        }
        if (!ground_r_flag.empty()) cfg.implicit_ground_r = parse_resistance_flag(ground_r_flag);

        if (app.got_subcommand(build_cmd)) {
            return run_build_dc(case_path, out_path, cfg);
        }
        if (!field_args.given()) {
            std::cerr << "error: one of --uniform-field or --line-volts is required\n";
            return kExitUsage;
        }
        if (app.got_subcommand(solve_cmd)) {
            if (blocker == "none" && !locations.empty()) {
                std::cerr << "error: --locations requires a blocker kind\n";
                return kExitUsage;
            }
            return run_solve(case_path, field_args, blocker, locations, out_dir, cfg);
        }
        return run_compare(case_path, field_args, out_dir, cfg);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gicdc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
