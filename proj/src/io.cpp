#include "gicdc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "gicdc/errors.hpp"

namespace gicdc {

// ----------------------------------------------------------------------------
// Formatting
// ----------------------------------------------------------------------------

std::string format_num(double x) {
    if (x == 0.0) return "0";   // canonical zero, fold away -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

namespace {

// Exact round-trip formatting for case files (shortest digits decimal form).
std::string format_exact(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double_token(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size();
}

bool parse_int_token(const std::string& tok, int& out) {
    if (tok.empty()) return false;
    const char* begin = tok.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.size()) return false;
    out = static_cast<int>(v);
    return out == v;
}

// ----------------------------------------------------------------------------
// Case parsing
// ----------------------------------------------------------------------------

const std::map<std::string, XfKind>& kind_tokens() {
    static const std::map<std::string, XfKind> m = {
        {"gwye-gwye", XfKind::GwyeGwye},
        {"delta-gwye", XfKind::DeltaGwye},
        {"gwye-delta", XfKind::GwyeDelta},
        {"delta-delta", XfKind::DeltaDelta},
        {"auto-gwye", XfKind::AutoGwye},
        {"three-winding", XfKind::ThreeWinding},
        {"three-winding-auto", XfKind::ThreeWindingAuto},
    };
    return m;
}

std::string kind_token(XfKind k) {
    for (const auto& [tok, kind] : kind_tokens()) {
        if (kind == k) return tok;
    }
    return "gwye-gwye";
}

const std::map<std::string, SeriesCapMode>& cap_tokens() {
    static const std::map<std::string, SeriesCapMode> m = {
        {"none", SeriesCapMode::None},
        {"open", SeriesCapMode::Open},
        {"closed", SeriesCapMode::Closed},
        {"bypassed", SeriesCapMode::Bypassed},
    };
    return m;
}

std::string cap_token(SeriesCapMode m) {
    for (const auto& [tok, mode] : cap_tokens()) {
        if (mode == m) return tok;
    }
    return "none";
}

struct CaseParser {
    AcCase result;
    std::vector<Diagnostic> diags;
    std::string section;
    int line_no = 0;
    std::map<std::string, std::map<int, int>> id_lines;   // section -> id -> line
    std::map<std::string, bool> seen_sections;

    void error(const std::string& msg) { diags.push_back({Severity::Error, msg, line_no}); }

    // Field accessors; each reports with the 1-based column on failure.
    bool get_int(const std::vector<std::string>& f, size_t col, int& out) {
        if (parse_int_token(f[col - 1], out)) return true;
        error(section + " row: column " + std::to_string(col) + " ('" + f[col - 1] +
              "') is not an integer");
        return false;
    }

    bool get_double(const std::vector<std::string>& f, size_t col, double& out) {
        if (parse_double_token(f[col - 1], out)) return true;
        error(section + " row: column " + std::to_string(col) + " ('" + f[col - 1] +
              "') is not a number");
        return false;
    }

    bool get_opt_double(const std::vector<std::string>& f, size_t col,
                        std::optional<double>& out) {
        if (f[col - 1] == "-") {
            out.reset();
            return true;
        }
        double v = 0.0;
        if (!get_double(f, col, v)) return false;
        out = v;
        return true;
    }

    bool get_flag(const std::vector<std::string>& f, size_t col, bool& out) {
        if (f[col - 1] == "0" || f[col - 1] == "1") {
            out = f[col - 1] == "1";
            return true;
        }
        error(section + " row: column " + std::to_string(col) + " ('" + f[col - 1] +
              "') must be 0 or 1");
        return false;
    }

    void note_id(int id) {
        auto [it, inserted] = id_lines[section].try_emplace(id, line_no);
        if (!inserted) {
            error("duplicate " + section + " id " + std::to_string(id) + " (lines " +
                  std::to_string(it->second) + " and " + std::to_string(line_no) + ")");
        }
    }

    bool check_arity(const std::vector<std::string>& f, size_t want) {
        if (f.size() == want) return true;
        error(section + " row has " + std::to_string(f.size()) + " fields, expected " +
              std::to_string(want));
        return false;
    }

    void parse_substation(const std::vector<std::string>& f) {
        if (!check_arity(f, 4)) return;
        Substation s;
        if (!get_int(f, 1, s.id)) return;
        if (!get_double(f, 2, s.latitude_deg)) return;
        if (!get_double(f, 3, s.longitude_deg)) return;
        if (!get_double(f, 4, s.grounding_r_ohm)) return;
        note_id(s.id);
        result.substations.push_back(s);
    }

    void parse_bus(const std::vector<std::string>& f) {
        if (!check_arity(f, 6)) return;
        AcBus b;
        if (!get_int(f, 1, b.id)) return;
        if (!get_double(f, 2, b.nominal_kv)) return;
        if (!get_int(f, 3, b.substation_id)) return;
        if (!get_opt_double(f, 4, b.latitude_deg)) return;
        if (!get_opt_double(f, 5, b.longitude_deg)) return;
        if (!get_opt_double(f, 6, b.v_pu)) return;
        note_id(b.id);
        result.buses.push_back(b);
    }

    void parse_line(const std::vector<std::string>& f) {
        if (!check_arity(f, 7)) return;
        AcLine l;
        if (!get_int(f, 1, l.id)) return;
        if (!get_int(f, 2, l.from_bus)) return;
        if (!get_int(f, 3, l.to_bus)) return;
        if (!get_double(f, 4, l.r_pu)) return;
        if (!get_double(f, 5, l.mva_base)) return;
        const auto it = cap_tokens().find(f[5]);
        if (it == cap_tokens().end()) {
            error("line row: column 6 ('" + f[5] + "') is not a series capacitor mode");
            return;
        }
        l.cap_mode = it->second;
        if (!get_int(f, 7, l.status)) return;
        note_id(l.id);
        result.lines.push_back(l);
    }

    void parse_transformer(const std::vector<std::string>& f) {
        if (!check_arity(f, 16)) return;
        Transformer t;
        if (!get_int(f, 1, t.id)) return;
        const auto it = kind_tokens().find(f[1]);
        if (it == kind_tokens().end()) {
            error("transformer row: column 2 ('" + f[1] + "') is not a transformer kind");
            return;
        }
        t.kind = it->second;
        if (!get_int(f, 3, t.high_bus)) return;
        if (!get_int(f, 4, t.low_bus)) return;
        if (f[4] != "-") {
            int tb = 0;
            if (!get_int(f, 5, tb)) return;
            t.tertiary_bus = tb;
        }
        if (!get_opt_double(f, 6, t.r_high_ohm)) return;
        if (!get_opt_double(f, 7, t.r_low_ohm)) return;
        if (!get_opt_double(f, 8, t.r_tertiary_ohm)) return;
        if (!get_opt_double(f, 9, t.r_series_ohm)) return;
        if (!get_opt_double(f, 10, t.r_common_ohm)) return;
        if (!get_flag(f, 11, t.gnd_high)) return;
        if (!get_flag(f, 12, t.gnd_low)) return;
        if (!get_flag(f, 13, t.gnd_tertiary)) return;
        if (!get_flag(f, 14, t.gnd_common)) return;
        if (!get_double(f, 15, t.k_factor)) return;
        if (!get_double(f, 16, t.mva_3ph)) return;
        note_id(t.id);
        result.transformers.push_back(t);
    }

    void parse_generator(const std::vector<std::string>& f) {
        if (!check_arity(f, 3)) return;
        Generator g;
        if (!get_int(f, 1, g.id)) return;
        if (!get_int(f, 2, g.bus)) return;
        if (!get_int(f, 3, g.status)) return;
        note_id(g.id);
        result.generators.push_back(g);
    }

    void feed(const std::string& raw) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) return;

        if (line.front() == '[') {
            if (line.back() != ']') {
                error("malformed section header '" + line + "'");
                return;
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            static const std::vector<std::string> known = {"substation", "bus", "line",
                                                           "transformer", "generator"};
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                error("unknown section '" + name + "'");
                section.clear();
                return;
            }
            if (seen_sections[name]) {
                error("section '" + name + "' appears twice");
            }
            seen_sections[name] = true;
            section = name;
            return;
        }

        if (section.empty()) {
            error("data row before any section header");
            return;
        }
        const auto fields = split_ws(line);
        if (section == "substation") parse_substation(fields);
        else if (section == "bus") parse_bus(fields);
        else if (section == "line") parse_line(fields);
        else if (section == "transformer") parse_transformer(fields);
        else parse_generator(fields);
    }
};

} // namespace

ParsedCase parse_case(const std::string& text, const std::string& name) {
    CaseParser p;
    p.result.name = name;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) p.feed(line);

    ParsedCase out;
    out.diagnostics = std::move(p.diags);
    if (has_errors(out.diagnostics)) return out;   // structure broken; skip validation

    auto more = validate_case(p.result);
    out.diagnostics.insert(out.diagnostics.end(), more.begin(), more.end());
    if (!has_errors(out.diagnostics)) out.ac_case = std::move(p.result);
    return out;
}

ParsedCase load_case(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return {std::nullopt,
                {{Severity::Error, "cannot read case file '" + path + "'", 0}}};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_case(buf.str(), path);
}

std::string write_case(const AcCase& c) {
    std::string out;
    auto opt = [](const std::optional<double>& v) {
        return v ? format_exact(*v) : std::string("-");
    };
    auto opt_int = [](const std::optional<int>& v) {
        return v ? std::to_string(*v) : std::string("-");
    };

    out += "[substation]\n";
    out += "# id latitude longitude grounding_r_ohm\n";
    for (const auto& s : c.substations) {
        out += std::to_string(s.id) + " " + format_exact(s.latitude_deg) + " " +
               format_exact(s.longitude_deg) + " " + format_exact(s.grounding_r_ohm) + "\n";
    }

    out += "\n[bus]\n";
    out += "# id nominal_kv substation latitude longitude v_pu\n";
    for (const auto& b : c.buses) {
        out += std::to_string(b.id) + " " + format_exact(b.nominal_kv) + " " +
               std::to_string(b.substation_id) + " " + opt(b.latitude_deg) + " " +
               opt(b.longitude_deg) + " " + opt(b.v_pu) + "\n";
    }

    out += "\n[line]\n";
    out += "# id from to r_pu mva_base cap_mode status\n";
    for (const auto& l : c.lines) {
        out += std::to_string(l.id) + " " + std::to_string(l.from_bus) + " " +
               std::to_string(l.to_bus) + " " + format_exact(l.r_pu) + " " +
               format_exact(l.mva_base) + " " + cap_token(l.cap_mode) + " " +
               std::to_string(l.status) + "\n";
    }

    out += "\n[transformer]\n";
    out += "# id kind high low tertiary r_high r_low r_tertiary r_series r_common"
           " gnd_h gnd_l gnd_t gnd_c k_factor mva\n";
    for (const auto& t : c.transformers) {
        out += std::to_string(t.id) + " " + kind_token(t.kind) + " " +
               std::to_string(t.high_bus) + " " + std::to_string(t.low_bus) + " " +
               opt_int(t.tertiary_bus) + " " + opt(t.r_high_ohm) + " " + opt(t.r_low_ohm) +
               " " + opt(t.r_tertiary_ohm) + " " + opt(t.r_series_ohm) + " " +
               opt(t.r_common_ohm) + " " + (t.gnd_high ? "1" : "0") + " " +
               (t.gnd_low ? "1" : "0") + " " + (t.gnd_tertiary ? "1" : "0") + " " +
               (t.gnd_common ? "1" : "0") + " " + format_exact(t.k_factor) + " " +
               format_exact(t.mva_3ph) + "\n";
    }

    out += "\n[generator]\n";
    out += "# id bus status\n";
    for (const auto& g : c.generators) {
        out += std::to_string(g.id) + " " + std::to_string(g.bus) + " " +
               std::to_string(g.status) + "\n";
    }
    return out;
}

// ----------------------------------------------------------------------------
// Line voltage CSV
// ----------------------------------------------------------------------------

ParsedLineVoltages parse_line_voltages(const std::string& text, const std::string& name) {
    ParsedLineVoltages out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    int id_col = -1;
    int volt_col = -1;
    LineVoltageTable table;
    std::map<int, int> seen;   // line id -> row

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (id_col < 0) {
            for (size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "LineID") id_col = static_cast<int>(i);
                if (cells[i] == "GICInducedDCVolt") volt_col = static_cast<int>(i);
            }
            if (id_col < 0 || volt_col < 0) {
                out.diagnostics.push_back(
                    {Severity::Error,
                     name + ": header must contain LineID and GICInducedDCVolt columns",
                     line_no});
                return out;
            }
            continue;
        }
        const size_t need = static_cast<size_t>(std::max(id_col, volt_col)) + 1;
        if (cells.size() < need) {
            out.diagnostics.push_back(
                {Severity::Error, name + ": row has too few columns", line_no});
            continue;
        }
        int id = 0;
        double v = 0.0;
        if (!parse_int_token(cells[static_cast<size_t>(id_col)], id)) {
            out.diagnostics.push_back(
                {Severity::Error,
                 name + ": LineID '" + cells[static_cast<size_t>(id_col)] +
                     "' is not an integer",
                 line_no});
            continue;
        }
        if (!parse_double_token(cells[static_cast<size_t>(volt_col)], v) ||
            !std::isfinite(v)) {
            out.diagnostics.push_back(
                {Severity::Error,
                 name + ": GICInducedDCVolt '" + cells[static_cast<size_t>(volt_col)] +
                     "' is not a finite number",
                 line_no});
            continue;
        }
        auto [it, inserted] = seen.try_emplace(id, line_no);
        if (!inserted) {
            out.diagnostics.push_back(
                {Severity::Error,
                 name + ": duplicate LineID " + std::to_string(id) + " (rows " +
                     std::to_string(it->second) + " and " + std::to_string(line_no) + ")",
                 line_no});
            continue;
        }
        table.entries.emplace_back(id, v);
    }

    if (id_col < 0) {
        out.diagnostics.push_back(
            {Severity::Error, name + ": file has no header row", 0});
        return out;
    }
    if (!has_errors(out.diagnostics)) out.table = std::move(table);
    return out;
}

ParsedLineVoltages load_line_voltages(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return {std::nullopt,
                {{Severity::Error, "cannot read voltage file '" + path + "'", 0}}};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_line_voltages(buf.str(), path);
}

// ----------------------------------------------------------------------------
// Results writers
// ----------------------------------------------------------------------------

namespace {

std::string role_token(BusRole r) {
    switch (r) {
    case BusRole::BusImage: return "bus_image";
    case BusRole::SubstationGround: return "substation_ground";
    case BusRole::Star: return "star";
    }
    return "unknown";
}

} // namespace

std::string write_network(const GmdNetwork& net) {
    std::string out = "node_id,role,source_id,latitude_deg,longitude_deg\n";
    for (const auto& n : net.buses) {
        out += std::to_string(n.id) + "," + role_token(n.role) + "," +
               std::to_string(n.source_id) + "," + format_num(n.latitude_deg) + "," +
               format_num(n.longitude_deg) + "\n";
    }
    out += "\nbranch_id,from_node,to_node,resistance_ohm,induced_v,origin,parent_id\n";
    for (const auto& b : net.branches) {
        out += std::to_string(b.id) + "," + std::to_string(b.from_node) + "," +
               std::to_string(b.to_node) + "," + format_num(b.resistance_ohm) + "," +
               format_num(b.induced_v) + "," + to_string(b.origin) + "," +
               std::to_string(b.parent_id) + "\n";
    }
    return out;
}

std::string write_results_csv(const std::vector<LabeledRun>& runs) {
    std::string out = "field_label,scenario_label,transformer_id,effective_gic_pu,qloss_mvar\n";
    for (const auto& r : runs) {
        for (const auto& t : r.result.transformers) {
            out += r.field_label + "," + r.scenario_label + "," +
                   std::to_string(t.transformer_id) + "," + format_num(t.effective_gic_pu) +
                   "," + format_num(t.qloss_mvar) + "\n";
        }
    }
    return out;
}

std::string write_branches_csv(const std::vector<LabeledRun>& runs) {
    std::string out = "field_label,scenario_label,branch_id,origin,i_dc_amps\n";
    for (const auto& r : runs) {
        for (const auto& b : r.result.network.branches) {
            out += r.field_label + "," + r.scenario_label + "," + std::to_string(b.id) +
                   "," + to_string(b.origin) + "," +
                   format_num(r.result.branch_current.at(static_cast<size_t>(b.id))) + "\n";
        }
    }
    return out;
}

std::string write_comparison_csv(const std::vector<LabeledRun>& runs) {
    std::string out = "field_label,scenario_label,total_qloss_mvar\n";
    for (const auto& r : runs) {
        out += r.field_label + "," + r.scenario_label + "," +
               format_num(r.result.total_qloss_mvar) + "\n";
    }
    return out;
}

std::string write_qloss_by_transformer_csv(const std::vector<LabeledRun>& runs) {
    // Column per scenario, row per (field, transformer); scenario order is
    // first-appearance order within the run list.
    std::vector<std::string> scenario_labels;
    for (const auto& r : runs) {
        if (std::find(scenario_labels.begin(), scenario_labels.end(), r.scenario_label) ==
            scenario_labels.end()) {
            scenario_labels.push_back(r.scenario_label);
        }
    }
    std::vector<std::string> field_labels;
    for (const auto& r : runs) {
        if (std::find(field_labels.begin(), field_labels.end(), r.field_label) ==
            field_labels.end()) {
            field_labels.push_back(r.field_label);
        }
    }

    std::string out = "field_label,transformer_id";
    for (const auto& s : scenario_labels) out += "," + s;
    out += "\n";

    for (const auto& f : field_labels) {
        // Transformer ids from the first run of this field.
        const LabeledRun* first = nullptr;
        for (const auto& r : runs) {
            if (r.field_label == f) {
                first = &r;
                break;
            }
        }
        if (!first) continue;
        for (const auto& t : first->result.transformers) {
            out += f + "," + std::to_string(t.transformer_id);
            for (const auto& s : scenario_labels) {
                double q = 0.0;
                for (const auto& r : runs) {
                    if (r.field_label != f || r.scenario_label != s) continue;
                    for (const auto& row : r.result.transformers) {
                        if (row.transformer_id == t.transformer_id) q = row.qloss_mvar;
                    }
                }
                out += "," + format_num(q);
            }
            out += "\n";
        }
    }
    return out;
}

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

} // namespace gicdc
