#pragma once

// ============================================================================
// AC-side case model
//
// The minimal description of a transmission grid needed to derive its dc
// equivalent for geomagnetically induced current (GIC) studies: substations
// with coordinates and grounding resistance, buses, lines, transformers with
// per-phase winding resistances, and generators (used to infer step-up
// transformers that the ac case does not model explicitly).
//
// Ids are opaque positive integers taken from the source data. All types are
// plain values; nothing here owns resources or mutates shared state.
// ============================================================================

#include <optional>
#include <string>
#include <vector>

namespace gicdc {

struct Substation {
    int id = 0;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    // Ground-grid to remote-earth resistance. 0 means solidly earthed,
    // infinity means the substation has no earth tie at all.
    double grounding_r_ohm = 0.0;

    friend bool operator==(const Substation&, const Substation&) = default;
};

struct AcBus {
    int id = 0;
    double nominal_kv = 0.0;   // line-to-line
    int substation_id = 0;
    std::optional<double> latitude_deg;    // falls back to the substation site
    std::optional<double> longitude_deg;
    std::optional<double> v_pu;            // ac voltage magnitude; 1.0 when absent

    friend bool operator==(const AcBus&, const AcBus&) = default;
};

enum class SeriesCapMode { None, Open, Closed, Bypassed };

struct AcLine {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double r_pu = 0.0;       // positive-sequence resistance on the device base
    double mva_base = 0.0;   // three-phase MVA base of r_pu
    SeriesCapMode cap_mode = SeriesCapMode::None;
    int status = 1;          // 0 = out of service

    friend bool operator==(const AcLine&, const AcLine&) = default;
};

enum class XfKind {
    GwyeGwye,
    DeltaGwye,   // delta high side, grounded-wye low side
    GwyeDelta,   // grounded-wye high side, delta low side
    DeltaDelta,
    AutoGwye,    // two-winding autotransformer with grounded common point
    ThreeWinding,
    ThreeWindingAuto
};

struct Transformer {
    int id = 0;
    XfKind kind = XfKind::GwyeGwye;
    int high_bus = 0;
    int low_bus = 0;
    std::optional<int> tertiary_bus;   // required for the three-winding kinds

    // Per-phase winding resistances in ohms. Only the slots meaningful for
    // `kind` are read: high/low/tertiary for wye or delta windings,
    // series/common for the autotransformer decomposition.
    std::optional<double> r_high_ohm;
    std::optional<double> r_low_ohm;
    std::optional<double> r_tertiary_ohm;
    std::optional<double> r_series_ohm;
    std::optional<double> r_common_ohm;

    // Which windings have their neutral connected to the substation ground.
    bool gnd_high = false;
    bool gnd_low = false;
    bool gnd_tertiary = false;
    bool gnd_common = false;   // autotransformer common point

    double k_factor = 0.0;     // MVAr of reactive loss per effective amp at 1 pu
    double mva_3ph = 100.0;    // rating behind the high-side base current
    bool is_implicit_gsu = false;   // synthesized step-up unit, kept out of loss reports

    friend bool operator==(const Transformer&, const Transformer&) = default;
};

struct Generator {
    int id = 0;
    int bus = 0;
    int status = 1;

    friend bool operator==(const Generator&, const Generator&) = default;
};

struct AcCase {
    std::string name;   // provenance label (file path or caller tag), not case data
    std::vector<Substation> substations;
    std::vector<AcBus> buses;
    std::vector<AcLine> lines;
    std::vector<Transformer> transformers;
    std::vector<Generator> generators;

    [[nodiscard]] const Substation* find_substation(int id) const;
    [[nodiscard]] const AcBus* find_bus(int id) const;
    [[nodiscard]] const AcLine* find_line(int id) const;
    [[nodiscard]] const Transformer* find_transformer(int id) const;

    // The name is excluded: two cases are the same grid regardless of where
    // they were read from.
    friend bool operator==(const AcCase& a, const AcCase& b) {
        return a.substations == b.substations && a.buses == b.buses && a.lines == b.lines &&
               a.transformers == b.transformers && a.generators == b.generators;
    }
};

// Bus coordinates with the substation fallback applied. The bus must
// reference a substation that exists.
double bus_latitude(const AcCase& c, const AcBus& bus);
double bus_longitude(const AcCase& c, const AcBus& bus);

// ----------------------------------------------------------------------------
// Validation
// ----------------------------------------------------------------------------

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    int line = 0;   // source line for file-derived diagnostics, 0 otherwise

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Structural checks: id uniqueness, reference resolution, sign constraints,
// tertiary-bus presence for three-winding kinds, and advisory conditions
// such as a zero k_factor (reactive losses will come out zero). Never throws;
// a case is usable downstream iff no Error-severity entry is returned.
[[nodiscard]] std::vector<Diagnostic> validate_case(const AcCase& c);

[[nodiscard]] bool has_errors(const std::vector<Diagnostic>& diags);

} // namespace gicdc
