#pragma once

// ============================================================================
// dc network construction
//
// Maps the ac case onto its dc equivalent: per-phase line resistances from
// per-unit data, transformer winding decomposition (three phases in parallel,
// so every winding branch carries one third of the per-phase resistance),
// implicit generator step-up units, numerical grounding branches, and the
// series-capacitor handling that rewrites zero-resistance lines.
// ============================================================================

#include <utility>
#include <vector>

#include "gicdc/model.hpp"
#include "gicdc/network.hpp"

namespace gicdc {

struct BuilderConfig {
    // Numerical grounding path added from every bus image to its substation
    // ground node. Set to infinity to disable the branches entirely; the
    // default mirrors the 25 kOhm used by common commercial tools.
    double implicit_ground_r = 25000.0;

    // Stand-in resistance for a line whose computed dc resistance is zero;
    // such lines are treated as bypassed series capacitors.
    double cap_bypass_r = 0.005;

    // Three-winding autotransformer guards: the star-to-low tie pulls the low
    // bus voltage onto the star point, the star-to-ground guard is large
    // enough that the ground path is effectively the common winding alone.
    double star_tie_r = 1e-6;
    double star_common_guard_r = 1e6;

    // Replaces a declared 0-ohm substation grounding resistance (a solid
    // earth connection) since branches must carry strictly positive R.
    double solid_ground_r = 1e-6;

    // Generators on buses at or above this nominal kV get an implicit
    // delta-gwye step-up transformer.
    double gsu_min_kv = 30.0;

    // Implicit step-up branch resistance by exact nominal-kV match, ohms.
    std::vector<std::pair<double, double>> gsu_table = {
        {765.0, 1.089e-6}, {500.0, 1.667e-6}, {345.0, 2.416e-6},
        {230.0, 3.623e-6}, {161.0, 5.176e-6}, {138.0, 6.039e-6},
        {115.0, 7.246e-6},
    };

    [[nodiscard]] bool implicit_grounds_enabled() const;
    // Exact-match lookup; returns nothing for voltages outside the table.
    [[nodiscard]] std::optional<double> gsu_resistance(double nominal_kv) const;
};

// Three-phase dc resistance of a line: r_pu scaled off the per-unit base and
// divided across the three parallel phase conductors.
//   R = r_pu * kV_ll^2 / (3 * MVA_3ph)
[[nodiscard]] double line_dc_resistance(double r_pu, double kv_ll, double mva_3ph);

// Resistance and origin the line contributes to the dc network, or nothing
// when the series capacitor mode blocks dc flow (OPEN and CLOSED both do).
[[nodiscard]] std::optional<std::pair<double, BranchOrigin>>
line_branch_resistance(const AcLine& line, double kv_ll, const BuilderConfig& cfg);

// Generator step-up transformers the ac case leaves implicit: one delta-gwye
// unit per in-service generator on a qualifying bus. Records carry the
// generator's id and live in their own list, apart from the explicit
// transformers; buses without a table entry are skipped with a diagnostic.
[[nodiscard]] std::vector<Transformer> implicit_gsus_for(
    const AcCase& c, const BuilderConfig& cfg, std::vector<Diagnostic>& notes);

struct BuildResult {
    GmdNetwork network;
    std::vector<Diagnostic> notes;
};

// Full construction. Deterministic: node ids are assigned by role (bus
// images, ground points, star points), each block in source-id order, and
// branches are emitted lines first, then transformer slots in id order,
// then step-up units, implicit grounds, and grounding ties.
// Throws BuildError on structurally unusable input (unknown bus references,
// grounded windings with missing or non-positive resistance, negative line
// resistance).
[[nodiscard]] BuildResult build(const AcCase& c, const BuilderConfig& cfg = {});

} // namespace gicdc
