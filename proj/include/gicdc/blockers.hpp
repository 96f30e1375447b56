#pragma once

// ============================================================================
// Blocking-device scenarios and the end-to-end pipeline
//
// A scenario edits the dc network by deleting branches; it never rescales
// resistances. Neutral blockers sever a transformer's grounded-winding
// paths while keeping its series (through) paths intact, substation
// blockers disconnect a ground grid from remote earth, and series line
// capacitors open the line branch. Edits are applied to the un-energized
// network, before any field coupling.
// ============================================================================

#include <string>
#include <vector>

#include "gicdc/builder.hpp"
#include "gicdc/coupling.hpp"
#include "gicdc/model.hpp"
#include "gicdc/network.hpp"
#include "gicdc/solver.hpp"

namespace gicdc {

enum class BlockerKind {
    None,        // baseline, no edit
    Neutral,     // neutral blocking device on transformer grounded windings
    Substation,  // substation ground blocked from remote earth
    SeriesCap,   // series capacitor opens a line
};

[[nodiscard]] std::string to_string(BlockerKind kind);

struct BlockerScenario {
    BlockerKind kind = BlockerKind::None;
    bool all_locations = false;   // apply at every eligible location
    std::vector<int> locations;   // transformer / substation / line ids

    // Stable text form: "none", "neutral@all", "neutral@3+7", ...
    [[nodiscard]] std::string label() const;

    friend bool operator==(const BlockerScenario&, const BlockerScenario&) = default;
};

// Returns an edited copy of the network. Pure: the input is untouched, and
// re-applying the same scenario to the output changes nothing. Location ids
// are validated against the ac case (wrong-kind or unknown ids throw
// ScenarioError). Neutral at "all" also removes implicit generator grounding
// paths, since those neutrals get devices too.
[[nodiscard]] GmdNetwork apply(const GmdNetwork& net, const BlockerScenario& scenario,
                               const AcCase& c);

// Full pipeline for one scenario: build the dc network, apply the blocker
// edit, drop any nodes the edit stranded, couple the field, solve, and
// report per-transformer effective GIC and reactive loss.
[[nodiscard]] SolveResult run(const AcCase& c, const BuilderConfig& cfg,
                              const FieldSource& field, const BlockerScenario& scenario);

struct LabeledRun {
    std::string field_label;
    std::string scenario_label;
    SolveResult result;
};

struct LabeledField {
    std::string label;
    FieldSource field;
};

// Deterministic cross product: fields outer, scenarios inner, both in the
// order given.
[[nodiscard]] std::vector<LabeledRun> scenario_matrix(
    const AcCase& c, const BuilderConfig& cfg,
    const std::vector<LabeledField>& fields,
    const std::vector<BlockerScenario>& scenarios);

} // namespace gicdc
