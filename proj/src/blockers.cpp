#include "gicdc/blockers.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_set>

#include "gicdc/errors.hpp"

namespace gicdc {

std::string to_string(BlockerKind kind) {
    switch (kind) {
    case BlockerKind::None: return "none";
    case BlockerKind::Neutral: return "neutral";
    case BlockerKind::Substation: return "substation";
    case BlockerKind::SeriesCap: return "seriescap";
    }
    return "unknown";
}

std::string BlockerScenario::label() const {
    if (kind == BlockerKind::None) return "none";
    std::string out = to_string(kind) + "@";
    if (all_locations) return out + "all";
    std::vector<int> sorted = locations;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (i) out += "+";
        out += std::to_string(sorted[i]);
    }
    return out;
}

// ----------------------------------------------------------------------------
// apply
// ----------------------------------------------------------------------------

namespace {

// Remove the branches `doomed` selects, renumbering nothing: branch ids stay
// stable so the transformer index remains valid.
template <typename Pred>
void erase_branches(GmdNetwork& net, Pred doomed) {
    net.branches.erase(std::remove_if(net.branches.begin(), net.branches.end(), doomed),
                       net.branches.end());
}

void clear_slot_if(std::optional<int>& slot, const std::unordered_set<int>& removed) {
    if (slot && removed.count(*slot)) slot.reset();
}

void apply_neutral(GmdNetwork& net, const BlockerScenario& s, const AcCase& c) {
    std::unordered_set<int> targets;
    if (s.all_locations) {
        for (const auto& x : net.xf_index) targets.insert(x.transformer_id);
    } else {
        for (int id : s.locations) {
            if (!c.find_transformer(id)) {
                throw ScenarioError("neutral blocker names unknown transformer " +
                                    std::to_string(id));
            }
            targets.insert(id);
        }
    }

    // Every ground connection of the targeted units goes; through paths
    // (series winding, star tie) stay.
    auto severed = [](BranchOrigin o) {
        return o == BranchOrigin::XfWindingHigh || o == BranchOrigin::XfWindingLow ||
               o == BranchOrigin::XfWindingTertiary || o == BranchOrigin::XfCommon ||
               o == BranchOrigin::StarGuard;
    };
    std::unordered_set<int> removed;
    erase_branches(net, [&](const GmdBranch& b) {
        const bool doomed =
            (severed(b.origin) && targets.count(b.parent_id)) ||
            (s.all_locations && b.origin == BranchOrigin::Gsu);
        if (doomed) removed.insert(b.id);
        return doomed;
    });
    for (auto& x : net.xf_index) {
        clear_slot_if(x.high, removed);
        clear_slot_if(x.low, removed);
        clear_slot_if(x.tertiary, removed);
        clear_slot_if(x.common, removed);
        clear_slot_if(x.star_guard, removed);
    }
}

void apply_substation(GmdNetwork& net, const BlockerScenario& s, const AcCase& c) {
    std::unordered_set<int> targets;
    if (s.all_locations) {
        for (const auto& n : net.buses) {
            if (n.role == BusRole::SubstationGround) targets.insert(n.source_id);
        }
    } else {
        for (int id : s.locations) {
            if (!c.find_substation(id)) {
                throw ScenarioError("substation blocker names unknown substation " +
                                    std::to_string(id));
            }
            targets.insert(id);
        }
    }
    erase_branches(net, [&](const GmdBranch& b) {
        return b.origin == BranchOrigin::SubstationGroundTie && targets.count(b.parent_id);
    });
}

void apply_series_cap(GmdNetwork& net, const BlockerScenario& s, const AcCase& c) {
    std::unordered_set<int> targets;
    const bool all = s.all_locations;
    if (!all) {
        for (int id : s.locations) {
            if (!c.find_line(id)) {
                throw ScenarioError("series capacitor names unknown line " +
                                    std::to_string(id));
            }
            targets.insert(id);
        }
    }
    erase_branches(net, [&](const GmdBranch& b) {
        const bool is_line =
            b.origin == BranchOrigin::Line || b.origin == BranchOrigin::CapBypass;
        return is_line && (all || targets.count(b.parent_id));
    });
}

} // namespace

GmdNetwork apply(const GmdNetwork& net, const BlockerScenario& scenario, const AcCase& c) {
    GmdNetwork out = net;
    switch (scenario.kind) {
    case BlockerKind::None:
        break;
    case BlockerKind::Neutral:
        apply_neutral(out, scenario, c);
        break;
    case BlockerKind::Substation:
        apply_substation(out, scenario, c);
        break;
    case BlockerKind::SeriesCap:
        apply_series_cap(out, scenario, c);
        break;
    }
    return out;
}

// ----------------------------------------------------------------------------
// Pipeline
// ----------------------------------------------------------------------------

namespace {

// Blocker edits can orphan nodes (a delta tertiary bus after its unit loses
// every ground path, a ground grid whose last branch was a tie). They carry
// no current by construction; drop them so assembly does not reject the
// network as singular. Node ids stay stable.
void prune_isolated_nodes(GmdNetwork& net, std::vector<Diagnostic>& notes) {
    std::unordered_set<int> touched;
    for (const auto& b : net.branches) {
        touched.insert(b.from_node);
        touched.insert(b.to_node);
    }
    std::vector<GmdBus> kept;
    kept.reserve(net.buses.size());
    for (const auto& n : net.buses) {
        if (touched.count(n.id)) {
            kept.push_back(n);
            continue;
        }
        notes.push_back({Severity::Warning,
                         "dropped " + net.describe_node(n.id) +
                             ": no remaining conductance touches it",
                         0});
    }
    if (kept.size() == net.buses.size()) return;
    net.buses = std::move(kept);

    auto scrub = [&net](std::unordered_map<int, int>& map) {
        for (auto it = map.begin(); it != map.end();) {
            it = net.find_node(it->second) ? std::next(it) : map.erase(it);
        }
    };
    scrub(net.node_of_bus);
    scrub(net.node_of_ground);
    scrub(net.node_of_star);
}

} // namespace

SolveResult run(const AcCase& c, const BuilderConfig& cfg, const FieldSource& field,
                const BlockerScenario& scenario) {
    BuildResult built = build(c, cfg);
    SolveResult out;
    out.notes = std::move(built.notes);

    GmdNetwork net = apply(built.network, scenario, c);
    prune_isolated_nodes(net, out.notes);

    CoupleResult coupled = couple(std::move(net), field, c);
    out.notes.insert(out.notes.end(), coupled.notes.begin(), coupled.notes.end());
    out.network = std::move(coupled.network);

    const ConductanceSystem sys = assemble(out.network);
    const NodeVoltages nv = solve(sys);
    out.node_voltage = nv.v;
    out.cond_estimate = nv.cond_estimate;
    out.branch_current = branch_currents(out.network, out.node_voltage);
    out.kcl_max_abs = kcl_max_residual(out.network, out.branch_current);

    for (const auto& slots : out.network.xf_index) {
        const Transformer* xf = c.find_transformer(slots.transformer_id);
        if (!xf) continue;
        XfLoss row;
        row.transformer_id = slots.transformer_id;
        row.effective_gic_pu = effective_gic_pu(c, *xf, slots, out.branch_current);
        row.qloss_mvar = qloss_mvar(c, *xf, row.effective_gic_pu);
        out.total_qloss_mvar += row.qloss_mvar;
        out.transformers.push_back(row);
    }

    if (scenario.kind == BlockerKind::SeriesCap) {
        out.notes.push_back({Severity::Warning,
                             "series capacitors raise the ac-side reactance; the resulting "
                             "phase shift is outside this dc model",
                             0});
    }
    return out;
}

std::vector<LabeledRun> scenario_matrix(const AcCase& c, const BuilderConfig& cfg,
                                        const std::vector<LabeledField>& fields,
                                        const std::vector<BlockerScenario>& scenarios) {
    std::vector<LabeledRun> out;
    out.reserve(fields.size() * scenarios.size());
    for (const auto& f : fields) {
        for (const auto& s : scenarios) {
            out.push_back({f.label, s.label(), run(c, cfg, f.field, s)});
        }
    }
    return out;
}

} // namespace gicdc
