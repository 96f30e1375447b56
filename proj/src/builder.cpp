#include "gicdc/builder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_set>

#include "gicdc/errors.hpp"

namespace gicdc {

bool BuilderConfig::implicit_grounds_enabled() const {
    return std::isfinite(implicit_ground_r);
}

std::optional<double> BuilderConfig::gsu_resistance(double nominal_kv) const {
    for (const auto& [kv, r] : gsu_table) {
        if (kv == nominal_kv) return r;
    }
    return std::nullopt;
}

double line_dc_resistance(double r_pu, double kv_ll, double mva_3ph) {
    if (!(kv_ll > 0.0) || !(mva_3ph > 0.0)) {
        throw BuildError("line resistance base must be positive (kV " +
                         std::to_string(kv_ll) + ", MVA " + std::to_string(mva_3ph) + ")");
    }
    if (r_pu < 0.0 || std::isnan(r_pu)) {
        throw BuildError("per-unit line resistance must be >= 0");
    }
    return r_pu * kv_ll * kv_ll / (3.0 * mva_3ph);
}

std::optional<std::pair<double, BranchOrigin>>
line_branch_resistance(const AcLine& line, double kv_ll, const BuilderConfig& cfg) {
    if (line.status == 0) return std::nullopt;
    // A capacitor in the line blocks dc whether it is switched in (Closed)
    // or the line itself is open.
    if (line.cap_mode == SeriesCapMode::Open || line.cap_mode == SeriesCapMode::Closed) {
        return std::nullopt;
    }
    const double r = line_dc_resistance(line.r_pu, kv_ll, line.mva_base);
    if (r == 0.0) {
        // Zero-resistance data means a bypassed series capacitor: the dc path
        // is the bypass resistor.
        return std::make_pair(cfg.cap_bypass_r, BranchOrigin::CapBypass);
    }
    return std::make_pair(r, BranchOrigin::Line);
}

std::vector<Transformer> implicit_gsus_for(const AcCase& c, const BuilderConfig& cfg,
                                           std::vector<Diagnostic>& notes) {
    std::vector<const Generator*> gens;
    gens.reserve(c.generators.size());
    for (const auto& g : c.generators) gens.push_back(&g);
    std::sort(gens.begin(), gens.end(),
              [](const Generator* a, const Generator* b) { return a->id < b->id; });

    std::vector<Transformer> out;
    for (const Generator* g : gens) {
        if (g->status == 0) continue;
        const AcBus* bus = c.find_bus(g->bus);
        if (!bus) continue;   // validation already flagged this
        if (bus->nominal_kv < cfg.gsu_min_kv) continue;
        const auto r = cfg.gsu_resistance(bus->nominal_kv);
        if (!r) {
            notes.push_back({Severity::Warning,
                             "no step-up resistance entry for " +
                                 std::to_string(bus->nominal_kv) + " kV; generator " +
                                 std::to_string(g->id) + " gets no implicit unit",
                             0});
            continue;
        }
        Transformer t;
        t.id = g->id;   // generator id; kept in a separate list, never in xf_index
        t.kind = XfKind::DeltaGwye;
        t.high_bus = g->bus;
        t.low_bus = g->bus;
        t.gnd_low = true;
        // The grounded branch takes the table resistance directly; no winding
        // slot is filled, so the value never round-trips through the /3 rule.
        t.k_factor = 0.0;
        t.mva_3ph = 100.0;
        t.is_implicit_gsu = true;
        out.push_back(t);
    }
    return out;
}

// ----------------------------------------------------------------------------
// build
// ----------------------------------------------------------------------------

namespace {

struct Builder {
    const AcCase& c;
    const BuilderConfig& cfg;
    GmdNetwork net;
    std::vector<Diagnostic> notes;

    [[nodiscard]] int bus_node(int ac_bus_id) const {
        const auto it = net.node_of_bus.find(ac_bus_id);
        if (it == net.node_of_bus.end()) {
            throw BuildError("unknown ac bus id " + std::to_string(ac_bus_id));
        }
        return it->second;
    }

    [[nodiscard]] int ground_node_of_bus(int ac_bus_id) const {
        const AcBus* bus = c.find_bus(ac_bus_id);
        if (!bus) throw BuildError("unknown ac bus id " + std::to_string(ac_bus_id));
        const auto it = net.node_of_ground.find(bus->substation_id);
        if (it == net.node_of_ground.end()) {
            throw BuildError("substation " + std::to_string(bus->substation_id) +
                             " has no ground node");
        }
        return it->second;
    }

    int add_branch(int from, int to, double r, BranchOrigin origin, int parent) {
        if (!(r > 0.0) || std::isnan(r)) {
            throw BuildError("branch derived from " + to_string(origin) + " " +
                             std::to_string(parent) + " has non-positive resistance");
        }
        GmdBranch b;
        b.id = static_cast<int>(net.branches.size()) + 1;
        b.from_node = from;
        b.to_node = to;
        b.resistance_ohm = r;
        b.origin = origin;
        b.parent_id = parent;
        net.branches.push_back(b);
        return b.id;
    }

    [[nodiscard]] double winding_r(const Transformer& t, const std::optional<double>& r,
                                   const char* slot) const {
        if (!r || !(*r > 0.0)) {
            throw BuildError("transformer " + std::to_string(t.id) + " " + slot +
                             " winding resistance is missing or non-positive");
        }
        return *r / 3.0;   // three phases in parallel
    }

    // Substations whose ground node will carry at least one branch besides
    // the earth tie. Only these get a ground node; a tie with nothing behind
    // it would dangle.
    [[nodiscard]] std::set<int> used_ground_substations(
        const std::vector<Transformer>& gsus) const {
        std::set<int> used;
        auto mark_bus = [&](int bus_id) {
            if (const AcBus* b = c.find_bus(bus_id)) used.insert(b->substation_id);
        };
        if (cfg.implicit_grounds_enabled()) {
            for (const auto& b : c.buses) used.insert(b.substation_id);
        }
        for (const auto& t : c.transformers) {
            switch (t.kind) {
            case XfKind::GwyeGwye:
            case XfKind::ThreeWinding:
                if (t.gnd_high) mark_bus(t.high_bus);
                if (t.gnd_low) mark_bus(t.low_bus);
                if (t.kind == XfKind::ThreeWinding && t.gnd_tertiary && t.tertiary_bus) {
                    mark_bus(*t.tertiary_bus);
                }
                break;
            case XfKind::DeltaGwye:
                if (t.gnd_low) mark_bus(t.low_bus);
                break;
            case XfKind::GwyeDelta:
                if (t.gnd_high) mark_bus(t.high_bus);
                break;
            case XfKind::DeltaDelta:
                break;
            case XfKind::AutoGwye:
            case XfKind::ThreeWindingAuto:
                if (t.gnd_common) mark_bus(t.low_bus);
                break;
            }
        }
        for (const auto& g : gsus) mark_bus(g.low_bus);
        return used;
    }

    void add_nodes(const std::vector<Transformer>& gsus) {
        // Bus images, ground points, then star points, each block in source
        // id order, ids dense from 1.
        std::vector<AcBus> buses = c.buses;
        std::sort(buses.begin(), buses.end(),
                  [](const AcBus& a, const AcBus& b) { return a.id < b.id; });
        for (const auto& b : buses) {
            GmdBus n;
            n.id = static_cast<int>(net.buses.size()) + 1;
            n.role = BusRole::BusImage;
            n.source_id = b.id;
            n.latitude_deg = bus_latitude(c, b);
            n.longitude_deg = bus_longitude(c, b);
            net.buses.push_back(n);
            net.node_of_bus[b.id] = n.id;
        }

        const std::set<int> used = used_ground_substations(gsus);
        std::vector<Substation> subs = c.substations;
        std::sort(subs.begin(), subs.end(),
                  [](const Substation& a, const Substation& b) { return a.id < b.id; });
        for (const auto& s : subs) {
            if (!used.count(s.id)) continue;
            GmdBus n;
            n.id = static_cast<int>(net.buses.size()) + 1;
            n.role = BusRole::SubstationGround;
            n.source_id = s.id;
            n.latitude_deg = s.latitude_deg;
            n.longitude_deg = s.longitude_deg;
            net.buses.push_back(n);
            net.node_of_ground[s.id] = n.id;
        }

        std::vector<Transformer> xfs = c.transformers;
        std::sort(xfs.begin(), xfs.end(),
                  [](const Transformer& a, const Transformer& b) { return a.id < b.id; });
        for (const auto& t : xfs) {
            if (t.kind != XfKind::ThreeWindingAuto) continue;
            const AcBus* hb = c.find_bus(t.high_bus);
            GmdBus n;
            n.id = static_cast<int>(net.buses.size()) + 1;
            n.role = BusRole::Star;
            n.source_id = t.id;
            n.latitude_deg = hb ? bus_latitude(c, *hb) : 0.0;
            n.longitude_deg = hb ? bus_longitude(c, *hb) : 0.0;
            net.buses.push_back(n);
            net.node_of_star[t.id] = n.id;
        }
    }

    void add_lines() {
        std::vector<AcLine> lines = c.lines;
        std::sort(lines.begin(), lines.end(),
                  [](const AcLine& a, const AcLine& b) { return a.id < b.id; });
        for (const auto& l : lines) {
            const AcBus* fb = c.find_bus(l.from_bus);
            if (!fb) throw BuildError("line " + std::to_string(l.id) + " from-bus missing");
            const auto rb = line_branch_resistance(l, fb->nominal_kv, cfg);
            if (!rb) continue;
            add_branch(bus_node(l.from_bus), bus_node(l.to_bus), rb->first, rb->second, l.id);
        }
    }

    void add_transformer(const Transformer& t) {
        XfBranchSet slots;
        slots.transformer_id = t.id;

        switch (t.kind) {
        case XfKind::GwyeGwye:
            if (t.gnd_high) {
                slots.high = add_branch(bus_node(t.high_bus), ground_node_of_bus(t.high_bus),
                                        winding_r(t, t.r_high_ohm, "high"),
                                        BranchOrigin::XfWindingHigh, t.id);
            }
            if (t.gnd_low) {
                slots.low = add_branch(bus_node(t.low_bus), ground_node_of_bus(t.low_bus),
                                       winding_r(t, t.r_low_ohm, "low"),
                                       BranchOrigin::XfWindingLow, t.id);
            }
            break;
        case XfKind::DeltaGwye:
            if (t.gnd_low) {
                slots.low = add_branch(bus_node(t.low_bus), ground_node_of_bus(t.low_bus),
                                       winding_r(t, t.r_low_ohm, "low"),
                                       BranchOrigin::XfWindingLow, t.id);
            }
            break;
        case XfKind::GwyeDelta:
            if (t.gnd_high) {
                slots.high = add_branch(bus_node(t.high_bus), ground_node_of_bus(t.high_bus),
                                        winding_r(t, t.r_high_ohm, "high"),
                                        BranchOrigin::XfWindingHigh, t.id);
            }
            break;
        case XfKind::DeltaDelta:
            break;   // no dc path at all
        case XfKind::AutoGwye:
            // The series winding always carries dc between the buses; the
            // common winding grounds the shared neutral when flagged.
            slots.series = add_branch(bus_node(t.high_bus), bus_node(t.low_bus),
                                      winding_r(t, t.r_series_ohm, "series"),
                                      BranchOrigin::XfSeries, t.id);
            if (t.gnd_common) {
                slots.common = add_branch(bus_node(t.low_bus), ground_node_of_bus(t.low_bus),
                                          winding_r(t, t.r_common_ohm, "common"),
                                          BranchOrigin::XfCommon, t.id);
            }
            break;
        case XfKind::ThreeWinding:
            // Decomposes into independent grounded windings; the internal
            // star point carries no external connection and is left out.
            if (t.gnd_high) {
                slots.high = add_branch(bus_node(t.high_bus), ground_node_of_bus(t.high_bus),
                                        winding_r(t, t.r_high_ohm, "high"),
                                        BranchOrigin::XfWindingHigh, t.id);
            }
            if (t.gnd_low) {
                slots.low = add_branch(bus_node(t.low_bus), ground_node_of_bus(t.low_bus),
                                       winding_r(t, t.r_low_ohm, "low"),
                                       BranchOrigin::XfWindingLow, t.id);
            }
            if (t.gnd_tertiary && t.tertiary_bus) {
                slots.tertiary = add_branch(bus_node(*t.tertiary_bus),
                                            ground_node_of_bus(*t.tertiary_bus),
                                            winding_r(t, t.r_tertiary_ohm, "tertiary"),
                                            BranchOrigin::XfWindingTertiary, t.id);
            }
            break;
        case XfKind::ThreeWindingAuto: {
            const int star = net.node_of_star.at(t.id);
            slots.star_node = star;
            slots.series = add_branch(bus_node(t.high_bus), star,
                                      winding_r(t, t.r_series_ohm, "series"),
                                      BranchOrigin::XfSeries, t.id);
            // Near-zero tie: the star point sits at the low bus voltage, so
            // the ground path below sees effectively just the common winding.
            slots.star_tie = add_branch(star, bus_node(t.low_bus), cfg.star_tie_r,
                                        BranchOrigin::StarTie, t.id);
            if (t.gnd_common) {
                slots.common = add_branch(star, ground_node_of_bus(t.low_bus),
                                          winding_r(t, t.r_common_ohm, "common"),
                                          BranchOrigin::XfCommon, t.id);
                slots.star_guard = add_branch(star, ground_node_of_bus(t.low_bus),
                                              cfg.star_common_guard_r,
                                              BranchOrigin::StarGuard, t.id);
            }
            // A delta tertiary contributes no branch.
            break;
        }
        }

        net.xf_index.push_back(slots);
    }

    void run(const std::vector<Transformer>& gsus) {
        add_nodes(gsus);
        add_lines();

        std::vector<Transformer> xfs = c.transformers;
        std::sort(xfs.begin(), xfs.end(),
                  [](const Transformer& a, const Transformer& b) { return a.id < b.id; });
        for (const auto& t : xfs) add_transformer(t);

        for (const auto& g : gsus) {
            // The table value is the branch resistance as-is; see
            // implicit_gsus_for.
            const AcBus* bus = c.find_bus(g.low_bus);
            const auto r = cfg.gsu_resistance(bus->nominal_kv);
            add_branch(bus_node(g.low_bus), ground_node_of_bus(g.low_bus), *r,
                       BranchOrigin::Gsu, g.id);
            net.implicit_gsus.push_back(g);
        }

        if (cfg.implicit_grounds_enabled()) {
            std::vector<AcBus> buses = c.buses;
            std::sort(buses.begin(), buses.end(),
                      [](const AcBus& a, const AcBus& b) { return a.id < b.id; });
            for (const auto& b : buses) {
                add_branch(bus_node(b.id), net.node_of_ground.at(b.substation_id),
                           cfg.implicit_ground_r, BranchOrigin::ImplicitGround, b.id);
            }
        }

        std::vector<Substation> subs = c.substations;
        std::sort(subs.begin(), subs.end(),
                  [](const Substation& a, const Substation& b) { return a.id < b.id; });
        for (const auto& s : subs) {
            const auto it = net.node_of_ground.find(s.id);
            if (it == net.node_of_ground.end()) continue;
            if (!std::isfinite(s.grounding_r_ohm)) continue;   // no earth tie
            const double r =
                s.grounding_r_ohm == 0.0 ? cfg.solid_ground_r : s.grounding_r_ohm;
            add_branch(it->second, kEarthNode, r, BranchOrigin::SubstationGroundTie, s.id);
        }
    }
};

} // namespace

BuildResult build(const AcCase& c, const BuilderConfig& cfg) {
    auto diags = validate_case(c);
    if (has_errors(diags)) {
        std::string msg = "case is not buildable:";
        int shown = 0;
        for (const auto& d : diags) {
            if (d.severity != Severity::Error) continue;
            if (++shown > 5) {
                msg += " ...";
                break;
            }
            msg += " " + d.message + ";";
        }
        throw BuildError(msg);
    }

    Builder b{c, cfg, {}, std::move(diags)};
    const auto gsus = implicit_gsus_for(c, cfg, b.notes);
    b.run(gsus);
    return {std::move(b.net), std::move(b.notes)};
}

// ----------------------------------------------------------------------------
// Network lookups (defined here so network.hpp stays header-only light)
// ----------------------------------------------------------------------------

const GmdBus* GmdNetwork::find_node(int node_id) const {
    for (const auto& n : buses) {
        if (n.id == node_id) return &n;
    }
    return nullptr;
}

const GmdBranch* GmdNetwork::find_branch(int branch_id) const {
    for (const auto& b : branches) {
        if (b.id == branch_id) return &b;
    }
    return nullptr;
}

int GmdNetwork::max_node_id() const {
    int m = 0;
    for (const auto& n : buses) m = std::max(m, n.id);
    return m;
}

int GmdNetwork::max_branch_id() const {
    int m = 0;
    for (const auto& b : branches) m = std::max(m, b.id);
    return m;
}

std::string GmdNetwork::describe_node(int node_id) const {
    if (node_id == kEarthNode) return "remote earth";
    const GmdBus* n = find_node(node_id);
    if (!n) return "node " + std::to_string(node_id) + " (unknown)";
    std::string what;
    switch (n->role) {
    case BusRole::BusImage: what = "image of ac bus "; break;
    case BusRole::SubstationGround: what = "ground of substation "; break;
    case BusRole::Star: what = "star point of transformer "; break;
    }
    return "node " + std::to_string(node_id) + " (" + what + std::to_string(n->source_id) + ")";
}

std::string to_string(BranchOrigin o) {
    switch (o) {
    case BranchOrigin::Line: return "line";
    case BranchOrigin::XfWindingHigh: return "xf_winding_high";
    case BranchOrigin::XfWindingLow: return "xf_winding_low";
    case BranchOrigin::XfWindingTertiary: return "xf_winding_tertiary";
    case BranchOrigin::XfSeries: return "xf_series";
    case BranchOrigin::XfCommon: return "xf_common";
    case BranchOrigin::StarTie: return "star_tie";
    case BranchOrigin::StarGuard: return "star_guard";
    case BranchOrigin::Gsu: return "gsu";
    case BranchOrigin::ImplicitGround: return "implicit_ground";
    case BranchOrigin::CapBypass: return "cap_bypass";
    case BranchOrigin::SubstationGroundTie: return "substation_ground_tie";
    }
    return "unknown";
}

} // namespace gicdc
