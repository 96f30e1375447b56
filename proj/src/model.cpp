#include "gicdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace gicdc {

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, int id) {
    for (const auto& item : items) {
        if (item.id == id) return &item;
    }
    return nullptr;
}

} // namespace

const Substation* AcCase::find_substation(int id) const { return find_by_id(substations, id); }
const AcBus* AcCase::find_bus(int id) const { return find_by_id(buses, id); }
const AcLine* AcCase::find_line(int id) const { return find_by_id(lines, id); }
const Transformer* AcCase::find_transformer(int id) const { return find_by_id(transformers, id); }

double bus_latitude(const AcCase& c, const AcBus& bus) {
    if (bus.latitude_deg) return *bus.latitude_deg;
    const Substation* s = c.find_substation(bus.substation_id);
    return s ? s->latitude_deg : 0.0;
}

double bus_longitude(const AcCase& c, const AcBus& bus) {
    if (bus.longitude_deg) return *bus.longitude_deg;
    const Substation* s = c.find_substation(bus.substation_id);
    return s ? s->longitude_deg : 0.0;
}

// ----------------------------------------------------------------------------
// Validation
// ----------------------------------------------------------------------------

namespace {

struct Validator {
    const AcCase& c;
    std::vector<Diagnostic> out;

    void error(std::string msg) { out.push_back({Severity::Error, std::move(msg), 0}); }
    void warn(std::string msg) { out.push_back({Severity::Warning, std::move(msg), 0}); }

    template <typename T>
    void check_unique_ids(const std::vector<T>& items, const char* what) {
        std::unordered_set<int> seen;
        for (const auto& item : items) {
            if (item.id <= 0) {
                error(std::string(what) + " id " + std::to_string(item.id) +
                      " is not a positive integer");
            }
            if (!seen.insert(item.id).second) {
                error("duplicate " + std::string(what) + " id " + std::to_string(item.id));
            }
        }
    }

    void check_substations() {
        check_unique_ids(c.substations, "substation");
        for (const auto& s : c.substations) {
            if (std::isnan(s.grounding_r_ohm) || s.grounding_r_ohm < 0.0) {
                error("substation " + std::to_string(s.id) +
                      " grounding resistance must be >= 0 (inf allowed)");
            }
        }
    }

    void check_buses() {
        check_unique_ids(c.buses, "bus");
        for (const auto& b : c.buses) {
            if (!c.find_substation(b.substation_id)) {
                error("bus " + std::to_string(b.id) + " references unknown substation " +
                      std::to_string(b.substation_id));
            }
            if (!(b.nominal_kv > 0.0)) {
                error("bus " + std::to_string(b.id) + " nominal kV must be positive");
            }
            if (b.latitude_deg.has_value() != b.longitude_deg.has_value()) {
                warn("bus " + std::to_string(b.id) +
                     " has only one of latitude/longitude; the substation site fills the gap");
            }
            if (b.v_pu && !(*b.v_pu > 0.0)) {
                error("bus " + std::to_string(b.id) + " voltage magnitude must be positive");
            }
        }
    }

    void check_lines() {
        check_unique_ids(c.lines, "line");
        for (const auto& l : c.lines) {
            if (!c.find_bus(l.from_bus)) {
                error("line " + std::to_string(l.id) + " references unknown from-bus " +
                      std::to_string(l.from_bus));
            }
            if (!c.find_bus(l.to_bus)) {
                error("line " + std::to_string(l.id) + " references unknown to-bus " +
                      std::to_string(l.to_bus));
            }
            if (l.from_bus == l.to_bus) {
                warn("line " + std::to_string(l.id) + " is a self-loop and carries no dc");
            }
            if (l.r_pu < 0.0 || std::isnan(l.r_pu)) {
                error("line " + std::to_string(l.id) + " resistance must be >= 0");
            }
            if (!(l.mva_base > 0.0)) {
                error("line " + std::to_string(l.id) + " MVA base must be positive");
            }
        }
    }

    // The winding-resistance slots a transformer kind actually uses. A slot
    // required by a grounding flag must hold a positive value.
    void check_winding(const Transformer& t, bool needed, const std::optional<double>& r,
                       const char* slot) {
        if (!needed) return;
        if (!r) {
            error("transformer " + std::to_string(t.id) + " needs a " + slot +
                  " winding resistance for its grounded winding");
        } else if (!(*r > 0.0)) {
            error("transformer " + std::to_string(t.id) + " " + slot +
                  " winding resistance must be positive");
        }
    }

    void check_transformer(const Transformer& t) {
        if (!c.find_bus(t.high_bus)) {
            error("transformer " + std::to_string(t.id) + " references unknown high bus " +
                  std::to_string(t.high_bus));
        }
        if (!c.find_bus(t.low_bus)) {
            error("transformer " + std::to_string(t.id) + " references unknown low bus " +
                  std::to_string(t.low_bus));
        }

        const bool three_winding =
            t.kind == XfKind::ThreeWinding || t.kind == XfKind::ThreeWindingAuto;
        if (three_winding && !t.tertiary_bus) {
            error("transformer " + std::to_string(t.id) + " is three-winding but has no tertiary bus");
        }
        if (t.tertiary_bus && !c.find_bus(*t.tertiary_bus)) {
            error("transformer " + std::to_string(t.id) + " references unknown tertiary bus " +
                  std::to_string(*t.tertiary_bus));
        }
        if (!three_winding && t.tertiary_bus) {
            warn("transformer " + std::to_string(t.id) + " names a tertiary bus its kind ignores");
        }

        switch (t.kind) {
        case XfKind::GwyeGwye:
            check_winding(t, t.gnd_high, t.r_high_ohm, "high");
            check_winding(t, t.gnd_low, t.r_low_ohm, "low");
            if (!t.gnd_high && !t.gnd_low) {
                warn("transformer " + std::to_string(t.id) +
                     " has no grounded winding and contributes no dc path");
            }
            break;
        case XfKind::DeltaGwye:
            check_winding(t, t.gnd_low, t.r_low_ohm, "low");
            if (t.gnd_high) {
                warn("transformer " + std::to_string(t.id) +
                     " marks its delta high side grounded; delta windings cannot ground");
            }
            break;
        case XfKind::GwyeDelta:
            check_winding(t, t.gnd_high, t.r_high_ohm, "high");
            if (t.gnd_low) {
                warn("transformer " + std::to_string(t.id) +
                     " marks its delta low side grounded; delta windings cannot ground");
            }
            break;
        case XfKind::DeltaDelta:
            if (t.gnd_high || t.gnd_low) {
                warn("transformer " + std::to_string(t.id) +
                     " marks a delta winding grounded; delta windings cannot ground");
            }
            break;
        case XfKind::AutoGwye:
            check_winding(t, true, t.r_series_ohm, "series");
            check_winding(t, t.gnd_common, t.r_common_ohm, "common");
            break;
        case XfKind::ThreeWinding:
            check_winding(t, t.gnd_high, t.r_high_ohm, "high");
            check_winding(t, t.gnd_low, t.r_low_ohm, "low");
            check_winding(t, t.gnd_tertiary, t.r_tertiary_ohm, "tertiary");
            break;
        case XfKind::ThreeWindingAuto:
            check_winding(t, true, t.r_series_ohm, "series");
            check_winding(t, t.gnd_common, t.r_common_ohm, "common");
            if (t.gnd_tertiary) {
                warn("transformer " + std::to_string(t.id) +
                     " marks its delta tertiary grounded; delta windings cannot ground");
            }
            break;
        }

        if (t.k_factor < 0.0) {
            error("transformer " + std::to_string(t.id) + " K factor must be >= 0");
        } else if (t.k_factor == 0.0 && !t.is_implicit_gsu) {
            warn("transformer " + std::to_string(t.id) +
                 " has K factor 0; its reactive loss will be reported as 0");
        }
        if (!(t.mva_3ph > 0.0)) {
            error("transformer " + std::to_string(t.id) + " MVA rating must be positive");
        }

        const AcBus* hb = c.find_bus(t.high_bus);
        const AcBus* lb = c.find_bus(t.low_bus);
        if (hb && lb && hb->substation_id != lb->substation_id) {
            warn("transformer " + std::to_string(t.id) +
                 " spans substations " + std::to_string(hb->substation_id) + " and " +
                 std::to_string(lb->substation_id));
        }
    }

    void check_generators() {
        check_unique_ids(c.generators, "generator");
        for (const auto& g : c.generators) {
            if (!c.find_bus(g.bus)) {
                error("generator " + std::to_string(g.id) + " references unknown bus " +
                      std::to_string(g.bus));
            }
        }
    }

    std::vector<Diagnostic> run() {
        check_substations();
        check_buses();
        check_lines();
        check_unique_ids(c.transformers, "transformer");
        for (const auto& t : c.transformers) check_transformer(t);
        check_generators();
        return std::move(out);
    }
};

} // namespace

std::vector<Diagnostic> validate_case(const AcCase& c) {
    return Validator{c, {}}.run();
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

} // namespace gicdc
