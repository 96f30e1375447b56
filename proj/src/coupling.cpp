#include "gicdc/coupling.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "gicdc/errors.hpp"

namespace gicdc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::optional<double> LineVoltageTable::lookup(int line_id) const {
    for (const auto& [id, v] : entries) {
        if (id == line_id) return v;
    }
    return std::nullopt;
}

Geodesy::Geodesy(double mean_latitude_deg)
    : mean_latitude_deg_(mean_latitude_deg),
      km_per_deg_lon_(kKmPerDegLonEquator * std::cos(mean_latitude_deg * kPi / 180.0)) {}

Displacement Geodesy::displacement(double lat1, double lon1, double lat2, double lon2) const {
    // Constant scale factors: displacement is linear in the coordinate
    // deltas, so sums around closed coordinate paths cancel exactly.
    return {kKmPerDegLat * (lat2 - lat1), km_per_deg_lon_ * (lon2 - lon1)};
}

Geodesy make_geodesy(const GmdNetwork& net) {
    double sum = 0.0;
    int count = 0;
    for (const auto& b : net.branches) {
        if (b.origin != BranchOrigin::Line) continue;
        const GmdBus* from = net.find_node(b.from_node);
        const GmdBus* to = net.find_node(b.to_node);
        if (!from || !to) continue;
        sum += 0.5 * (from->latitude_deg + to->latitude_deg);
        ++count;
    }
    return Geodesy(count ? sum / count : 0.0);
}

double branch_voltage(const UniformField& field, const Displacement& d) {
    const double theta = field.bearing_deg * kPi / 180.0;
    return field.magnitude_v_per_km * (d.north_km * std::cos(theta) + d.east_km * std::sin(theta));
}

namespace {

CoupleResult couple_uniform(GmdNetwork net, const UniformField& field) {
    const Geodesy geo = make_geodesy(net);
    for (auto& b : net.branches) {
        if (b.origin != BranchOrigin::Line) {
            b.induced_v = 0.0;
            continue;
        }
        const GmdBus* from = net.find_node(b.from_node);
        const GmdBus* to = net.find_node(b.to_node);
        if (!from || !to) {
            throw CoupleError("line branch " + std::to_string(b.id) +
                              " references a missing node");
        }
        const Displacement d = geo.displacement(from->latitude_deg, from->longitude_deg,
                                                to->latitude_deg, to->longitude_deg);
        b.induced_v = branch_voltage(field, d);
    }
    return {std::move(net), {}};
}

CoupleResult couple_table(GmdNetwork net, const LineVoltageTable& table, const AcCase& c) {
    for (const auto& [line_id, v] : table.entries) {
        if (!c.find_line(line_id)) {
            throw CoupleError("voltage table names unknown line " + std::to_string(line_id));
        }
        if (!std::isfinite(v)) {
            throw CoupleError("voltage table entry for line " + std::to_string(line_id) +
                              " is not finite");
        }
    }

    std::vector<Diagnostic> notes;
    for (auto& b : net.branches) {
        if (b.origin != BranchOrigin::Line) {
            b.induced_v = 0.0;
            continue;
        }
        const auto v = table.lookup(b.parent_id);
        if (v) {
            b.induced_v = *v;
        } else {
            b.induced_v = 0.0;
            notes.push_back({Severity::Warning,
                             "no table voltage for line " + std::to_string(b.parent_id) +
                                 "; coupled as 0 V",
                             0});
        }
    }
    return {std::move(net), std::move(notes)};
}

} // namespace

CoupleResult couple(GmdNetwork net, const FieldSource& field, const AcCase& c) {
    if (const auto* uniform = std::get_if<UniformField>(&field)) {
        return couple_uniform(std::move(net), *uniform);
    }
    return couple_table(std::move(net), std::get<LineVoltageTable>(field), c);
}

} // namespace gicdc
