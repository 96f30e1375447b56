#pragma once

// ============================================================================
// Geoelectric field coupling
//
// Turns a field description into per-branch induced EMFs. Two sources are
// supported: a uniform field (magnitude and bearing) integrated along the
// straight-line displacement between line endpoints, and an explicit table of
// per-line induced voltages. Only line branches receive an EMF; transformer,
// grounding, and bypass branches connect co-located points.
//
// Displacements use a flat-earth approximation with a fixed km-per-degree
// scale: the longitude scale is evaluated once at the mean latitude of all
// line midpoints, never per branch, so that displacement sums around closed
// paths cancel exactly.
// ============================================================================

#include <optional>
#include <variant>
#include <vector>

#include "gicdc/model.hpp"
#include "gicdc/network.hpp"

namespace gicdc {

struct UniformField {
    double magnitude_v_per_km = 0.0;   // >= 0
    double bearing_deg = 0.0;          // 0 = geographic north, clockwise, [0, 360)

    friend bool operator==(const UniformField&, const UniformField&) = default;
};

struct LineVoltageTable {
    // Induced dc volts per line id, oriented from the line's from-bus to its
    // to-bus. Lines absent from the table couple as zero volts.
    std::vector<std::pair<int, double>> entries;

    [[nodiscard]] std::optional<double> lookup(int line_id) const;

    friend bool operator==(const LineVoltageTable&, const LineVoltageTable&) = default;
};

using FieldSource = std::variant<UniformField, LineVoltageTable>;

struct Displacement {
    double north_km = 0.0;
    double east_km = 0.0;
};

class Geodesy {
public:
    static constexpr double kKmPerDegLat = 110.574;
    static constexpr double kKmPerDegLonEquator = 113.320;

    explicit Geodesy(double mean_latitude_deg);

    [[nodiscard]] double mean_latitude_deg() const { return mean_latitude_deg_; }
    [[nodiscard]] double km_per_deg_lon() const { return km_per_deg_lon_; }

    // Northward/eastward displacement from point 1 to point 2.
    [[nodiscard]] Displacement displacement(double lat1, double lon1,
                                            double lat2, double lon2) const;

private:
    double mean_latitude_deg_;
    double km_per_deg_lon_;
};

// Frozen longitude scale for a network: mean latitude over the midpoints of
// its line branches. Networks without line branches get latitude 0; nothing
// will couple onto them anyway.
[[nodiscard]] Geodesy make_geodesy(const GmdNetwork& net);

// EMF a uniform field induces over a displacement, volts.
[[nodiscard]] double branch_voltage(const UniformField& field, const Displacement& d);

struct CoupleResult {
    GmdNetwork network;
    std::vector<Diagnostic> notes;   // e.g. table entries missing for a line
};

// Writes induced_v on every line branch and zero everywhere else. For table
// sources, every key must name a line of the ac case (CoupleError otherwise;
// keys for lines that produced no dc branch are ignored), and line branches
// without an entry couple as 0 V with a warning.
[[nodiscard]] CoupleResult couple(GmdNetwork net, const FieldSource& field, const AcCase& c);

} // namespace gicdc
