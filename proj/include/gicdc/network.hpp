#pragma once

// ============================================================================
// dc equivalent network
//
// Nodes are bus images, substation ground points, and the star point that a
// three-winding autotransformer decomposition introduces. Remote earth is not
// stored as a node record; branches reference it through the reserved id 0.
// Every branch is a plain resistance, optionally with a series EMF induced by
// the geoelectric field (nonzero only on transmission-line branches).
// ============================================================================

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gicdc/model.hpp"

namespace gicdc {

// Reserved node id for remote earth, the eliminated reference of the nodal
// system. Substation grounding resistances tie ground nodes to it.
constexpr int kEarthNode = 0;

enum class BusRole { BusImage, SubstationGround, Star };

struct GmdBus {
    int id = 0;          // dense, 1-based, deterministic across rebuilds
    BusRole role = BusRole::BusImage;
    int source_id = 0;   // ac bus id / substation id / transformer id by role
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;

    friend bool operator==(const GmdBus&, const GmdBus&) = default;
};

enum class BranchOrigin {
    Line,                 // in-service transmission line
    XfWindingHigh,        // grounded wye winding, high side
    XfWindingLow,
    XfWindingTertiary,
    XfSeries,             // autotransformer series winding
    XfCommon,             // autotransformer common winding to ground
    StarTie,              // three-winding auto: star point to low bus, near-zero R
    StarGuard,            // three-winding auto: star point to ground, very large R
    Gsu,                  // implicit generator step-up winding
    ImplicitGround,       // numerical grounding path, bus image to ground node
    CapBypass,            // zero-resistance line treated as a bypassed capacitor
    SubstationGroundTie   // ground node to remote earth through the grid resistance
};

[[nodiscard]] std::string to_string(BranchOrigin o);

struct GmdBranch {
    int id = 0;
    int from_node = 0;
    int to_node = 0;             // kEarthNode allowed (grounding ties only)
    double resistance_ohm = 0.0; // strictly positive
    double induced_v = 0.0;      // series EMF, volts, positive driving from -> to
    BranchOrigin origin = BranchOrigin::Line;
    int parent_id = 0;           // ac element the branch derives from

    friend bool operator==(const GmdBranch&, const GmdBranch&) = default;
};

// Branch ids a transformer contributed, by terminal role. Used to recover the
// effective per-phase GIC from solved branch currents. Each branch id appears
// in at most one slot across the whole index (injective).
struct XfBranchSet {
    int transformer_id = 0;
    std::optional<int> high;
    std::optional<int> low;
    std::optional<int> tertiary;
    std::optional<int> series;
    std::optional<int> common;
    std::optional<int> star_tie;
    std::optional<int> star_guard;
    std::optional<int> star_node;   // GmdBus id of the star point, if materialized

    friend bool operator==(const XfBranchSet&, const XfBranchSet&) = default;
};

struct GmdNetwork {
    std::vector<GmdBus> buses;        // ids 1..buses.size() at build time
    std::vector<GmdBranch> branches;  // ids 1..branches.size() at build time
    std::vector<XfBranchSet> xf_index;          // explicit transformers only
    std::vector<Transformer> implicit_gsus;     // synthesized records, for inspection

    // Lookup maps maintained by the builder. Not part of value equality.
    std::unordered_map<int, int> node_of_bus;       // ac bus id -> GmdBus id
    std::unordered_map<int, int> node_of_ground;    // substation id -> GmdBus id
    std::unordered_map<int, int> node_of_star;      // transformer id -> GmdBus id

    [[nodiscard]] const GmdBus* find_node(int node_id) const;
    [[nodiscard]] const GmdBranch* find_branch(int branch_id) const;
    [[nodiscard]] int max_node_id() const;
    [[nodiscard]] int max_branch_id() const;

    // "node 7 (ground of substation 4)" and the like, for diagnostics.
    [[nodiscard]] std::string describe_node(int node_id) const;

    friend bool operator==(const GmdNetwork& a, const GmdNetwork& b) {
        return a.buses == b.buses && a.branches == b.branches &&
               a.xf_index == b.xf_index && a.implicit_gsus == b.implicit_gsus;
    }
};

} // namespace gicdc
