#pragma once

// Shared fixtures and lookups for the unit tests. FIXTURE_DIR is injected by
// the build so tests can run from any working directory.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gicdc/io.hpp"
#include "gicdc/model.hpp"
#include "gicdc/network.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The four-substation demonstration case; throws if it fails to parse so
// individual tests can assume a good case.
inline gicdc::AcCase load_fixture_case() {
    gicdc::ParsedCase parsed = gicdc::load_case(fixture_path("case4.case"));
    if (!parsed.ac_case) {
        std::string why;
        for (const auto& d : parsed.diagnostics) why += d.message + "; ";
        throw std::runtime_error("fixture case failed to parse: " + why);
    }
    return *parsed.ac_case;
}

// First branch of a given origin and parent id, if any.
inline const gicdc::GmdBranch* find_branch(const gicdc::GmdNetwork& net,
                                           gicdc::BranchOrigin origin, int parent_id) {
    for (const auto& b : net.branches) {
        if (b.origin == origin && b.parent_id == parent_id) return &b;
    }
    return nullptr;
}

inline int count_origin(const gicdc::GmdNetwork& net, gicdc::BranchOrigin origin) {
    int n = 0;
    for (const auto& b : net.branches) {
        if (b.origin == origin) ++n;
    }
    return n;
}

// A two-bus, one-line, one-substation case used by focused tests that do not
// need the full fixture.
inline gicdc::AcCase tiny_case() {
    gicdc::AcCase c;
    c.name = "tiny";
    c.substations = {{1, 45.0, -75.0, 0.1}, {2, 46.0, -74.0, 0.2}};
    c.buses = {
        {1, 345.0, 1, std::nullopt, std::nullopt, std::nullopt},
        {2, 345.0, 2, std::nullopt, std::nullopt, std::nullopt},
    };
    c.lines = {{1, 1, 2, 0.01, 100.0, gicdc::SeriesCapMode::None, 1}};
    return c;
}

} // namespace testutil
