#include <catch2/catch_amalgamated.hpp>

#include "gicdc/model.hpp"

#include "helpers.hpp"

using namespace gicdc;
using Catch::Matchers::ContainsSubstring;

namespace {

bool any_error_containing(const std::vector<Diagnostic>& diags, const std::string& needle) {
    for (const auto& d : diags) {
        if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool any_warning_containing(const std::vector<Diagnostic>& diags, const std::string& needle) {
    for (const auto& d : diags) {
        if (d.severity == Severity::Warning && d.message.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("fixture case validates cleanly", "[model]") {
    const AcCase c = testutil::load_fixture_case();
    const auto diags = validate_case(c);
    std::string joined;
    for (const auto& d : diags) joined += d.message + "; ";
    CAPTURE(diags.size(), joined);
    CHECK_FALSE(has_errors(diags));
}

TEST_CASE("duplicate ids are rejected per table", "[model]") {
    AcCase c = testutil::tiny_case();
    c.buses.push_back(c.buses.front());
    const auto diags = validate_case(c);
    CHECK(has_errors(diags));
    CHECK(any_error_containing(diags, "duplicate"));
}

TEST_CASE("non-positive ids are rejected", "[model]") {
    AcCase c = testutil::tiny_case();
    c.buses[0].id = 0;
    CHECK(has_errors(validate_case(c)));
    c.buses[0].id = -3;
    CHECK(has_errors(validate_case(c)));
}

TEST_CASE("dangling references are reported", "[model]") {
    SECTION("bus to missing substation") {
        AcCase c = testutil::tiny_case();
        c.buses[0].substation_id = 99;
        CHECK(any_error_containing(validate_case(c), "substation"));
    }
    SECTION("line to missing bus") {
        AcCase c = testutil::tiny_case();
        c.lines[0].to_bus = 99;
        CHECK(any_error_containing(validate_case(c), "bus"));
    }
    SECTION("transformer to missing bus") {
        AcCase c = testutil::load_fixture_case();
        c.transformers[0].high_bus = 999;
        CHECK(any_error_containing(validate_case(c), "bus"));
    }
    SECTION("generator to missing bus") {
        AcCase c = testutil::tiny_case();
        c.generators.push_back({1, 42, 1});
        CHECK(any_error_containing(validate_case(c), "bus"));
    }
}

TEST_CASE("grounded windings need a positive resistance", "[model]") {
    AcCase c = testutil::tiny_case();
    Transformer xf;
    xf.id = 1;
    xf.kind = XfKind::GwyeGwye;
    xf.high_bus = 1;
    xf.low_bus = 2;
    xf.gnd_high = true;
    xf.gnd_low = false;
    xf.k_factor = 1.0;

    SECTION("missing resistance") {
        c.transformers = {xf};
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("zero resistance") {
        xf.r_high_ohm = 0.0;
        c.transformers = {xf};
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("positive resistance is fine") {
        xf.r_high_ohm = 0.3;
        c.transformers = {xf};
        CHECK_FALSE(has_errors(validate_case(c)));
    }
}

TEST_CASE("three-winding kinds require a tertiary bus", "[model]") {
    AcCase c = testutil::load_fixture_case();
    REQUIRE(c.transformers[3].kind == XfKind::ThreeWindingAuto);
    c.transformers[3].tertiary_bus.reset();
    CHECK(any_error_containing(validate_case(c), "tertiary"));
}

TEST_CASE("k-factor sign rules", "[model]") {
    AcCase c = testutil::load_fixture_case();
    SECTION("negative is an error") {
        c.transformers[0].k_factor = -1.0;
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("zero is only a warning") {
        c.transformers[0].k_factor = 0.0;
        const auto diags = validate_case(c);
        CHECK_FALSE(has_errors(diags));
        CHECK(any_warning_containing(diags, "K factor"));
    }
}

TEST_CASE("non-positive bases are rejected", "[model]") {
    SECTION("bus kv") {
        AcCase c = testutil::tiny_case();
        c.buses[0].nominal_kv = 0.0;
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("line mva") {
        AcCase c = testutil::tiny_case();
        c.lines[0].mva_base = 0.0;
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("transformer mva") {
        AcCase c = testutil::load_fixture_case();
        c.transformers[0].mva_3ph = -100.0;
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("negative line resistance") {
        AcCase c = testutil::tiny_case();
        c.lines[0].r_pu = -0.01;
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("negative grounding resistance") {
        AcCase c = testutil::tiny_case();
        c.substations[0].grounding_r_ohm = -1.0;
        CHECK(has_errors(validate_case(c)));
    }
    SECTION("infinite grounding resistance is allowed") {
        AcCase c = testutil::tiny_case();
        c.substations[0].grounding_r_ohm = std::numeric_limits<double>::infinity();
        CHECK_FALSE(has_errors(validate_case(c)));
    }
}

TEST_CASE("advisory warnings do not block use", "[model]") {
    SECTION("self-loop line") {
        AcCase c = testutil::tiny_case();
        c.lines[0].to_bus = c.lines[0].from_bus;
        const auto diags = validate_case(c);
        CHECK_FALSE(has_errors(diags));
        CHECK(!diags.empty());
    }
    SECTION("grounding flag on a delta winding") {
        AcCase c = testutil::load_fixture_case();
        REQUIRE(c.transformers[4].kind == XfKind::DeltaGwye);
        c.transformers[4].gnd_high = true;   // delta side cannot ground
        const auto diags = validate_case(c);
        CHECK_FALSE(has_errors(diags));
        CHECK(!diags.empty());
    }
}

TEST_CASE("coordinate fallback to the substation site", "[model]") {
    AcCase c = testutil::tiny_case();

    SECTION("no bus coordinates") {
        CHECK(bus_latitude(c, c.buses[0]) == 45.0);
        CHECK(bus_longitude(c, c.buses[0]) == -75.0);
    }
    SECTION("own coordinates win") {
        c.buses[0].latitude_deg = 45.5;
        c.buses[0].longitude_deg = -75.5;
        CHECK(bus_latitude(c, c.buses[0]) == 45.5);
        CHECK(bus_longitude(c, c.buses[0]) == -75.5);
    }
    SECTION("per-coordinate fallback") {
        c.buses[0].latitude_deg = 44.0;
        CHECK(bus_latitude(c, c.buses[0]) == 44.0);
        CHECK(bus_longitude(c, c.buses[0]) == -75.0);
    }
}

TEST_CASE("find helpers resolve by id", "[model]") {
    const AcCase c = testutil::load_fixture_case();
    REQUIRE(c.find_bus(23) != nullptr);
    CHECK(c.find_bus(23)->nominal_kv == 115.0);
    CHECK(c.find_bus(99) == nullptr);
    REQUIRE(c.find_line(5) != nullptr);
    CHECK(c.find_line(5)->r_pu == 0.020);
    REQUIRE(c.find_transformer(4) != nullptr);
    CHECK(c.find_transformer(4)->kind == XfKind::ThreeWindingAuto);
    REQUIRE(c.find_substation(3) != nullptr);
    CHECK(c.find_substation(3)->grounding_r_ohm == 0.25);
}

TEST_CASE("has_errors distinguishes severities", "[model]") {
    std::vector<Diagnostic> diags;
    CHECK_FALSE(has_errors(diags));
    diags.push_back({Severity::Warning, "advisory", 0});
    CHECK_FALSE(has_errors(diags));
    diags.push_back({Severity::Error, "fatal", 3});
    CHECK(has_errors(diags));
}
