#include <catch2/catch_amalgamated.hpp>

#include "gicdc/blockers.hpp"

#include <cmath>
#include <limits>

#include "gicdc/errors.hpp"
#include "gicdc/io.hpp"

#include "helpers.hpp"

using namespace gicdc;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

BuilderConfig no_implicit_grounds() {
    BuilderConfig cfg;
    cfg.implicit_ground_r = std::numeric_limits<double>::infinity();
    return cfg;
}

BlockerScenario at_all(BlockerKind kind) {
    BlockerScenario s;
    s.kind = kind;
    s.all_locations = true;
    return s;
}

BlockerScenario at(BlockerKind kind, std::vector<int> locations) {
    BlockerScenario s;
    s.kind = kind;
    s.locations = std::move(locations);
    return s;
}

bool has_branch(const GmdNetwork& net, int branch_id) {
    return net.find_branch(branch_id) != nullptr;
}

} // namespace

TEST_CASE("scenario labels are stable", "[blockers]") {
    CHECK(BlockerScenario{}.label() == "none");
    CHECK(at_all(BlockerKind::Neutral).label() == "neutral@all");
    CHECK(at_all(BlockerKind::Substation).label() == "substation@all");
    CHECK(at_all(BlockerKind::SeriesCap).label() == "seriescap@all");
    CHECK(at(BlockerKind::Neutral, {7, 3, 3}).label() == "neutral@3+7");
    CHECK(at(BlockerKind::SeriesCap, {5}).label() == "seriescap@5");
}

TEST_CASE("apply leaves its input untouched and is idempotent", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const GmdNetwork net = build(c).network;
    const GmdNetwork before = net;

    const std::vector<BlockerScenario> scenarios = {
        BlockerScenario{},
        at_all(BlockerKind::Neutral),
        at_all(BlockerKind::Substation),
        at_all(BlockerKind::SeriesCap),
        at(BlockerKind::Neutral, {2, 4}),
        at(BlockerKind::Substation, {1}),
        at(BlockerKind::SeriesCap, {5, 7}),
    };
    for (const auto& s : scenarios) {
        CAPTURE(s.label());
        const GmdNetwork once = apply(net, s, c);
        CHECK(net == before);                       // purity
        CHECK(apply(once, s, c) == once);           // idempotence
    }
}

TEST_CASE("neutral blockers sever ground paths but keep through paths", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const GmdNetwork net = build(c).network;

    SECTION("gwye-gwye unit loses both windings") {
        const GmdNetwork out = apply(net, at(BlockerKind::Neutral, {2}), c);
        CHECK_FALSE(has_branch(out, 11));   // T2 high winding
        CHECK_FALSE(has_branch(out, 12));   // T2 low winding
        CHECK(out.branches.size() == net.branches.size() - 2);
        CHECK_FALSE(out.xf_index[1].high.has_value());
        CHECK_FALSE(out.xf_index[1].low.has_value());
        // Other units at the same substation are untouched.
        CHECK(out.xf_index[4].low.has_value());
    }
    SECTION("autotransformer keeps its series path") {
        const GmdNetwork out = apply(net, at(BlockerKind::Neutral, {1}), c);
        CHECK(has_branch(out, 9));          // T1 series stays
        CHECK_FALSE(has_branch(out, 10));   // T1 common goes
        CHECK(out.xf_index[0].series.has_value());
        CHECK_FALSE(out.xf_index[0].common.has_value());
    }
    SECTION("three-winding auto keeps series and star tie, loses ground paths") {
        const GmdNetwork out = apply(net, at(BlockerKind::Neutral, {4}), c);
        CHECK(has_branch(out, 15));         // series
        CHECK(has_branch(out, 16));         // star tie
        CHECK_FALSE(has_branch(out, 17));   // common
        CHECK_FALSE(has_branch(out, 18));   // guard
    }
    SECTION("targeted neutral keeps the step-up unit") {
        const GmdNetwork out = apply(net, at(BlockerKind::Neutral, {1}), c);
        CHECK(testutil::count_origin(out, BranchOrigin::Gsu) == 1);
    }
    SECTION("neutral at all locations also blocks step-up units") {
        const GmdNetwork out = apply(net, at_all(BlockerKind::Neutral), c);
        CHECK(testutil::count_origin(out, BranchOrigin::Gsu) == 0);
        CHECK(testutil::count_origin(out, BranchOrigin::XfWindingHigh) == 0);
        CHECK(testutil::count_origin(out, BranchOrigin::XfWindingLow) == 0);
        CHECK(testutil::count_origin(out, BranchOrigin::XfCommon) == 0);
        CHECK(testutil::count_origin(out, BranchOrigin::StarGuard) == 0);
        CHECK(testutil::count_origin(out, BranchOrigin::XfSeries) == 3);
        CHECK(testutil::count_origin(out, BranchOrigin::StarTie) == 1);
        // Numerical grounding paths are not neutral devices.
        CHECK(testutil::count_origin(out, BranchOrigin::ImplicitGround) == 12);
    }
}

TEST_CASE("substation blockers remove only earth ties", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const GmdNetwork net = build(c).network;

    SECTION("single substation") {
        const GmdNetwork out = apply(net, at(BlockerKind::Substation, {2}), c);
        CHECK(out.branches.size() == net.branches.size() - 1);
        CHECK(testutil::find_branch(out, BranchOrigin::SubstationGroundTie, 2) == nullptr);
        CHECK(testutil::find_branch(out, BranchOrigin::SubstationGroundTie, 1) != nullptr);
    }
    SECTION("all substations") {
        const GmdNetwork out = apply(net, at_all(BlockerKind::Substation), c);
        CHECK(testutil::count_origin(out, BranchOrigin::SubstationGroundTie) == 0);
        // Winding branches all survive.
        CHECK(testutil::count_origin(out, BranchOrigin::XfWindingHigh) == 1);
        CHECK(testutil::count_origin(out, BranchOrigin::XfCommon) == 3);
    }
}

TEST_CASE("series capacitors open line branches", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const GmdNetwork net = build(c).network;

    SECTION("single line") {
        const GmdNetwork out = apply(net, at(BlockerKind::SeriesCap, {5}), c);
        CHECK(testutil::find_branch(out, BranchOrigin::Line, 5) == nullptr);
        CHECK(testutil::find_branch(out, BranchOrigin::Line, 6) != nullptr);
    }
    SECTION("all lines") {
        const GmdNetwork out = apply(net, at_all(BlockerKind::SeriesCap), c);
        CHECK(testutil::count_origin(out, BranchOrigin::Line) == 0);
    }
    SECTION("bypass branches count as the line") {
        AcCase tiny = testutil::tiny_case();
        tiny.lines[0].r_pu = 0.0;
        const GmdNetwork bypassed = build(tiny, no_implicit_grounds()).network;
        REQUIRE(testutil::count_origin(bypassed, BranchOrigin::CapBypass) == 1);
        const GmdNetwork out = apply(bypassed, at(BlockerKind::SeriesCap, {1}), tiny);
        CHECK(testutil::count_origin(out, BranchOrigin::CapBypass) == 0);
    }
}

TEST_CASE("locations are validated against the ac case", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const GmdNetwork net = build(c).network;

    CHECK_THROWS_MATCHES(apply(net, at(BlockerKind::Neutral, {99}), c), ScenarioError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("99")));
    // Bus and line ids are not substation ids.
    CHECK_THROWS_AS(apply(net, at(BlockerKind::Substation, {11}), c), ScenarioError);
    CHECK_THROWS_AS(apply(net, at(BlockerKind::SeriesCap, {999}), c), ScenarioError);
    // Valid ids never throw, even if the branch is already gone.
    const GmdNetwork once = apply(net, at(BlockerKind::SeriesCap, {5}), c);
    CHECK_NOTHROW(apply(once, at(BlockerKind::SeriesCap, {5}), c));
}

TEST_CASE("none scenario is the identity", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const GmdNetwork net = build(c).network;
    CHECK(apply(net, BlockerScenario{}, c) == net);
}

TEST_CASE("full pipeline reproduces the frozen baseline", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const UniformField field{1.0, 90.0};

    const SolveResult none =
        run(c, no_implicit_grounds(), field, BlockerScenario{});
    CHECK_THAT(none.total_qloss_mvar, WithinRel(753.326432796, 1e-9));
    REQUIRE(none.transformers.size() == 6);
    CHECK_THAT(none.transformers[0].qloss_mvar, WithinRel(0.640397346, 1e-6));
    CHECK_THAT(none.transformers[1].qloss_mvar, WithinRel(116.805182723, 1e-9));
    CHECK_THAT(none.transformers[4].qloss_mvar, WithinRel(193.949171032, 1e-9));
    CHECK(none.kcl_max_abs < 1e-6);

    // Implicit grounds barely perturb the answer (well under 0.1%).
    const SolveResult grounded = run(c, BuilderConfig{}, field, BlockerScenario{});
    CHECK_THAT(grounded.total_qloss_mvar, WithinRel(753.325231388, 1e-9));
    CHECK(std::abs(grounded.total_qloss_mvar - none.total_qloss_mvar) <
          1e-3 * none.total_qloss_mvar);
}

TEST_CASE("pipeline prunes nodes stranded by the configuration", "[blockers]") {
    // Without implicit grounds, the generator-only bus 13 and the delta
    // tertiary bus 43 have no conductance at all and must be dropped, not
    // reported as singular.
    const AcCase c = testutil::load_fixture_case();
    const SolveResult r =
        run(c, no_implicit_grounds(), UniformField{1.0, 90.0}, BlockerScenario{});
    CHECK(r.network.buses.size() == 15);
    int dropped = 0;
    for (const auto& d : r.notes) {
        if (d.message.find("dropped") != std::string::npos) ++dropped;
    }
    CHECK(dropped == 2);
}

TEST_CASE("series capacitor runs carry the ac-side advisory", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const SolveResult r = run(c, no_implicit_grounds(), UniformField{1.0, 90.0},
                              at_all(BlockerKind::SeriesCap));
    bool advised = false;
    for (const auto& d : r.notes) {
        if (d.message.find("reactance") != std::string::npos) advised = true;
    }
    CHECK(advised);
    CHECK(r.total_qloss_mvar == 0.0);
}

TEST_CASE("scenario matrix is fields-outer, scenarios-inner", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    const ParsedLineVoltages table =
        load_line_voltages(testutil::fixture_path("nonuniform.csv"));
    REQUIRE(table.table.has_value());

    const std::vector<LabeledField> fields = {
        {"uniform", UniformField{1.0, 90.0}},
        {"table", *table.table},
    };
    const std::vector<BlockerScenario> scenarios = {
        BlockerScenario{},
        at_all(BlockerKind::Neutral),
        at_all(BlockerKind::Substation),
        at_all(BlockerKind::SeriesCap),
    };
    const std::vector<LabeledRun> runs =
        scenario_matrix(c, no_implicit_grounds(), fields, scenarios);
    REQUIRE(runs.size() == 8);
    CHECK(runs[0].field_label == "uniform");
    CHECK(runs[0].scenario_label == "none");
    CHECK(runs[3].field_label == "uniform");
    CHECK(runs[3].scenario_label == "seriescap@all");
    CHECK(runs[4].field_label == "table");
    CHECK(runs[4].scenario_label == "none");
    CHECK(runs[7].scenario_label == "seriescap@all");

    // The table runs land on the frozen ordering totals.
    CHECK_THAT(runs[4].result.total_qloss_mvar, WithinRel(93.005991100, 1e-9));
    CHECK_THAT(runs[5].result.total_qloss_mvar, WithinRel(2.055423338, 1e-6));
    CHECK_THAT(runs[6].result.total_qloss_mvar, WithinRel(26.410495484, 1e-8));
    CHECK(runs[7].result.total_qloss_mvar == 0.0);
}

TEST_CASE("blocked scenarios under a uniform field carry no loss", "[blockers]") {
    const AcCase c = testutil::load_fixture_case();
    for (const BlockerKind kind :
         {BlockerKind::Neutral, BlockerKind::Substation, BlockerKind::SeriesCap}) {
        const SolveResult r =
            run(c, no_implicit_grounds(), UniformField{1.0, 90.0}, at_all(kind));
        CAPTURE(to_string(kind));
        for (const auto& t : r.transformers) {
            CHECK(std::abs(t.qloss_mvar) <= 1e-9);
        }
    }
}
