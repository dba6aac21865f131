#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "invperc/weights.hpp"
#include "test_util.hpp"

using namespace invperc;

TEST_CASE("sampling is deterministic in (region, seed)") {
    EdgeRegion region = EdgeRegion::box(3);
    WeightField a = sample_weights(region, 42);
    WeightField b = sample_weights(region, 42);
    for (const EdgeId& e : region.edges()) CHECK(a.weight(e) == b.weight(e));
}

TEST_CASE("distinct seeds give distinct fields") {
    EdgeRegion region = EdgeRegion::box(2);
    for (std::uint64_t s = 0; s < 10; ++s) {
        WeightField a = sample_weights(region, s);
        WeightField b = sample_weights(region, s + 1000);
        bool differ = false;
        for (const EdgeId& e : region.edges())
            if (a.weight(e) != b.weight(e)) differ = true;
        CHECK(differ);
    }
}

TEST_CASE("weights are uniform on (0,1)") {
    // 3-sigma CLT band for the mean of 1e6 uniforms: 0.5 +- 3/(sqrt(12)*1e3)
    EdgeRegion region = EdgeRegion::box(500);
    REQUIRE(region.size() >= 1000000);
    WeightField wf = sample_weights(region, 7);
    double sum = 0.0;
    std::size_t count = 0;
    for (const EdgeId& e : region.edges()) {
        double w = wf.weight_unchecked(e);
        CHECK(w > 0.0);
        CHECK(w < 1.0);
        sum += w;
        if (++count == 1000000) break;
    }
    double mean = sum / 1000000.0;
    CHECK(mean > 0.498);
    CHECK(mean < 0.502);
}

TEST_CASE("resample_region locality") {
    EdgeRegion region = EdgeRegion::box(2);
    WeightField wf = sample_weights(region, 1);

    SUBCASE("empty sub is the identity") {
        WeightField out = resample_region(wf, {}, 99);
        for (const EdgeId& e : region.edges()) CHECK(out.weight(e) == wf.weight(e));
    }
    SUBCASE("full resample equals fresh sampling") {
        WeightField out = resample_region(wf, region.edges(), 99);
        WeightField fresh = sample_weights(region, 99);
        for (const EdgeId& e : region.edges()) CHECK(out.weight(e) == fresh.weight(e));
    }
    SUBCASE("single edge changes exactly one weight") {
        EdgeId target = horizontal_edge(0, 0);
        WeightField out = resample_region(wf, {target}, 99);
        int changed = 0;
        for (const EdgeId& e : region.edges())
            if (out.weight(e) != wf.weight(e)) ++changed;
        CHECK(changed == 1);
        CHECK(out.weight(target) != wf.weight(target));
        // source field untouched
        CHECK(wf.weight(target) == sample_weights(region, 1).weight(target));
    }
    SUBCASE("sub outside the region is rejected") {
        CHECK_THROWS_AS(resample_region(wf, {horizontal_edge(50, 50)}, 99),
                        std::domain_error);
    }
    SUBCASE("generation counter advances") {
        CHECK(resample_region(wf, {}, 99).generation() == wf.generation() + 1);
    }
}

TEST_CASE("threshold_config endpoints and nesting") {
    EdgeRegion region = EdgeRegion::box(2);
    WeightField wf = sample_weights(region, 3);
    CHECK(threshold_config(wf, 0.0).open_count() == 0);
    CHECK(threshold_config(wf, 1.0).open_count() == region.size());
    Configuration lo = threshold_config(wf, 0.3);
    Configuration hi = threshold_config(wf, 0.7);
    for (const EdgeId& e : region.edges())
        if (lo.is_open(e)) CHECK(hi.is_open(e));
    CHECK_THROWS_AS(threshold_config(wf, 1.5), std::domain_error);
}

TEST_CASE("IPWF round trip") {
    SUBCASE("box region") {
        WeightField wf = sample_weights(EdgeRegion::box(3), 11);
        std::stringstream ss;
        save_weight_field(wf, ss);
        WeightField back = load_weight_field(ss);
        CHECK(back.seed() == wf.seed());
        for (const EdgeId& e : wf.region().edges())
            CHECK(back.weight(e) == wf.weight(e));
    }
    SUBCASE("explicit region with overrides") {
        EdgeRegion region = EdgeRegion::from_edges(annulus_edges(AnnulusSpec(1, 3)));
        WeightField wf =
            resample_region(sample_weights(region, 5), {horizontal_edge(1, 1)}, 77);
        std::stringstream ss;
        save_weight_field(wf, ss);
        WeightField back = load_weight_field(ss);
        for (const EdgeId& e : region.edges()) CHECK(back.weight(e) == wf.weight(e));
    }
    SUBCASE("garbage stream is rejected") {
        std::stringstream ss("not a field");
        CHECK_THROWS(load_weight_field(ss));
    }
}

TEST_CASE("crafted fixture fields carry the prescribed weights") {
    EdgeRegion region = EdgeRegion::box(2);
    WeightField wf = testutil::make_field(
        region, [](const EdgeId& e) { return e.orientation == Orientation::Horizontal
                                                 ? 0.25
                                                 : 0.75; });
    CHECK(wf.weight(horizontal_edge(0, 0)) == 0.25);
    CHECK(wf.weight(vertical_edge(1, -1)) == 0.75);
}

TEST_CASE("EdgeRegion covers_box") {
    CHECK(EdgeRegion::box(5).covers_box(5));
    CHECK(EdgeRegion::box(5).covers_box(3, Site{1, 1}));
    CHECK_FALSE(EdgeRegion::box(5).covers_box(6));
    EdgeRegion explicit_box = EdgeRegion::from_edges(region_edges(box_sites(2)));
    CHECK(explicit_box.covers_box(2));
    CHECK_FALSE(explicit_box.covers_box(3));
    CHECK(explicit_box.size() == 40);
}
