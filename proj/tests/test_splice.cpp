#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "invperc/splice.hpp"

using namespace invperc;

TEST_CASE("tranche geometry") {
    SUBCASE("epsilon = 1 needs six balls") {
        TrancheSpec t = build_tranche(16, 1.0);
        CHECK(t.balls.size() == 6);
        CHECK_FALSE(t.degenerate);
    }
    SUBCASE("epsilon = 1/8 at n = 64") {
        TrancheSpec t = build_tranche(64, 0.125);
        CHECK(t.balls.size() == 48);
        CHECK(t.ball_radius == 8);
        CHECK(t.half_width == 4);
        CHECK(t.centerline == 48);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(build_tranche(4, 0.5), std::domain_error);
        CHECK_THROWS_AS(build_tranche(16, 0.0), std::domain_error);
        CHECK_THROWS_AS(build_tranche(16, 1.5), std::domain_error);
    }
    SUBCASE("degenerate mesh is flagged and still one edge wide") {
        TrancheSpec t = build_tranche(16, 0.01);
        CHECK(t.degenerate);
        CHECK(t.half_width == 1);
        CHECK_FALSE(t.edges.empty());
    }
}

TEST_CASE("tranche edges live in the annulus and under the balls") {
    for (int n : {8, 16, 32, 64}) {
        for (double eps : {1.0, 0.5, 0.25, 0.125}) {
            TrancheSpec t = build_tranche(n, eps);
            std::vector<EdgeId> ann_edges = annulus_edges(AnnulusSpec(n / 2, n));
            EdgeSet ann(ann_edges.begin(), ann_edges.end());
            std::size_t covered = 0;
            EdgeSet seen;
            for (const Ball& b : t.balls) {
                for (const EdgeId& e : b.new_edges) {
                    CHECK(chebyshev(e.site, b.center) <= b.radius);
                    CHECK(seen.insert(e).second);
                }
                covered += b.new_edges.size();
            }
            CHECK(covered == t.edges.size());  // every tranche edge in some ball
            for (const EdgeId& e : t.edges) CHECK(ann.count(e) == 1);
        }
    }
}

TEST_CASE("identity resample leaves the crossing count unchanged") {
    TrancheSpec t = build_tranche(16, 0.25);
    WeightField wf = sample_weights(EdgeRegion::box(65), 21);
    // resampling from the field's own stream reproduces the same weights
    auto [a, b] = resample_pair(wf, t, wf.seed(), DeriveMode::ThresholdCritical, 4);
    CHECK(a.config.open_edges() == b.config.open_edges());
}

TEST_CASE("empty tranche keeps the pair equal") {
    TrancheSpec t = build_tranche(16, 0.25);
    t.edges.clear();
    t.balls.clear();
    WeightField wf = sample_weights(EdgeRegion::box(65), 22);
    auto [a, b] = resample_pair(wf, t, 999, DeriveMode::ThresholdCritical, 4);
    CHECK(a.config.open_edges() == b.config.open_edges());
    CHECK(resample_sequence(wf, t, 999, DeriveMode::ThresholdCritical, 4).size() == 1);
}

TEST_CASE("the final sequence element is the full resample, bit for bit") {
    TrancheSpec t = build_tranche(16, 0.25);
    WeightField wf = sample_weights(EdgeRegion::box(65), 23);
    std::vector<WeightField> fields = resample_ball_fields(wf, t, 777);
    REQUIRE(fields.size() == t.balls.size() + 1);
    WeightField direct = resample_region(wf, t.edges, 777);
    for (const EdgeId& e : t.edges)
        CHECK(fields.back().weight(e) == direct.weight(e));
    // and outside the tranche nothing ever moves
    for (const WeightField& f : fields)
        for (const EdgeId& e : annulus_edges(AnnulusSpec(8, 16)))
            if (std::find(t.edges.begin(), t.edges.end(), e) == t.edges.end())
                CHECK(f.weight(e) == wf.weight(e));
}

TEST_CASE("telescoping: a changed count pins a changed ball") {
    for (auto mode : {DeriveMode::ThresholdCritical, DeriveMode::Invasion}) {
        SpliceEngine eng(16, mode, 4);
        TrancheSpec t = build_tranche(16, 0.25);
        int mismatches = 0;
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            WeightField wf = sample_weights(EdgeRegion::box(65), seed);
            SpliceRun run = run_splice(wf, t, derive_seed(seed, 1), 1, mode, 4);
            if (run.n_original != run.n_resampled) {
                REQUIRE(run.first_change_index.has_value());
                CHECK(*run.first_change_index >= 1);
                CHECK(*run.first_change_index <= static_cast<int>(t.balls.size()));
                ++mismatches;
            }
            // the run's endpoints agree with direct measurement
            CHECK(run.n_original == eng.measure(wf));
            CHECK(run.n_resampled ==
                  eng.measure(resample_region(wf, t.edges, derive_seed(seed, 1))));
        }
        CHECK(mismatches > 0);  // the fixture grid must exercise real changes
    }
}

TEST_CASE("mismatch estimator sanity and histogram") {
    MismatchEstimate est = estimate_mismatch(32, 0.25, 6, 400, 31,
                                             DeriveMode::ThresholdCritical, 4, 1);
    CHECK(est.mismatch.estimate > 0.0);
    CHECK(est.mismatch.estimate < 1.0);
    long long mass = 0;
    for (long long c : est.histogram) mass += c;
    CHECK(mass == 400);
    // deep tail is empty at this scale
    long long beyond = 0;
    for (std::size_t k = 21; k < est.histogram.size(); ++k) beyond += est.histogram[k];
    CHECK(beyond == 0);
    CHECK(est.eq_diff.size() == 7);
    CHECK(est.ge_diff.size() == 7);
    // {N >= 0} always holds on both sides, so that cell never differs
    CHECK(est.ge_diff[0].estimate == 0.0);
    CHECK(est.outside_discrepancy_rate == 0.0);  // threshold mode shares weights
}

TEST_CASE("invasion mode reports the outside discrepancy diagnostic") {
    MismatchEstimate est =
        estimate_mismatch(16, 0.25, 3, 60, 33, DeriveMode::Invasion, 4, 1);
    CHECK(est.outside_discrepancy_rate >= 0.0);
    CHECK(est.outside_discrepancy_rate <= 1.0);
}

TEST_CASE("mismatch indicator is insensitive to swapping the inside streams") {
    // both draws fresh vs one original draw: same law for the mismatch rate
    TrancheSpec t = build_tranche(16, 0.25);
    SpliceEngine eng(16, DeriveMode::ThresholdCritical, 4);
    const long long samples = 1500;
    long long direct = 0, swapped = 0;
    for (long long i = 0; i < samples; ++i) {
        std::uint64_t si = derive_seed(41, i);
        WeightField base(EdgeRegion::box(65), si);
        WeightField fresh1 = resample_region(base, t.edges, derive_seed(si, 1));
        WeightField fresh2 = resample_region(base, t.edges, derive_seed(si, 2));
        if (eng.measure(base) != eng.measure(fresh1)) ++direct;
        if (eng.measure(fresh2) != eng.measure(fresh1)) ++swapped;
    }
    double p1 = static_cast<double>(direct) / samples;
    double p2 = static_cast<double>(swapped) / samples;
    double sigma = std::hypot(wilson_stderr(direct, samples),
                              wilson_stderr(swapped, samples));
    CHECK(std::abs(p1 - p2) < 2.5 * sigma);
}

TEST_CASE("conditional variance report and the Markov bound") {
    SUBCASE("inner sample validation") {
        CHECK_THROWS_AS(estimate_conditional_variance(16, 0.25, 1, 10, 1, {0.1}, 1,
                                                      DeriveMode::ThresholdCritical),
                        std::domain_error);
        CHECK_THROWS_AS(estimate_conditional_variance(16, 0.25, 1, 10, 4, {0.0}, 1,
                                                      DeriveMode::ThresholdCritical),
                        std::domain_error);
    }
    SUBCASE("impossible target level zeroes both sides") {
        ConditionalVarianceReport rep = estimate_conditional_variance(
            16, 0.25, 500, 20, 4, {0.2}, 2, DeriveMode::ThresholdCritical, 4, 1);
        CHECK(rep.mean_pq == 0.0);
        CHECK(rep.cells[0].interior_prob == 0.0);
        CHECK(rep.cells[0].markov_ok);
    }
    SUBCASE("delta = 0.5 has an empty interior") {
        ConditionalVarianceReport rep = estimate_conditional_variance(
            16, 0.25, 1, 30, 8, {0.5}, 3, DeriveMode::ThresholdCritical, 4, 1);
        CHECK(rep.cells[0].interior_prob == 0.0);
    }
    SUBCASE("the bound holds where the event is alive") {
        ConditionalVarianceReport rep = estimate_conditional_variance(
            16, 0.25, 1, 120, 16, {0.1, 0.2}, 5, DeriveMode::ThresholdCritical, 4, 1);
        for (const ConditionalVarianceCell& c : rep.cells) CHECK(c.markov_ok);
        for (const ConditionalVarianceCell& c : rep.cells_ge) CHECK(c.markov_ok);
    }
}

TEST_CASE("a_event_stability at p = 1 is never destroyed") {
    EstimateWithCI est = a_event_stability(16, 0.25, 1.0, 50, 7, 2, 1);
    CHECK(est.estimate == 0.0);
}

TEST_CASE("derive_config modes agree on the measured region's support") {
    WeightField wf = sample_weights(EdgeRegion::box(65), 55);
    DerivedConfig inv = derive_config(wf, 16, DeriveMode::Invasion, 4);
    DerivedConfig thr = derive_config(wf, 16, DeriveMode::ThresholdCritical, 4);
    REQUIRE(inv.invasion.has_value());
    CHECK_FALSE(thr.invasion.has_value());
    for (const EdgeId& e : inv.config.open_edges()) {
        CHECK(thr.config.region().contains(e));
    }
}
