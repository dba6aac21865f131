#include "invperc/splice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "invperc/arms.hpp"

namespace invperc {

namespace {

// Counterclockwise walk along dS(r) starting at (r, 0); t in [0, 8r).
Site square_point(int r, long long t) {
    long long L = 8LL * r;
    t %= L;
    if (t < r) return {r, static_cast<int>(t)};
    if (t < 3 * r) return {static_cast<int>(r - (t - r)), r};
    if (t < 5 * r) return {-r, static_cast<int>(r - (t - 3 * r))};
    if (t < 7 * r) return {static_cast<int>(-r + (t - 5 * r)), -r};
    return {r, static_cast<int>(-r + (t - 7 * r))};
}

bool ball_covers(const Site& center, int radius, const EdgeId& e) {
    return chebyshev(e.site, center) <= radius && chebyshev(e.other(), center) <= radius;
}

}  // namespace

TrancheSpec build_tranche(int n, double epsilon) {
    if (n < 8) throw std::domain_error("build_tranche: n must be >= 8");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::domain_error("build_tranche: epsilon must be in (0, 1]");
    TrancheSpec t;
    t.n = n;
    t.epsilon = epsilon;
    t.centerline = 3 * n / 4;
    t.half_width = std::max(1, static_cast<int>(std::lround(epsilon * n / 2.0)));
    t.ball_radius = std::max(1, static_cast<int>(std::lround(epsilon * n)));
    t.degenerate = epsilon * n < 1.0;

    // strip clamped into the measured annulus Ann(n/2, n)
    int lo = std::max(t.centerline - t.half_width, n / 2);
    int hi = std::min(t.centerline + t.half_width, n);
    t.edges = region_edges(annulus_sites(AnnulusSpec(lo, hi)));

    int k = static_cast<int>(std::ceil(6.0 / epsilon));
    long long perimeter = 8LL * t.centerline;
    // grow the radius until the balls cover every tranche edge; the nominal
    // radius already exceeds both the strip half-width and the ball spacing,
    // so this loop is a rounding safety net
    for (;; ++t.ball_radius) {
        t.balls.clear();
        EdgeSet covered;
        for (int i = 0; i < k; ++i) {
            Ball b;
            b.center = square_point(t.centerline, perimeter * i / k);
            b.radius = t.ball_radius;
            for (const EdgeId& e : t.edges)
                if (!covered.count(e) && ball_covers(b.center, b.radius, e)) {
                    b.new_edges.push_back(e);
                    covered.insert(e);
                }
            t.balls.push_back(std::move(b));
        }
        if (covered.size() == t.edges.size()) break;
        if (t.ball_radius > 2 * n)
            throw std::logic_error("build_tranche: coverage failed");
    }
    return t;
}

std::vector<WeightField> resample_ball_fields(const WeightField& wf,
                                              const TrancheSpec& tranche,
                                              std::uint64_t seed2) {
    std::vector<WeightField> fields;
    fields.reserve(tranche.balls.size() + 1);
    fields.push_back(wf);
    std::vector<EdgeId> cumulative;
    for (const Ball& b : tranche.balls) {
        cumulative.insert(cumulative.end(), b.new_edges.begin(), b.new_edges.end());
        fields.push_back(resample_region(wf, cumulative, seed2));
    }
    return fields;
}

DerivedConfig derive_config(const WeightField& wf, int n, DeriveMode mode, int lambda) {
    if (n < 8) throw std::domain_error("derive_config: n must be >= 8");
    if (lambda < 1) throw std::domain_error("derive_config: lambda must be >= 1");
    EdgeRegion ann_region =
        EdgeRegion::from_edges(annulus_edges(AnnulusSpec(n / 2, n)));
    DerivedConfig out;
    if (mode == DeriveMode::ThresholdCritical) {
        Configuration cfg(ann_region);
        for (const EdgeId& e : ann_region.edges())
            if (wf.weight(e) < 0.5) cfg.set_open(e, true);
        out.config = std::move(cfg);
    } else {
        InvasionResult res = invade(wf, StopRule{std::nullopt, lambda * n});
        out.config = invasion_configuration(res, ann_region);
        out.invasion = std::move(res);
    }
    return out;
}

std::pair<DerivedConfig, DerivedConfig> resample_pair(const WeightField& wf,
                                                      const TrancheSpec& tranche,
                                                      std::uint64_t seed2,
                                                      DeriveMode mode, int lambda) {
    WeightField resampled = resample_region(wf, tranche.edges, seed2);
    return {derive_config(wf, tranche.n, mode, lambda),
            derive_config(resampled, tranche.n, mode, lambda)};
}

std::vector<DerivedConfig> resample_sequence(const WeightField& wf,
                                             const TrancheSpec& tranche,
                                             std::uint64_t seed2, DeriveMode mode,
                                             int lambda) {
    std::vector<DerivedConfig> out;
    for (const WeightField& f : resample_ball_fields(wf, tranche, seed2))
        out.push_back(derive_config(f, tranche.n, mode, lambda));
    return out;
}

SpliceEngine::SpliceEngine(int n, DeriveMode mode, int lambda)
    : n_(n), lambda_(lambda), mode_(mode), net_(AnnulusSpec(n / 2, n)) {
    if (n < 8) throw std::domain_error("SpliceEngine: n must be >= 8");
    if (lambda < 1) throw std::domain_error("SpliceEngine: lambda must be >= 1");
    if (mode_ == DeriveMode::Invasion)
        inv_ = std::make_unique<InvasionEngine>(lambda * n);
}

int SpliceEngine::measure(const WeightField& wf) {
    if (mode_ == DeriveMode::ThresholdCritical)
        return net_.solve([&](const EdgeId& e) { return wf.weight_unchecked(e) < 0.5; });
    invaded_.clear();
    inv_->run_lean(wf, lambda_ * n_,
                   [&](const EdgeId& e, double) { invaded_.insert(e); });
    return net_.solve([&](const EdgeId& e) { return invaded_.count(e) != 0; });
}

SpliceRun run_splice(const WeightField& wf, const TrancheSpec& tranche,
                     std::uint64_t seed2, int m_target, DeriveMode mode, int lambda,
                     std::optional<double> p_for_a) {
    SpliceRun run;
    run.seed = seed2;
    run.n = tranche.n;
    run.epsilon = tranche.epsilon;
    run.m_target = m_target;

    std::vector<WeightField> fields = resample_ball_fields(wf, tranche, seed2);
    SpliceEngine eng(tranche.n, mode, lambda);
    int prev = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
        int nj = eng.measure(fields[j]);
        if (j == 0)
            run.n_original = nj;
        else if (nj != prev && !run.first_change_index)
            run.first_change_index = static_cast<int>(j);
        prev = nj;
        if (p_for_a)
            run.a_flags.push_back(
                detect_circuit_event_A(fields[j], tranche.n, *p_for_a, lambda) ? 1 : 0);
    }
    run.n_resampled = prev;
    return run;
}

MismatchEstimate estimate_mismatch(int n, double epsilon, int m_cap, long long samples,
                                   std::uint64_t seed, DeriveMode mode, int lambda,
                                   int workers) {
    if (samples < 1) throw std::domain_error("estimate_mismatch: samples >= 1");
    if (m_cap < 0) throw std::domain_error("estimate_mismatch: m_cap >= 0");
    TrancheSpec tranche = build_tranche(n, epsilon);
    EdgeSet tranche_set(tranche.edges.begin(), tranche.edges.end());
    std::vector<EdgeId> outside;  // measured-annulus edges not in the tranche
    for (const EdgeId& e : annulus_edges(AnnulusSpec(n / 2, n)))
        if (!tranche_set.count(e)) outside.push_back(e);

    struct Acc {
        std::unique_ptr<SpliceEngine> eng;
        long long mismatch = 0, out_disc = 0;
        std::vector<long long> hist;
        std::vector<long long> eq_cnt, ge_cnt;
    };
    EdgeRegion region = EdgeRegion::box(lambda * n + 1);
    Acc total = parallel_accumulate(
        samples, workers,
        [&] {
            Acc a;
            a.eng = std::make_unique<SpliceEngine>(n, mode, lambda);
            a.eq_cnt.assign(m_cap + 1, 0);
            a.ge_cnt.assign(m_cap + 1, 0);
            return a;
        },
        [&](Acc& acc, long long i) {
            std::uint64_t si = derive_seed(seed, static_cast<std::uint64_t>(i));
            WeightField base(region, si);
            int n0 = acc.eng->measure(base);
            EdgeSet inv0;
            if (mode == DeriveMode::Invasion) inv0 = acc.eng->last_invaded();
            WeightField res = resample_region(base, tranche.edges, derive_seed(si, 1));
            int n1 = acc.eng->measure(res);
            if (mode == DeriveMode::Invasion) {
                for (const EdgeId& e : outside)
                    if ((inv0.count(e) != 0) != (acc.eng->last_invaded().count(e) != 0)) {
                        ++acc.out_disc;
                        break;
                    }
            }
            if (acc.hist.size() <= static_cast<std::size_t>(n0))
                acc.hist.resize(n0 + 1, 0);
            ++acc.hist[n0];
            if (n0 != n1) ++acc.mismatch;
            for (int m = 0; m <= m_cap; ++m) {
                if (n0 == m && n1 != m) ++acc.eq_cnt[m];
                if (n0 >= m && n1 < m) ++acc.ge_cnt[m];
            }
        },
        [](Acc& into, Acc& from) {
            into.mismatch += from.mismatch;
            into.out_disc += from.out_disc;
            if (into.hist.size() < from.hist.size()) into.hist.resize(from.hist.size(), 0);
            for (std::size_t k = 0; k < from.hist.size(); ++k) into.hist[k] += from.hist[k];
            for (std::size_t m = 0; m < from.eq_cnt.size(); ++m) {
                into.eq_cnt[m] += from.eq_cnt[m];
                into.ge_cnt[m] += from.ge_cnt[m];
            }
        });

    MismatchEstimate out;
    out.n = n;
    out.epsilon = epsilon;
    out.mode = mode;
    out.samples = samples;
    out.seed = seed;
    out.mismatch = frequency_estimate(total.mismatch, samples, seed);
    out.histogram = std::move(total.hist);
    for (int m = 0; m <= m_cap; ++m) {
        out.eq_diff.push_back(frequency_estimate(total.eq_cnt[m], samples, seed));
        out.ge_diff.push_back(frequency_estimate(total.ge_cnt[m], samples, seed));
    }
    out.outside_discrepancy_rate =
        samples > 0 ? static_cast<double>(total.out_disc) / samples : 0.0;
    return out;
}

ConditionalVarianceReport estimate_conditional_variance(
    int n, double epsilon, int m_target, long long outer_samples,
    long long inner_samples, const std::vector<double>& delta_list, std::uint64_t seed,
    DeriveMode mode, int lambda, int workers) {
    if (inner_samples < 2)
        throw std::domain_error("estimate_conditional_variance: inner_samples >= 2");
    if (outer_samples < 1)
        throw std::domain_error("estimate_conditional_variance: outer_samples >= 1");
    if (m_target < 0)
        throw std::domain_error("estimate_conditional_variance: m_target >= 0");
    for (double d : delta_list)
        if (!(d > 0.0 && d < 1.0))
            throw std::domain_error("estimate_conditional_variance: delta in (0,1)");
    TrancheSpec tranche = build_tranche(n, epsilon);

    struct Acc {
        std::unique_ptr<SpliceEngine> eng;
        double sum_pq = 0, sum_pq2 = 0, sum_pq_ge = 0, sum_pq2_ge = 0;
        std::vector<long long> interior_eq, interior_ge;
    };
    EdgeRegion region = EdgeRegion::box(lambda * n + 1);
    double corr = static_cast<double>(inner_samples) / (inner_samples - 1);
    Acc total = parallel_accumulate(
        outer_samples, workers,
        [&] {
            Acc a;
            a.eng = std::make_unique<SpliceEngine>(n, mode, lambda);
            a.interior_eq.assign(delta_list.size(), 0);
            a.interior_ge.assign(delta_list.size(), 0);
            return a;
        },
        [&](Acc& acc, long long i) {
            std::uint64_t so = derive_seed(seed, static_cast<std::uint64_t>(i));
            WeightField base(region, so);
            long long s_eq = 0, s_ge = 0;
            for (long long k = 0; k < inner_samples; ++k) {
                WeightField f =
                    resample_region(base, tranche.edges, derive_seed(so, 1 + k));
                int nk = acc.eng->measure(f);
                if (nk == m_target) ++s_eq;
                if (nk >= m_target) ++s_ge;
            }
            double q_eq = static_cast<double>(s_eq) / inner_samples;
            double q_ge = static_cast<double>(s_ge) / inner_samples;
            acc.sum_pq += corr * q_eq * (1 - q_eq);
            acc.sum_pq2 += corr * q_eq * (1 - q_eq) * corr * q_eq * (1 - q_eq);
            acc.sum_pq_ge += corr * q_ge * (1 - q_ge);
            acc.sum_pq2_ge += corr * q_ge * (1 - q_ge) * corr * q_ge * (1 - q_ge);
            for (std::size_t d = 0; d < delta_list.size(); ++d) {
                if (q_eq > delta_list[d] && q_eq < 1 - delta_list[d]) ++acc.interior_eq[d];
                if (q_ge > delta_list[d] && q_ge < 1 - delta_list[d]) ++acc.interior_ge[d];
            }
        },
        [](Acc& into, Acc& from) {
            into.sum_pq += from.sum_pq;
            into.sum_pq2 += from.sum_pq2;
            into.sum_pq_ge += from.sum_pq_ge;
            into.sum_pq2_ge += from.sum_pq2_ge;
            for (std::size_t d = 0; d < from.interior_eq.size(); ++d) {
                into.interior_eq[d] += from.interior_eq[d];
                into.interior_ge[d] += from.interior_ge[d];
            }
        });

    auto mean_se = [&](double sum, double sum2) {
        double mean = sum / outer_samples;
        double se = 0.0;
        if (outer_samples > 1) {
            double var = (sum2 - outer_samples * mean * mean) / (outer_samples - 1);
            se = std::sqrt(std::max(0.0, var) / outer_samples);
        }
        return std::make_pair(mean, se);
    };
    auto make_cells = [&](double mean, double se, const std::vector<long long>& interior) {
        std::vector<ConditionalVarianceCell> cells;
        for (std::size_t d = 0; d < delta_list.size(); ++d) {
            ConditionalVarianceCell c;
            c.delta = delta_list[d];
            c.interior_prob = static_cast<double>(interior[d]) / outer_samples;
            c.interior_stderr = wilson_stderr(interior[d], outer_samples);
            c.markov_bound = mean / (c.delta * c.delta);
            c.markov_bound_stderr = se / (c.delta * c.delta);
            double slack =
                2.0 * std::sqrt(c.interior_stderr * c.interior_stderr +
                                c.markov_bound_stderr * c.markov_bound_stderr);
            c.markov_ok = c.interior_prob <= c.markov_bound + slack;
            cells.push_back(c);
        }
        return cells;
    };

    ConditionalVarianceReport rep;
    rep.n = n;
    rep.epsilon = epsilon;
    rep.m_target = m_target;
    rep.mode = mode;
    rep.outer_samples = outer_samples;
    rep.inner_samples = inner_samples;
    std::tie(rep.mean_pq, rep.mean_pq_stderr) = mean_se(total.sum_pq, total.sum_pq2);
    std::tie(rep.mean_pq_ge, rep.mean_pq_ge_stderr) =
        mean_se(total.sum_pq_ge, total.sum_pq2_ge);
    rep.cells = make_cells(rep.mean_pq, rep.mean_pq_stderr, total.interior_eq);
    rep.cells_ge = make_cells(rep.mean_pq_ge, rep.mean_pq_ge_stderr, total.interior_ge);
    return rep;
}

EstimateWithCI a_event_stability(int n, double epsilon, double p, long long samples,
                                 std::uint64_t seed, int lambda, int workers) {
    if (samples < 1) throw std::domain_error("a_event_stability: samples >= 1");
    if (p < 0.0 || p > 1.0) throw std::domain_error("a_event_stability: p in [0,1]");
    TrancheSpec tranche = build_tranche(n, epsilon);
    EdgeRegion region = EdgeRegion::box(lambda * n + 1);
    long long hits = parallel_success_count(samples, workers, [&](long long i) {
        std::uint64_t si = derive_seed(seed, static_cast<std::uint64_t>(i));
        WeightField base(region, si);
        if (!detect_circuit_event_A(base, n, p, lambda)) return false;
        std::vector<EdgeId> cumulative;
        std::uint64_t seed2 = derive_seed(si, 1);
        for (const Ball& b : tranche.balls) {
            cumulative.insert(cumulative.end(), b.new_edges.begin(), b.new_edges.end());
            WeightField f = resample_region(base, cumulative, seed2);
            if (!detect_circuit_event_A(f, n, p, lambda)) return true;
        }
        return false;
    });
    return frequency_estimate(hits, samples, seed);
}

}  // namespace invperc
