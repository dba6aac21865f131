#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "invperc/crossing.hpp"
#include "invperc/invasion.hpp"
#include "invperc/mc.hpp"

// Tranche resampling experiment: build the annular strip around dS(3n/4),
// cover it with balls, resample ball by ball, and measure how the maximal
// crossing count N of Ann(n/2, n) responds.

namespace invperc {

struct Ball {
    Site center;
    int radius;
    // tranche edges covered by this ball and by no earlier ball
    std::vector<EdgeId> new_edges;
};

struct TrancheSpec {
    int n = 0;
    double epsilon = 0.0;
    int centerline = 0;   // floor(3n/4)
    int half_width = 0;   // max(1, round(eps*n/2))
    int ball_radius = 0;  // max(1, round(eps*n)), grown if coverage fails
    bool degenerate = false;  // eps*n < 1: minimal one-edge-wide strip
    std::vector<EdgeId> edges;  // canonical order, subset of Ann(n/2, n)
    std::vector<Ball> balls;    // counterclockwise from the positive x-axis
};

// K = ceil(6/eps) balls spaced along the centerline square. Every tranche
// edge lies in at least one ball.
TrancheSpec build_tranche(int n, double epsilon);

enum class DeriveMode { Invasion, ThresholdCritical };

// Weight fields omega^0 .. omega^K: omega^0 is wf itself, omega^j carries
// fresh seed2-derived weights on the union of the first j balls. All fresh
// weights come from the single seed2 stream, so omega^K is bit-identical to
// resample_region(wf, tranche.edges, seed2) when the balls cover the tranche.
std::vector<WeightField> resample_ball_fields(const WeightField& wf,
                                              const TrancheSpec& tranche,
                                              std::uint64_t seed2);

struct DerivedConfig {
    Configuration config;  // open edges on Ann(n/2, n)
    std::optional<InvasionResult> invasion;
};

// The configuration whose crossings are measured: either the invasion grown
// to dS(lambda*n) or the threshold configuration at p = 1/2, restricted to
// the measured annulus.
DerivedConfig derive_config(const WeightField& wf, int n, DeriveMode mode,
                            int lambda = 4);

std::pair<DerivedConfig, DerivedConfig> resample_pair(const WeightField& wf,
                                                      const TrancheSpec& tranche,
                                                      std::uint64_t seed2,
                                                      DeriveMode mode, int lambda = 4);

std::vector<DerivedConfig> resample_sequence(const WeightField& wf,
                                             const TrancheSpec& tranche,
                                             std::uint64_t seed2, DeriveMode mode,
                                             int lambda = 4);

// Reusable measurement kernel: N = max edge-disjoint open crossings of
// Ann(n/2, n) under the chosen derivation.
class SpliceEngine {
public:
    SpliceEngine(int n, DeriveMode mode, int lambda = 4);

    int n() const { return n_; }
    int lambda() const { return lambda_; }
    DeriveMode mode() const { return mode_; }

    int measure(const WeightField& wf);
    // Invasion mode: also exposes the invaded edge set of the last run.
    const EdgeSet& last_invaded() const { return invaded_; }

private:
    int n_, lambda_;
    DeriveMode mode_;
    AnnulusFlowNetwork net_;
    std::unique_ptr<InvasionEngine> inv_;
    EdgeSet invaded_;
};

struct SpliceRun {
    std::uint64_t seed = 0;  // resample seed
    int n = 0;
    double epsilon = 0.0;
    int m_target = 0;
    int n_original = 0;
    int n_resampled = 0;
    std::optional<int> first_change_index;  // smallest j with N(w^j) != N(w^{j-1})
    std::vector<char> a_flags;  // A-event per omega^j, when p_for_a is given
};

SpliceRun run_splice(const WeightField& wf, const TrancheSpec& tranche,
                     std::uint64_t seed2, int m_target, DeriveMode mode,
                     int lambda = 4, std::optional<double> p_for_a = std::nullopt);

struct MismatchEstimate {
    int n = 0;
    double epsilon = 0.0;
    DeriveMode mode = DeriveMode::ThresholdCritical;
    long long samples = 0;
    std::uint64_t seed = 0;
    EstimateWithCI mismatch;           // P(N(w) != N(w_eps))
    std::vector<long long> histogram;  // histogram[k] = #{N(w) = k}
    // index M in [0, m_cap]: both readings of the target event
    std::vector<EstimateWithCI> eq_diff;  // P(N(w) = M, N(w_eps) != M)
    std::vector<EstimateWithCI> ge_diff;  // P(N(w) >= M, N(w_eps) < M)
    // invasion mode only: fraction of pairs whose open sets differ on
    // measured-annulus edges outside the tranche (the regrown invasion is not
    // the paper's exact coupling; see README)
    double outside_discrepancy_rate = 0.0;
};

MismatchEstimate estimate_mismatch(int n, double epsilon, int m_cap,
                                   long long samples, std::uint64_t seed,
                                   DeriveMode mode, int lambda = 4, int workers = 0);

struct ConditionalVarianceCell {
    double delta = 0.0;
    double interior_prob = 0.0;  // P(delta < q_hat < 1 - delta)
    double interior_stderr = 0.0;
    double markov_bound = 0.0;  // E[q_hat (1 - q_hat)] / delta^2
    double markov_bound_stderr = 0.0;
    bool markov_ok = false;
};

struct ConditionalVarianceReport {
    int n = 0;
    double epsilon = 0.0;
    int m_target = 0;
    DeriveMode mode = DeriveMode::ThresholdCritical;
    long long outer_samples = 0, inner_samples = 0;
    // bias-corrected E[q_hat (1 - q_hat)] for the {N = M} reading
    double mean_pq = 0.0, mean_pq_stderr = 0.0;
    std::vector<ConditionalVarianceCell> cells;
    // same for the {N >= M} reading
    double mean_pq_ge = 0.0, mean_pq_ge_stderr = 0.0;
    std::vector<ConditionalVarianceCell> cells_ge;
};

// Nested Monte Carlo: outer draws fix the weights outside the tranche, inner
// draws resample the tranche and estimate q_hat = P(target | outside).
ConditionalVarianceReport estimate_conditional_variance(
    int n, double epsilon, int m_target, long long outer_samples,
    long long inner_samples, const std::vector<double>& delta_list,
    std::uint64_t seed, DeriveMode mode, int lambda = 4, int workers = 0);

// P(A holds for omega but fails for some omega^j), with A the p-open circuit
// event of detect_circuit_event_A.
EstimateWithCI a_event_stability(int n, double epsilon, double p, long long samples,
                                 std::uint64_t seed, int lambda = 4, int workers = 0);

}  // namespace invperc
