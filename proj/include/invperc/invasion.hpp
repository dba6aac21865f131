#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "invperc/weights.hpp"

namespace invperc {

// Finite truncation of the infinite invasion cluster.
struct StopRule {
    std::optional<long long> max_steps;
    std::optional<int> exit_radius;  // stop when the cluster touches dS(exit_radius)

    void validate() const {
        if (!max_steps && !exit_radius)
            throw std::domain_error("StopRule: at least one bound must be set");
        if (exit_radius && *exit_radius < 1)
            throw std::domain_error("StopRule: exit_radius must be >= 1");
        if (max_steps && *max_steps < 0)
            throw std::domain_error("StopRule: max_steps must be >= 0");
    }
};

enum class StopReason { ReachedRadius, StepBudget, ExhaustedRegion };

struct InvadedEdge {
    long long step;  // 1-based step index
    EdgeId edge;
    double weight;
};

struct InvasionResult {
    std::vector<InvadedEdge> invaded;
    std::vector<Site> cluster_sites;  // in order of first attachment, origin first
    StopReason reason = StopReason::ExhaustedRegion;
};

// Greedy growth from the origin: at every step invade the minimum-weight
// boundary edge (ties broken by canonical edge order). Edges outside the
// field's region are not candidates.
InvasionResult invade(const WeightField& wf, const StopRule& stop);

// e open iff invaded, restricted to `region`.
Configuration invasion_configuration(const InvasionResult& res, const EdgeRegion& region);

// Max weight among the last ceil(tail_fraction * steps) invaded edges.
double invaded_weight_tail(const InvasionResult& res, double tail_fraction);

// columns: step,edge_x,edge_y,orientation,weight
void write_invasion_csv(const InvasionResult& res, std::ostream& out);

// Reusable flat-array engine for repeated radius-bounded runs. A run touches
// memory proportional to the invaded set; buffers are cleared incrementally
// between runs, so per-run cost does not scale with the ambient box.
class InvasionEngine {
public:
    explicit InvasionEngine(int max_radius);

    int max_radius() const { return max_radius_; }

    InvasionResult run(const WeightField& wf, const StopRule& stop);

    // Lean variant: no result vectors, invokes visit(edge, weight) per invaded
    // edge. Stops at exit_radius.
    template <class Visit>
    void run_lean(const WeightField& wf, int exit_radius, Visit&& visit) {
        run_core(
            wf, StopRule{std::nullopt, exit_radius},
            [&](long long, const EdgeId& e, double w) { visit(e, w); },
            [](const Site&) {});
    }

private:
    struct HeapEntry {
        double w;
        std::uint32_t eidx;
    };

    int max_radius_;
    int offset_;  // = max_radius_ + 1 (one-site margin for frontier pushes)
    int width_;   // sites per side including margin
    std::vector<std::uint8_t> edge_state_;  // 0 unseen, 1 queued, 2 invaded
    std::vector<std::uint8_t> site_in_;
    std::vector<std::uint32_t> touched_edges_;
    std::vector<std::uint32_t> touched_sites_;
    std::vector<HeapEntry> heap_;

    std::uint32_t site_index(const Site& s) const {
        return static_cast<std::uint32_t>(s.x + offset_) * width_ +
               static_cast<std::uint32_t>(s.y + offset_);
    }
    std::uint32_t edge_index(const EdgeId& e) const {
        return site_index(e.site) * 2 + static_cast<std::uint32_t>(e.orientation);
    }
    EdgeId edge_from_index(std::uint32_t idx) const {
        Orientation o = static_cast<Orientation>(idx & 1);
        std::uint32_t sidx = idx >> 1;
        int x = static_cast<int>(sidx / width_) - offset_;
        int y = static_cast<int>(sidx % width_) - offset_;
        return EdgeId{Site{x, y}, o};
    }

    void reset();
    StopReason run_impl(const WeightField& wf, const StopRule& stop,
                        const std::function<void(long long, const EdgeId&, double)>& edge_visit,
                        const std::function<void(const Site&)>& site_visit);

    template <class EdgeVisit, class SiteVisit>
    StopReason run_core(const WeightField& wf, const StopRule& stop,
                        EdgeVisit&& ev, SiteVisit&& sv) {
        return run_impl(wf, stop, ev, sv);
    }

    friend InvasionResult invade(const WeightField& wf, const StopRule& stop);
};

}  // namespace invperc
