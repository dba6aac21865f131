#include "invperc/invasion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>

namespace invperc {

InvasionEngine::InvasionEngine(int max_radius) : max_radius_(max_radius) {
    if (max_radius < 1) throw std::domain_error("InvasionEngine: max_radius < 1");
    offset_ = max_radius_ + 1;
    width_ = 2 * offset_ + 1;
    edge_state_.assign(static_cast<std::size_t>(width_) * width_ * 2, 0);
    site_in_.assign(static_cast<std::size_t>(width_) * width_, 0);
}

void InvasionEngine::reset() {
    for (std::uint32_t idx : touched_edges_) edge_state_[idx] = 0;
    for (std::uint32_t idx : touched_sites_) site_in_[idx] = 0;
    touched_edges_.clear();
    touched_sites_.clear();
    heap_.clear();
}

StopReason InvasionEngine::run_impl(
    const WeightField& wf, const StopRule& stop,
    const std::function<void(long long, const EdgeId&, double)>& edge_visit,
    const std::function<void(const Site&)>& site_visit) {
    stop.validate();
    if (stop.exit_radius) {
        if (*stop.exit_radius > max_radius_)
            throw std::domain_error("InvasionEngine: exit_radius exceeds engine radius");
        if (!wf.region().covers_box(*stop.exit_radius + 1))
            throw std::domain_error("invade: region does not cover S(exit_radius+1)");
    }
    reset();

    auto heap_less = [](const HeapEntry& a, const HeapEntry& b) {
        // min-heap via std::push_heap with inverted comparison; ties broken by
        // edge index, which is canonical (x, y, orientation) order
        if (a.w != b.w) return a.w > b.w;
        return a.eidx > b.eidx;
    };

    auto add_site = [&](const Site& s) {
        std::uint32_t sidx = site_index(s);
        site_in_[sidx] = 1;
        touched_sites_.push_back(sidx);
        site_visit(s);
        const EdgeId incident[4] = {
            horizontal_edge(s.x, s.y),
            horizontal_edge(s.x - 1, s.y),
            vertical_edge(s.x, s.y),
            vertical_edge(s.x, s.y - 1),
        };
        for (const EdgeId& f : incident) {
            if (chebyshev(f.site) > max_radius_ || chebyshev(f.other()) > max_radius_)
                continue;
            std::uint32_t fidx = edge_index(f);
            if (edge_state_[fidx] != 0) continue;
            if (!wf.contains(f)) continue;
            edge_state_[fidx] = 1;
            touched_edges_.push_back(fidx);
            heap_.push_back(HeapEntry{wf.weight_unchecked(f), fidx});
            std::push_heap(heap_.begin(), heap_.end(), heap_less);
        }
    };

    add_site(Site{0, 0});

    long long step = 0;
    while (true) {
        if (stop.max_steps && step >= *stop.max_steps) return StopReason::StepBudget;
        if (heap_.empty()) return StopReason::ExhaustedRegion;
        std::pop_heap(heap_.begin(), heap_.end(), heap_less);
        HeapEntry top = heap_.back();
        heap_.pop_back();
        EdgeId e = edge_from_index(top.eidx);
        edge_state_[top.eidx] = 2;
        ++step;
        edge_visit(step, e, top.w);

        bool reached = false;
        for (const Site& s : {e.site, e.other()}) {
            if (site_in_[site_index(s)]) continue;
            add_site(s);
            if (stop.exit_radius && chebyshev(s) >= *stop.exit_radius) reached = true;
        }
        if (reached) return StopReason::ReachedRadius;
    }
}

InvasionResult InvasionEngine::run(const WeightField& wf, const StopRule& stop) {
    InvasionResult res;
    res.reason = run_impl(
        wf, stop,
        [&](long long step, const EdgeId& e, double w) {
            res.invaded.push_back(InvadedEdge{step, e, w});
        },
        [&](const Site& s) { res.cluster_sites.push_back(s); });
    return res;
}

namespace {

// Unbounded-radius fallback: hash-set bookkeeping instead of flat arrays.
InvasionResult invade_generic(const WeightField& wf, const StopRule& stop) {
    struct Entry {
        double w;
        EdgeId e;
    };
    auto heap_less = [](const Entry& a, const Entry& b) {
        if (a.w != b.w) return a.w > b.w;
        return b.e < a.e;
    };
    std::vector<Entry> heap;
    EdgeSet seen;
    SiteSet cluster;
    InvasionResult res;

    auto add_site = [&](const Site& s) {
        cluster.insert(s);
        res.cluster_sites.push_back(s);
        const EdgeId incident[4] = {
            horizontal_edge(s.x, s.y),
            horizontal_edge(s.x - 1, s.y),
            vertical_edge(s.x, s.y),
            vertical_edge(s.x, s.y - 1),
        };
        for (const EdgeId& f : incident) {
            if (seen.count(f) || !wf.contains(f)) continue;
            seen.insert(f);
            heap.push_back(Entry{wf.weight_unchecked(f), f});
            std::push_heap(heap.begin(), heap.end(), heap_less);
        }
    };

    add_site(Site{0, 0});
    long long step = 0;
    res.reason = StopReason::ExhaustedRegion;
    while (true) {
        if (stop.max_steps && step >= *stop.max_steps) {
            res.reason = StopReason::StepBudget;
            break;
        }
        if (heap.empty()) {
            res.reason = StopReason::ExhaustedRegion;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        Entry top = heap.back();
        heap.pop_back();
        ++step;
        res.invaded.push_back(InvadedEdge{step, top.e, top.w});

        bool reached = false;
        for (const Site& s : {top.e.site, top.e.other()}) {
            if (cluster.count(s)) continue;
            add_site(s);
            if (stop.exit_radius && chebyshev(s) >= *stop.exit_radius) reached = true;
        }
        if (reached) {
            res.reason = StopReason::ReachedRadius;
            break;
        }
    }
    return res;
}

}  // namespace

InvasionResult invade(const WeightField& wf, const StopRule& stop) {
    stop.validate();
    if (stop.exit_radius) {
        if (!wf.region().covers_box(*stop.exit_radius + 1))
            throw std::domain_error("invade: region does not cover S(exit_radius+1)");
        InvasionEngine engine(*stop.exit_radius);
        return engine.run(wf, stop);
    }
    return invade_generic(wf, stop);
}

Configuration invasion_configuration(const InvasionResult& res, const EdgeRegion& region) {
    Configuration cfg(region);
    for (const InvadedEdge& ie : res.invaded)
        if (region.contains(ie.edge)) cfg.set_open(ie.edge, true);
    return cfg;
}

double invaded_weight_tail(const InvasionResult& res, double tail_fraction) {
    if (res.invaded.empty())
        throw std::domain_error("invaded_weight_tail: empty invasion");
    if (tail_fraction <= 0.0 || tail_fraction > 1.0)
        throw std::domain_error("invaded_weight_tail: tail_fraction must be in (0,1]");
    std::size_t m = res.invaded.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(m)));
    k = std::min(std::max<std::size_t>(k, 1), m);
    double best = 0.0;
    for (std::size_t i = m - k; i < m; ++i)
        best = std::max(best, res.invaded[i].weight);
    return best;
}

void write_invasion_csv(const InvasionResult& res, std::ostream& out) {
    out << "step,edge_x,edge_y,orientation,weight\n";
    for (const InvadedEdge& ie : res.invaded) {
        out << ie.step << ',' << ie.edge.site.x << ',' << ie.edge.site.y << ','
            << (ie.edge.orientation == Orientation::Horizontal ? 'H' : 'V') << ','
            << ie.weight << '\n';
    }
}

}  // namespace invperc
