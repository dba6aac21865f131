#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "invperc/lattice.hpp"
#include "invperc/rng.hpp"

namespace invperc {

// Edge region: either every edge of a sup-norm box (implicit, O(1) membership)
// or an explicit edge set. Box regions are what the invasion engine walks over
// lazily; explicit sets appear in small fixtures and resampling targets.
class EdgeRegion {
public:
    EdgeRegion() = default;

    static EdgeRegion box(int radius, Site center = {0, 0});
    static EdgeRegion from_edges(std::vector<EdgeId> edges);

    bool is_box() const { return is_box_; }
    int box_radius() const { return radius_; }
    Site box_center() const { return center_; }

    bool contains(const EdgeId& e) const {
        if (is_box_) {
            return chebyshev(e.site, center_) <= radius_ &&
                   chebyshev(e.other(), center_) <= radius_;
        }
        return edge_set_.count(e) != 0;
    }

    bool covers_box(int radius, Site center = {0, 0}) const;
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    // All edges in canonical order.
    std::vector<EdgeId> edges() const;

private:
    bool is_box_ = false;
    int radius_ = -1;
    Site center_{0, 0};
    std::vector<EdgeId> edges_;  // sorted
    EdgeSet edge_set_;
};

// Seeded i.i.d.-uniform weights on a region. Immutable; resampling returns a
// new field whose resampled edges carry weights drawn from the new seed while
// everything else stays bit-identical.
class WeightField {
public:
    WeightField(EdgeRegion region, std::uint64_t seed)
        : region_(std::move(region)), seed_(seed) {}

    const EdgeRegion& region() const { return region_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t generation() const { return generation_; }

    bool contains(const EdgeId& e) const { return region_.contains(e); }

    double weight(const EdgeId& e) const {
        if (!region_.contains(e))
            throw std::domain_error("WeightField::weight: edge outside region");
        return weight_unchecked(e);
    }

    // No region check; callers on hot paths guarantee membership themselves.
    double weight_unchecked(const EdgeId& e) const {
        if (!overrides_.empty()) {
            auto it = overrides_.find(e);
            if (it != overrides_.end()) return it->second;
        }
        return edge_weight(seed_, e);
    }

    bool has_overrides() const { return !overrides_.empty(); }

    friend WeightField resample_region(const WeightField& wf,
                                       const std::vector<EdgeId>& sub,
                                       std::uint64_t seed2);
    friend WeightField load_weight_field(std::istream& in);

private:
    EdgeRegion region_;
    std::uint64_t seed_ = 0;
    std::uint64_t generation_ = 0;
    std::unordered_map<EdgeId, double, EdgeIdHash> overrides_;
};

WeightField sample_weights(EdgeRegion region, std::uint64_t seed);
WeightField resample_region(const WeightField& wf, const std::vector<EdgeId>& sub,
                            std::uint64_t seed2);

// Open/closed status per edge of a region; total on the region, closed unless
// marked open.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(EdgeRegion region) : region_(std::move(region)) {}

    const EdgeRegion& region() const { return region_; }

    bool is_open(const EdgeId& e) const { return open_.count(e) != 0; }
    void set_open(const EdgeId& e, bool open) {
        if (open)
            open_.insert(e);
        else
            open_.erase(e);
    }
    const EdgeSet& open_edges() const { return open_; }
    std::size_t open_count() const { return open_.size(); }

private:
    EdgeRegion region_;
    EdgeSet open_;
};

// e open iff tau_e < p; the marginal law is Bernoulli-p bond percolation.
Configuration threshold_config(const WeightField& wf, double p);

// Versioned binary dump ("IPWF"): region bounds, seed, weights as 64-bit
// floats in canonical edge order.
void save_weight_field(const WeightField& wf, std::ostream& out);
void save_weight_field(const WeightField& wf, const std::string& path);
WeightField load_weight_field(std::istream& in);
WeightField load_weight_field(const std::string& path);

}  // namespace invperc
