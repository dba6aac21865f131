#include "invperc/weights.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace invperc {

EdgeRegion EdgeRegion::box(int radius, Site center) {
    if (radius < 0) throw std::domain_error("EdgeRegion::box: radius < 0");
    EdgeRegion r;
    r.is_box_ = true;
    r.radius_ = radius;
    r.center_ = center;
    return r;
}

EdgeRegion EdgeRegion::from_edges(std::vector<EdgeId> edges) {
    EdgeRegion r;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    r.edge_set_ = EdgeSet(edges.begin(), edges.end());
    r.edges_ = std::move(edges);
    return r;
}

bool EdgeRegion::covers_box(int radius, Site center) const {
    if (is_box_) {
        return radius_ >= radius + chebyshev(center, center_);
    }
    for (const EdgeId& e : region_edges(box_sites(radius, center)))
        if (!edge_set_.count(e)) return false;
    return true;
}

std::size_t EdgeRegion::size() const {
    if (is_box_) {
        // 2 * 2n * (2n+1) edges in S(n)
        std::size_t n = static_cast<std::size_t>(radius_);
        return 2 * (2 * n) * (2 * n + 1);
    }
    return edges_.size();
}

std::vector<EdgeId> EdgeRegion::edges() const {
    if (!is_box_) return edges_;
    std::vector<EdgeId> out;
    out.reserve(size());
    for (int x = center_.x - radius_; x <= center_.x + radius_; ++x) {
        for (int y = center_.y - radius_; y <= center_.y + radius_; ++y) {
            if (x < center_.x + radius_) out.push_back(horizontal_edge(x, y));
            if (y < center_.y + radius_) out.push_back(vertical_edge(x, y));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

WeightField sample_weights(EdgeRegion region, std::uint64_t seed) {
    return WeightField(std::move(region), seed);
}

WeightField resample_region(const WeightField& wf, const std::vector<EdgeId>& sub,
                            std::uint64_t seed2) {
    WeightField out = wf;
    for (const EdgeId& e : sub) {
        if (!wf.region_.contains(e))
            throw std::domain_error("resample_region: sub is not a subset of the region");
        out.overrides_[e] = edge_weight(seed2, e);
    }
    out.generation_ = wf.generation_ + 1;
    return out;
}

Configuration threshold_config(const WeightField& wf, double p) {
    if (p < 0.0 || p > 1.0)
        throw std::domain_error("threshold_config: p must be in [0,1]");
    Configuration cfg(wf.region());
    for (const EdgeId& e : wf.region().edges())
        if (wf.weight_unchecked(e) < p) cfg.set_open(e, true);
    return cfg;
}

namespace {

constexpr char kMagic[4] = {'I', 'P', 'W', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("weight field stream truncated");
    return v;
}

}  // namespace

void save_weight_field(const WeightField& wf, std::ostream& out) {
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    const EdgeRegion& r = wf.region();
    put<std::uint8_t>(out, r.is_box() ? 0 : 1);
    std::vector<EdgeId> edges = r.edges();
    if (r.is_box()) {
        put<std::int32_t>(out, r.box_center().x);
        put<std::int32_t>(out, r.box_center().y);
        put<std::int32_t>(out, r.box_radius());
    } else {
        put<std::uint64_t>(out, edges.size());
        for (const EdgeId& e : edges) {
            put<std::int32_t>(out, e.site.x);
            put<std::int32_t>(out, e.site.y);
            put<std::uint8_t>(out, static_cast<std::uint8_t>(e.orientation));
        }
    }
    put<std::uint64_t>(out, wf.seed());
    for (const EdgeId& e : edges) put<double>(out, wf.weight_unchecked(e));
}

void save_weight_field(const WeightField& wf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_weight_field(wf, out);
}

WeightField load_weight_field(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not an IPWF weight field file");
    std::uint32_t version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported IPWF version");
    std::uint8_t kind = get<std::uint8_t>(in);
    EdgeRegion region;
    if (kind == 0) {
        std::int32_t cx = get<std::int32_t>(in);
        std::int32_t cy = get<std::int32_t>(in);
        std::int32_t rad = get<std::int32_t>(in);
        region = EdgeRegion::box(rad, Site{cx, cy});
    } else {
        std::uint64_t count = get<std::uint64_t>(in);
        std::vector<EdgeId> edges;
        edges.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            std::int32_t x = get<std::int32_t>(in);
            std::int32_t y = get<std::int32_t>(in);
            std::uint8_t o = get<std::uint8_t>(in);
            edges.push_back(EdgeId{Site{x, y}, static_cast<Orientation>(o)});
        }
        region = EdgeRegion::from_edges(std::move(edges));
    }
    std::uint64_t seed = get<std::uint64_t>(in);
    WeightField wf(region, seed);
    for (const EdgeId& e : region.edges()) {
        double w = get<double>(in);
        if (w != edge_weight(seed, e)) wf.overrides_[e] = w;
    }
    return wf;
}

WeightField load_weight_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_weight_field(in);
}

}  // namespace invperc
