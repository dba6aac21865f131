#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

// Integer-lattice geometry: boxes, annuli, boundaries, edge enumeration and
// the primal<->dual edge bijection on Z^2.

namespace invperc {

struct Site {
    int x = 0;
    int y = 0;

    friend bool operator==(const Site& a, const Site& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
    friend bool operator<(const Site& a, const Site& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    }
};

// Sup-norm distance from `center`.
inline int chebyshev(const Site& s, const Site& center = {0, 0}) {
    int dx = s.x - center.x;
    int dy = s.y - center.y;
    if (dx < 0) dx = -dx;
    if (dy < 0) dy = -dy;
    return dx > dy ? dx : dy;
}

enum class Orientation : std::uint8_t { Horizontal = 0, Vertical = 1 };

// Canonical edge: `site` is the lexicographically smaller endpoint, the other
// endpoint is site + (1,0) for Horizontal and site + (0,1) for Vertical.
struct EdgeId {
    Site site;
    Orientation orientation = Orientation::Horizontal;

    Site other() const {
        return orientation == Orientation::Horizontal
                   ? Site{site.x + 1, site.y}
                   : Site{site.x, site.y + 1};
    }
    std::pair<Site, Site> endpoints() const { return {site, other()}; }

    friend bool operator==(const EdgeId& a, const EdgeId& b) {
        return a.site == b.site && a.orientation == b.orientation;
    }
    friend bool operator!=(const EdgeId& a, const EdgeId& b) { return !(a == b); }
    friend bool operator<(const EdgeId& a, const EdgeId& b) {
        if (a.site != b.site) return a.site < b.site;
        return a.orientation < b.orientation;
    }
};

inline EdgeId horizontal_edge(int x, int y) {
    return EdgeId{Site{x, y}, Orientation::Horizontal};
}
inline EdgeId vertical_edge(int x, int y) {
    return EdgeId{Site{x, y}, Orientation::Vertical};
}

// Canonical edge joining two adjacent sites.
inline EdgeId edge_between(const Site& a, const Site& b) {
    const Site& lo = a < b ? a : b;
    const Site& hi = a < b ? b : a;
    if (hi.x == lo.x + 1 && hi.y == lo.y) return horizontal_edge(lo.x, lo.y);
    if (hi.x == lo.x && hi.y == lo.y + 1) return vertical_edge(lo.x, lo.y);
    throw std::invalid_argument("edge_between: sites are not adjacent");
}

struct SiteHash {
    std::size_t operator()(const Site& s) const {
        std::uint64_t k =
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
            static_cast<std::uint32_t>(s.y);
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        return static_cast<std::size_t>(k);
    }
};

struct EdgeIdHash {
    std::size_t operator()(const EdgeId& e) const {
        std::uint64_t k =
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.site.x)) << 32) |
            static_cast<std::uint32_t>(e.site.y);
        k = k * 2 + static_cast<std::uint64_t>(e.orientation);
        k ^= k >> 33;
        k *= 0xc4ceb9fe1a85ec53ULL;
        k ^= k >> 33;
        return static_cast<std::size_t>(k);
    }
};

using SiteSet = std::unordered_set<Site, SiteHash>;
using EdgeSet = std::unordered_set<EdgeId, EdgeIdHash>;

// Dual edge, represented by the primal edge it crosses. The dual lattice is
// Z^2 shifted by (1/2,1/2); crossing is an involution.
struct DualEdgeId {
    EdgeId crossed;

    // Endpoints of the dual edge with coordinates doubled (so they stay
    // integral): the dual site (a+1/2, b+1/2) is reported as (2a+1, 2b+1).
    std::pair<std::pair<int, int>, std::pair<int, int>> endpoints_x2() const {
        int x = crossed.site.x, y = crossed.site.y;
        if (crossed.orientation == Orientation::Horizontal) {
            return {{2 * x + 1, 2 * y - 1}, {2 * x + 1, 2 * y + 1}};
        }
        return {{2 * x - 1, 2 * y + 1}, {2 * x + 1, 2 * y + 1}};
    }

    friend bool operator==(const DualEdgeId& a, const DualEdgeId& b) {
        return a.crossed == b.crossed;
    }
};

inline DualEdgeId dual_edge(const EdgeId& e) { return DualEdgeId{e}; }
inline EdgeId dual_edge(const DualEdgeId& d) { return d.crossed; }

// Annulus Ann(a,b): sites s with a <= |s - center|_inf <= b.
struct AnnulusSpec {
    int inner = 0;
    int outer = 0;
    Site center{0, 0};

    AnnulusSpec(int a, int b, Site c = {0, 0}) : inner(a), outer(b), center(c) {
        if (a <= 0 || a >= b)
            throw std::domain_error("AnnulusSpec: need 0 < inner < outer");
    }
};

std::vector<Site> box_sites(int n, Site center = {0, 0});
std::vector<Site> annulus_sites(const AnnulusSpec& ann);

// All edges with both endpoints in `sites`, each once in canonical form.
std::vector<EdgeId> region_edges(const SiteSet& sites);
std::vector<EdgeId> region_edges(const std::vector<Site>& sites);
std::vector<EdgeId> annulus_edges(const AnnulusSpec& ann);

struct Subgraph {
    SiteSet sites;
    EdgeSet edges;
};

// Boundary of a subgraph: edges not in E(G) with at least one endpoint in G.
std::vector<EdgeId> graph_boundary(const Subgraph& g);

}  // namespace invperc
