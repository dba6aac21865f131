#include "invperc/lattice.hpp"

#include <algorithm>

namespace invperc {

std::vector<Site> box_sites(int n, Site center) {
    if (n < 0) throw std::domain_error("box_sites: n must be >= 0");
    std::vector<Site> out;
    out.reserve(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1));
    for (int x = center.x - n; x <= center.x + n; ++x)
        for (int y = center.y - n; y <= center.y + n; ++y)
            out.push_back(Site{x, y});
    return out;
}

std::vector<Site> annulus_sites(const AnnulusSpec& ann) {
    std::vector<Site> out;
    for (int x = ann.center.x - ann.outer; x <= ann.center.x + ann.outer; ++x) {
        for (int y = ann.center.y - ann.outer; y <= ann.center.y + ann.outer; ++y) {
            Site s{x, y};
            int d = chebyshev(s, ann.center);
            if (d >= ann.inner && d <= ann.outer) out.push_back(s);
        }
    }
    return out;
}

std::vector<EdgeId> region_edges(const SiteSet& sites) {
    std::vector<EdgeId> out;
    out.reserve(sites.size() * 2);
    for (const Site& s : sites) {
        if (sites.count(Site{s.x + 1, s.y}))
            out.push_back(horizontal_edge(s.x, s.y));
        if (sites.count(Site{s.x, s.y + 1}))
            out.push_back(vertical_edge(s.x, s.y));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeId> region_edges(const std::vector<Site>& sites) {
    return region_edges(SiteSet(sites.begin(), sites.end()));
}

std::vector<EdgeId> annulus_edges(const AnnulusSpec& ann) {
    return region_edges(annulus_sites(ann));
}

std::vector<EdgeId> graph_boundary(const Subgraph& g) {
    std::vector<EdgeId> out;
    EdgeSet seen;
    for (const Site& s : g.sites) {
        const EdgeId incident[4] = {
            horizontal_edge(s.x, s.y),
            horizontal_edge(s.x - 1, s.y),
            vertical_edge(s.x, s.y),
            vertical_edge(s.x, s.y - 1),
        };
        for (const EdgeId& e : incident) {
            if (g.edges.count(e)) continue;
            if (seen.insert(e).second) out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace invperc
