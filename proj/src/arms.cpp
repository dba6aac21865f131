#include "invperc/arms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <numeric>
#include <unordered_map>

namespace invperc {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct UnionFind {
    std::vector<int> parent;

    void reset(std::size_t n) {
        parent.resize(n);
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

double angle_of(double dx, double dy) {
    double a = std::atan2(dy, dx);
    if (a < 0) a += kTwoPi;
    return a;
}

bool angle_in(double a, double lo, double hi) {
    // [lo, hi) on the circle; lo, hi in [0, 2*kTwoPi)
    double x = a - lo;
    if (x < 0) x += kTwoPi;
    double w = hi - lo;
    if (w < 0) w += kTwoPi;
    return x < w;
}

}  // namespace

// ---------------------------------------------------------------------------
// A(n,p): p-open circuit in Ann(n/4, n/2) connected to dS(lambda*n)

bool detect_circuit_event_A(const WeightField& wf, int n, double p, int lambda) {
    if (n < 4) throw std::domain_error("detect_circuit_event_A: n must be >= 4");
    if (lambda < 1) throw std::domain_error("detect_circuit_event_A: lambda must be >= 1");
    int R = lambda * n;
    if (!wf.region().covers_box(R))
        throw std::domain_error("detect_circuit_event_A: field does not cover S(lambda*n)");
    int a = n / 4, b = n / 2;

    int side = 2 * R + 1;
    auto sidx = [&](int x, int y) {
        return static_cast<std::size_t>(x + R) * side + (y + R);
    };
    auto open = [&](const EdgeId& e) { return wf.weight_unchecked(e) < p; };

    static thread_local UnionFind global_uf, cut_uf;
    global_uf.reset(static_cast<std::size_t>(side) * side);
    for (int x = -R; x <= R; ++x) {
        for (int y = -R; y <= R; ++y) {
            if (x < R && open(horizontal_edge(x, y)))
                global_uf.unite(static_cast<int>(sidx(x, y)), static_cast<int>(sidx(x + 1, y)));
            if (y < R && open(vertical_edge(x, y)))
                global_uf.unite(static_cast<int>(sidx(x, y)), static_cast<int>(sidx(x, y + 1)));
        }
    }
    std::vector<char> touches(static_cast<std::size_t>(side) * side, 0);
    for (int x = -R; x <= R; ++x) {
        touches[global_uf.find(static_cast<int>(sidx(x, -R)))] = 1;
        touches[global_uf.find(static_cast<int>(sidx(x, R)))] = 1;
    }
    for (int y = -R; y <= R; ++y) {
        touches[global_uf.find(static_cast<int>(sidx(-R, y)))] = 1;
        touches[global_uf.find(static_cast<int>(sidx(R, y)))] = 1;
    }

    auto in_ann = [&](const Site& s) {
        int d = chebyshev(s);
        return d >= a && d <= b;
    };
    auto usable = [&](const EdgeId& e) {
        return in_ann(e.site) && in_ann(e.other()) && open(e) &&
               touches[global_uf.find(static_cast<int>(sidx(e.site.x, e.site.y)))];
    };
    auto is_seam = [&](const EdgeId& e) {
        return e.orientation == Orientation::Vertical && e.site.y == -1 && e.site.x >= a;
    };

    cut_uf.reset(static_cast<std::size_t>(side) * side);
    for (int x = -b; x <= b; ++x) {
        for (int y = -b; y <= b; ++y) {
            EdgeId h = horizontal_edge(x, y);
            if (usable(h))
                cut_uf.unite(static_cast<int>(sidx(x, y)), static_cast<int>(sidx(x + 1, y)));
            EdgeId v = vertical_edge(x, y);
            if (usable(v) && !is_seam(v))
                cut_uf.unite(static_cast<int>(sidx(x, y)), static_cast<int>(sidx(x, y + 1)));
        }
    }
    for (int x = a; x <= b; ++x) {
        EdgeId v = vertical_edge(x, -1);
        if (usable(v) && cut_uf.find(static_cast<int>(sidx(x, -1))) ==
                             cut_uf.find(static_cast<int>(sidx(x, 0))))
            return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// FourArmDetector

int FourArmDetector::grid_site(const Site& s) const {
    int side = 2 * n_ + 1;
    int gx = s.x - center_.x + n_;
    int gy = s.y - center_.y + n_;
    if (gx < 0 || gy < 0 || gx >= side || gy >= side) return -1;
    return site_node_[static_cast<std::size_t>(gx) * side + gy];
}

int FourArmDetector::grid_corner(int x, int y) const {
    int side = 2 * n_;
    int gx = x - center_.x + n_;
    int gy = y - center_.y + n_;
    if (gx < 0 || gy < 0 || gx >= side || gy >= side) return -1;
    return corner_node_[static_cast<std::size_t>(gx) * side + gy];
}

FourArmDetector::FourArmDetector(int inner, int outer, Site center)
    : s_(inner), n_(outer), center_(center) {
    if (s_ <= 0 || s_ >= n_) throw std::domain_error("FourArmDetector: need 0 < s < n");
    AnnulusSpec ann(s_, n_, center_);
    sites_ = annulus_sites(ann);
    int side = 2 * n_ + 1;
    site_node_.assign(static_cast<std::size_t>(side) * side, -1);
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        int gx = sites_[i].x - center_.x + n_;
        int gy = sites_[i].y - center_.y + n_;
        site_node_[static_cast<std::size_t>(gx) * side + gy] = static_cast<int>(i);
    }
    for (const EdgeId& e : region_edges(sites_)) {
        prim_edges_.push_back({grid_site(e.site), grid_site(e.other())});
        prim_edge_ids_.push_back(e);
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        int d = chebyshev(sites_[i], center_);
        if (d == s_) inner_sites_.push_back(static_cast<int>(i));
        if (d == n_) outer_sites_.push_back(static_cast<int>(i));
    }

    // dual corners with sup-distance in [s+1/2, n-1/2]
    int dside = 2 * n_;
    corner_node_.assign(static_cast<std::size_t>(dside) * dside, -1);
    auto corner_dist2 = [&](int x, int y) {
        int dx = std::abs(2 * (x - center_.x) + 1);
        int dy = std::abs(2 * (y - center_.y) + 1);
        return dx > dy ? dx : dy;
    };
    for (int x = center_.x - n_; x <= center_.x + n_ - 1; ++x) {
        for (int y = center_.y - n_; y <= center_.y + n_ - 1; ++y) {
            int d2 = corner_dist2(x, y);
            if (d2 < 2 * s_ + 1 || d2 > 2 * n_ - 1) continue;
            int gx = x - center_.x + n_;
            int gy = y - center_.y + n_;
            corner_node_[static_cast<std::size_t>(gx) * dside + gy] =
                static_cast<int>(corners_.size());
            corners_.push_back({x, y});
        }
    }
    for (std::size_t i = 0; i < corners_.size(); ++i) {
        auto [x, y] = corners_[i];
        int d2 = corner_dist2(x, y);
        if (d2 == 2 * s_ + 1) inner_corners_.push_back(static_cast<int>(i));
        if (d2 == 2 * n_ - 1) outer_corners_.push_back(static_cast<int>(i));
        int r = grid_corner(x + 1, y);
        if (r >= 0) {
            dual_edges_.push_back({static_cast<int>(i), r});
            dual_edge_prim_.push_back(vertical_edge(x + 1, y));
        }
        int u = grid_corner(x, y + 1);
        if (u >= 0) {
            dual_edges_.push_back({static_cast<int>(i), u});
            dual_edge_prim_.push_back(horizontal_edge(x, y + 1));
        }
    }
}

bool FourArmDetector::detect_exact(const std::function<double(const EdgeId&)>& weight_of,
                                   double p, double q) {
    static thread_local UnionFind prim_uf, dual_uf;
    prim_uf.reset(sites_.size());
    for (std::size_t i = 0; i < prim_edges_.size(); ++i)
        if (weight_of(prim_edge_ids_[i]) < p)
            prim_uf.unite(prim_edges_[i].first, prim_edges_[i].second);
    dual_uf.reset(corners_.size());
    for (std::size_t i = 0; i < dual_edges_.size(); ++i)
        if (weight_of(dual_edge_prim_[i]) >= q)
            dual_uf.unite(dual_edges_[i].first, dual_edges_[i].second);

    std::vector<char> prim_flag(sites_.size(), 0), dual_flag(corners_.size(), 0);
    for (int node : inner_sites_) prim_flag[prim_uf.find(node)] |= 1;
    for (int node : outer_sites_) prim_flag[prim_uf.find(node)] |= 2;
    for (int node : inner_corners_) dual_flag[dual_uf.find(node)] |= 1;
    for (int node : outer_corners_) dual_flag[dual_uf.find(node)] |= 2;

    std::vector<Occurrence> occ;
    for (int node : inner_sites_) {
        int r = prim_uf.find(node);
        if (prim_flag[r] != 3) continue;
        const Site& s = sites_[node];
        occ.push_back(Occurrence{
            angle_of(s.x - center_.x, s.y - center_.y), r, true});
    }
    int offset = static_cast<int>(sites_.size());
    for (int node : inner_corners_) {
        int r = dual_uf.find(node);
        if (dual_flag[r] != 3) continue;
        auto [x, y] = corners_[node];
        occ.push_back(Occurrence{
            angle_of(x - center_.x + 0.5, y - center_.y + 0.5), r + offset, false});
    }
    if (occ.empty()) return false;
    std::sort(occ.begin(), occ.end(), [](const Occurrence& a, const Occurrence& b) {
        if (a.angle != b.angle) return a.angle < b.angle;
        return a.open_type > b.open_type;
    });

    std::vector<int> open_clusters, closed_clusters;
    std::unordered_map<int, std::vector<int>> positions;
    for (std::size_t i = 0; i < occ.size(); ++i) positions[occ[i].cluster].push_back(static_cast<int>(i));
    for (auto& [cl, pos] : positions) {
        if (cl < offset)
            open_clusters.push_back(cl);
        else
            closed_clusters.push_back(cl);
    }
    if (open_clusters.size() < 2 || closed_clusters.size() < 2) return false;

    int L = static_cast<int>(occ.size());
    auto next_after = [&](const std::vector<int>& pos, int x) {
        int base = 0;
        int xx = x;
        if (xx >= L) {
            xx -= L;
            base = L;
        }
        auto it = std::upper_bound(pos.begin(), pos.end(), xx);
        if (it != pos.end()) return base + *it;
        return base + L + pos[0];
    };
    for (int o1 : open_clusters) {
        for (int c1 : closed_clusters) {
            for (int o2 : open_clusters) {
                if (o2 == o1) continue;
                for (int c2 : closed_clusters) {
                    if (c2 == c1) continue;
                    for (int a : positions[o1]) {
                        int b = next_after(positions[c1], a);
                        int c = next_after(positions[o2], b);
                        int d = next_after(positions[c2], c);
                        if (d < a + L) return true;
                    }
                }
            }
        }
    }
    return false;
}

bool FourArmDetector::sector_detect(const std::function<double(const EdgeId&)>& weight_of,
                                    double p, double q, const DefectBudget& budget,
                                    int rotations) {
    if (rotations < 1) rotations = 1;
    std::vector<double> site_angle(sites_.size()), corner_angle(corners_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i)
        site_angle[i] = angle_of(sites_[i].x - center_.x, sites_[i].y - center_.y);
    for (std::size_t i = 0; i < corners_.size(); ++i)
        corner_angle[i] =
            angle_of(corners_[i].first - center_.x + 0.5, corners_[i].second - center_.y + 0.5);

    // 0/1 BFS arm cost inside an angular sector; generic over graph arrays
    auto arm_cost = [&](const std::vector<std::pair<int, int>>& edge_nodes,
                        const std::vector<EdgeId>& edge_prim,
                        const std::vector<int>& inner_nodes,
                        const std::vector<int>& outer_nodes,
                        const std::vector<double>& angles, std::size_t node_count,
                        double lo, double hi, bool open_arm) {
        // adjacency rebuilt per call; defected detection is not on a hot path
        std::vector<std::vector<std::pair<int, int>>> adj(node_count);
        for (std::size_t i = 0; i < edge_nodes.size(); ++i) {
            auto [u, v] = edge_nodes[i];
            if (!angle_in(angles[u], lo, hi) || !angle_in(angles[v], lo, hi)) continue;
            double w = weight_of(edge_prim[i]);
            int cost = open_arm ? (w < p ? 0 : 1) : (w >= q ? 0 : 1);
            adj[u].push_back({v, cost});
            adj[v].push_back({u, cost});
        }
        std::vector<int> dist(node_count, kInf);
        std::deque<int> dq;
        for (int node : inner_nodes) {
            if (!angle_in(angles[node], lo, hi)) continue;
            dist[node] = 0;
            dq.push_back(node);
        }
        while (!dq.empty()) {
            int v = dq.front();
            dq.pop_front();
            for (auto [to, c] : adj[v]) {
                if (dist[v] + c < dist[to]) {
                    dist[to] = dist[v] + c;
                    if (c == 0)
                        dq.push_front(to);
                    else
                        dq.push_back(to);
                }
            }
        }
        int best = kInf;
        for (int node : outer_nodes)
            if (angle_in(angles[node], lo, hi)) best = std::min(best, dist[node]);
        return best;
    };

    double quarter = kTwoPi / 4.0;
    for (int r = 0; r < rotations; ++r) {
        double theta0 = quarter * r / rotations;
        int open_cost[4], closed_cost[4];
        for (int k = 0; k < 4; ++k) {
            double lo = std::fmod(theta0 + k * quarter, kTwoPi);
            double hi = std::fmod(theta0 + (k + 1) * quarter, kTwoPi);
            open_cost[k] = arm_cost(prim_edges_, prim_edge_ids_, inner_sites_, outer_sites_,
                                    site_angle, sites_.size(), lo, hi, true);
            closed_cost[k] = arm_cost(dual_edges_, dual_edge_prim_, inner_corners_,
                                      outer_corners_, corner_angle, corners_.size(), lo, hi,
                                      false);
        }
        for (int parity = 0; parity < 2; ++parity) {
            int worst = 0;
            long long total = 0;
            for (int k = 0; k < 4; ++k) {
                int c = (k % 2 == parity) ? open_cost[k] : closed_cost[k];
                worst = std::max(worst, c);
                total += c;
            }
            bool ok = budget.kind == DefectBudget::Kind::PerArm ? worst <= budget.value
                                                                : total <= budget.value;
            if (ok) return true;
        }
    }
    return false;
}

ArmDetection FourArmDetector::detect(const std::function<double(const EdgeId&)>& weight_of,
                                     double p, double q, const DefectBudget& budget,
                                     int rotations) {
    bool exact_case = budget.kind == DefectBudget::Kind::None || budget.value == 0;
    if (exact_case) return ArmDetection{detect_exact(weight_of, p, q), false};
    // zero-defect arms witness any positive budget, so fold the exact detector
    // in; the sector search then only has to find genuinely defected arms
    bool hit = detect_exact(weight_of, p, q) ||
               sector_detect(weight_of, p, q, budget, rotations);
    return ArmDetection{hit, true};
}

ArmDetection detect_four_arm(const WeightField& wf, const ArmEventSpec& spec) {
    spec.validate();
    if (!wf.region().covers_box(spec.outer, spec.center))
        throw std::domain_error("detect_four_arm: field does not cover S(n) around center");
    FourArmDetector det(spec.inner, spec.outer, spec.center);
    return det.detect([&](const EdgeId& e) { return wf.weight_unchecked(e); }, spec.p_open,
                      spec.q_closed, spec.budget, spec.rotations);
}

EstimateWithCI estimate_arm_probability(const ArmEventSpec& spec, long long samples,
                                        std::uint64_t seed, int workers) {
    spec.validate();
    if (samples < 1) throw std::domain_error("estimate_arm_probability: samples >= 1");
    struct Acc {
        std::unique_ptr<FourArmDetector> det;
        long long hits = 0;
    };
    Acc total = parallel_accumulate(
        samples, workers,
        [&] {
            Acc a;
            a.det = std::make_unique<FourArmDetector>(spec.inner, spec.outer, spec.center);
            return a;
        },
        [&](Acc& acc, long long i) {
            std::uint64_t si = derive_seed(seed, static_cast<std::uint64_t>(i));
            auto weight_of = [si](const EdgeId& e) { return edge_weight(si, e); };
            if (acc.det->detect(weight_of, spec.p_open, spec.q_closed, spec.budget,
                                spec.rotations)
                    .occurred)
                ++acc.hits;
        },
        [](Acc& into, Acc& from) { into.hits += from.hits; });
    return frequency_estimate(total.hits, samples, seed);
}

// ---------------------------------------------------------------------------
// rectangle / square crossings

namespace {

// LR crossing of the site grid [0, w-1] x [0, h-1] (w columns of sites).
bool lr_crossing(int w, int h, double p, std::uint64_t seed, UnionFind& uf) {
    uf.reset(static_cast<std::size_t>(w) * h + 2);
    int left = w * h, right = w * h + 1;
    auto idx = [&](int x, int y) { return x * h + y; };
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            if (x + 1 < w && edge_weight(seed, horizontal_edge(x, y)) < p)
                uf.unite(idx(x, y), idx(x + 1, y));
            if (y + 1 < h && edge_weight(seed, vertical_edge(x, y)) < p)
                uf.unite(idx(x, y), idx(x, y + 1));
        }
    }
    for (int y = 0; y < h; ++y) {
        uf.unite(left, idx(0, y));
        uf.unite(right, idx(w - 1, y));
    }
    return uf.find(left) == uf.find(right);
}

EstimateWithCI crossing_estimate(int w, int h, double p, long long samples,
                                 std::uint64_t seed, int workers) {
    struct Acc {
        UnionFind uf;
        long long hits = 0;
    };
    Acc total = parallel_accumulate(
        samples, workers, [] { return Acc{}; },
        [&](Acc& acc, long long i) {
            if (lr_crossing(w, h, p, derive_seed(seed, static_cast<std::uint64_t>(i)), acc.uf))
                ++acc.hits;
        },
        [](Acc& into, Acc& from) { into.hits += from.hits; });
    return frequency_estimate(total.hits, samples, seed);
}

}  // namespace

EstimateWithCI estimate_rectangle_crossing(int n, double p, long long samples,
                                           std::uint64_t seed, int workers) {
    if (n < 1) throw std::domain_error("estimate_rectangle_crossing: n >= 1");
    // sites [0, n+1] x [0, n]
    return crossing_estimate(n + 2, n + 1, p, samples, seed, workers);
}

EstimateWithCI estimate_square_crossing(int n, double p, long long samples,
                                        std::uint64_t seed, int workers) {
    if (n < 1) throw std::domain_error("estimate_square_crossing: n >= 1");
    return crossing_estimate(n + 1, n + 1, p, samples, seed, workers);
}

CorrelationLengthEstimate estimate_correlation_length(double p, double delta,
                                                      const std::vector<int>& n_grid,
                                                      long long samples,
                                                      std::uint64_t seed, int workers) {
    if (p <= 0.5)
        throw std::domain_error("estimate_correlation_length: requires p > 1/2");
    if (delta <= 0.0 || delta >= 1.0)
        throw std::domain_error("estimate_correlation_length: delta in (0,1)");
    CorrelationLengthEstimate out;
    out.p = p;
    out.delta = delta;
    for (int n : n_grid) {
        EstimateWithCI est =
            estimate_square_crossing(n, p, samples, derive_seed(seed, n), workers);
        out.curve.push_back({n, est.estimate, est.stderr_value});
        double lcb = est.estimate - 1.96 * est.stderr_value;
        if (!out.length && lcb >= 1.0 - delta) out.length = n;
    }
    return out;
}

double estimate_p_n(int n, double delta, long long samples, std::uint64_t seed,
                    double tol, int workers) {
    if (n < 2) throw std::domain_error("estimate_p_n: n >= 2");
    if (tol <= 0.0) throw std::domain_error("estimate_p_n: tol > 0");
    double lo = 0.5, hi = 1.0;
    int it = 0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        EstimateWithCI est =
            estimate_square_crossing(n, mid, samples, derive_seed(seed, 4096 + it), workers);
        double lcb = est.estimate - 1.96 * est.stderr_value;
        if (lcb >= 1.0 - delta)
            hi = mid;  // L(mid) <= n, so p_n < mid
        else
            lo = mid;
        ++it;
    }
    return 0.5 * (lo + hi);
}

}  // namespace invperc
