#include "invperc/crossing.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace invperc {

namespace {
constexpr int kInf = std::numeric_limits<int>::max() / 4;
}

// ---------------------------------------------------------------------------
// AnnulusFlowNetwork

AnnulusFlowNetwork::AnnulusFlowNetwork(const AnnulusSpec& ann) : ann_(ann) {
    std::vector<Site> sites = annulus_sites(ann_);
    edges_ = region_edges(sites);

    // grid map over the bounding box
    int b = ann_.outer;
    int side = 2 * b + 1;
    std::vector<int> node_of(static_cast<std::size_t>(side) * side, -1);
    auto grid_idx = [&](const Site& s) {
        return static_cast<std::size_t>(s.x - ann_.center.x + b) * side +
               (s.y - ann_.center.y + b);
    };
    int next = 0;
    for (const Site& s : sites) node_of[grid_idx(s)] = next++;
    node_count_ = next + 2;
    source_ = next;
    sink_ = next + 1;

    struct RawArc {
        int from, to, cap;
    };
    std::vector<RawArc> raw;
    raw.reserve(edges_.size() * 2 + sites.size());
    arc_of_edge_.resize(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const EdgeId& e = edges_[i];
        int u = node_of[grid_idx(e.site)];
        int v = node_of[grid_idx(e.other())];
        arc_of_edge_[i] = static_cast<int>(raw.size());
        raw.push_back(RawArc{u, v, 0});
        raw.push_back(RawArc{v, u, 0});
    }
    for (const Site& s : sites) {
        int d = chebyshev(s, ann_.center);
        int node = node_of[grid_idx(s)];
        if (d == ann_.inner) {
            raw.push_back(RawArc{source_, node, kInf});
            raw.push_back(RawArc{node, source_, 0});
        } else if (d == ann_.outer) {
            raw.push_back(RawArc{node, sink_, kInf});
            raw.push_back(RawArc{sink_, node, 0});
        }
    }

    arc_to_.resize(raw.size());
    arc_cap_.resize(raw.size());
    // CSR over arcs; arc order is preserved (pairs stay adjacent)
    head_.assign(node_count_ + 1, 0);
    for (const RawArc& a : raw) ++head_[a.from + 1];
    for (int i = 0; i < node_count_; ++i) head_[i + 1] += head_[i];
    csr_arcs_.resize(raw.size());
    {
        std::vector<int> cursor(head_.begin(), head_.end() - 1);
        for (std::size_t i = 0; i < raw.size(); ++i)
            csr_arcs_[cursor[raw[i].from]++] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        arc_to_[i] = raw[i].to;
        arc_cap_[i] = raw[i].cap;
    }
    terminal_caps_.assign(arc_cap_.begin() + edges_.size() * 2, arc_cap_.end());

    level_.resize(node_count_);
    iter_.resize(node_count_);
    bfs_queue_.resize(node_count_);
}

void AnnulusFlowNetwork::fill_caps(const std::function<bool(const EdgeId&)>& is_open) {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        int c = is_open(edges_[i]) ? 1 : 0;
        arc_cap_[2 * i] = c;
        arc_cap_[2 * i + 1] = c;
    }
    std::copy(terminal_caps_.begin(), terminal_caps_.end(),
              arc_cap_.begin() + edges_.size() * 2);
}

bool AnnulusFlowNetwork::bfs_levels() {
    std::fill(level_.begin(), level_.end(), -1);
    int qh = 0, qt = 0;
    level_[source_] = 0;
    bfs_queue_[qt++] = source_;
    while (qh < qt) {
        int v = bfs_queue_[qh++];
        for (int k = head_[v]; k < head_[v + 1]; ++k) {
            int a = csr_arcs_[k];
            if (arc_cap_[a] <= 0) continue;
            int to = arc_to_[a];
            if (level_[to] >= 0) continue;
            level_[to] = level_[v] + 1;
            bfs_queue_[qt++] = to;
        }
    }
    return level_[sink_] >= 0;
}

int AnnulusFlowNetwork::dfs_augment(int v, int limit) {
    if (v == sink_) return limit;
    for (int& k = iter_[v]; k < head_[v + 1]; ++k) {
        int a = csr_arcs_[k];
        int to = arc_to_[a];
        if (arc_cap_[a] <= 0 || level_[to] != level_[v] + 1) continue;
        int pushed = dfs_augment(to, std::min(limit, arc_cap_[a]));
        if (pushed > 0) {
            arc_cap_[a] -= pushed;
            arc_cap_[a ^ 1] += pushed;
            return pushed;
        }
    }
    return 0;
}

int AnnulusFlowNetwork::dinic() {
    int flow = 0;
    while (bfs_levels()) {
        std::copy(head_.begin(), head_.end() - 1, iter_.begin());
        while (int pushed = dfs_augment(source_, kInf)) flow += pushed;
    }
    return flow;
}

int AnnulusFlowNetwork::solve(const std::function<bool(const EdgeId&)>& is_open) {
    fill_caps(is_open);
    return dinic();
}

int AnnulusFlowNetwork::solve(const Configuration& cfg) {
    return solve([&](const EdgeId& e) { return cfg.is_open(e); });
}

CrossingCount AnnulusFlowNetwork::solve_with_witness(const Configuration& cfg) {
    CrossingCount out;
    out.value = solve(cfg);

    // min cut from residual reachability
    std::vector<char> reach(node_count_, 0);
    {
        int qh = 0, qt = 0;
        reach[source_] = 1;
        bfs_queue_[qt++] = source_;
        while (qh < qt) {
            int v = bfs_queue_[qh++];
            for (int k = head_[v]; k < head_[v + 1]; ++k) {
                int a = csr_arcs_[k];
                if (arc_cap_[a] <= 0 || reach[arc_to_[a]]) continue;
                reach[arc_to_[a]] = 1;
                bfs_queue_[qt++] = arc_to_[a];
            }
        }
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!cfg.is_open(edges_[i])) continue;
        int a = arc_of_edge_[i];
        int u_reach = reach[arc_to_[a ^ 1]];  // arc a is u->v, so a^1 points to u
        int v_reach = reach[arc_to_[a]];
        if (u_reach != v_reach) out.min_cut.push_back(edges_[i]);
    }

    // net flow per undirected edge, then path decomposition with loop erasure
    // arc a carries net (cap[a^1] - cap[a]) / 2 units from tail to head
    std::vector<int> net(edges_.size(), 0);  // +1: site->other, -1: reverse
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!cfg.is_open(edges_[i])) continue;
        int a = arc_of_edge_[i];
        net[i] = (arc_cap_[a ^ 1] - arc_cap_[a]) / 2;
    }
    // outgoing flow adjacency: node -> list of (edge index, direction);
    // tail/head node of edge i come from its arc pair
    std::vector<std::vector<std::pair<int, int>>> out_flow(node_count_);
    std::vector<int> tail_node(edges_.size()), head_node(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        int a = arc_of_edge_[i];
        head_node[i] = arc_to_[a];
        tail_node[i] = arc_to_[a ^ 1];
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (net[i] > 0)
            out_flow[tail_node[i]].push_back({static_cast<int>(i), +1});
        else if (net[i] < 0)
            out_flow[head_node[i]].push_back({static_cast<int>(i), -1});
    }

    // source units: inner-boundary nodes with outgoing flow
    std::vector<char> consumed(edges_.size(), 0);
    std::vector<int> pos_in_path(node_count_, -1);
    for (int unit = 0; unit < out.value; ++unit) {
        // find an inner node with available flow not yet used
        int start = -1;
        for (int k = head_[source_]; k < head_[source_ + 1]; ++k) {
            int a = csr_arcs_[k];
            int node = arc_to_[a];
            for (auto& pr : out_flow[node]) {
                if (!consumed[pr.first]) {
                    start = node;
                    break;
                }
            }
            if (start >= 0) break;
        }
        if (start < 0) break;  // should not happen
        std::vector<int> path_edges;
        std::vector<int> path_nodes{start};
        pos_in_path[start] = 0;
        int v = start;
        while (true) {
            int chosen = -1, dir = 0;
            for (auto& [ei, d] : out_flow[v]) {
                if (!consumed[ei]) {
                    chosen = ei;
                    dir = d;
                    break;
                }
            }
            if (chosen < 0) break;  // reached a sink-adjacent node
            consumed[chosen] = 1;
            int to = dir > 0 ? head_node[chosen] : tail_node[chosen];
            if (pos_in_path[to] >= 0) {
                // loop erasure: drop the cycle, keep its edges consumed
                int cut = pos_in_path[to];
                for (std::size_t j = cut + 1; j < path_nodes.size(); ++j)
                    pos_in_path[path_nodes[j]] = -1;
                path_nodes.resize(cut + 1);
                path_edges.resize(cut);
                v = to;
                continue;
            }
            path_edges.push_back(chosen);
            path_nodes.push_back(to);
            pos_in_path[to] = static_cast<int>(path_nodes.size()) - 1;
            v = to;
        }
        for (int n : path_nodes) pos_in_path[n] = -1;
        std::vector<EdgeId> witness;
        witness.reserve(path_edges.size());
        for (int ei : path_edges) witness.push_back(edges_[ei]);
        if (!witness.empty()) out.witness_paths.push_back(std::move(witness));
    }
    return out;
}

CrossingCount count_disjoint_crossings(const Configuration& cfg, const AnnulusSpec& ann) {
    AnnulusFlowNetwork net(ann);
    return net.solve_with_witness(cfg);
}

// ---------------------------------------------------------------------------
// DualCircuitSolver

bool DualCircuitSolver::corner_in_annulus(int x, int y) const {
    int dx = 2 * (x - ann_.center.x) + 1;
    int dy = 2 * (y - ann_.center.y) + 1;
    if (dx < 0) dx = -dx;
    if (dy < 0) dy = -dy;
    int d = dx > dy ? dx : dy;
    return d >= 2 * ann_.inner + 1 && d <= 2 * ann_.outer - 1;
}

int DualCircuitSolver::corner_node(int x, int y) const {
    int b = ann_.outer;
    int gx = x - ann_.center.x + b;
    int gy = y - ann_.center.y + b;
    int side = 2 * b;
    if (gx < 0 || gy < 0 || gx >= side || gy >= side) return -1;
    return node_map_[static_cast<std::size_t>(gx) * side + gy];
}

std::pair<int, int> DualCircuitSolver::corner_of_node(int node) const {
    return {corner_x_[node], corner_y_[node]};
}

DualCircuitSolver::DualCircuitSolver(const AnnulusSpec& ann) : ann_(ann) {
    int b = ann_.outer;
    int side = 2 * b;
    node_map_.assign(static_cast<std::size_t>(side) * side, -1);
    // corners x in [cx-b, cx+b-1], y likewise
    for (int x = ann_.center.x - b; x <= ann_.center.x + b - 1; ++x) {
        for (int y = ann_.center.y - b; y <= ann_.center.y + b - 1; ++y) {
            if (!corner_in_annulus(x, y)) continue;
            int gx = x - ann_.center.x + b;
            int gy = y - ann_.center.y + b;
            node_map_[static_cast<std::size_t>(gx) * side + gy] = node_count_;
            corner_x_.push_back(x);
            corner_y_.push_back(y);
            ++node_count_;
        }
    }

    std::vector<std::vector<DualArc>> adj(node_count_);
    for (int n = 0; n < node_count_; ++n) {
        int x = corner_x_[n], y = corner_y_[n];
        // right neighbor crosses the vertical primal edge at (x+1, y)
        int r = corner_node(x + 1, y);
        if (r >= 0 && corner_in_annulus(x + 1, y)) {
            EdgeId prim = vertical_edge(x + 1, y);
            adj[n].push_back(DualArc{r, prim});
            adj[r].push_back(DualArc{n, prim});
        }
        // up neighbor crosses the horizontal primal edge at (x, y+1)
        int u = corner_node(x, y + 1);
        if (u >= 0 && corner_in_annulus(x, y + 1)) {
            EdgeId prim = horizontal_edge(x, y + 1);
            bool is_seam = (y + 1 == ann_.center.y) && (x - ann_.center.x >= ann_.inner) &&
                           (x - ann_.center.x <= ann_.outer - 1);
            if (is_seam) {
                seam_.push_back(SeamEdge{n, u, prim});
            } else {
                adj[n].push_back(DualArc{u, prim});
                adj[u].push_back(DualArc{n, prim});
            }
        }
    }
    head_.assign(node_count_ + 1, 0);
    for (int n = 0; n < node_count_; ++n) head_[n + 1] = head_[n] + static_cast<int>(adj[n].size());
    arcs_.resize(head_[node_count_]);
    for (int n = 0; n < node_count_; ++n)
        std::copy(adj[n].begin(), adj[n].end(), arcs_.begin() + head_[n]);
    dist_.resize(node_count_);
    parent_arc_.resize(node_count_);
    dist2_.resize(node_count_);
    parent_arc2_.resize(node_count_);
}

void DualCircuitSolver::zero_one_bfs(int start,
                                     const std::function<bool(const EdgeId&)>& is_open,
                                     std::vector<int>& dist, std::vector<int>& parent) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::deque<int> dq;
    dist[start] = 0;
    dq.push_back(start);
    while (!dq.empty()) {
        int v = dq.front();
        dq.pop_front();
        for (int k = head_[v]; k < head_[v + 1]; ++k) {
            const DualArc& a = arcs_[k];
            int w = is_open(a.primal) ? 1 : 0;
            if (dist[v] + w < dist[a.to]) {
                dist[a.to] = dist[v] + w;
                parent[a.to] = k;
                if (w == 0)
                    dq.push_front(a.to);
                else
                    dq.push_back(a.to);
            }
        }
    }
}

std::vector<int> DualCircuitSolver::walk_arcs(int node, const std::vector<int>& parent) const {
    std::vector<int> out;
    int v = node;
    while (parent[v] >= 0) {
        int k = parent[v];
        out.push_back(k);
        // find the tail of arc k: it is the node whose CSR range contains k
        int lo = 0, hi = node_count_;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            if (head_[mid] <= k)
                lo = mid;
            else
                hi = mid;
        }
        v = lo;
    }
    return out;
}

DefectCircuit DualCircuitSolver::assemble(const std::vector<EdgeId>& crossed,
                                          const std::function<bool(const EdgeId&)>& is_open) const {
    DefectCircuit c;
    for (const EdgeId& e : crossed) {
        c.circuit.push_back(dual_edge(e));
        if (is_open(e)) {
            c.defect_edges.push_back(e);
            ++c.defect_count;
        }
    }
    return c;
}

DefectCircuit DualCircuitSolver::min_defect_circuit(
    const std::function<bool(const EdgeId&)>& is_open) {
    if (seam_.empty()) throw std::logic_error("DualCircuitSolver: no seam edges");
    int best_cost = kInf;
    std::size_t best_seam = 0;
    for (std::size_t i = 0; i < seam_.size(); ++i) {
        zero_one_bfs(seam_[i].upper, is_open, dist_, parent_arc_);
        int cost = dist_[seam_[i].lower];
        if (cost >= kInf) continue;
        cost += is_open(seam_[i].primal) ? 1 : 0;
        if (cost < best_cost) {
            best_cost = cost;
            best_seam = i;
        }
    }
    if (best_cost >= kInf)
        throw std::logic_error("DualCircuitSolver: annulus dual graph is disconnected");
    zero_one_bfs(seam_[best_seam].upper, is_open, dist_, parent_arc_);
    std::vector<EdgeId> crossed;
    for (int k : walk_arcs(seam_[best_seam].lower, parent_arc_))
        crossed.push_back(arcs_[k].primal);
    crossed.push_back(seam_[best_seam].primal);
    return assemble(crossed, is_open);
}

DefectCircuit DualCircuitSolver::min_defect_circuit(const Configuration& cfg) {
    return min_defect_circuit([&](const EdgeId& e) { return cfg.is_open(e); });
}

std::optional<DefectCircuit> DualCircuitSolver::circuit_through_edge(
    const std::function<bool(const EdgeId&)>& is_open, const EdgeId& e, int budget) {
    if (budget < 0) return std::nullopt;
    // dual endpoints of e* as corners
    int ux, uy, vx, vy;
    if (e.orientation == Orientation::Horizontal) {
        ux = e.site.x;
        uy = e.site.y - 1;
        vx = e.site.x;
        vy = e.site.y;
    } else {
        ux = e.site.x - 1;
        uy = e.site.y;
        vx = e.site.x;
        vy = e.site.y;
    }
    if (!corner_in_annulus(ux, uy) || !corner_in_annulus(vx, vy)) return std::nullopt;
    int u = corner_node(ux, uy);
    int v = corner_node(vx, vy);
    int we = is_open(e) ? 1 : 0;

    bool e_is_seam = e.orientation == Orientation::Horizontal &&
                     e.site.y == ann_.center.y && e.site.x - ann_.center.x >= ann_.inner &&
                     e.site.x - ann_.center.x <= ann_.outer - 1;
    if (e_is_seam) {
        // u is the lower corner, v the upper; the circuit is e* plus a path
        // from v down to u in the cut graph
        zero_one_bfs(v, is_open, dist_, parent_arc_);
        if (dist_[u] >= kInf || dist_[u] + we > budget) return std::nullopt;
        std::vector<EdgeId> crossed{e};
        for (int k : walk_arcs(u, parent_arc_)) crossed.push_back(arcs_[k].primal);
        return assemble(crossed, is_open);
    }

    zero_one_bfs(u, is_open, dist_, parent_arc_);
    zero_one_bfs(v, is_open, dist2_, parent_arc2_);
    int best_cost = kInf;
    std::size_t best_seam = 0;
    bool best_u_to_upper = true;
    for (std::size_t i = 0; i < seam_.size(); ++i) {
        int ws = is_open(seam_[i].primal) ? 1 : 0;
        int c1 = (dist_[seam_[i].upper] >= kInf || dist2_[seam_[i].lower] >= kInf)
                     ? kInf
                     : dist_[seam_[i].upper] + ws + dist2_[seam_[i].lower];
        int c2 = (dist_[seam_[i].lower] >= kInf || dist2_[seam_[i].upper] >= kInf)
                     ? kInf
                     : dist_[seam_[i].lower] + ws + dist2_[seam_[i].upper];
        if (c1 < best_cost) {
            best_cost = c1;
            best_seam = i;
            best_u_to_upper = true;
        }
        if (c2 < best_cost) {
            best_cost = c2;
            best_seam = i;
            best_u_to_upper = false;
        }
    }
    if (best_cost >= kInf || best_cost + we > budget) return std::nullopt;
    std::vector<EdgeId> crossed{e};
    const SeamEdge& s = seam_[best_seam];
    int end_u = best_u_to_upper ? s.upper : s.lower;
    int end_v = best_u_to_upper ? s.lower : s.upper;
    for (int k : walk_arcs(end_u, parent_arc_)) crossed.push_back(arcs_[k].primal);
    crossed.push_back(s.primal);
    for (int k : walk_arcs(end_v, parent_arc2_)) crossed.push_back(arcs_[k].primal);
    return assemble(crossed, is_open);
}

DefectCircuit min_defect_circuit(const Configuration& cfg, const AnnulusSpec& ann) {
    DualCircuitSolver solver(ann);
    return solver.min_defect_circuit(cfg);
}

std::optional<DefectCircuit> circuit_through_edge(const Configuration& cfg,
                                                  const AnnulusSpec& ann, const EdgeId& e,
                                                  int budget) {
    DualCircuitSolver solver(ann);
    return solver.circuit_through_edge([&](const EdgeId& f) { return cfg.is_open(f); }, e,
                                       budget);
}

// ---------------------------------------------------------------------------
// brute-force oracle

namespace {

struct TinyNet {
    int n = 0, source = 0, sink = 0;
    std::vector<std::vector<int>> cap;

    bool augment_dfs(int v, std::vector<char>& visited) {
        if (v == sink) return true;
        visited[v] = 1;
        for (int to = 0; to < n; ++to) {
            if (visited[to] || cap[v][to] <= 0) continue;
            if (augment_dfs(to, visited)) {
                --cap[v][to];
                ++cap[to][v];
                return true;
            }
        }
        return false;
    }
};

}  // namespace

int brute_force_crossings(const Configuration& cfg, const AnnulusSpec& ann) {
    std::vector<Site> sites = annulus_sites(ann);
    std::vector<EdgeId> edges = region_edges(sites);
    if (edges.size() > 128)
        throw std::domain_error("brute_force_crossings: region too large (> 128 edges)");

    std::unordered_map<Site, int, SiteHash> idx;
    for (const Site& s : sites) idx.emplace(s, static_cast<int>(idx.size()));
    TinyNet net;
    net.n = static_cast<int>(sites.size()) + 2;
    net.source = net.n - 2;
    net.sink = net.n - 1;
    net.cap.assign(net.n, std::vector<int>(net.n, 0));
    for (const EdgeId& e : edges) {
        if (!cfg.is_open(e)) continue;
        int u = idx[e.site], v = idx[e.other()];
        net.cap[u][v] += 1;
        net.cap[v][u] += 1;
    }
    for (const Site& s : sites) {
        int d = chebyshev(s, ann.center);
        if (d == ann.inner) net.cap[net.source][idx[s]] = kInf;
        if (d == ann.outer) net.cap[idx[s]][net.sink] = kInf;
    }
    int flow = 0;
    while (true) {
        std::vector<char> visited(net.n, 0);
        if (!net.augment_dfs(net.source, visited)) break;
        ++flow;
    }
    return flow;
}

}  // namespace invperc
