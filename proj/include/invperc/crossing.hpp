#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "invperc/weights.hpp"

// N_n machinery: maximal edge-disjoint open crossings of an annulus (unit
// capacity max-flow), the dual minimum-defect separating circuits, and a
// brute-force oracle for small fixtures.

namespace invperc {

struct CrossingCount {
    int value = 0;
    std::vector<std::vector<EdgeId>> witness_paths;  // value many, edge-disjoint
    std::vector<EdgeId> min_cut;                     // open edges realizing the dual bound
};

struct DefectCircuit {
    std::vector<DualEdgeId> circuit;   // closed walk around the annulus center
    std::vector<EdgeId> defect_edges;  // open primal edges it crosses
    int defect_count = 0;
};

// Reusable flow network over a fixed annulus. Structure (nodes, arcs) is built
// once; each solve only rewrites capacities, so tight Monte Carlo loops can
// call solve() millions of times without reallocating.
class AnnulusFlowNetwork {
public:
    explicit AnnulusFlowNetwork(const AnnulusSpec& ann);

    const AnnulusSpec& annulus() const { return ann_; }
    const std::vector<EdgeId>& edges() const { return edges_; }

    // Max number of edge-disjoint open inner->outer paths.
    int solve(const std::function<bool(const EdgeId&)>& is_open);
    int solve(const Configuration& cfg);

    CrossingCount solve_with_witness(const Configuration& cfg);

private:
    AnnulusSpec ann_;
    int node_count_ = 0;  // sites + source + sink
    int source_ = 0, sink_ = 0;
    std::vector<EdgeId> edges_;          // annulus edges, canonical order
    std::vector<int> arc_to_;            // arc target node
    std::vector<int> arc_cap_;           // residual capacity (rewritten per solve)
    std::vector<int> arc_of_edge_;       // forward arc index per annulus edge
    std::vector<int> terminal_caps_;     // fixed caps of source/sink arcs
    std::vector<int> head_;              // CSR adjacency
    std::vector<int> csr_arcs_;
    std::vector<int> level_, iter_;      // Dinic scratch
    std::vector<int> bfs_queue_;

    void fill_caps(const std::function<bool(const EdgeId&)>& is_open);
    int dinic();
    bool bfs_levels();
    int dfs_augment(int v, int limit);
};

CrossingCount count_disjoint_crossings(const Configuration& cfg, const AnnulusSpec& ann);

// Reusable dual-lattice 0/1-shortest-path solver for separating circuits. The
// annulus is cut along a radial seam on the positive x-axis; a separating
// circuit is a seam-to-seam shortest path glued across one seam edge.
class DualCircuitSolver {
public:
    explicit DualCircuitSolver(const AnnulusSpec& ann);

    DefectCircuit min_defect_circuit(const std::function<bool(const EdgeId&)>& is_open);
    DefectCircuit min_defect_circuit(const Configuration& cfg);

    std::optional<DefectCircuit> circuit_through_edge(
        const std::function<bool(const EdgeId&)>& is_open, const EdgeId& e, int budget);

private:
    struct DualArc {
        int to;
        EdgeId primal;  // the crossed primal edge (defect when open)
    };

    AnnulusSpec ann_;
    int node_count_ = 0;
    std::vector<int> node_map_;          // grid over dual corners
    std::vector<int> corner_x_, corner_y_;
    std::vector<int> head_;
    std::vector<DualArc> arcs_;
    struct SeamEdge {
        int lower, upper;  // dual node ids on either side of the seam
        EdgeId primal;     // horizontal primal edge on the positive x-ray
    };
    std::vector<SeamEdge> seam_;
    std::vector<int> dist_, parent_arc_;
    std::vector<int> dist2_, parent_arc2_;

    // Dual corner (x,y) stands for the dual site (x+1/2, y+1/2).
    bool corner_in_annulus(int x, int y) const;
    int corner_node(int x, int y) const;
    std::pair<int, int> corner_of_node(int node) const;

    void zero_one_bfs(int start, const std::function<bool(const EdgeId&)>& is_open,
                      std::vector<int>& dist, std::vector<int>& parent);
    std::vector<int> walk_arcs(int node, const std::vector<int>& parent) const;
    DefectCircuit assemble(const std::vector<EdgeId>& crossed,
                           const std::function<bool(const EdgeId&)>& is_open) const;
};

DefectCircuit min_defect_circuit(const Configuration& cfg, const AnnulusSpec& ann);
std::optional<DefectCircuit> circuit_through_edge(const Configuration& cfg,
                                                  const AnnulusSpec& ann, const EdgeId& e,
                                                  int budget);

// Independent oracle: Ford-Fulkerson with exhaustive DFS augmenting paths.
// Refuses annuli with more than 128 edges; test use only.
int brute_force_crossings(const Configuration& cfg, const AnnulusSpec& ann);

}  // namespace invperc
