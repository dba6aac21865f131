#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "invperc/mc.hpp"
#include "invperc/weights.hpp"

// Circuit events A(n,p), alternating four-arm events with defect budgets,
// correlation length L(p,delta) and its inverse p_n.

namespace invperc {

struct DefectBudget {
    enum class Kind { None, PerArm, Total };
    Kind kind = Kind::None;
    int value = 0;

    static DefectBudget none() { return {Kind::None, 0}; }
    static DefectBudget per_arm(int k) { return {Kind::PerArm, k}; }
    static DefectBudget total(int m) { return {Kind::Total, m}; }
};

struct ArmEventSpec {
    double p_open = 0.5;
    double q_closed = 0.5;
    int inner = 0;  // scale s
    int outer = 0;  // scale n
    Site center{0, 0};
    DefectBudget budget = DefectBudget::none();
    int rotations = 8;  // sector rotations for defected detection

    void validate() const {
        if (inner <= 0 || inner >= outer)
            throw std::domain_error("ArmEventSpec: need 0 < s < n");
        if (p_open < 0 || p_open > 1 || q_closed < 0 || q_closed > 1)
            throw std::domain_error("ArmEventSpec: p, q must be in [0,1]");
    }
};

struct ArmDetection {
    bool occurred = false;
    // true when the sector approximation was used (defect budgets > 0): a
    // reported false may still be a true event
    bool lower_bound_method = false;
};

// True iff a p-open circuit exists in Ann(n/4, n/2) whose open cluster
// reaches dS(lambda * n), the finite proxy for "connected to infinity".
bool detect_circuit_event_A(const WeightField& wf, int n, double p, int lambda = 4);

// Reusable detector for a fixed (s, n, center) geometry.
class FourArmDetector {
public:
    FourArmDetector(int inner, int outer, Site center = {0, 0});

    ArmDetection detect(const std::function<double(const EdgeId&)>& weight_of,
                        double p, double q, const DefectBudget& budget, int rotations);

    // Exact zero-defect detection via cluster interleaving on the inner boundary.
    bool detect_exact(const std::function<double(const EdgeId&)>& weight_of, double p,
                      double q);

private:
    int s_, n_;
    Site center_;

    struct Occurrence {
        double angle;
        int cluster;  // root id; primal and dual roots live in disjoint ranges
        bool open_type;
    };

    // primal geometry
    std::vector<Site> sites_;
    std::vector<int> site_node_;  // grid -> node
    std::vector<std::pair<int, int>> prim_edges_;  // node pairs
    std::vector<EdgeId> prim_edge_ids_;
    std::vector<int> inner_sites_, outer_sites_;  // node lists at dist s / n
    // dual geometry (corners: (x,y) stands for (x+1/2, y+1/2))
    std::vector<std::pair<int, int>> corners_;
    std::vector<int> corner_node_;
    std::vector<std::pair<int, int>> dual_edges_;  // node pairs
    std::vector<EdgeId> dual_edge_prim_;
    std::vector<int> inner_corners_, outer_corners_;

    std::vector<int> uf_;
    std::vector<int> dist_scratch_;

    int grid_site(const Site& s) const;
    int grid_corner(int x, int y) const;

    bool sector_detect(const std::function<double(const EdgeId&)>& weight_of, double p,
                       double q, const DefectBudget& budget, int rotations);
};

ArmDetection detect_four_arm(const WeightField& wf, const ArmEventSpec& spec);

EstimateWithCI estimate_arm_probability(const ArmEventSpec& spec, long long samples,
                                        std::uint64_t seed, int workers = 0);

// Left-right p-open crossing of the rectangle with sites [0, n+1] x [0, n];
// exactly 1/2 at p = 1/2 by self-duality.
EstimateWithCI estimate_rectangle_crossing(int n, double p, long long samples,
                                           std::uint64_t seed, int workers = 0);

// Left-right p-open crossing of the square [0, n]^2.
EstimateWithCI estimate_square_crossing(int n, double p, long long samples,
                                        std::uint64_t seed, int workers = 0);

struct CorrelationLengthEstimate {
    double p = 0.0;
    double delta = 0.0;
    std::optional<int> length;  // smallest n in the grid meeting the criterion
    struct Point {
        int n;
        double estimate;
        double stderr_value;
    };
    std::vector<Point> curve;
};

// L(p,delta): smallest tested n whose crossing probability reaches 1 - delta
// at the lower 95% confidence bound. Requires p > 1/2.
CorrelationLengthEstimate estimate_correlation_length(double p, double delta,
                                                      const std::vector<int>& n_grid,
                                                      long long samples,
                                                      std::uint64_t seed,
                                                      int workers = 0);

// p_n = sup{p : L(p) > n}, by bisection over (1/2, 1).
double estimate_p_n(int n, double delta, long long samples, std::uint64_t seed,
                    double tol, int workers = 0);

}  // namespace invperc
