// Python bindings for the main library operations.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "invperc/arms.hpp"
#include "invperc/crossing.hpp"
#include "invperc/invasion.hpp"
#include "invperc/splice.hpp"

namespace py = pybind11;
using namespace invperc;

namespace {

EdgeId make_edge(int x, int y, const std::string& orientation) {
    if (orientation != "H" && orientation != "V")
        throw std::domain_error("orientation must be 'H' or 'V'");
    return orientation == "H" ? horizontal_edge(x, y) : vertical_edge(x, y);
}

DeriveMode make_mode(const std::string& mode) {
    if (mode == "invasion") return DeriveMode::Invasion;
    if (mode == "threshold") return DeriveMode::ThresholdCritical;
    throw std::domain_error("mode must be 'invasion' or 'threshold'");
}

py::dict estimate_dict(const EstimateWithCI& e) {
    py::dict d;
    d["estimate"] = e.estimate;
    d["stderr"] = e.stderr_value;
    d["samples"] = e.samples;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "invasion percolation crossings and tranche resampling";

    m.def(
        "edge_weight",
        [](std::uint64_t seed, int x, int y, const std::string& orientation) {
            return edge_weight(seed, make_edge(x, y, orientation));
        },
        py::arg("seed"), py::arg("x"), py::arg("y"), py::arg("orientation"),
        "Deterministic uniform(0,1) weight of one edge under a seed.");

    m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("index"));

    m.def(
        "invade",
        [](int radius, std::uint64_t seed, std::optional<long long> max_steps) {
            WeightField wf(EdgeRegion::box(radius + 1), seed);
            StopRule stop;
            stop.exit_radius = radius;
            stop.max_steps = max_steps;
            InvasionResult res = invade(wf, stop);
            py::list rows;
            for (const InvadedEdge& s : res.invaded)
                rows.append(py::make_tuple(s.step, s.edge.site.x, s.edge.site.y,
                                           s.edge.orientation == Orientation::Horizontal
                                               ? "H"
                                               : "V",
                                           s.weight));
            py::dict d;
            d["invaded"] = rows;
            d["cluster_sites"] = res.cluster_sites.size();
            d["reason"] = res.reason == StopReason::ReachedRadius ? "reached_radius"
                          : res.reason == StopReason::StepBudget  ? "step_budget"
                                                                  : "exhausted_region";
            if (!res.invaded.empty())
                d["tail_weight_last_10pct"] = invaded_weight_tail(res, 0.1);
            return d;
        },
        py::arg("radius"), py::arg("seed"), py::arg("max_steps") = py::none(),
        "Invasion percolation from the origin inside S(radius).");

    m.def(
        "count_crossings",
        [](int n, double p, std::uint64_t seed) {
            AnnulusSpec ann(n / 2, n);
            AnnulusFlowNetwork net(ann);
            return net.solve([&](const EdgeId& e) { return edge_weight(seed, e) < p; });
        },
        py::arg("n"), py::arg("p"), py::arg("seed"),
        "Max edge-disjoint p-open crossings of Ann(n/2, n) under a seed.");

    m.def(
        "min_defect_count",
        [](int n, double p, std::uint64_t seed) {
            AnnulusSpec ann(n / 2, n);
            DualCircuitSolver solver(ann);
            return solver
                .min_defect_circuit(
                    [&](const EdgeId& e) { return edge_weight(seed, e) < p; })
                .defect_count;
        },
        py::arg("n"), py::arg("p"), py::arg("seed"),
        "Defects of the best separating dual circuit; equals count_crossings.");

    m.def(
        "estimate_rectangle_crossing",
        [](int n, double p, long long samples, std::uint64_t seed, int workers) {
            return estimate_dict(estimate_rectangle_crossing(n, p, samples, seed, workers));
        },
        py::arg("n"), py::arg("p"), py::arg("samples"), py::arg("seed"),
        py::arg("workers") = 0);

    m.def(
        "estimate_arm_probability",
        [](int inner, int outer, double p, double q, long long samples,
           std::uint64_t seed, int workers) {
            ArmEventSpec spec;
            spec.inner = inner;
            spec.outer = outer;
            spec.p_open = p;
            spec.q_closed = q;
            return estimate_dict(estimate_arm_probability(spec, samples, seed, workers));
        },
        py::arg("inner"), py::arg("outer"), py::arg("p") = 0.5, py::arg("q") = 0.5,
        py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("workers") = 0,
        "Alternating four-arm event probability between scales inner and outer.");

    m.def(
        "correlation_length",
        [](double p, double delta, const std::vector<int>& n_grid, long long samples,
           std::uint64_t seed, int workers) {
            CorrelationLengthEstimate est =
                estimate_correlation_length(p, delta, n_grid, samples, seed, workers);
            py::dict d;
            d["length"] = est.length ? py::cast(*est.length) : py::none();
            py::list curve;
            for (const auto& pt : est.curve)
                curve.append(py::make_tuple(pt.n, pt.estimate, pt.stderr_value));
            d["curve"] = curve;
            return d;
        },
        py::arg("p"), py::arg("delta"), py::arg("n_grid"), py::arg("samples"),
        py::arg("seed"), py::arg("workers") = 0);

    m.def(
        "build_tranche",
        [](int n, double epsilon) {
            TrancheSpec t = build_tranche(n, epsilon);
            py::dict d;
            d["n"] = t.n;
            d["epsilon"] = t.epsilon;
            d["centerline"] = t.centerline;
            d["half_width"] = t.half_width;
            d["ball_radius"] = t.ball_radius;
            d["degenerate"] = t.degenerate;
            d["num_balls"] = t.balls.size();
            d["num_edges"] = t.edges.size();
            return d;
        },
        py::arg("n"), py::arg("epsilon"));

    m.def(
        "estimate_mismatch",
        [](int n, double epsilon, int m_cap, long long samples, std::uint64_t seed,
           const std::string& mode, int lam, int workers) {
            MismatchEstimate est = estimate_mismatch(n, epsilon, m_cap, samples, seed,
                                                     make_mode(mode), lam, workers);
            py::dict d;
            d["mismatch"] = estimate_dict(est.mismatch);
            d["histogram"] = est.histogram;
            py::list eq, ge;
            for (const auto& e : est.eq_diff) eq.append(estimate_dict(e));
            for (const auto& e : est.ge_diff) ge.append(estimate_dict(e));
            d["eq_diff"] = eq;
            d["ge_diff"] = ge;
            d["outside_discrepancy_rate"] = est.outside_discrepancy_rate;
            return d;
        },
        py::arg("n"), py::arg("epsilon"), py::arg("m_cap") = 8,
        py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("mode") = "threshold",
        py::arg("lam") = 4, py::arg("workers") = 0,
        "P(N changes when the tranche is resampled), plus the event-level splits.");

    m.def(
        "estimate_conditional_variance",
        [](int n, double epsilon, int m_target, long long outer, long long inner,
           const std::vector<double>& deltas, std::uint64_t seed,
           const std::string& mode, int lam, int workers) {
            ConditionalVarianceReport rep = estimate_conditional_variance(
                n, epsilon, m_target, outer, inner, deltas, seed, make_mode(mode), lam,
                workers);
            py::dict d;
            d["mean_pq"] = rep.mean_pq;
            d["mean_pq_stderr"] = rep.mean_pq_stderr;
            py::list cells;
            for (const auto& c : rep.cells) {
                py::dict jc;
                jc["delta"] = c.delta;
                jc["interior_prob"] = c.interior_prob;
                jc["markov_bound"] = c.markov_bound;
                jc["markov_ok"] = c.markov_ok;
                cells.append(jc);
            }
            d["cells"] = cells;
            return d;
        },
        py::arg("n"), py::arg("epsilon"), py::arg("m_target"), py::arg("outer"),
        py::arg("inner"), py::arg("deltas"), py::arg("seed") = 1,
        py::arg("mode") = "threshold", py::arg("lam") = 4, py::arg("workers") = 0);

    m.attr("__version__") = "1.0.0";
}
