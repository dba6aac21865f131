// Acceptance suite: nine numbered criteria, one PASS/FAIL line each.
//
// Usage: acceptance [--ipsim PATH] [N ...]
//   With no numbers all criteria run. Exit 0 iff every selected criterion
//   passes. An extra INFO line reports the exit-radius sensitivity sweep.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "invperc/arms.hpp"
#include "invperc/crossing.hpp"
#include "invperc/invasion.hpp"
#include "invperc/splice.hpp"

using namespace invperc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

Configuration random_annulus_config(const AnnulusSpec& ann, std::uint64_t seed,
                                    double p) {
    Configuration cfg(EdgeRegion::from_edges(annulus_edges(ann)));
    for (const EdgeId& e : annulus_edges(ann))
        if (edge_weight(seed, e) < p) cfg.set_open(e, true);
    return cfg;
}

// 1. Exact three-way agreement: max flow, dual min defect, brute force.
Outcome criterion1() {
    long long mismatches = 0, checked = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        double p = 0.3 + 0.2 * (i % 3);
        for (const AnnulusSpec& ann : {AnnulusSpec(1, 2), AnnulusSpec(2, 4)}) {
            Configuration cfg =
                random_annulus_config(ann, derive_seed(101, i * 2 + ann.outer), p);
            int flow = count_disjoint_crossings(cfg, ann).value;
            if (flow != min_defect_circuit(cfg, ann).defect_count ||
                flow != brute_force_crossings(cfg, ann))
                ++mismatches;
            ++checked;
        }
    }
    return {mismatches == 0, std::to_string(checked) + " configurations, " +
                                 std::to_string(mismatches) + " disagreements"};
}

// 2. Every N-changing single-edge flip admits a constrained dual circuit
// within budget max(N-, N+) = N of the side where the edge is open.
Outcome criterion2() {
    AnnulusSpec ann(1, 2);
    std::vector<EdgeId> edges = annulus_edges(ann);
    std::map<EdgeId, int> index;
    for (std::size_t i = 0; i < edges.size(); ++i) index[edges[i]] = static_cast<int>(i);

    long long violations = 0;
    auto check_mask = [&](AnnulusFlowNetwork& net, DualCircuitSolver& solver,
                          std::uint64_t mask) {
        auto open_under = [&](std::uint64_t m) {
            return [&edges, &index, m](const EdgeId& e) {
                (void)edges;
                return (m >> index.at(e)) & 1u;
            };
        };
        int base = net.solve(open_under(mask));
        long long bad = 0;
        for (std::size_t j = 0; j < edges.size(); ++j) {
            std::uint64_t flipped = mask ^ (1ULL << j);
            int other = net.solve(open_under(flipped));
            if (other == base) continue;
            int budget = std::max(base, other);
            if (std::abs(other - base) != 1 ||
                !solver.circuit_through_edge(open_under(mask), edges[j], budget))
                ++bad;
        }
        return bad;
    };

    {  // exhaustive sweep: 12 free edges, the remaining 24 held closed
        AnnulusFlowNetwork net(ann);
        DualCircuitSolver solver(ann);
        std::vector<int> free_bits;
        for (std::size_t i = 0; i < edges.size(); i += 3)
            free_bits.push_back(static_cast<int>(i));
        for (std::uint64_t pick = 0; pick < (1ULL << 12); ++pick) {
            std::uint64_t mask = 0;
            for (int b = 0; b < 12; ++b)
                if ((pick >> b) & 1u) mask |= 1ULL << free_bits[b];
            violations += check_mask(net, solver, mask);
        }
    }
    violations += parallel_success_count(100000, 0, [&](long long i) {
        thread_local AnnulusFlowNetwork net(ann);
        thread_local DualCircuitSolver solver(ann);
        std::uint64_t mask = 0;
        std::uint64_t seed = derive_seed(202, static_cast<std::uint64_t>(i));
        for (std::size_t j = 0; j < edges.size(); ++j)
            if (edge_weight(seed, edges[j]) < 0.5) mask |= 1ULL << j;
        return check_mask(net, solver, mask) > 0;
    });
    return {violations == 0,
            "4096 exhaustive + 100000 random configurations, " +
                std::to_string(violations) + " counterexamples"};
}

// 3. Self-duality anchor: rectangle crossing probability is exactly 1/2.
Outcome criterion3() {
    std::string detail;
    bool ok = true;
    for (int n : {8, 16, 32}) {
        EstimateWithCI est =
            estimate_rectangle_crossing(n, 0.5, 100000, derive_seed(303, n));
        bool covers = std::abs(est.estimate - 0.5) <= 3 * est.stderr_value;
        ok = ok && covers;
        detail += "n=" + std::to_string(n) + ": " + fmt(est.estimate) + "  ";
    }
    return {ok, detail};
}

// 4. Crossing-count tails are uniformly light: a K0 calibrated at n=32 also
// bounds the tail at n=64 and n=128.
Outcome criterion4() {
    const long long m = 10000;
    std::map<int, std::vector<long long>> hists;
    for (int n : {32, 64, 128}) {
        AnnulusSpec ann(n / 2, n);
        struct Acc {
            std::unique_ptr<AnnulusFlowNetwork> net;
            std::vector<long long> hist;
        };
        Acc total = parallel_accumulate(
            m, 0,
            [&] {
                Acc a;
                a.net = std::make_unique<AnnulusFlowNetwork>(ann);
                return a;
            },
            [&](Acc& acc, long long i) {
                std::uint64_t si = derive_seed(404 + n, static_cast<std::uint64_t>(i));
                int v = acc.net->solve(
                    [&](const EdgeId& e) { return edge_weight(si, e) < 0.5; });
                if (acc.hist.size() <= static_cast<std::size_t>(v))
                    acc.hist.resize(v + 1, 0);
                ++acc.hist[v];
            },
            [](Acc& into, Acc& from) {
                if (into.hist.size() < from.hist.size())
                    into.hist.resize(from.hist.size(), 0);
                for (std::size_t k = 0; k < from.hist.size(); ++k)
                    into.hist[k] += from.hist[k];
            });
        hists[n] = std::move(total.hist);
    }
    auto count_above = [&](int n, int k) {
        long long c = 0;
        const auto& h = hists[n];
        for (std::size_t j = k + 1; j < h.size(); ++j) c += h[j];
        return c;
    };
    // empirical tails are nonincreasing by construction; spot-check anyway
    bool monotone = true;
    for (auto& [n, h] : hists) {
        long long prev = m;
        for (int k = 0; k < static_cast<int>(h.size()); ++k) {
            long long cur = count_above(n, k);
            if (cur > prev) monotone = false;
            prev = cur;
        }
    }
    // K0 is fixed at n=32: the smallest level whose tail sits below 0.05
    // with a 2-sigma margin, so the calibration itself is statistically firm
    int k0 = 0;
    for (;; ++k0) {
        long long c = count_above(32, k0);
        double phat = static_cast<double>(c) / m;
        if (phat + 2 * wilson_stderr(c, m) < 0.05) break;
    }
    bool ok = monotone;
    std::string detail = "K0=" + std::to_string(k0);
    for (int n : {64, 128}) {
        long long c = count_above(n, k0);
        double phat = static_cast<double>(c) / m;
        double sigma = wilson_stderr(c, m);
        bool within = phat < 0.05 + 2 * sigma;
        ok = ok && within;
        detail += "  P" + std::to_string(n) + "(N>K0)=" + fmt(phat);
    }
    return {ok, detail};
}

// 5. Resampling mismatch decays in the tranche width, uniformly in n.
Outcome criterion5() {
    const long long m = 5000;
    const std::vector<double> eps_grid = {0.25, 0.125, 0.0625};
    struct Column {
        int n;
        DeriveMode mode;
        std::vector<EstimateWithCI> cells;
    };
    std::vector<Column> cols = {{64, DeriveMode::ThresholdCritical, {}},
                                {64, DeriveMode::Invasion, {}},
                                {128, DeriveMode::Invasion, {}}};
    for (Column& c : cols)
        for (double eps : eps_grid)
            c.cells.push_back(
                estimate_mismatch(c.n, eps, 4, m, 505, c.mode, 4, 0).mismatch);

    bool ok = true;
    std::string detail;
    for (Column& c : cols) {
        for (std::size_t i = 1; i < c.cells.size(); ++i) {
            double slack = 2 * std::hypot(c.cells[i].stderr_value,
                                          c.cells[i - 1].stderr_value);
            if (c.cells[i].estimate > c.cells[i - 1].estimate + slack) ok = false;
        }
        detail += std::string(c.mode == DeriveMode::Invasion ? "inv" : "thr") +
                  std::to_string(c.n) + ":";
        for (const auto& e : c.cells) detail += " " + fmt(e.estimate);
        detail += "  ";
    }
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {  // inv64 vs inv128 cellwise
        const EstimateWithCI& a = cols[1].cells[i];
        const EstimateWithCI& b = cols[2].cells[i];
        double slack = 2 * std::hypot(a.stderr_value, b.stderr_value);
        if (std::abs(a.estimate - b.estimate) > slack) ok = false;
    }
    return {ok, detail};
}

// 6. Markov bound on the conditional success probability.
Outcome criterion6() {
    MismatchEstimate pilot =
        estimate_mismatch(64, 0.125, 8, 400, 606, DeriveMode::ThresholdCritical, 4, 0);
    int m_target = static_cast<int>(
        std::max_element(pilot.histogram.begin(), pilot.histogram.end()) -
        pilot.histogram.begin());
    ConditionalVarianceReport rep = estimate_conditional_variance(
        64, 0.125, m_target, 400, 50, {0.1, 0.2}, 607, DeriveMode::ThresholdCritical, 4,
        0);
    bool ok = true;
    std::string detail = "M=" + std::to_string(m_target);
    for (const auto& cells : {rep.cells, rep.cells_ge})
        for (const ConditionalVarianceCell& c : cells) {
            ok = ok && c.markov_ok;
            detail += "  d=" + fmt(c.delta) + ": " + fmt(c.interior_prob) +
                      "<=" + fmt(c.markov_bound);
        }
    return {ok, detail};
}

// 7. Four-arm exponent sanity band via a weighted log-log fit.
Outcome criterion7() {
    const int n = 128;
    const long long m = 10000;
    std::vector<double> xs, ys, ws;
    std::string detail;
    for (int s : {2, 4, 8, 16}) {
        ArmEventSpec spec;
        spec.inner = s;
        spec.outer = n;
        EstimateWithCI est = estimate_arm_probability(spec, m, derive_seed(707, s), 0);
        if (est.estimate <= 0)
            return {false, "zero estimate at s=" + std::to_string(s)};
        double sigma_log = est.stderr_value / est.estimate;
        xs.push_back(std::log(static_cast<double>(s) / n));
        ys.push_back(std::log(est.estimate));
        ws.push_back(1.0 / (sigma_log * sigma_log));
        detail += "s=" + std::to_string(s) + ": " + fmt(est.estimate) + "  ";
    }
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        swx += ws[i] * xs[i];
        swy += ws[i] * ys[i];
        swxx += ws[i] * xs[i] * xs[i];
        swxy += ws[i] * xs[i] * ys[i];
    }
    double denom = sw * swxx - swx * swx;
    double slope = (sw * swxy - swx * swy) / denom;
    double slope_se = std::sqrt(sw / denom);
    double lower = slope - 1.645 * slope_se;
    bool ok = lower > 0.9 && slope >= 1.0 && slope <= 1.6;
    detail += "slope " + fmt(slope) + " (lower95 " + fmt(lower) + ")";
    return {ok, detail};
}

// 8. Late invaded weights concentrate at the critical point. The tail maximum
// sits within a tight two-sided band around 1/2: exceedances above 1/2 are
// finitely many, so at late times the running maximum approaches 1/2 from
// either side and typically from below.
Outcome criterion8() {
    int in_band = 0;
    double lo = 1.0, hi = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        WeightField wf(EdgeRegion::box(1001), derive_seed(808, s));
        InvasionResult res = invade(wf, StopRule{100000, 1000});
        double tail = invaded_weight_tail(res, 0.1);
        if (tail >= 0.45 && tail <= 0.55) ++in_band;
        lo = std::min(lo, tail);
        hi = std::max(hi, tail);
    }
    return {in_band >= 95, std::to_string(in_band) +
                               "/100 in [0.45,0.55], range [" + fmt(lo) + "," +
                               fmt(hi) + "]"};
}

// 9. Byte-identical CLI outputs at worker counts 1 and 8, same config hash.
Outcome criterion9(const std::string& ipsim) {
    if (ipsim.empty()) return {false, "no --ipsim path given"};
    fs::path base = fs::temp_directory_path() / "ipsim_accept9";
    fs::remove_all(base);
    fs::create_directories(base);
    auto run = [&](int workers, const fs::path& out) {
        std::string cmd = "\"" + ipsim +
                          "\" splice --out \"" + out.string() +
                          "\" --set n=32 --set epsilon=0.25,0.125 --set samples=300"
                          " --set seed=909 --set mode=threshold --set workers=" +
                          std::to_string(workers);
        return std::system(cmd.c_str()) == 0;
    };
    if (!run(1, base / "w1") || !run(8, base / "w8"))
        return {false, "CLI invocation failed"};
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::set<std::string> names;
    for (auto& entry : fs::directory_iterator(base / "w1"))
        names.insert(entry.path().filename().string());
    for (auto& entry : fs::directory_iterator(base / "w8"))
        names.insert(entry.path().filename().string());
    for (const std::string& name : names) {
        if (!fs::exists(base / "w1" / name) || !fs::exists(base / "w8" / name))
            return {false, "file set differs: " + name};
        if (slurp(base / "w1" / name) != slurp(base / "w8" / name))
            return {false, "byte difference in " + name};
    }
    std::string summary = slurp(base / "w1" / "summary.json");
    std::size_t pos = summary.find("config_hash");
    if (pos == std::string::npos) return {false, "summary.json lacks config_hash"};
    return {true, std::to_string(names.size()) + " files byte-identical"};
}

// Informational: sensitivity of the invasion-mode mismatch to the exit
// radius multiplier.
void lambda_report() {
    std::string detail;
    for (int lambda : {2, 4, 8}) {
        MismatchEstimate est =
            estimate_mismatch(32, 0.25, 4, 500, 111, DeriveMode::Invasion, lambda, 0);
        detail += "lambda=" + std::to_string(lambda) + ": " +
                  fmt(est.mismatch.estimate) + "+-" + fmt(est.mismatch.stderr_value) +
                  "  ";
    }
    std::printf("INFO  exit-radius sensitivity (invasion mismatch, n=32, eps=1/4): %s\n",
                detail.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    std::string ipsim;
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--ipsim" && i + 1 < argc)
            ipsim = argv[++i];
        else
            selected.push_back(std::atoi(arg.c_str()));
    }
    bool run_all = selected.empty();
    if (run_all) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    static const char* names[] = {
        "",
        "flow / dual circuit / brute force agree exactly",
        "every pivotal flip admits a dual circuit within budget",
        "self-dual rectangle crossing covers 1/2",
        "crossing-count tails are uniformly light",
        "resampling mismatch decays in epsilon, uniformly in n",
        "Markov bound on the conditional success probability",
        "four-arm exponent sanity band",
        "late invaded weights concentrate at 1/2",
        "byte-identical outputs at worker counts 1 and 8",
    };

    bool all_ok = true;
    for (int c : selected) {
        Outcome out;
        switch (c) {
            case 1: out = criterion1(); break;
            case 2: out = criterion2(); break;
            case 3: out = criterion3(); break;
            case 4: out = criterion4(); break;
            case 5: out = criterion5(); break;
            case 6: out = criterion6(); break;
            case 7: out = criterion7(); break;
            case 8: out = criterion8(); break;
            case 9: out = criterion9(ipsim); break;
            default:
                std::fprintf(stderr, "unknown criterion %d\n", c);
                return 1;
        }
        std::printf("%s  criterion %d: %s  [%s]\n", out.ok ? "PASS" : "FAIL", c,
                    names[c], out.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && out.ok;
    }
    if (run_all) lambda_report();
    return all_ok ? 0 : 1;
}
