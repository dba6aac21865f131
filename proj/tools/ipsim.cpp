// ipsim: experiment front end for the invasion percolation library.
//
// Subcommands: invade, crossings, arms, corrlen, splice, verify.
// Exit codes: 0 success, 1 validation error, 2 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "invperc/arms.hpp"
#include "invperc/crossing.hpp"
#include "invperc/invasion.hpp"
#include "invperc/splice.hpp"

using json = nlohmann::json;
using namespace invperc;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// key = value lines (with # comments) or a JSON object; flags override file
// entries at the CLI11 layer by being applied afterwards
std::map<std::string, std::string> parse_config_file(const std::string& path,
                                                     std::string& raw) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    raw = buf.str();

    std::map<std::string, std::string> kv;
    std::string trimmed = raw;
    std::size_t first = trimmed.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && trimmed[first] == '{') {
        json j;
        try {
            j = json::parse(raw);
        } catch (const json::parse_error& e) {
            throw ConfigError(path + ": " + e.what());
        }
        for (auto& [k, v] : j.items())
            kv[k] = v.is_string() ? v.get<std::string>() : v.dump();
        return kv;
    }
    std::istringstream lines(raw);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            continue;
        }
        auto strip = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = strip(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = strip(line.substr(eq + 1));
    }
    return kv;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string config_hash(const std::map<std::string, std::string>& kv) {
    std::string canon;
    // `workers` only schedules the computation; outputs are invariant to it
    for (auto& [k, v] : kv)
        if (k != "workers") canon += k + "=" + v + "\n";
    // FNV-1a, stable across platforms
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunDir {
    fs::path dir;
    std::map<std::string, std::string> config;
    std::string snapshot;

    void open(const std::string& subcommand, const std::string& out_flag) {
        const char* env = std::getenv("IPSIM_OUT");
        std::string base = !out_flag.empty() ? out_flag
                           : env              ? env
                                              : std::string("runs/") + subcommand;
        dir = base;
        fs::create_directories(dir);
        if (snapshot.empty()) {
            for (auto& [k, v] : config)
                if (k != "workers") snapshot += k + " = " + v + "\n";
        }
        std::ofstream(dir / "config_snapshot.txt") << snapshot;
    }

    void write_summary(json body) {
        body["config_hash"] = config_hash(config);
        body["version"] = kVersion;
        std::ofstream out(dir / "summary.json");
        out << body.dump(2) << "\n";
    }
};

// Pulls values from the merged config map; CLI flags have already been folded
// in by the caller. Missing required keys name the field in the error.
struct Params {
    std::map<std::string, std::string>* kv;

    std::string require(const std::string& key) const {
        auto it = kv->find(key);
        if (it == kv->end())
            throw ConfigError("missing required field: " + key);
        return it->second;
    }
    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = kv->find(key);
        return it == kv->end() ? fallback : it->second;
    }
    long long get_int(const std::string& key, long long fallback) const {
        auto it = kv->find(key);
        return it == kv->end() ? fallback : std::stoll(it->second);
    }
    long long require_int(const std::string& key) const { return std::stoll(require(key)); }
    double get_double(const std::string& key, double fallback) const {
        auto it = kv->find(key);
        return it == kv->end() ? fallback : std::stod(it->second);
    }
    std::vector<double> get_doubles(const std::string& key,
                                    std::vector<double> fallback) const {
        auto it = kv->find(key);
        if (it == kv->end()) return fallback;
        std::vector<double> out;
        std::istringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(std::stod(tok));
        return out;
    }
    std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) const {
        auto it = kv->find(key);
        if (it == kv->end()) return fallback;
        std::vector<int> out;
        std::istringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(std::stoi(tok));
        return out;
    }
};

DeriveMode parse_mode(const std::string& s) {
    if (s == "invasion") return DeriveMode::Invasion;
    if (s == "threshold") return DeriveMode::ThresholdCritical;
    throw ConfigError("mode must be 'invasion' or 'threshold', got '" + s + "'");
}

const char* mode_name(DeriveMode m) {
    return m == DeriveMode::Invasion ? "invasion" : "threshold";
}

// ---------------------------------------------------------------------------

int cmd_invade(RunDir& run, Params p) {
    int n = static_cast<int>(p.require_int("n"));
    std::uint64_t seed = p.get_int("seed", 1);
    long long max_steps = p.get_int("max_steps", -1);
    int lambda = static_cast<int>(p.get_int("lambda", 4));
    if (n < 1) throw ConfigError("n must be >= 1");

    StopRule stop;
    stop.exit_radius = lambda * n;
    if (max_steps >= 0) stop.max_steps = max_steps;
    WeightField wf(EdgeRegion::box(lambda * n + 1), seed);
    InvasionResult res = invade(wf, stop);

    std::ofstream csv(run.dir / "invasion.csv");
    write_invasion_csv(res, csv);

    json s;
    s["n"] = n;
    s["seed"] = seed;
    s["steps"] = res.invaded.size();
    s["cluster_sites"] = res.cluster_sites.size();
    s["stop_reason"] = res.reason == StopReason::ReachedRadius ? "reached_radius"
                       : res.reason == StopReason::StepBudget  ? "step_budget"
                                                               : "exhausted_region";
    if (!res.invaded.empty())
        s["tail_weight_last_10pct"] = invaded_weight_tail(res, 0.1);
    run.write_summary(s);
    return 0;
}

int cmd_crossings(RunDir& run, Params p) {
    int n = static_cast<int>(p.require_int("n"));
    if (n < 8) throw ConfigError("n must be >= 8");
    double pr = p.get_double("p", 0.5);
    long long samples = p.get_int("samples", 1000);
    std::uint64_t seed = p.get_int("seed", 1);
    int workers = static_cast<int>(p.get_int("workers", 0));

    AnnulusSpec ann(n / 2, n);
    struct Acc {
        std::unique_ptr<AnnulusFlowNetwork> net;
        std::vector<long long> hist;
    };
    Acc total = parallel_accumulate(
        samples, workers,
        [&] {
            Acc a;
            a.net = std::make_unique<AnnulusFlowNetwork>(ann);
            return a;
        },
        [&](Acc& acc, long long i) {
            std::uint64_t si = derive_seed(seed, static_cast<std::uint64_t>(i));
            int v = acc.net->solve(
                [&](const EdgeId& e) { return edge_weight(si, e) < pr; });
            if (acc.hist.size() <= static_cast<std::size_t>(v)) acc.hist.resize(v + 1, 0);
            ++acc.hist[v];
        },
        [](Acc& into, Acc& from) {
            if (into.hist.size() < from.hist.size()) into.hist.resize(from.hist.size(), 0);
            for (std::size_t k = 0; k < from.hist.size(); ++k) into.hist[k] += from.hist[k];
        });

    std::ofstream csv(run.dir / "n_histogram.csv");
    csv << "n,p,value,count,samples,seed\n";
    for (std::size_t k = 0; k < total.hist.size(); ++k)
        csv << n << "," << fmt(pr) << "," << k << "," << total.hist[k] << "," << samples
            << "," << seed << "\n";
    std::ofstream dat(run.dir / "plot_n_histogram.dat");
    dat << "# value count\n";
    for (std::size_t k = 0; k < total.hist.size(); ++k)
        dat << k << " " << total.hist[k] << "\n";

    json s;
    s["n"] = n;
    s["p"] = pr;
    s["samples"] = samples;
    s["seed"] = seed;
    json tail = json::array();
    long long above = samples;
    for (std::size_t k = 0; k < total.hist.size(); ++k) {
        above -= total.hist[k];
        tail.push_back({{"k", k}, {"p_n_greater", static_cast<double>(above) / samples}});
    }
    s["tail"] = tail;
    run.write_summary(s);
    return 0;
}

int cmd_arms(RunDir& run, Params p) {
    int n = static_cast<int>(p.require_int("n"));
    std::vector<int> s_grid = p.get_ints("s", {2, 4, 8, 16});
    double pp = p.get_double("p", 0.5);
    double q = p.get_double("q", 0.5);
    long long samples = p.get_int("samples", 1000);
    std::uint64_t seed = p.get_int("seed", 1);
    int workers = static_cast<int>(p.get_int("workers", 0));
    std::string budget_kind = p.get("budget", "none");
    int budget_value = static_cast<int>(p.get_int("budget_value", 0));

    DefectBudget budget = DefectBudget::none();
    if (budget_kind == "per_arm")
        budget = DefectBudget::per_arm(budget_value);
    else if (budget_kind == "total")
        budget = DefectBudget::total(budget_value);
    else if (budget_kind != "none")
        throw ConfigError("budget must be none, per_arm, or total");

    std::ofstream csv(run.dir / "arm_probability.csv");
    csv << "p,q,s,n,budget,budget_value,estimate,stderr,samples,seed\n";
    std::ofstream dat(run.dir / "plot_arms_loglog.dat");
    dat << "# log(s/n) log(estimate) stderr\n";
    json rows = json::array();
    for (int s : s_grid) {
        ArmEventSpec spec;
        spec.p_open = pp;
        spec.q_closed = q;
        spec.inner = s;
        spec.outer = n;
        spec.budget = budget;
        EstimateWithCI est = estimate_arm_probability(spec, samples, seed, workers);
        csv << fmt(pp) << "," << fmt(q) << "," << s << "," << n << "," << budget_kind
            << "," << budget_value << "," << fmt(est.estimate) << ","
            << fmt(est.stderr_value) << "," << samples << "," << seed << "\n";
        if (est.estimate > 0)
            dat << fmt(std::log(static_cast<double>(s) / n)) << " "
                << fmt(std::log(est.estimate)) << " " << fmt(est.stderr_value) << "\n";
        rows.push_back({{"s", s},
                        {"n", n},
                        {"estimate", est.estimate},
                        {"stderr", est.stderr_value}});
    }
    json s;
    s["rows"] = rows;
    s["samples"] = samples;
    s["seed"] = seed;
    run.write_summary(s);
    return 0;
}

int cmd_corrlen(RunDir& run, Params p) {
    double pp = p.get_double("p", 0.6);
    double delta = p.get_double("delta", 0.1);
    std::vector<int> grid = p.get_ints("n_grid", {2, 4, 8, 16, 32, 64});
    long long samples = p.get_int("samples", 2000);
    std::uint64_t seed = p.get_int("seed", 1);
    int workers = static_cast<int>(p.get_int("workers", 0));
    long long invert_n = p.get_int("invert_n", -1);

    CorrelationLengthEstimate est =
        estimate_correlation_length(pp, delta, grid, samples, seed, workers);
    std::ofstream csv(run.dir / "crossing_curve.csv");
    csv << "p,delta,n,estimate,stderr,samples,seed\n";
    for (const auto& pt : est.curve)
        csv << fmt(pp) << "," << fmt(delta) << "," << pt.n << "," << fmt(pt.estimate)
            << "," << fmt(pt.stderr_value) << "," << samples << "," << seed << "\n";

    json s;
    s["p"] = pp;
    s["delta"] = delta;
    s["samples"] = samples;
    s["seed"] = seed;
    if (est.length)
        s["correlation_length"] = *est.length;
    else
        s["correlation_length"] = nullptr;
    if (invert_n > 0) {
        double tol = p.get_double("tol", 0.01);
        s["p_n"] = estimate_p_n(static_cast<int>(invert_n), delta, samples, seed, tol,
                                workers);
        s["p_n_scale"] = invert_n;
    }
    run.write_summary(s);
    return 0;
}

int cmd_splice(RunDir& run, Params p) {
    std::vector<int> n_grid = p.get_ints("n", {});
    if (n_grid.empty()) throw ConfigError("missing required field: n");
    std::vector<double> eps_grid = p.get_doubles("epsilon", {0.25, 0.125});
    std::string mode_str = p.get("mode", "threshold");
    long long samples = p.get_int("samples", 1000);
    std::uint64_t seed = p.get_int("seed", 1);
    int workers = static_cast<int>(p.get_int("workers", 0));
    int lambda = static_cast<int>(p.get_int("lambda", 4));
    int m_cap = static_cast<int>(p.get_int("m_cap", 8));
    long long inner = p.get_int("inner_samples", 0);
    long long outer = p.get_int("outer_samples", 0);
    long long m_target = p.get_int("m_target", -1);
    std::vector<double> deltas = p.get_doubles("delta", {0.1, 0.2});

    std::vector<DeriveMode> modes;
    if (mode_str == "both")
        modes = {DeriveMode::ThresholdCritical, DeriveMode::Invasion};
    else
        modes = {parse_mode(mode_str)};

    std::ofstream csv(run.dir / "mismatch.csv");
    csv << "n,epsilon,mode,estimate,stderr,samples,seed\n";
    std::ofstream hist_csv(run.dir / "n_histogram.csv");
    hist_csv << "n,epsilon,mode,value,count\n";
    std::ofstream dat(run.dir / "plot_mismatch.dat");
    dat << "# epsilon estimate stderr (blocks per n,mode)\n";
    json cells = json::array();
    for (DeriveMode mode : modes) {
        for (int n : n_grid) {
            dat << "# n=" << n << " mode=" << mode_name(mode) << "\n";
            for (double eps : eps_grid) {
                MismatchEstimate est =
                    estimate_mismatch(n, eps, m_cap, samples, seed, mode, lambda, workers);
                csv << n << "," << fmt(eps) << "," << mode_name(mode) << ","
                    << fmt(est.mismatch.estimate) << "," << fmt(est.mismatch.stderr_value)
                    << "," << samples << "," << seed << "\n";
                for (std::size_t k = 0; k < est.histogram.size(); ++k)
                    hist_csv << n << "," << fmt(eps) << "," << mode_name(mode) << "," << k
                             << "," << est.histogram[k] << "\n";
                dat << fmt(eps) << " " << fmt(est.mismatch.estimate) << " "
                    << fmt(est.mismatch.stderr_value) << "\n";
                json cell;
                cell["n"] = n;
                cell["epsilon"] = eps;
                cell["mode"] = mode_name(mode);
                cell["mismatch"] = est.mismatch.estimate;
                cell["stderr"] = est.mismatch.stderr_value;
                cell["outside_discrepancy_rate"] = est.outside_discrepancy_rate;
                json eq = json::array(), ge = json::array();
                for (int m = 0; m <= m_cap; ++m) {
                    eq.push_back(est.eq_diff[m].estimate);
                    ge.push_back(est.ge_diff[m].estimate);
                }
                cell["boxtimes_eq_diff"] = eq;
                cell["boxtimes_ge_diff"] = ge;
                cells.push_back(cell);
            }
            dat << "\n\n";
        }
    }

    json s;
    s["cells"] = cells;
    s["samples"] = samples;
    s["seed"] = seed;

    if (inner > 0 && outer > 0) {
        json var_cells = json::array();
        for (DeriveMode mode : modes) {
            for (int n : n_grid) {
                for (double eps : eps_grid) {
                    int m = static_cast<int>(m_target);
                    if (m < 0) {
                        // mode of a pilot histogram picks the target level
                        MismatchEstimate pilot = estimate_mismatch(
                            n, eps, m_cap, std::min<long long>(samples, 200), seed + 1,
                            mode, lambda, workers);
                        m = static_cast<int>(std::max_element(pilot.histogram.begin(),
                                                              pilot.histogram.end()) -
                                             pilot.histogram.begin());
                    }
                    ConditionalVarianceReport rep = estimate_conditional_variance(
                        n, eps, m, outer, inner, deltas, seed, mode, lambda, workers);
                    json jc;
                    jc["n"] = n;
                    jc["epsilon"] = eps;
                    jc["mode"] = mode_name(mode);
                    jc["m_target"] = m;
                    jc["mean_pq"] = rep.mean_pq;
                    jc["mean_pq_stderr"] = rep.mean_pq_stderr;
                    json per_delta = json::array();
                    bool all_ok = true;
                    for (const auto& c : rep.cells) {
                        per_delta.push_back({{"delta", c.delta},
                                             {"interior_prob", c.interior_prob},
                                             {"markov_bound", c.markov_bound},
                                             {"markov_ok", c.markov_ok}});
                        all_ok = all_ok && c.markov_ok;
                    }
                    jc["cells"] = per_delta;
                    jc["markov_ok"] = all_ok;
                    var_cells.push_back(jc);
                }
            }
        }
        s["conditional_variance"] = var_cells;
    }
    run.write_summary(s);
    return 0;
}

// Fast oracle-backed checks, one line each; exit 2 on any failure.
int cmd_verify(RunDir& run, Params p) {
    std::uint64_t seed = p.get_int("seed", 1);
    bool all_ok = true;
    json checks = json::array();
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name
                  << (detail.empty() ? "" : "  (" + detail + ")") << "\n";
        checks.push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
        all_ok = all_ok && ok;
    };

    {
        bool ok = true;
        int bad = 0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            for (const AnnulusSpec& ann : {AnnulusSpec(1, 2), AnnulusSpec(2, 4)}) {
                Configuration cfg(EdgeRegion::from_edges(annulus_edges(ann)));
                for (const EdgeId& e : annulus_edges(ann))
                    if (edge_weight(derive_seed(seed, i), e) < 0.5) cfg.set_open(e, true);
                int flow = count_disjoint_crossings(cfg, ann).value;
                if (flow != min_defect_circuit(cfg, ann).defect_count ||
                    flow != brute_force_crossings(cfg, ann)) {
                    ok = false;
                    ++bad;
                }
            }
        }
        report("max-flow equals dual min-defect equals brute force", ok,
               ok ? "200 configurations" : std::to_string(bad) + " mismatches");
    }
    {
        bool ok = true;
        AnnulusSpec ann(1, 2);
        for (std::uint64_t i = 0; i < 60 && ok; ++i) {
            Configuration cfg(EdgeRegion::from_edges(annulus_edges(ann)));
            for (const EdgeId& e : annulus_edges(ann))
                if (edge_weight(derive_seed(seed ^ 0xabc, i), e) < 0.5)
                    cfg.set_open(e, true);
            int base = count_disjoint_crossings(cfg, ann).value;
            for (const EdgeId& e : annulus_edges(ann)) {
                Configuration flip = cfg;
                flip.set_open(e, !cfg.is_open(e));
                int other = count_disjoint_crossings(flip, ann).value;
                if (other == base) continue;
                if (std::abs(other - base) != 1 ||
                    !circuit_through_edge(cfg, ann, e, std::max(base, other)))
                    ok = false;
            }
        }
        report("pivotal edges admit a constrained dual circuit within budget", ok, "");
    }
    {
        EstimateWithCI est = estimate_rectangle_crossing(8, 0.5, 20000, seed);
        bool ok = std::abs(est.estimate - 0.5) < 4 * est.stderr_value;
        report("self-dual rectangle crossing sits at 1/2", ok,
               "estimate " + fmt(est.estimate));
    }
    {
        ConditionalVarianceReport rep = estimate_conditional_variance(
            16, 0.25, 1, 60, 8, {0.1, 0.2}, seed, DeriveMode::ThresholdCritical, 4, 0);
        bool ok = true;
        for (const auto& c : rep.cells) ok = ok && c.markov_ok;
        report("Markov bound on the conditional variance", ok, "");
    }
    {
        WeightField wf(EdgeRegion::box(130), seed);
        InvasionResult res = invade(wf, StopRule{20000, 129});
        double tail = invaded_weight_tail(res, 0.1);
        bool ok = tail > 0.45 && tail < 0.65;
        report("invaded weights concentrate near 1/2", ok, "tail max " + fmt(tail));
    }

    json s;
    s["checks"] = checks;
    s["ok"] = all_ok;
    run.write_summary(s);
    return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invasion percolation splicing experiments"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "config file (key = value or JSON)");
    app.add_option("--out", out_dir, "output directory (or IPSIM_OUT)");
    app.add_option("--set", overrides, "override config entries as key=value");

    std::map<std::string, int (*)(RunDir&, Params)> handlers = {
        {"invade", cmd_invade},     {"crossings", cmd_crossings},
        {"arms", cmd_arms},         {"corrlen", cmd_corrlen},
        {"splice", cmd_splice},     {"verify", cmd_verify},
    };
    for (auto& [name, fn] : handlers) {
        (void)fn;
        app.add_subcommand(name);
    }

    CLI11_PARSE(app, argc, argv);
    std::string sub = app.get_subcommands()[0]->get_name();

    try {
        RunDir run;
        if (!config_path.empty())
            run.config = parse_config_file(config_path, run.snapshot);
        for (const std::string& kv : overrides) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            run.config[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        run.open(sub, out_dir);
        return handlers[sub](run, Params{&run.config});
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
