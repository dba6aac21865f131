#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "invperc/rng.hpp"

// Monte Carlo plumbing: estimates with confidence info and deterministic
// replicate-parallel loops. Samples are partitioned into fixed chunks and each
// replicate derives its own seed, so results are identical at any worker count.

namespace invperc {

struct EstimateWithCI {
    double estimate = 0.0;
    double stderr_value = 0.0;
    long long samples = 0;
    std::uint64_t seed = 0;
    std::string method = "wilson";
};

// Half-width of the z=1 Wilson interval; positive even at 0 or m successes.
inline double wilson_stderr(long long successes, long long samples, double z = 1.0) {
    if (samples <= 0) return 0.0;
    double m = static_cast<double>(samples);
    double s = static_cast<double>(successes);
    return (z / (m + z * z)) * std::sqrt(s * (m - s) / m + z * z / 4.0);
}

inline EstimateWithCI frequency_estimate(long long successes, long long samples,
                                         std::uint64_t seed) {
    EstimateWithCI e;
    e.estimate = samples > 0 ? static_cast<double>(successes) / samples : 0.0;
    e.stderr_value = wilson_stderr(successes, samples);
    e.samples = samples;
    e.seed = seed;
    return e;
}

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// f(i) -> bool for i in [0, samples); returns the success count. The result
// does not depend on the worker count.
template <class Fn>
long long parallel_success_count(long long samples, int workers, Fn&& f) {
    workers = resolve_workers(workers);
    if (workers <= 1 || samples < 2 * workers) {
        long long hits = 0;
        for (long long i = 0; i < samples; ++i)
            if (f(i)) ++hits;
        return hits;
    }
    std::vector<long long> partial(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            long long lo = samples * t / workers;
            long long hi = samples * (t + 1) / workers;
            long long hits = 0;
            for (long long i = lo; i < hi; ++i)
                if (f(i)) ++hits;
            partial[t] = hits;
        });
    }
    for (auto& th : pool) th.join();
    long long total = 0;
    for (long long p : partial) total += p;
    return total;
}

// Like parallel_success_count but each worker owns an accumulator created by
// `make_acc` and results are merged in worker-index order via `merge`.
template <class MakeAcc, class Fn, class Merge>
auto parallel_accumulate(long long samples, int workers, MakeAcc&& make_acc, Fn&& f,
                         Merge&& merge) {
    workers = resolve_workers(workers);
    using Acc = decltype(make_acc());
    if (workers <= 1 || samples < 2 * workers) {
        Acc acc = make_acc();
        for (long long i = 0; i < samples; ++i) f(acc, i);
        return acc;
    }
    std::vector<Acc> partial;
    partial.reserve(workers);
    for (int t = 0; t < workers; ++t) partial.push_back(make_acc());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            long long lo = samples * t / workers;
            long long hi = samples * (t + 1) / workers;
            for (long long i = lo; i < hi; ++i) f(partial[t], i);
        });
    }
    for (auto& th : pool) th.join();
    Acc total = make_acc();
    for (Acc& p : partial) merge(total, p);
    return total;
}

}  // namespace invperc
