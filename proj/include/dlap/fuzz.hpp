#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dlap/digraph.hpp"
#include "dlap/report.hpp"

namespace dlap {

struct RandomDigraphOptions {
    std::size_t n_min = 1;
    std::size_t n_max = 8;
    /// Arc probability is drawn from [0, min(1, mean_out_degree / (n - 1))].
    /// Empty means [0, 1]. Bounding it keeps forest enumeration tractable.
    std::optional<double> mean_out_degree = 3.0;
    /// Unit weights when false, otherwise uniform on (0, 10].
    bool weighted = true;
};

inline Digraph random_digraph(std::mt19937_64 &rng, const RandomDigraphOptions &opt) {
    std::uniform_int_distribution<std::size_t> size(opt.n_min, std::max(opt.n_min, opt.n_max));
    const std::size_t n = size(rng);
    double p_max = 1.0;
    if (opt.mean_out_degree && n > 1) {
        p_max = std::min(1.0, *opt.mean_out_degree / static_cast<double>(n - 1));
    }
    const double p = std::uniform_real_distribution<double>(0.0, p_max)(rng);
    std::bernoulli_distribution keep(p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Arc> arcs;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = 0; j < n; ++j) {
            if (i != j && keep(rng)) {
                arcs.push_back({i, j, opt.weighted ? 10.0 * (1.0 - unit(rng)) : 1.0});
            }
        }
    }
    return Digraph(n, std::move(arcs));
}

/// Every digraph on n labelled vertices with unit weights (2^(n(n-1)) graphs).
inline std::vector<Digraph> all_digraphs(std::size_t n) {
    std::vector<std::pair<Vertex, Vertex>> slots;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = 0; j < n; ++j) {
            if (i != j) {
                slots.emplace_back(i, j);
            }
        }
    }
    std::vector<Digraph> out;
    const std::uint64_t total = std::uint64_t{1} << slots.size();
    out.reserve(total);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<Arc> arcs;
        for (std::size_t b = 0; b < slots.size(); ++b) {
            if (mask >> b & 1U) {
                arcs.push_back({slots[b].first, slots[b].second, 1.0});
            }
        }
        out.emplace_back(n, std::move(arcs));
    }
    return out;
}

struct FuzzOptions {
    std::size_t count = 1000;
    std::size_t n_max = 8;
    std::uint64_t seed = 42;
    bool weighted = true;
    /// Also sweep every unit-weight digraph on 1..n_max vertices.
    bool exhaustive = false;
    std::size_t threads = 0;
    AnalysisOptions analysis;
};

struct FuzzFailure {
    std::size_t instance = 0;
    std::string graph;
    std::vector<CheckResult> failed;
};

struct FuzzSummary {
    std::size_t instances = 0;
    /// check name -> (passed, run)
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
    std::vector<FuzzFailure> failures;

    bool ok() const { return failures.empty(); }
};

/// The instance list of a fuzz run: the exhaustive sweep (if requested)
/// followed by `count` random graphs, in a fixed order for a given seed.
inline std::vector<Digraph> fuzz_instances(const FuzzOptions &opt) {
    std::vector<Digraph> graphs;
    if (opt.exhaustive) {
        for (std::size_t n = 1; n <= opt.n_max; ++n) {
            auto all = all_digraphs(n);
            graphs.insert(graphs.end(), std::make_move_iterator(all.begin()), std::make_move_iterator(all.end()));
        }
    }
    std::mt19937_64 rng(opt.seed);
    RandomDigraphOptions gen;
    gen.n_max = opt.n_max;
    gen.weighted = opt.weighted;
    for (std::size_t k = 0; k < opt.count; ++k) {
        graphs.push_back(random_digraph(rng, gen));
    }
    return graphs;
}

/**
 * Runs analyze() over every instance. Work is split across threads, but the
 * summary (tally, failure order) depends only on the options.
 */
inline FuzzSummary run_fuzz(const FuzzOptions &opt) {
    const auto graphs = fuzz_instances(opt);
    std::vector<AnalysisReport> reports(graphs.size());

    std::size_t workers = opt.threads ? opt.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min<std::size_t>(workers, std::max<std::size_t>(1, graphs.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < graphs.size(); i += workers) {
                reports[i] = analyze(graphs[i], opt.analysis);
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }

    FuzzSummary s;
    s.instances = graphs.size();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        FuzzFailure failure{i, {}, {}};
        for (const auto &c : reports[i].checks) {
            auto &[passed, run] = s.tally[c.name];
            ++run;
            if (c.pass) {
                ++passed;
            } else {
                failure.failed.push_back(c);
            }
        }
        if (!failure.failed.empty()) {
            failure.graph = serialize(graphs[i]);
            s.failures.push_back(std::move(failure));
        }
    }
    return s;
}

}    // namespace dlap
