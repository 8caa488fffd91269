#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "dlap/digraph.hpp"

namespace dlap {

/**
 * Strong and weak connectivity of a digraph.
 *
 * Strong components are numbered in increasing order of their smallest
 * vertex, so the decomposition is canonical for a given graph. The
 * condensation lists, for each strong component, the sorted set of
 * components it has arcs into.
 */
struct ComponentDecomposition {
    std::vector<std::size_t> scc_id;
    std::vector<std::vector<Vertex>> scc_members;
    std::vector<std::vector<std::size_t>> condensation;
    std::vector<bool> sink_flags;
    std::size_t scc_count = 0;
    std::size_t wcc_count = 0;
    std::size_t sink_count = 0;

    std::size_t vertex_count() const noexcept { return scc_id.size(); }
};

namespace detail {

// Iterative Tarjan; returns per-vertex component labels in discovery order.
inline std::vector<std::size_t> tarjan_labels(const Digraph &g, std::size_t &count) {
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = g.size();
    std::vector<std::size_t> index(n, unvisited);
    std::vector<std::size_t> low(n, unvisited);
    std::vector<std::size_t> label(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<Vertex> stack;
    std::size_t next_index = 0;
    count = 0;

    std::vector<std::vector<Arc>> out(n);
    for (Vertex v = 0; v < n; ++v) {
        out[v] = g.out_arcs(v);
    }

    // frame: vertex, position in its out-arc list
    std::vector<std::pair<Vertex, std::size_t>> frames;
    for (Vertex root = 0; root < n; ++root) {
        if (index[root] != unvisited) {
            continue;
        }
        frames.emplace_back(root, 0);
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            auto &[v, pos] = frames.back();
            if (pos < out[v].size()) {
                const Vertex w = out[v][pos++].head;
                if (index[w] == unvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const Vertex done = v;
            if (low[done] == index[done]) {
                Vertex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    label[w] = count;
                } while (w != done);
                ++count;
            }
            frames.pop_back();
            if (!frames.empty()) {
                const Vertex parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return label;
}

inline std::size_t find_root(std::vector<std::size_t> &parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}    // namespace detail

inline ComponentDecomposition decompose(const Digraph &g) {
    const std::size_t n = g.size();
    ComponentDecomposition d;

    std::size_t count = 0;
    const auto raw = detail::tarjan_labels(g, count);

    // Relabel by smallest member vertex.
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> relabel(count, unset);
    std::size_t next = 0;
    d.scc_id.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        if (relabel[raw[v]] == unset) {
            relabel[raw[v]] = next++;
        }
        d.scc_id[v] = relabel[raw[v]];
    }
    d.scc_count = count;
    d.scc_members.assign(count, {});
    for (Vertex v = 0; v < n; ++v) {
        d.scc_members[d.scc_id[v]].push_back(v);
    }

    d.condensation.assign(count, {});
    for (const Arc &a : g.arcs()) {
        const auto from = d.scc_id[a.tail];
        const auto to = d.scc_id[a.head];
        if (from != to) {
            d.condensation[from].push_back(to);
        }
    }
    d.sink_flags.assign(count, false);
    for (std::size_t k = 0; k < count; ++k) {
        auto &succ = d.condensation[k];
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        d.sink_flags[k] = succ.empty();
    }
    d.sink_count = static_cast<std::size_t>(std::count(d.sink_flags.begin(), d.sink_flags.end(), true));

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    d.wcc_count = n;
    for (const Arc &a : g.arcs()) {
        const auto x = detail::find_root(parent, a.tail);
        const auto y = detail::find_root(parent, a.head);
        if (x != y) {
            parent[std::max(x, y)] = std::min(x, y);
            --d.wcc_count;
        }
    }
    return d;
}

/// In-forest dimension from the structure theorem: the number of sink
/// strong components.
inline std::size_t forest_dimension_structural(const ComponentDecomposition &d) { return d.sink_count; }

/**
 * True iff some vertex is reachable from every vertex, i.e. a converging
 * tree spans g. Such a root always lies in a sink component, so only one
 * representative of each sink component is tried.
 */
inline bool has_spanning_converging_tree(const Digraph &g, const ComponentDecomposition &d) {
    const std::size_t n = g.size();
    std::vector<std::vector<Vertex>> in(n);
    for (const Arc &a : g.arcs()) {
        in[a.head].push_back(a.tail);
    }
    for (std::size_t k = 0; k < d.scc_count; ++k) {
        if (!d.sink_flags[k]) {
            continue;
        }
        std::vector<bool> seen(n, false);
        std::vector<Vertex> todo{d.scc_members[k].front()};
        seen[todo.front()] = true;
        std::size_t reached = 1;
        while (!todo.empty()) {
            const Vertex v = todo.back();
            todo.pop_back();
            for (Vertex u : in[v]) {
                if (!seen[u]) {
                    seen[u] = true;
                    ++reached;
                    todo.push_back(u);
                }
            }
        }
        if (reached == n) {
            return true;
        }
    }
    return false;
}

}    // namespace dlap
