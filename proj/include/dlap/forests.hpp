#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlap/digraph.hpp"

namespace dlap {

inline constexpr std::size_t kEnumerationLimit = 12;

/// A spanning converging forest: each vertex keeps at most one out-arc and
/// the kept arcs form no cycle.
struct InForest {
    std::vector<std::optional<Vertex>> parent;
    double weight = 1.0;
    std::size_t arc_count = 0;

    std::vector<Vertex> roots() const {
        std::vector<Vertex> r;
        for (Vertex v = 0; v < parent.size(); ++v) {
            if (!parent[v]) {
                r.push_back(v);
            }
        }
        return r;
    }

    /// Root of the tree containing v.
    Vertex root_of(Vertex v) const {
        while (parent[v]) {
            v = *parent[v];
        }
        return v;
    }

    /// Kept arcs as (tail, head) pairs in tail order.
    std::vector<std::pair<Vertex, Vertex>> arc_list() const {
        std::vector<std::pair<Vertex, Vertex>> a;
        for (Vertex v = 0; v < parent.size(); ++v) {
            if (parent[v]) {
                a.emplace_back(v, *parent[v]);
            }
        }
        return a;
    }
};

struct ForestFamily {
    Digraph host;
    std::size_t max_arc_count = 0;
    std::vector<InForest> maximal_forests;
    double total_weight = 0.0;
    std::size_t d = 0;
};

class EnumerationLimitError : public std::length_error {
public:
    explicit EnumerationLimitError(std::size_t n)
        : std::length_error("forest enumeration limited to " + std::to_string(kEnumerationLimit) +
                            " vertices, graph has " + std::to_string(n)) {}
};

namespace detail {

class ForestSearch {
public:
    explicit ForestSearch(const Digraph &g) : g_(g), n_(g.size()), parent_(n_, none()) {
        out_.resize(n_);
        for (Vertex v = 0; v < n_; ++v) {
            out_[v] = g.out_arcs(v);
        }
        // capacity_[v]: vertices >= v that could still contribute an arc
        capacity_.assign(n_ + 1, 0);
        for (Vertex v = n_; v-- > 0;) {
            capacity_[v] = capacity_[v + 1] + (out_[v].empty() ? 0 : 1);
        }
    }

    void run() { visit(0, 0, 1.0); }

    std::size_t best() const { return best_; }
    std::vector<InForest> take() { return std::move(found_); }

private:
    static constexpr Vertex none() { return static_cast<Vertex>(-1); }

    bool closes_cycle(Vertex v, Vertex head) const {
        Vertex w = head;
        while (true) {
            if (w == v) {
                return true;
            }
            if (w > v || parent_[w] == none()) {
                return false;
            }
            w = parent_[w];
        }
    }

    void visit(Vertex v, std::size_t arcs, double weight) {
        if (found_.size() > 0 && arcs + capacity_[v] < best_) {
            return;
        }
        if (v == n_) {
            record(arcs, weight);
            return;
        }
        for (const Arc &a : out_[v]) {
            if (closes_cycle(v, a.head)) {
                continue;
            }
            parent_[v] = a.head;
            visit(v + 1, arcs + 1, weight * a.weight);
            parent_[v] = none();
        }
        visit(v + 1, arcs, weight);
    }

    void record(std::size_t arcs, double weight) {
        if (found_.empty() || arcs > best_) {
            found_.clear();
            best_ = arcs;
        } else if (arcs < best_) {
            return;
        }
        InForest f;
        f.parent.resize(n_);
        for (Vertex v = 0; v < n_; ++v) {
            if (parent_[v] != none()) {
                f.parent[v] = parent_[v];
            }
        }
        f.weight = weight;
        f.arc_count = arcs;
        found_.push_back(std::move(f));
    }

    const Digraph &g_;
    std::size_t n_;
    std::vector<std::vector<Arc>> out_;
    std::vector<std::size_t> capacity_;
    std::vector<Vertex> parent_;
    std::vector<InForest> found_;
    std::size_t best_ = 0;
};

}    // namespace detail

/**
 * Enumerates every spanning converging forest of maximum arc count.
 *
 * Each vertex in turn picks one of its out-arcs or none; a pick that closes
 * a cycle is rejected, and a branch is cut once it can no longer reach the
 * best arc count seen so far. Forests come back sorted by their arc lists.
 * Throws EnumerationLimitError when g has more than `limit` vertices.
 */
inline ForestFamily enumerate_maximal_in_forests(const Digraph &g, std::size_t limit = kEnumerationLimit) {
    if (g.size() > limit) {
        throw EnumerationLimitError(g.size());
    }
    detail::ForestSearch search(g);
    search.run();

    ForestFamily family{g, search.best(), search.take(), 0.0, 0};
    std::sort(family.maximal_forests.begin(), family.maximal_forests.end(),
              [](const InForest &x, const InForest &y) { return x.arc_list() < y.arc_list(); });
    for (const InForest &f : family.maximal_forests) {
        family.total_weight += f.weight;
    }
    family.d = g.size() - family.max_arc_count;
    return family;
}

/// J(i, j) = weight share of the maximal in-forests in which i lies in the
/// tree rooted at j.
inline Matrix forest_matrix(const ForestFamily &f) {
    const auto n = static_cast<Eigen::Index>(f.host.size());
    Matrix j = Matrix::Zero(n, n);
    for (const InForest &forest : f.maximal_forests) {
        for (Vertex v = 0; v < forest.parent.size(); ++v) {
            j(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(forest.root_of(v))) += forest.weight;
        }
    }
    return j / f.total_weight;
}

}    // namespace dlap
