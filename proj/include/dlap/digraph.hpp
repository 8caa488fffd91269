#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dlap {

using Vertex = std::size_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double max_abs_diff(const Matrix &a, const Matrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Arc tail -> head with weight w, i.e. a_{tail,head} = w: agent `tail`
/// observes agent `head`.
struct Arc {
    Vertex tail;
    Vertex head;
    double weight;

    friend bool operator==(const Arc &, const Arc &) = default;
};

/**
 * Immutable weighted digraph on vertices 0..n-1.
 *
 * Arcs are stored sorted by (tail, head). Construction rejects self-loops,
 * duplicate ordered pairs, out-of-range endpoints and weights that are not
 * strictly positive and finite.
 */
class Digraph {
public:
    Digraph(std::size_t n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {
        if (n_ == 0) {
            throw std::invalid_argument("digraph must have at least one vertex");
        }
        for (const Arc &a : arcs_) {
            if (a.tail >= n_ || a.head >= n_) {
                throw std::invalid_argument("arc endpoint out of range: " + std::to_string(a.tail) + " " +
                                            std::to_string(a.head));
            }
            if (a.tail == a.head) {
                throw std::invalid_argument("self-loop at vertex " + std::to_string(a.tail));
            }
            if (!std::isfinite(a.weight) || a.weight <= 0.0) {
                throw std::invalid_argument("arc weight must be positive and finite");
            }
        }
        std::sort(arcs_.begin(), arcs_.end(),
                  [](const Arc &x, const Arc &y) { return std::pair(x.tail, x.head) < std::pair(y.tail, y.head); });
        auto dup = std::adjacent_find(arcs_.begin(), arcs_.end(), [](const Arc &x, const Arc &y) {
            return x.tail == y.tail && x.head == y.head;
        });
        if (dup != arcs_.end()) {
            throw std::invalid_argument("duplicate arc " + std::to_string(dup->tail) + " " + std::to_string(dup->head));
        }
        first_out_.assign(n_ + 1, 0);
        for (const Arc &a : arcs_) {
            ++first_out_[a.tail + 1];
        }
        for (std::size_t v = 0; v < n_; ++v) {
            first_out_[v + 1] += first_out_[v];
        }
    }

    /// Graph with n vertices and no arcs.
    static Digraph empty(std::size_t n) { return Digraph(n, {}); }

    std::size_t size() const noexcept { return n_; }
    std::size_t arc_count() const noexcept { return arcs_.size(); }
    const std::vector<Arc> &arcs() const noexcept { return arcs_; }

    /// Out-arcs of v, sorted by head. This is N_v together with the weights.
    std::vector<Arc> out_arcs(Vertex v) const {
        return {arcs_.begin() + static_cast<std::ptrdiff_t>(first_out_[v]),
                arcs_.begin() + static_cast<std::ptrdiff_t>(first_out_[v + 1])};
    }

    std::size_t out_degree(Vertex v) const { return first_out_[v + 1] - first_out_[v]; }

    Matrix adjacency() const {
        Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (const Arc &arc : arcs_) {
            a(static_cast<Eigen::Index>(arc.tail), static_cast<Eigen::Index>(arc.head)) = arc.weight;
        }
        return a;
    }

    friend bool operator==(const Digraph &x, const Digraph &y) { return x.n_ == y.n_ && x.arcs_ == y.arcs_; }

private:
    std::size_t n_;
    std::vector<Arc> arcs_;
    std::vector<std::size_t> first_out_;
};

/// L = D - A with D the diagonal of weighted out-degrees. Rows sum to zero.
class LaplacianMatrix {
public:
    explicit LaplacianMatrix(const Digraph &g)
        : m_(Matrix::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()))) {
        for (const Arc &arc : g.arcs()) {
            const auto i = static_cast<Eigen::Index>(arc.tail);
            const auto j = static_cast<Eigen::Index>(arc.head);
            m_(i, j) = -arc.weight;
            m_(i, i) += arc.weight;
        }
    }

    const Matrix &matrix() const noexcept { return m_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    /// max_i l_ii, the largest weighted out-degree.
    double max_degree() const { return m_.rows() == 0 ? 0.0 : m_.diagonal().maxCoeff(); }

private:
    Matrix m_;
};

inline LaplacianMatrix laplacian(const Digraph &g) { return LaplacianMatrix(g); }

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T &out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const char *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}    // namespace detail

/**
 * Parses the edge-list format:
 *
 *     # comment
 *     n m
 *     i j [w]      (m lines, 0-based ids, weight defaults to 1.0)
 *
 * Blank lines and lines starting with '#' are skipped; CRLF is accepted.
 * Every error carries the 1-based line number it was detected on.
 */
inline Digraph parse_edge_list(std::istream &in) {
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<Arc> arcs;
    std::set<std::pair<Vertex, Vertex>> seen;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        auto fields = detail::split_fields(line);
        if (fields.empty() || fields.front().front() == '#') {
            continue;
        }
        if (!have_header) {
            if (fields.size() != 2 || !detail::parse_number(fields[0], n) || !detail::parse_number(fields[1], m)) {
                throw ParseError(line_no, "expected header \"n m\"");
            }
            if (n == 0) {
                throw ParseError(line_no, "vertex count must be positive");
            }
            have_header = true;
            continue;
        }
        if (arcs.size() == m) {
            throw ParseError(line_no, "more arc lines than the declared " + std::to_string(m));
        }
        if (fields.size() < 2 || fields.size() > 3) {
            throw ParseError(line_no, "expected \"i j\" or \"i j w\"");
        }
        Vertex i = 0;
        Vertex j = 0;
        if (!detail::parse_number(fields[0], i) || !detail::parse_number(fields[1], j)) {
            throw ParseError(line_no, "malformed vertex id");
        }
        if (i >= n || j >= n) {
            throw ParseError(line_no, "vertex index out of range (n = " + std::to_string(n) + ")");
        }
        double w = 1.0;
        if (fields.size() == 3 && !detail::parse_number(fields[2], w)) {
            throw ParseError(line_no, "malformed weight");
        }
        if (!std::isfinite(w) || w <= 0.0) {
            throw ParseError(line_no, "weight must be positive and finite");
        }
        if (i == j) {
            throw ParseError(line_no, "self-loop at vertex " + std::to_string(i));
        }
        if (!seen.emplace(i, j).second) {
            throw ParseError(line_no, "duplicate arc " + std::to_string(i) + " " + std::to_string(j));
        }
        arcs.push_back({i, j, w});
    }
    if (!have_header) {
        throw ParseError(line_no, "missing header \"n m\"");
    }
    if (arcs.size() != m) {
        throw ParseError(line_no, "expected " + std::to_string(m) + " arcs, found " + std::to_string(arcs.size()));
    }
    return Digraph(n, std::move(arcs));
}

inline Digraph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_edge_list(in);
}

/// Writes g in the edge-list format. Weights use 17 significant digits so
/// parsing the output reproduces every weight exactly.
inline std::string serialize(const Digraph &g) {
    std::string out = std::to_string(g.size()) + " " + std::to_string(g.arc_count()) + "\n";
    char buf[64];
    for (const Arc &a : g.arcs()) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", a.tail, a.head, a.weight);
        out += buf;
    }
    return out;
}

}    // namespace dlap
