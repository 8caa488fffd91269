#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlap/components.hpp"
#include "dlap/digraph.hpp"
#include "dlap/dynamics.hpp"
#include "dlap/forests.hpp"
#include "dlap/spectral.hpp"

namespace dlap {

/// Tolerances of the cross-checks run by analyze().
struct CheckTolerances {
    double power_vs_forest = 1e-8;
    double cesaro_vs_forest = 1e-4;
    double resolvent_vs_forest = 1e-6;
    double projector_algebra = 1e-10;
    double row_sum = 1e-12;
    double primitive_limit = 1e-8;
    /// Singular-value threshold for the rank of a projector route. The
    /// nonzero singular values of a projector are at least 1.
    double projector_rank = 1e-3;
};

struct AnalysisOptions {
    double tau = kDefaultTau;
    std::optional<double> epsilon;
    std::optional<double> tolerance;
    std::size_t enumeration_limit = kEnumerationLimit;
    /// Forest enumeration is skipped when prod_v (outdeg(v) + 1) exceeds this.
    double max_search_space = 1e8;
    CheckTolerances checks;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double discrepancy = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct ProjectorRoutes {
    std::optional<Matrix> forest;
    std::optional<Matrix> resolvent;
    std::optional<Matrix> long_run;
    std::optional<LongRunMode> long_run_mode;
    double max_discrepancy = 0.0;
};

struct PerronSummary {
    double epsilon = 0.0;
    bool stochastic = false;
    bool positive_diagonal = false;
    bool primitive = false;
    double spectral_gap = 0.0;
};

struct AnalysisReport {
    std::size_t n = 0;
    std::size_t m = 0;
    ComponentDecomposition components;
    std::size_t d_structural = 0;
    std::optional<std::size_t> d_enumerated;
    std::optional<std::size_t> maximal_forest_count;
    std::optional<double> forest_total_weight;
    bool spanning_converging_tree = false;
    SpectralReport spectrum;
    bool localization = false;
    double tau = kDefaultTau;
    ProjectorRoutes projector;
    PerronSummary perron;
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;

    std::size_t n_minus_c() const { return n - components.scc_count; }
    std::size_t n_minus_d() const { return n - d_structural; }

    bool all_pass() const {
        for (const auto &c : checks) {
            if (!c.pass) {
                return false;
            }
        }
        return true;
    }

    const CheckResult *find_check(const std::string &name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }
};

/// prod_v (outdeg(v) + 1): the number of parent assignments the forest
/// search could visit without pruning.
inline double forest_search_space(const Digraph &g) {
    double s = 1.0;
    for (Vertex v = 0; v < g.size(); ++v) {
        s *= static_cast<double>(g.out_degree(v) + 1);
    }
    return s;
}

namespace detail {

inline CheckResult make_check(std::string name, double discrepancy, double tolerance, std::string detail = {}) {
    return {std::move(name), discrepancy <= tolerance, discrepancy, tolerance, std::move(detail)};
}

inline CheckResult make_flag(std::string name, bool pass, std::string detail = {}) {
    return {std::move(name), pass, pass ? 0.0 : 1.0, 0.0, std::move(detail)};
}

}    // namespace detail

/**
 * Runs the full cross-check battery on g.
 *
 * Structure, forest dimension (structural and, when feasible, enumerative),
 * spectrum and rank law, the eigenprojector by up to three routes (forest
 * oracle, resolvent, long-run Perron limit) and the primitive limit.
 * Numerical failures inside a route are recorded as failed checks rather
 * than thrown.
 */
inline AnalysisReport analyze(const Digraph &g, const AnalysisOptions &opt = {}) {
    const auto &tol = opt.checks;
    AnalysisReport r;
    r.n = g.size();
    r.m = g.arc_count();
    r.tau = opt.tau;
    const LaplacianMatrix l(g);

    r.components = decompose(g);
    r.d_structural = forest_dimension_structural(r.components);
    r.spanning_converging_tree = has_spanning_converging_tree(g, r.components);
    const std::size_t d = r.d_structural;

    r.checks.push_back(detail::make_flag(
        "weak_strong_bounds", r.components.wcc_count <= d && d <= r.components.scc_count,
        "wcc=" + std::to_string(r.components.wcc_count) + " d=" + std::to_string(d) +
            " c=" + std::to_string(r.components.scc_count)));
    r.checks.push_back(detail::make_flag("spanning_tree_iff_d1", r.spanning_converging_tree == (d == 1)));

    std::optional<ForestFamily> family;
    if (r.n > opt.enumeration_limit) {
        r.notes.push_back("forest enumeration skipped: n exceeds " + std::to_string(opt.enumeration_limit));
    } else if (forest_search_space(g) > opt.max_search_space) {
        r.notes.push_back("forest enumeration skipped: search space too large");
    } else {
        family = enumerate_maximal_in_forests(g, opt.enumeration_limit);
        r.d_enumerated = family->d;
        r.maximal_forest_count = family->maximal_forests.size();
        r.forest_total_weight = family->total_weight;
        r.projector.forest = forest_matrix(*family);
        r.checks.push_back(detail::make_flag("forest_dimension", family->d == d,
                                             "enumerated=" + std::to_string(family->d) +
                                                 " structural=" + std::to_string(d)));
    }

    try {
        r.spectrum = spectrum(l, opt.tolerance);
        r.localization = check_spectrum_localization(r.spectrum, r.spectrum.tolerance);
        const double rank_gap = std::abs(static_cast<double>(r.spectrum.numerical_rank) - static_cast<double>(r.n - d)) +
                                std::abs(static_cast<double>(r.spectrum.zero_multiplicity) - static_cast<double>(d));
        r.checks.push_back(detail::make_check("rank_law", rank_gap, 0.0,
                                              "rank=" + std::to_string(r.spectrum.numerical_rank) +
                                                  " n-d=" + std::to_string(r.n - d) +
                                                  " zero_multiplicity=" + std::to_string(r.spectrum.zero_multiplicity)));
        r.checks.push_back(detail::make_flag("spectrum_localization", r.localization));
    } catch (const std::exception &e) {
        r.checks.push_back(detail::make_flag("spectrum", false, e.what()));
    }

    try {
        r.projector.resolvent = eigenprojector_resolvent(l, opt.tau);
    } catch (const std::exception &e) {
        r.checks.push_back(detail::make_flag("resolvent", false, e.what()));
    }

    std::optional<PerronMatrix> p;
    try {
        p.emplace(l, opt.epsilon.value_or(default_epsilon(l)));
        r.perron = {p->epsilon(), p->stochastic(), p->positive_diagonal(), p->primitive(), p->spectral_gap()};
        if (!p->stochastic()) {
            r.notes.push_back("Perron matrix is not stochastic for this epsilon; long-run route skipped");
        } else {
            const auto mode = p->positive_diagonal() ? LongRunMode::power : LongRunMode::cesaro;
            const auto cauchy = mode == LongRunMode::cesaro ? std::optional(tol.cesaro_vs_forest / 10) : std::nullopt;
            r.projector.long_run = long_run_matrix(*p, mode, cauchy).limit;
            r.projector.long_run_mode = mode;
        }
    } catch (const std::exception &e) {
        r.checks.push_back(detail::make_flag("long_run", false, e.what()));
    }

    // Pairwise route agreement.
    const auto &routes = r.projector;
    const double long_run_tol =
        routes.long_run_mode == LongRunMode::cesaro ? tol.cesaro_vs_forest : tol.power_vs_forest;
    auto compare = [&](const char *name, const std::optional<Matrix> &a, const std::optional<Matrix> &b, double t) {
        if (a && b) {
            const double diff = max_abs_diff(*a, *b);
            r.projector.max_discrepancy = std::max(r.projector.max_discrepancy, diff);
            r.checks.push_back(detail::make_check(name, diff, t));
        }
    };
    compare("forest_vs_long_run", routes.forest, routes.long_run, long_run_tol);
    compare("forest_vs_resolvent", routes.forest, routes.resolvent, tol.resolvent_vs_forest);
    compare("long_run_vs_resolvent", routes.long_run, routes.resolvent, tol.resolvent_vs_forest + long_run_tol);

    // Eigenprojector algebra on the most accurate route available.
    const std::optional<Matrix> &reference = routes.forest ? routes.forest : routes.long_run;
    if (reference) {
        const Matrix &j = *reference;
        const Matrix &lm = l.matrix();
        r.checks.push_back(detail::make_check("projector_idempotent", max_abs_diff(j * j, j), tol.projector_algebra));
        const double annihilate = std::max((lm * j).cwiseAbs().maxCoeff(), (j * lm).cwiseAbs().maxCoeff());
        r.checks.push_back(detail::make_check("projector_annihilates_laplacian", annihilate, tol.projector_algebra));
        const double row_err = (j.rowwise().sum().array() - 1.0).abs().maxCoeff();
        r.checks.push_back(detail::make_check("projector_row_sums", row_err, tol.row_sum));
        const auto rank = numerical_rank(j, tol.projector_rank);
        r.checks.push_back(detail::make_flag("projector_rank", rank == d,
                                             "rank=" + std::to_string(rank) + " d=" + std::to_string(d)));
    }
    if (routes.resolvent) {
        const auto rank = numerical_rank(*routes.resolvent, tol.projector_rank);
        r.checks.push_back(detail::make_flag("resolvent_rank", rank == d,
                                             "rank=" + std::to_string(rank) + " d=" + std::to_string(d)));
    }

    // With a positive diagonal every recurrent class is aperiodic, so P is
    // primitive exactly when there is a single sink component.
    if (p && p->stochastic() && p->positive_diagonal()) {
        r.checks.push_back(detail::make_flag("primitive_iff_d1", p->primitive() == (d == 1)));
    }
    if (p && p->primitive() && routes.long_run_mode == LongRunMode::power) {
        try {
            const auto lim = primitive_limit(*p);
            const double normalization = std::abs(lim.v.dot(lim.w) - 1.0);
            r.checks.push_back(detail::make_check("primitive_limit", max_abs_diff(lim.vw, *routes.long_run),
                                                  tol.primitive_limit,
                                                  "|v.w - 1|=" + std::to_string(normalization)));
        } catch (const std::exception &e) {
            r.checks.push_back(detail::make_flag("primitive_limit", false, e.what()));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Output

/// Full-precision decimal string; std::strtod on the result gives back the
/// identical double.
inline std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::json matrix_json(const Matrix &m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(format_real(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// JSON report. Real numbers are emitted as decimal strings (see
/// format_real); integers and flags as JSON numbers and booleans.
inline nlohmann::json to_json(const AnalysisReport &r) {
    using nlohmann::json;
    auto optional_matrix = [](const std::optional<Matrix> &m) { return m ? matrix_json(*m) : json(nullptr); };

    json eig = json::array();
    for (const auto &z : r.spectrum.eigenvalues) {
        eig.push_back({{"re", format_real(z.real())}, {"im", format_real(z.imag())}});
    }
    json sv = json::array();
    for (double s : r.spectrum.singular_values) {
        sv.push_back(format_real(s));
    }
    json checks = json::array();
    for (const auto &c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"discrepancy", format_real(c.discrepancy)},
                          {"tolerance", format_real(c.tolerance)},
                          {"detail", c.detail}});
    }
    json sinks = json::array();
    for (bool s : r.components.sink_flags) {
        sinks.push_back(s);
    }

    json out;
    out["graph"] = {{"n", r.n}, {"m", r.m}};
    out["components"] = {{"scc_count", r.components.scc_count},
                         {"wcc_count", r.components.wcc_count},
                         {"sink_count", r.components.sink_count},
                         {"scc_id", r.components.scc_id},
                         {"sink_flags", sinks},
                         {"spanning_converging_tree", r.spanning_converging_tree}};
    out["forest_dimension"] = {
        {"structural", r.d_structural},
        {"enumerated", r.d_enumerated ? json(*r.d_enumerated) : json(nullptr)},
        {"maximal_forest_count", r.maximal_forest_count ? json(*r.maximal_forest_count) : json(nullptr)},
        {"total_weight", r.forest_total_weight ? json(format_real(*r.forest_total_weight)) : json(nullptr)}};
    out["rank"] = {{"numerical", r.spectrum.numerical_rank},
                   {"n_minus_d", r.n_minus_d()},
                   {"n_minus_c", r.n_minus_c()},
                   {"n_minus_c_correct", r.n_minus_c() == r.spectrum.numerical_rank}};
    out["spectrum"] = {
        {"tolerance", format_real(r.spectrum.tolerance)},
        {"eigenvalues", eig},
        {"singular_values", sv},
        {"zero_multiplicity", r.spectrum.zero_multiplicity},
        {"min_positive_real_part",
         r.spectrum.min_positive_real_part ? json(format_real(*r.spectrum.min_positive_real_part)) : json(nullptr)},
        {"localization", r.localization}};
    std::string mode = "none";
    if (r.projector.long_run_mode) {
        mode = *r.projector.long_run_mode == LongRunMode::power ? "power" : "cesaro";
    }
    out["projector"] = {{"forest", optional_matrix(r.projector.forest)},
                        {"resolvent", optional_matrix(r.projector.resolvent)},
                        {"long_run", optional_matrix(r.projector.long_run)},
                        {"long_run_mode", mode},
                        {"tau", format_real(r.tau)},
                        {"max_discrepancy", format_real(r.projector.max_discrepancy)}};
    out["perron"] = {{"epsilon", format_real(r.perron.epsilon)},
                     {"stochastic", r.perron.stochastic},
                     {"positive_diagonal", r.perron.positive_diagonal},
                     {"primitive", r.perron.primitive},
                     {"spectral_gap", format_real(r.perron.spectral_gap)}};
    out["checks"] = checks;
    out["notes"] = r.notes;
    out["all_pass"] = r.all_pass();
    return out;
}

inline std::string to_text(const AnalysisReport &r) {
    std::ostringstream os;
    char buf[128];
    auto print_matrix = [&](const char *label, const Matrix &m) {
        os << "  " << label << ":\n";
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            os << "   ";
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                std::snprintf(buf, sizeof buf, " %.6f", m(i, j));
                os << buf;
            }
            os << '\n';
        }
    };

    os << "graph: n=" << r.n << " m=" << r.m << '\n';
    os << "components: c=" << r.components.scc_count << " wcc=" << r.components.wcc_count
       << " sinks=" << r.components.sink_count << '\n';
    os << "in-forest dimension: d=" << r.d_structural << " (sink components)";
    if (r.d_enumerated) {
        os << ", enumerated d=" << *r.d_enumerated << " from " << *r.maximal_forest_count << " maximal in-forests";
    }
    os << '\n';
    os << "spanning converging tree: " << (r.spanning_converging_tree ? "yes" : "no") << '\n';
    os << "rank(L): " << r.spectrum.numerical_rank << " (n-d prediction: " << r.n_minus_d() << ")\n";
    os << "n-c prediction: " << r.n_minus_c();
    if (r.n_minus_c() != r.spectrum.numerical_rank) {
        os << " (INCORRECT: rank(L) = n - d where d counts sink components, not all strong components)";
    }
    os << '\n';
    os << "eigenvalues:";
    for (const auto &z : r.spectrum.eigenvalues) {
        std::snprintf(buf, sizeof buf, " %.6g%+.6gi", z.real(), z.imag());
        os << buf;
    }
    os << '\n';
    os << "zero multiplicity: " << r.spectrum.zero_multiplicity << '\n';
    os << "localization (nontrivial eigenvalues have Re > 0): " << (r.localization ? "holds" : "VIOLATED") << '\n';
    if (r.projector.forest) {
        print_matrix("J (forest oracle)", *r.projector.forest);
    }
    if (r.projector.resolvent) {
        std::snprintf(buf, sizeof buf, "J (resolvent, tau=%g)", r.tau);
        print_matrix(buf, *r.projector.resolvent);
    }
    if (r.projector.long_run) {
        print_matrix(*r.projector.long_run_mode == LongRunMode::power ? "J (long-run, power)" : "J (long-run, Cesaro)",
                     *r.projector.long_run);
    }
    std::snprintf(buf, sizeof buf, "%.3e", r.projector.max_discrepancy);
    os << "max route discrepancy: " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", r.perron.epsilon);
    os << "Perron matrix: epsilon=" << buf << " stochastic=" << (r.perron.stochastic ? "yes" : "no")
       << " primitive=" << (r.perron.primitive ? "yes" : "no") << '\n';
    for (const auto &note : r.notes) {
        os << "note: " << note << '\n';
    }
    os << "checks:\n";
    for (const auto &c : r.checks) {
        std::snprintf(buf, sizeof buf, "%-34s %s  discrepancy=%.3e tol=%.1e", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                      c.discrepancy, c.tolerance);
        os << "  " << buf;
        if (!c.detail.empty()) {
            os << "  (" << c.detail << ")";
        }
        os << '\n';
    }
    os << (r.all_pass() ? "all checks passed\n" : "SOME CHECKS FAILED\n");
    return os.str();
}

}    // namespace dlap
