// dlap: digraph Laplacian analysis from the command line.
//
//   dlap analyze graph.txt [--json] [--tau T] [--epsilon E] [--tol X]
//   dlap simulate graph.txt --mode discrete|continuous [--x0 a,b,c | --seed S] ...
//   dlap fuzz [--count N] [--n-max K] [--seed S] [--exhaustive] [--unweighted]
//
// Exit codes: 0 all checks pass, 1 usage or input error, 2 a cross-check failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlap/dlap.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kCheckFailure = 2;

dlap::Digraph load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    try {
        return dlap::parse_edge_list(in);
    } catch (const dlap::ParseError &e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

dlap::Vector parse_vector(const std::string &text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(' ');
        const auto last = item.find_last_not_of(' ');
        double v = 0.0;
        if (first == std::string::npos ||
            !dlap::detail::parse_number(std::string_view(item).substr(first, last - first + 1), v)) {
            throw std::runtime_error("malformed --x0 entry \"" + item + "\"");
        }
        values.push_back(v);
    }
    return Eigen::Map<dlap::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct AnalyzeArgs {
    std::string path;
    double tau = dlap::kDefaultTau;
    std::optional<double> epsilon;
    std::optional<double> tolerance;
    bool json = false;
};

int cmd_analyze(const AnalyzeArgs &args) {
    const auto g = load(args.path);
    dlap::AnalysisOptions opt;
    opt.tau = args.tau;
    opt.epsilon = args.epsilon;
    opt.tolerance = args.tolerance;
    const auto report = dlap::analyze(g, opt);
    if (args.json) {
        std::cout << dlap::to_json(report).dump(2) << '\n';
    } else {
        std::cout << dlap::to_text(report);
    }
    return report.all_pass() ? kOk : kCheckFailure;
}

struct SimulateArgs {
    std::string path;
    std::string mode = "discrete";
    std::string x0;
    std::uint64_t seed = 1;
    std::size_t steps = 100;
    double t_end = 20.0;
    std::optional<double> dt;
    std::optional<double> epsilon;
    std::string out;
};

int cmd_simulate(const SimulateArgs &args) {
    const auto g = load(args.path);
    const dlap::LaplacianMatrix l(g);
    const auto n = static_cast<Eigen::Index>(g.size());

    dlap::Vector x0;
    if (!args.x0.empty()) {
        x0 = parse_vector(args.x0);
    } else {
        std::mt19937_64 rng(args.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        x0.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x0(i) = u(rng);
        }
    }

    dlap::Matrix projector;
    if (g.size() <= dlap::kEnumerationLimit && dlap::forest_search_space(g) <= 1e8) {
        projector = dlap::forest_matrix(dlap::enumerate_maximal_in_forests(g));
    } else {
        projector = dlap::consensus_projector(l);
    }

    dlap::TrajectoryRecord rec;
    if (args.mode == "discrete") {
        const auto p = dlap::perron(l, args.epsilon);
        if (!p.stochastic()) {
            std::cerr << "warning: Perron matrix is not stochastic for epsilon=" << p.epsilon() << '\n';
        }
        rec = dlap::simulate_discrete(p, x0, args.steps, projector);
    } else {
        const double dmax = l.max_degree();
        const double dt = args.dt.value_or(dmax > 0.0 ? std::min(0.01, 0.5 / dmax) : 0.01);
        rec = dlap::simulate_continuous(l, x0, args.t_end, dt, projector);
    }

    if (args.out.empty() || args.out == "-") {
        dlap::write_csv(std::cout, rec);
    } else {
        std::ofstream out(args.out);
        if (!out) {
            throw std::runtime_error("cannot write " + args.out);
        }
        dlap::write_csv(out, rec);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", rec.final_deviation());
    std::cerr << "final deviation |x_final - J x0|_inf = " << buf << '\n';
    return kOk;
}

int cmd_fuzz(const dlap::FuzzOptions &opt, const std::string &out_prefix) {
    const auto summary = dlap::run_fuzz(opt);
    std::cout << "instances: " << summary.instances << '\n';
    for (const auto &[name, counts] : summary.tally) {
        std::printf("  %-34s %zu/%zu passed\n", name.c_str(), counts.first, counts.second);
    }
    for (std::size_t k = 0; k < summary.failures.size(); ++k) {
        const auto &f = summary.failures[k];
        std::cout << "# failing instance " << f.instance << ':';
        for (const auto &c : f.failed) {
            std::cout << ' ' << c.name;
        }
        std::cout << '\n' << f.graph;
        if (!out_prefix.empty()) {
            std::ofstream out(out_prefix + "failure_" + std::to_string(k) + ".txt");
            out << f.graph;
        }
    }
    std::cout << (summary.ok() ? "all checks passed\n" : "FAILURES FOUND\n");
    return summary.ok() ? kOk : kCheckFailure;
}

}    // namespace

int main(int argc, char **argv) {
    CLI::App app{"Digraph Laplacian analysis: components, in-forests, eigenprojector, consensus dynamics"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto *a = app.add_subcommand("analyze", "Analyze an edge-list graph and cross-check every route");
    a->add_option("path", analyze.path, "Edge-list file")->required();
    a->add_option("--tau", analyze.tau, "Resolvent parameter")->check(CLI::PositiveNumber);
    a->add_option("--epsilon", analyze.epsilon, "Perron step size (default 1/(2 max degree))")
        ->check(CLI::PositiveNumber);
    a->add_option("--tol", analyze.tolerance, "Spectral tolerance")->check(CLI::PositiveNumber);
    a->add_flag("--json", analyze.json, "Emit JSON");

    SimulateArgs simulate;
    auto *s = app.add_subcommand("simulate", "Simulate consensus dynamics and write a CSV trajectory");
    s->add_option("path", simulate.path, "Edge-list file")->required();
    s->add_option("--mode", simulate.mode, "discrete or continuous")
        ->check(CLI::IsMember({"discrete", "continuous"}));
    s->add_option("--x0", simulate.x0, "Initial state as a comma-separated list");
    s->add_option("--seed", simulate.seed, "Seed for a random initial state in [0,1)^n");
    s->add_option("--steps", simulate.steps, "Discrete steps");
    s->add_option("--t-end", simulate.t_end, "Continuous horizon")->check(CLI::PositiveNumber);
    s->add_option("--dt", simulate.dt, "Continuous step (<= 0.5 / max degree)")->check(CLI::PositiveNumber);
    s->add_option("--epsilon", simulate.epsilon, "Perron step size")->check(CLI::PositiveNumber);
    s->add_option("--out", simulate.out, "CSV output path (default stdout)");

    dlap::FuzzOptions fuzz;
    std::string fuzz_out;
    bool unweighted = false;
    auto *f = app.add_subcommand("fuzz", "Run the cross-check battery on random digraphs");
    f->add_option("--count", fuzz.count, "Random instances")->check(CLI::PositiveNumber);
    f->add_option("--n-max", fuzz.n_max, "Largest vertex count")->check(CLI::Range(1, 12));
    f->add_option("--seed", fuzz.seed, "Generator seed");
    f->add_flag("--exhaustive", fuzz.exhaustive, "Also check every digraph on <= n-max vertices (n-max <= 4)");
    f->add_flag("--unweighted", unweighted, "Unit arc weights");
    f->add_option("--tau", fuzz.analysis.tau, "Resolvent parameter")->check(CLI::PositiveNumber);
    f->add_option("--out", fuzz_out, "Path prefix for failing graphs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kOk : kInputError;
    }

    try {
        if (*a) {
            return cmd_analyze(analyze);
        }
        if (*s) {
            return cmd_simulate(simulate);
        }
        fuzz.weighted = !unweighted;
        if (fuzz.exhaustive && fuzz.n_max > 4) {
            throw std::runtime_error("--exhaustive supports --n-max <= 4");
        }
        return cmd_fuzz(fuzz, fuzz_out);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
}
