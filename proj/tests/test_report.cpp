#include <cstdlib>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "cli_runner.hpp"
#include "dlap/fuzz.hpp"
#include "dlap/report.hpp"
#include "oracles.hpp"

namespace dlap {
namespace {

using testing::data_file;
using testing::run_cli;

double real(const nlohmann::json &j) { return std::strtod(j.get<std::string>().c_str(), nullptr); }

TEST(Analyze, ConvergingPathFlagsNMinusC) {
    const auto r = analyze(fixtures::converging_path(5));
    EXPECT_EQ(r.components.scc_count, 5u);
    EXPECT_EQ(r.d_structural, 1u);
    EXPECT_EQ(r.d_enumerated, std::optional<std::size_t>(1));
    EXPECT_EQ(r.spectrum.numerical_rank, 4u);
    EXPECT_EQ(r.n_minus_c(), 0u);
    EXPECT_TRUE(r.all_pass());
    const auto text = to_text(r);
    EXPECT_NE(text.find("n-c prediction: 0 (INCORRECT"), std::string::npos) << text;
    EXPECT_NE(text.find("rank(L): 4"), std::string::npos);
}

TEST(Analyze, EmptyGraph) {
    const auto r = analyze(Digraph::empty(4));
    EXPECT_EQ(r.d_structural, 4u);
    EXPECT_EQ(r.spectrum.numerical_rank, 0u);
    ASSERT_TRUE(r.projector.forest);
    EXPECT_EQ(*r.projector.forest, Matrix::Identity(4, 4));
    EXPECT_EQ(*r.projector.resolvent, Matrix::Identity(4, 4));
    EXPECT_EQ(*r.projector.long_run, Matrix::Identity(4, 4));
    EXPECT_TRUE(r.all_pass());
}

TEST(Analyze, AsymmetricTwoCycleAllRoutesAgree) {
    const auto r = analyze(fixtures::asymmetric_two_cycle());
    ASSERT_TRUE(r.projector.forest && r.projector.resolvent && r.projector.long_run);
    for (const char *name : {"forest_vs_long_run", "forest_vs_resolvent", "long_run_vs_resolvent"}) {
        const auto *c = r.find_check(name);
        ASSERT_NE(c, nullptr) << name;
        EXPECT_TRUE(c->pass) << name;
    }
    EXPECT_LE(r.projector.max_discrepancy, 1e-7);
    EXPECT_NEAR((*r.projector.forest)(0, 1), 2.0 / 3.0, 1e-15);
    EXPECT_NE(r.find_check("primitive_limit"), nullptr);
    EXPECT_TRUE(r.all_pass());
}

TEST(Analyze, PeriodicEpsilonUsesCesaro) {
    AnalysisOptions opt;
    opt.epsilon = 1.0;
    const auto r = analyze(fixtures::two_cycle(), opt);
    ASSERT_EQ(r.projector.long_run_mode, std::optional(LongRunMode::cesaro));
    EXPECT_EQ(r.find_check("forest_vs_long_run")->tolerance, 1e-4);
    EXPECT_FALSE(r.perron.primitive);
    EXPECT_TRUE(r.all_pass());
}

TEST(Analyze, NonStochasticEpsilonSkipsLongRun) {
    AnalysisOptions opt;
    opt.epsilon = 2.0;
    const auto r = analyze(fixtures::two_cycle(), opt);
    EXPECT_FALSE(r.perron.stochastic);
    EXPECT_FALSE(r.projector.long_run);
    EXPECT_FALSE(r.notes.empty());
    EXPECT_TRUE(r.all_pass());
}

TEST(Analyze, LargeGraphSkipsEnumeration) {
    const auto r = analyze(fixtures::converging_path(20));
    EXPECT_FALSE(r.d_enumerated);
    EXPECT_FALSE(r.projector.forest);
    EXPECT_TRUE(r.projector.long_run);
    EXPECT_EQ(r.find_check("forest_dimension"), nullptr);
    EXPECT_TRUE(r.all_pass());
}

TEST(Analyze, MismatchIsReported) {
    // a tolerance of zero on the resolvent route cannot be met
    AnalysisOptions opt;
    opt.checks.resolvent_vs_forest = 0.0;
    const auto r = analyze(fixtures::converging_path(4), opt);
    EXPECT_FALSE(r.all_pass());
    EXPECT_FALSE(r.find_check("forest_vs_resolvent")->pass);
    EXPECT_GT(r.find_check("forest_vs_resolvent")->discrepancy, 0.0);
}

// Parsing the emitted JSON gives back every reported real bit for bit.
TEST(ToJson, RealsRoundTripExactly) {
    std::mt19937_64 rng(89);
    for (int k = 0; k < 50; ++k) {
        const auto g = random_digraph(rng, {1, 8, 3.0, true});
        const auto r = analyze(g);
        const auto j = nlohmann::json::parse(to_json(r).dump());
        for (std::size_t i = 0; i < r.spectrum.eigenvalues.size(); ++i) {
            EXPECT_EQ(real(j["spectrum"]["eigenvalues"][i]["re"]), r.spectrum.eigenvalues[i].real());
            EXPECT_EQ(real(j["spectrum"]["eigenvalues"][i]["im"]), r.spectrum.eigenvalues[i].imag());
        }
        for (std::size_t i = 0; i < r.spectrum.singular_values.size(); ++i) {
            EXPECT_EQ(real(j["spectrum"]["singular_values"][i]), r.spectrum.singular_values[i]);
        }
        const std::pair<const char *, const std::optional<Matrix> *> routes[] = {
            {"forest", &r.projector.forest}, {"resolvent", &r.projector.resolvent}, {"long_run", &r.projector.long_run}};
        for (const auto &[name, m] : routes) {
            ASSERT_TRUE(m->has_value());
            for (Eigen::Index a = 0; a < (*m)->rows(); ++a) {
                for (Eigen::Index b = 0; b < (*m)->cols(); ++b) {
                    EXPECT_EQ(real(j["projector"][name][a][b]), (**m)(a, b));
                }
            }
        }
        EXPECT_EQ(real(j["perron"]["epsilon"]), r.perron.epsilon);
        EXPECT_EQ(real(j["perron"]["spectral_gap"]), r.perron.spectral_gap);
        EXPECT_EQ(real(j["projector"]["max_discrepancy"]), r.projector.max_discrepancy);
        EXPECT_EQ(real(j["spectrum"]["tolerance"]), r.spectrum.tolerance);
        EXPECT_EQ(real(j["forest_dimension"]["total_weight"]), *r.forest_total_weight);
        for (std::size_t c = 0; c < r.checks.size(); ++c) {
            EXPECT_EQ(j["checks"][c]["name"], r.checks[c].name);
            EXPECT_EQ(j["checks"][c]["pass"], r.checks[c].pass);
            EXPECT_EQ(real(j["checks"][c]["discrepancy"]), r.checks[c].discrepancy);
        }
        EXPECT_EQ(j["components"]["scc_count"], r.components.scc_count);
        EXPECT_EQ(j["all_pass"], r.all_pass());
    }
}

TEST(Fuzz, DeterministicAcrossThreadCounts) {
    FuzzOptions a;
    a.count = 200;
    a.n_max = 7;
    a.seed = 5;
    a.threads = 1;
    FuzzOptions b = a;
    b.threads = 4;
    const auto x = run_fuzz(a);
    const auto y = run_fuzz(b);
    EXPECT_EQ(x.tally, y.tally);
    ASSERT_EQ(x.failures.size(), y.failures.size());
    for (std::size_t i = 0; i < x.failures.size(); ++i) {
        EXPECT_EQ(x.failures[i].graph, y.failures[i].graph);
    }
    const auto g1 = fuzz_instances(a);
    const auto g2 = fuzz_instances(a);
    EXPECT_EQ(g1, g2);
}

TEST(Fuzz, SingleVertex) {
    FuzzOptions opt;
    opt.count = 1;
    opt.n_max = 1;
    const auto s = run_fuzz(opt);
    EXPECT_EQ(s.instances, 1u);
    EXPECT_TRUE(s.ok());
    const auto r = analyze(Digraph::empty(1));
    EXPECT_EQ(r.d_structural, 1u);
    EXPECT_EQ(r.spectrum.numerical_rank, 0u);
    EXPECT_EQ(*r.projector.forest, Matrix::Identity(1, 1));
}

TEST(Fuzz, ExhaustiveSweepUpToFourVertices) {
    FuzzOptions opt;
    opt.count = 0;
    opt.n_max = 4;
    opt.exhaustive = true;
    opt.weighted = false;
    const auto s = run_fuzz(opt);
    EXPECT_EQ(s.instances, 1u + 4u + 64u + 4096u);
    EXPECT_TRUE(s.ok());
}

TEST(Fuzz, FailingGraphIsSerialized) {
    FuzzOptions opt;
    opt.count = 3;
    opt.n_max = 3;
    opt.analysis.checks.projector_algebra = -1.0;    // forces failures
    const auto s = run_fuzz(opt);
    ASSERT_FALSE(s.ok());
    const auto g = parse_edge_list(s.failures.front().graph);
    EXPECT_EQ(serialize(g), s.failures.front().graph);
}

TEST(Cli, AnalyzeFixtures) {
    const auto path = run_cli("analyze " + data_file("converging_path5.txt"));
    EXPECT_EQ(path.exit_code, 0) << path.out << path.err;
    EXPECT_NE(path.out.find("c=5"), std::string::npos);
    EXPECT_NE(path.out.find("d=1"), std::string::npos);
    EXPECT_NE(path.out.find("rank(L): 4"), std::string::npos);
    EXPECT_NE(path.out.find("n-c prediction: 0 (INCORRECT"), std::string::npos);

    const auto empty = run_cli("analyze --json " + data_file("empty3.txt"));
    ASSERT_EQ(empty.exit_code, 0);
    const auto j = nlohmann::json::parse(empty.out);
    EXPECT_EQ(j["forest_dimension"]["structural"], 3);
    EXPECT_EQ(j["rank"]["numerical"], 0);
    EXPECT_EQ(j["projector"]["forest"][1], nlohmann::json({"0", "1", "0"}));
}

TEST(Cli, AnalyzeGolden) {
    for (const char *name : {"converging_path3", "asymmetric_two_cycle"}) {
        const auto r = run_cli("analyze --json " + data_file(std::string(name) + ".txt"));
        ASSERT_EQ(r.exit_code, 0) << name;
        const auto golden = nlohmann::json::parse(testing::slurp(data_file(std::string(name) + ".golden.json")));
        std::string where;
        EXPECT_TRUE(testing::json_contains(nlohmann::json::parse(r.out), golden, where)) << name << ": " << where;
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("").exit_code, 1);
    EXPECT_EQ(run_cli("bogus").exit_code, 1);
    EXPECT_EQ(run_cli("analyze /nonexistent/graph.txt").exit_code, 1);
    const auto loop = run_cli("analyze " + data_file("self_loop.txt"));
    EXPECT_EQ(loop.exit_code, 1);
    EXPECT_NE(loop.err.find("line 3"), std::string::npos) << loop.err;
    EXPECT_NE(loop.err.find("self-loop"), std::string::npos) << loop.err;
    EXPECT_EQ(run_cli("analyze --tau -1 " + data_file("two_cycle.txt")).exit_code, 1);
    EXPECT_EQ(run_cli("--help").exit_code, 0);
}

TEST(Cli, SimulateDiscreteLeaderFollower) {
    const auto out = std::filesystem::temp_directory_path() / "dlap_leader.csv";
    const auto r = run_cli("simulate " + data_file("converging_path3.txt") +
                           " --mode discrete --x0 5,0,0 --steps 200 --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto csv = testing::slurp(out);
    EXPECT_EQ(csv.rfind("t,x0,x1,x2\n0,5,0,0\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);
    const auto pos = r.err.rfind("= ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_LT(std::strtod(r.err.c_str() + pos + 2, nullptr), 1e-6);
    std::filesystem::remove(out);
}

TEST(Cli, SimulateContinuousTwoCycle) {
    const auto r = run_cli("simulate " + data_file("two_cycle.txt") + " --mode continuous --x0 0,1 --t-end 20");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto pos = r.err.rfind("= ");
    EXPECT_LT(std::strtod(r.err.c_str() + pos + 2, nullptr), 1e-6);
    EXPECT_EQ(r.out.rfind("t,x0,x1\n", 0), 0u);
}

TEST(Cli, SimulateEmptyGraphHasZeroDeviation) {
    const auto r = run_cli("simulate " + data_file("empty3.txt") + " --mode discrete --seed 9 --steps 5");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.err.find("= 0.000000e+00"), std::string::npos) << r.err;
}

TEST(Cli, SimulateErrors) {
    EXPECT_EQ(run_cli("simulate " + data_file("two_cycle.txt") + " --x0 1,2,3").exit_code, 1);
    EXPECT_EQ(run_cli("simulate " + data_file("two_cycle.txt") + " --mode continuous --dt 0.6").exit_code, 1);
    EXPECT_EQ(run_cli("simulate " + data_file("two_cycle.txt") + " --mode sideways").exit_code, 1);
    EXPECT_EQ(run_cli("simulate " + data_file("two_cycle.txt") + " --x0 1,x").exit_code, 1);
}

TEST(Cli, FuzzSmall) {
    const auto r = run_cli("fuzz --count 1 --n-max 1");
    EXPECT_EQ(r.exit_code, 0) << r.out;
    const auto ex = run_cli("fuzz --count 100 --n-max 4 --exhaustive --unweighted --seed 3");
    EXPECT_EQ(ex.exit_code, 0) << ex.out;
    EXPECT_NE(ex.out.find("instances: 4265"), std::string::npos) << ex.out;
    EXPECT_EQ(run_cli("fuzz --n-max 5 --exhaustive").exit_code, 1);
}

}    // namespace
}    // namespace dlap
