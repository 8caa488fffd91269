#include <random>
#include <string>

#include <gtest/gtest.h>

#include "dlap/digraph.hpp"
#include "dlap/fuzz.hpp"
#include "oracles.hpp"

namespace dlap {
namespace {

std::size_t error_line(const std::string &text) {
    try {
        parse_edge_list(text);
    } catch (const ParseError &e) {
        return e.line();
    }
    ADD_FAILURE() << "no ParseError for: " << text;
    return 0;
}

TEST(ParseEdgeList, SingleArc) {
    const auto g = parse_edge_list("2 1\n1 0 1.0");
    EXPECT_EQ(g.size(), 2u);
    ASSERT_EQ(g.arc_count(), 1u);
    EXPECT_EQ(g.arcs()[0], (Arc{1, 0, 1.0}));
}

TEST(ParseEdgeList, WeightDefaultsToOne) {
    const auto g = parse_edge_list("3 2\n2 1\n1 0");
    EXPECT_EQ(g, Digraph(3, {{2, 1, 1.0}, {1, 0, 1.0}}));
}

TEST(ParseEdgeList, CommentsBlankLinesAndCrlf) {
    const auto g = parse_edge_list("# header comment\r\n\r\n3 2\r\n  # indented comment\n0 1 2.5\r\n\n1 2\t0.25\r\n");
    EXPECT_EQ(g, Digraph(3, {{0, 1, 2.5}, {1, 2, 0.25}}));
}

TEST(ParseEdgeList, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("2 1\n0 0 1.0"), 2u);          // self-loop
    EXPECT_EQ(error_line("2 1\n0 2 1.0"), 2u);          // out of range
    EXPECT_EQ(error_line("2 1\n0 1 0"), 2u);            // non-positive
    EXPECT_EQ(error_line("2 1\n0 1 -3"), 2u);
    EXPECT_EQ(error_line("2 1\n0 1 inf"), 2u);          // non-finite
    EXPECT_EQ(error_line("2 1\n0 1 nan"), 2u);
    EXPECT_EQ(error_line("2 1\n0 1 1e999"), 2u);
    EXPECT_EQ(error_line("3 2\n0 1\n# c\n0 1 2"), 4u);  // duplicate
    EXPECT_EQ(error_line("2 1\n0 x"), 2u);              // malformed
    EXPECT_EQ(error_line("2 1\n0 1 1 1"), 2u);
    EXPECT_EQ(error_line("2 1\n0"), 2u);
    EXPECT_EQ(error_line("2\n0 1"), 1u);                // bad header
    EXPECT_EQ(error_line("0 0\n"), 1u);
    EXPECT_EQ(error_line("2 1\n0 1\n1 0"), 3u);         // too many arcs
    EXPECT_EQ(error_line("3 2\n0 1\n"), 2u);            // too few arcs, reported at EOF
    EXPECT_EQ(error_line("# only a comment\n"), 1u);
}

TEST(ParseEdgeList, SelfLoopMessage) {
    try {
        parse_edge_list("2 1\n0 0 1.0");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Digraph, ConstructorEnforcesInvariants) {
    EXPECT_THROW(Digraph(0, {}), std::invalid_argument);
    EXPECT_THROW(Digraph(2, {{0, 0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(Digraph(2, {{0, 1, 0.0}}), std::invalid_argument);
    EXPECT_THROW(Digraph(2, {{0, 5, 1.0}}), std::invalid_argument);
    EXPECT_THROW(Digraph(2, {{0, 1, 1.0}, {0, 1, 2.0}}), std::invalid_argument);
}

TEST(Digraph, OutArcsSortedByHead) {
    const Digraph g(3, {{0, 2, 1.0}, {1, 0, 1.0}, {0, 1, 3.0}});
    const auto out = g.out_arcs(0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].head, 1u);
    EXPECT_EQ(out[1].head, 2u);
    EXPECT_EQ(g.out_degree(2), 0u);
    EXPECT_EQ(g.adjacency()(0, 1), 3.0);
}

TEST(Laplacian, ConvergingTreeOnTwoVertices) {
    Matrix expected(2, 2);
    expected << 0, 0, -1, 1;
    EXPECT_EQ(laplacian(parse_edge_list("2 1\n1 0 1.0")).matrix(), expected);
}

TEST(Laplacian, EmptyGraphIsZero) { EXPECT_EQ(laplacian(Digraph::empty(2)).matrix(), Matrix::Zero(2, 2)); }

TEST(Laplacian, AsymmetricTwoCycle) {
    Matrix expected(2, 2);
    expected << 2, -2, -1, 1;
    const auto l = laplacian(fixtures::asymmetric_two_cycle());
    EXPECT_EQ(l.matrix(), expected);
    EXPECT_EQ(l.max_degree(), 2.0);
}

TEST(Laplacian, EqualsDegreeMinusAdjacency) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        const auto g = random_digraph(rng, {1, 9, std::nullopt, true});
        const Matrix a = g.adjacency();
        const Matrix d = a.rowwise().sum().asDiagonal();
        EXPECT_LE((laplacian(g).matrix() - (d - a)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

// Property: L 1 = 0 and off-diagonal entries are non-positive.
TEST(Laplacian, RowsSumToZero) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 500; ++k) {
        const auto g = random_digraph(rng, {1, 12, std::nullopt, true});
        const Matrix l = laplacian(g).matrix();
        const Vector ones = Vector::Ones(l.rows());
        EXPECT_LE((l * ones).cwiseAbs().maxCoeff(), 1e-12);
        for (Eigen::Index i = 0; i < l.rows(); ++i) {
            EXPECT_GE(l(i, i), 0.0);
            for (Eigen::Index j = 0; j < l.cols(); ++j) {
                if (i != j) {
                    EXPECT_LE(l(i, j), 0.0);
                }
            }
        }
    }
}

// Property: serialize/parse reproduces the Laplacian bit for bit.
TEST(Serialize, RoundTripIsExact) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 300; ++k) {
        const auto g = random_digraph(rng, {1, 10, std::nullopt, true});
        const auto back = parse_edge_list(serialize(g));
        EXPECT_EQ(back, g);
        EXPECT_EQ(laplacian(back).matrix(), laplacian(g).matrix());
    }
}

}    // namespace
}    // namespace dlap
