// Leader-follower consensus on a converging path 4 -> 3 -> 2 -> 1 -> 0.
//
// Every vertex is its own strong component, yet rank(L) = n - 1: only the
// leader's component is a sink, so the in-forest dimension is 1 and all
// followers converge to the leader's initial value.

#include <cstdio>

#include "dlap/dlap.hpp"

int main() {
    const auto g = dlap::parse_edge_list("5 4\n1 0\n2 1\n3 2\n4 3\n");
    const dlap::LaplacianMatrix l(g);

    const auto parts = dlap::decompose(g);
    const auto spec = dlap::spectrum(l);
    std::printf("strong components c = %zu, sink components d = %zu\n", parts.scc_count,
                dlap::forest_dimension_structural(parts));
    std::printf("rank(L) = %zu, n - c = %zu, n - d = %zu\n", spec.numerical_rank, g.size() - parts.scc_count,
                g.size() - parts.sink_count);

    const auto family = dlap::enumerate_maximal_in_forests(g);
    const auto j = dlap::forest_matrix(family);

    dlap::Vector x0(5);
    x0 << 7.0, 0.0, 1.0, 2.0, 3.0;
    const auto traj = dlap::simulate_discrete(dlap::perron(l), x0, 400, j);
    std::printf("x(400) =");
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        std::printf(" %.6f", traj.final_state()(i));
    }
    std::printf("\nlimit J x0 =");
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        std::printf(" %.6f", traj.limit_prediction(i));
    }
    std::printf("\n");
}
