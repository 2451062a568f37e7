#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pumpq/graph.hpp"
#include "pumpq/io.hpp"
#include "pumpq/protocol.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    return std::string(PUMPQ_DATA_DIR) + "/" + name;
}

inline pumpq::Graph fixture_graph(const std::string& name) {
    return pumpq::load_graph(data_path(name));
}

inline pumpq::Protocol fixture_protocol(const std::string& name) {
    return pumpq::load_protocol(data_path(name));
}

// Uniformly rough connected multigraph: a random spanning tree plus extra
// edges drawn over all vertex pairs, parallels allowed.
inline pumpq::Graph random_connected_graph(std::mt19937& rng, int max_vertices, int max_edges) {
    std::uniform_int_distribution<int> nv(2, max_vertices);
    const int n = nv(rng);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        edges.emplace_back(parent(rng), v);
    }
    std::uniform_int_distribution<int> extra(0, std::max(0, max_edges - n + 1));
    int add = extra(rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    while (add-- > 0 && static_cast<int>(edges.size()) < max_edges) {
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;  // keep the random corpus loop-free
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    return pumpq::make_graph(n, edges);
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int n, double lo = -1.0,
                                     double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

// Vertex/edge incidence matrix with +1 at the tail d0 and -1 at the head d1;
// loop edges give a zero column. Kept independent of the library's boundary
// so the two can check each other.
inline Eigen::MatrixXd incidence_matrix(const pumpq::Graph& g) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g.n_vertices, g.n_edges());
    for (int a = 0; a < g.n_edges(); ++a) {
        if (g.edges[a].is_loop()) continue;
        D(g.edges[a].d0, a) += 1.0;
        D(g.edges[a].d1, a) -= 1.0;
    }
    return D;
}

}  // namespace testutil
