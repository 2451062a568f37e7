#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "pumpq/graph.hpp"

namespace pumpq {

/// Spanning tree given by its edge ids (ascending, exactly n_vertices - 1).
struct SpanningTree {
    std::vector<int> edges;
};

/// Total order on the edge ids, listed from the lowest rank to the highest.
using EdgeOrder = std::vector<int>;

/// All spanning trees, ordered lexicographically by their sorted edge lists.
/// Loop edges never appear. Throws CountLimitError beyond `cap` trees.
std::vector<SpanningTree> enumerate_spanning_trees(const Graph& g, std::size_t cap = 1'000'000);

/// Greedy tree of a total edge order: walk the order from the top and delete
/// every non-bridge edge, keeping low-ranked edges. For barrier values
/// compatible with the order this maximises the retained escape weight, i.e.
/// it is the unique maximiser of tree_weight among spanning trees.
SpanningTree sigma_tree(const Graph& g, const EdgeOrder& order);

/// Escape weight w(T, W) = sum of W over the non-tree edges.
double tree_weight(const Graph& g, const SpanningTree& tree, const Eigen::VectorXd& W);

/// Signed chain of the unique path i -> j inside the given subforest: entry
/// +1 when the path traverses an edge along its stored orientation, -1
/// against it. Throws when i and j are not connected by `tree_edges`.
Eigen::VectorXi path_chain(const Graph& g, const std::vector<int>& tree_edges, int i, int j);
Eigen::VectorXi path_chain(const Graph& g, const SpanningTree& tree, int i, int j);

/// Gibbs weights over spanning trees for barrier values W at inverse
/// temperature beta: p_T proportional to exp(-beta * sum_{a in T} W_a),
/// evaluated with a max shift so large beta cannot overflow.
Eigen::VectorXd tree_boltzmann(const std::vector<SpanningTree>& trees, const Eigen::VectorXd& W,
                               double beta);

}  // namespace pumpq
