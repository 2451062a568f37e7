#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pumpq/errors.hpp"

namespace pumpq {

/// Oriented edge of a multigraph. Both endpoints of a loop edge coincide.
/// The stored orientation always runs from the smaller vertex index d0 to the
/// larger one d1; a positive chain coefficient means flow from d0 towards d1.
struct Edge {
    int d0 = 0;
    int d1 = 0;
    bool is_loop() const { return d0 == d1; }
};

/// Finite connected multigraph with an explicit edge list. Parallel edges and
/// loop edges are allowed; vertex and edge indices are dense and 0-based.
struct Graph {
    int n_vertices = 0;
    std::vector<Edge> edges;

    int n_edges() const { return static_cast<int>(edges.size()); }
    /// First Betti number |E| - |V| + 1 (valid for connected graphs).
    int betti() const { return n_edges() - n_vertices + 1; }
};

Graph make_graph(int n_vertices, const std::vector<std::pair<int, int>>& edges);

/// Throws IndexOutOfRangeError for bad endpoints or orientation, and
/// DisconnectedError when the underlying graph is not connected.
void validate_graph(const Graph& g);

/// Boundary of an edge chain: (∂c)_v = sum_a c_a ([v = d0(a)] - [v = d1(a)]).
/// Loop edges contribute nothing.
Eigen::VectorXd boundary(const Graph& g, const Eigen::VectorXd& chain);
Eigen::VectorXi boundary(const Graph& g, const Eigen::VectorXi& chain);

/// Coboundary of a vertex function: (∂* f)_a = f_{d0(a)} - f_{d1(a)}.
Eigen::VectorXd coboundary(const Graph& g, const Eigen::VectorXd& f);

/// Fundamental cycle basis relative to a fixed reference spanning tree (the
/// greedily retained low-index edges). Column k of `cycles` is the integer
/// chain of the cycle attached to non-tree edge basis_edges[k]; a loop edge is
/// its own cycle.
struct CycleBasis {
    std::vector<int> tree_edges;   ///< reference spanning tree, ascending
    std::vector<int> basis_edges;  ///< non-tree edges, ascending
    Eigen::MatrixXi cycles;        ///< n_edges x betti integer chain matrix

    int size() const { return static_cast<int>(basis_edges.size()); }
};

CycleBasis cycle_basis(const Graph& g);

/// Coordinates of a conserved chain in the fundamental cycle basis: the
/// components on the non-tree edges. Throws NotConservedError when the
/// boundary of `chain` exceeds `tol` (exact zero required for integer chains).
Eigen::VectorXd to_cycle_coords(const Graph& g, const CycleBasis& basis,
                                const Eigen::VectorXd& chain, double tol = 1e-9);
Eigen::VectorXi to_cycle_coords(const Graph& g, const CycleBasis& basis,
                                const Eigen::VectorXi& chain);

/// An edge chain together with its cycle coordinates and the measured
/// boundary residual. Integer-valued currents also carry exact coordinates.
struct CurrentReport {
    Eigen::VectorXd chain;
    Eigen::VectorXd coords;
    double divergence_residual = 0.0;
    bool integral = false;
    Eigen::VectorXi chain_int;
    Eigen::VectorXi coords_int;
};

/// Builds a report without throwing: coordinates are read off the basis edges
/// and the boundary residual is recorded for the caller to judge.
CurrentReport make_current_report(const Graph& g, const CycleBasis& basis,
                                  const Eigen::VectorXd& chain);
CurrentReport make_current_report(const Graph& g, const CycleBasis& basis,
                                  const Eigen::VectorXi& chain);

}  // namespace pumpq
