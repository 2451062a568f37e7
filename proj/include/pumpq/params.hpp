#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "pumpq/graph.hpp"
#include "pumpq/trees.hpp"

namespace pumpq {

/// One point of the control space: a well depth per vertex and a barrier
/// height per edge.
struct ParamPoint {
    Eigen::VectorXd E;  ///< vertex energies
    Eigen::VectorXd W;  ///< edge barriers
};

/// Gibbs distribution over vertices at inverse temperature beta, evaluated
/// with a max shift so arbitrarily large beta stays finite.
Eigen::VectorXd boltzmann(const Eigen::VectorXd& E, double beta);

/// Time derivative of the Gibbs distribution along a drive E(t):
/// rho_i' = beta * rho_i * (<rho, Edot> - Edot_i).
Eigen::VectorXd boltzmann_derivative(const Eigen::VectorXd& E, const Eigen::VectorXd& Edot,
                                     double beta);

/// Combinatorial shadow of a parameter point: h0 marks the near-minimal
/// vertices with 1 (others 2), h1 ranks the edge barriers into tolerance
/// groups numbered 1..levels from the lowest barrier up.
struct HeightFunction {
    std::vector<int> h0;
    std::vector<int> h1;
    int levels = 0;

    std::vector<int> minima() const;  ///< vertices with h0 == 1
};

/// Classifies a parameter point at the given tolerances. Vertices within
/// delta_e of the minimum energy are minima. Barrier values are grouped by
/// single linkage at gap delta_w; a gap strictly inside (delta_w, 2*delta_w)
/// separates groups that could chain together under the same tolerance, so it
/// raises AmbiguousGroupingError instead of silently picking a side.
HeightFunction height_function(const ParamPoint& p, double delta_e = 1e-6,
                               double delta_w = 1e-6);

/// Dimension of the stratum classified by h: (1 + #non-minimal vertices) +
/// #barrier levels.
int cell_dimension(const HeightFunction& h);

/// All total edge orders refining the barrier ranking h1 (each group permuted
/// internally, groups in level order). Deterministic lexicographic output;
/// throws CountLimitError when the count, a product of factorials, exceeds cap.
std::vector<EdgeOrder> barrier_resolutions(const HeightFunction& h, std::size_t cap = 100'000);

/// Forest attached to a height function: the intersection of the greedy trees
/// over every barrier resolution, together with its vertex components.
struct Forest {
    std::vector<int> edges;      ///< ascending edge ids present in the forest
    std::vector<int> component;  ///< component id per vertex
    int n_components = 0;
};

Forest forest_of(const Graph& g, const HeightFunction& h, std::size_t cap = 100'000);

/// A connected subtree (possibly a single vertex) used as an arc tree.
struct TreeComponent {
    std::vector<int> vertices;
    std::vector<int> edges;

    bool contains_vertex(int v) const;
};

struct InessentialResult {
    bool inessential = false;
    TreeComponent tree;  ///< component holding the minima; valid when inessential
};

/// A height function is inessential when all its minima live in one component
/// of its forest. Heights with at most one minimum are inessential with the
/// trivial single-vertex tree and need no resolution enumeration.
InessentialResult is_inessential(const Graph& g, const HeightFunction& h,
                                 std::size_t cap = 100'000);

/// Jump of the greedy tree path across a top-dimensional wall: for the two
/// resolutions of the single tie {alpha, beta_edge}, the difference of the
/// signed i -> j tree paths, with the alpha-lowest resolution taken first.
/// Nonzero exactly when the wall is essential.
Eigen::VectorXi top_cell_current(const Graph& g, std::pair<int, int> minima,
                                 std::pair<int, int> tie, const HeightFunction& h);

/// A codimension-2 wall of the classification: two tied minima and one tied
/// adjacent barrier pair inside an otherwise injective ranking.
struct CellDescriptor {
    std::pair<int, int> minima;      ///< i < j
    std::pair<int, int> tie;         ///< tied edge pair a < b
    HeightFunction h;                ///< full height function of the wall
    int dimension = 0;
    bool essential_by_current = false;
    bool essential_by_forest = false;
    Eigen::VectorXi current;         ///< jump chain (alpha-lowest minus beta-lowest)
};

/// Every top cell: all vertex pairs crossed with all single-tie barrier
/// rankings. Both essentiality routes are evaluated for each cell.
std::vector<CellDescriptor> enumerate_top_cells(const Graph& g, std::size_t cap = 5'000'000);

/// The essential top cells only (either route; they agree, which the tests
/// and the acceptance suite verify cell by cell).
std::vector<CellDescriptor> enumerate_essential_cells(const Graph& g,
                                                      std::size_t cap = 5'000'000);

}  // namespace pumpq
