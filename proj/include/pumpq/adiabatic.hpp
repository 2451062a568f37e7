#pragma once

#include <Eigen/Dense>

#include "pumpq/graph.hpp"
#include "pumpq/protocol.hpp"

namespace pumpq {

/// The conduction inverse A: for a zero-sum vertex load x, the unique edge
/// flow y with -boundary(y) = x lying in the image of g^{-1} coboundary
/// (equivalently, kappa-orthogonal to every cycle under the weights
/// g = exp(beta W)). Solved through the weighted graph Laplacian; weights are
/// shift-invariant so large beta is safe.
Eigen::VectorXd solve_A(const Graph& g, const Eigen::VectorXd& W, double beta,
                        const Eigen::VectorXd& x, double zero_sum_tol = 1e-9);

/// Elementary conduction flows from the spanning-tree expansion:
/// A^e(j) = sum_T path(i -> j in T) * gibbs_T. The base vertex i only shifts
/// A^e(j) by a j-independent chain, so differences are base independent.
Eigen::VectorXd tree_A(const Graph& g, const Eigen::VectorXd& W, double beta, int base, int j);

/// Tree-expansion route for a full zero-sum load: sum_j x_j A^e(j).
Eigen::VectorXd tree_A_apply(const Graph& g, const Eigen::VectorXd& W, double beta,
                             const Eigen::VectorXd& x, double zero_sum_tol = 1e-9);

struct AdiabaticOptions {
    int initial_nodes = 64;      ///< starting Simpson nodes (even)
    int max_nodes = 1 << 21;     ///< refinement cap
    double coord_tol = 1e-8;     ///< stop once cycle coordinates settle
    double residual_tol = 1e-10; ///< required conservation of the result
};

/// Zero-temperature-limit pumped charge of a drive at inverse temperature
/// beta: the period integral of A applied to the equilibrium drift, by
/// composite Simpson quadrature with node doubling.
CurrentReport analytic_current(const Graph& g, const Protocol& proto, double beta,
                               const AdiabaticOptions& opts = {});

/// Same quadrature over an arbitrary smooth drive sampler (used to check
/// parametrisation invariance).
CurrentReport analytic_current_sampled(const Graph& g, const DriveSampler& drive, double beta,
                                       const AdiabaticOptions& opts = {});

}  // namespace pumpq
