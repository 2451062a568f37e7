#include "pumpq/adiabatic.hpp"

#include <cmath>

#include "pumpq/params.hpp"
#include "pumpq/trees.hpp"

namespace pumpq {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::VectorXd solve_A(const Graph& g, const Eigen::VectorXd& W, double beta,
                        const Eigen::VectorXd& x, double zero_sum_tol) {
    if (x.size() != g.n_vertices || W.size() != g.n_edges())
        throw DimensionMismatchError("load or barrier vector does not match the graph shape");
    double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (std::abs(x.sum()) > zero_sum_tol * scale)
        throw NotZeroSumError("load must sum to zero, got " + std::to_string(x.sum()));

    const int n = g.n_vertices;
    // Conductances exp(-beta (W - min W)) lie in (0, 1]; the common factor
    // cancels between the Laplacian solve and the flow reconstruction.
    double wmin = g.n_edges() > 0 ? W.minCoeff() : 0.0;
    VectorXd cond(g.n_edges());
    MatrixXd L = MatrixXd::Zero(n, n);
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        cond[a] = std::exp(-beta * (W[a] - wmin));
        if (e.is_loop()) continue;
        L(e.d0, e.d0) += cond[a];
        L(e.d1, e.d1) += cond[a];
        L(e.d0, e.d1) -= cond[a];
        L(e.d1, e.d0) -= cond[a];
    }
    // Rank-one regularisation pins the constant mode without moving the
    // solution on the zero-sum complement.
    L.array() += 1.0 / n;
    VectorXd phi = L.ldlt().solve(-x);

    VectorXd y(g.n_edges());
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        y[a] = e.is_loop() ? 0.0 : cond[a] * (phi[e.d0] - phi[e.d1]);
    }
    return y;
}

Eigen::VectorXd tree_A(const Graph& g, const Eigen::VectorXd& W, double beta, int base, int j) {
    std::vector<SpanningTree> trees = enumerate_spanning_trees(g);
    VectorXd gibbs = tree_boltzmann(trees, W, beta);
    VectorXd out = VectorXd::Zero(g.n_edges());
    for (std::size_t t = 0; t < trees.size(); ++t)
        out += gibbs[t] * path_chain(g, trees[t], base, j).cast<double>();
    return out;
}

Eigen::VectorXd tree_A_apply(const Graph& g, const Eigen::VectorXd& W, double beta,
                             const Eigen::VectorXd& x, double zero_sum_tol) {
    if (x.size() != g.n_vertices)
        throw DimensionMismatchError("load length does not match the vertex count");
    double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (std::abs(x.sum()) > zero_sum_tol * scale)
        throw NotZeroSumError("load must sum to zero, got " + std::to_string(x.sum()));

    std::vector<SpanningTree> trees = enumerate_spanning_trees(g);
    VectorXd gibbs = tree_boltzmann(trees, W, beta);
    VectorXd out = VectorXd::Zero(g.n_edges());
    for (std::size_t t = 0; t < trees.size(); ++t) {
        // sum_j x_j path(0 -> j) with the common base 0; zero-sum input makes
        // the base choice immaterial.
        for (int j = 0; j < g.n_vertices; ++j) {
            if (x[j] == 0.0) continue;
            out += (gibbs[t] * x[j]) * path_chain(g, trees[t], 0, j).cast<double>();
        }
    }
    return out;
}

CurrentReport analytic_current_sampled(const Graph& g, const DriveSampler& drive, double beta,
                                       const AdiabaticOptions& opts) {
    CycleBasis basis = cycle_basis(g);

    auto integrand = [&](double t) -> VectorXd {
        ProtocolSample s = drive(t);
        VectorXd drift = boltzmann_derivative(s.E, s.Edot, beta);
        return solve_A(g, s.W, beta, drift, 1e-6);
    };

    auto simpson = [&](int nodes) -> VectorXd {
        VectorXd acc = VectorXd::Zero(g.n_edges());
        for (int k = 0; k <= nodes; ++k) {
            double wgt = (k == 0 || k == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            acc += wgt * integrand(static_cast<double>(k) / nodes);
        }
        return acc / (3.0 * nodes);
    };

    int nodes = std::max(4, opts.initial_nodes + (opts.initial_nodes % 2));
    VectorXd q = simpson(nodes);
    CurrentReport report = make_current_report(g, basis, q);
    while (nodes < opts.max_nodes) {
        nodes *= 2;
        VectorXd q2 = simpson(nodes);
        CurrentReport r2 = make_current_report(g, basis, q2);
        bool coords_settled = basis.size() == 0 ||
                              (r2.coords - report.coords).cwiseAbs().maxCoeff() < opts.coord_tol;
        report = r2;
        q = q2;
        if (coords_settled && report.divergence_residual <= opts.residual_tol) return report;
    }
    if (report.divergence_residual > opts.residual_tol)
        throw Error(ErrorKind::Numerical,
                    "adiabatic quadrature failed to conserve the charge: residual " +
                        std::to_string(report.divergence_residual));
    return report;
}

CurrentReport analytic_current(const Graph& g, const Protocol& proto, double beta,
                               const AdiabaticOptions& opts) {
    check_protocol_arity(g, proto);
    return analytic_current_sampled(g, drive_of(proto), beta, opts);
}

}  // namespace pumpq
