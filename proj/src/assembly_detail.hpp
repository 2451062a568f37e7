#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pumpq/graph.hpp"

namespace pumpq::detail {

// Largest hopping exponent E_i - W_a over incident non-loop pairs; assemblies
// subtract it so every stored rate lies in (0, 1].
inline double master_shift(const Graph& g, const Eigen::VectorXd& E, const Eigen::VectorXd& W) {
    double c = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        if (e.is_loop()) continue;
        c = std::max(c, std::max(E[e.d0], E[e.d1]) - W[a]);
    }
    return std::isfinite(c) ? c : 0.0;
}

// Per-edge accumulation of -boundary g^{-1} twist coboundary kappa under an
// exponent shift. The twist multiplies the whole edge block, diagonal
// included; twist(a) = 1 yields the plain generator bit for bit, which keeps
// the twisted and untwisted assemblies comparable at machine precision.
template <typename Matrix, typename TwistFn>
void accumulate_master(const Graph& g, const Eigen::VectorXd& E, const Eigen::VectorXd& W,
                       double beta, double shift, Matrix& H, TwistFn&& twist) {
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        if (e.is_loop()) continue;
        auto lam = twist(a);
        double ra = std::exp(beta * (E[e.d0] - W[a] - shift));
        double rb = std::exp(beta * (E[e.d1] - W[a] - shift));
        H(e.d0, e.d0) -= lam * ra;
        H(e.d1, e.d0) += lam * ra;
        H(e.d1, e.d1) -= lam * rb;
        H(e.d0, e.d1) += lam * rb;
    }
}

}  // namespace pumpq::detail
