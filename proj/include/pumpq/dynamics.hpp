#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pumpq/graph.hpp"
#include "pumpq/params.hpp"
#include "pumpq/protocol.hpp"

namespace pumpq {

/// Markov generator H = -boundary g^{-1} coboundary kappa of the hopping
/// dynamics, stored with a global exponent shift: the true generator is
/// exp(log_scale) * matrix. Column sums vanish, off-diagonal entries are
/// non-negative, and kappa_i H_ij = kappa_j H_ji (detailed balance).
struct MasterOperator {
    Eigen::MatrixXd matrix;        ///< shifted generator, entries O(1)
    double log_scale = 0.0;        ///< beta * max_(i,a incident) (E_i - W_a)
    Eigen::VectorXd kappa_scaled;  ///< exp(beta (E - max E))

    /// exp(log_scale); throws OverflowError when not representable.
    double scale() const;
    Eigen::MatrixXd true_matrix() const;
};

MasterOperator master_operator(const Graph& g, const ParamPoint& p, double beta);

/// Similarity-symmetrised generator kappa^{1/2} H kappa^{-1/2} under the same
/// shift; shares the spectrum of the shifted generator and is exactly
/// symmetric by construction.
Eigen::MatrixXd symmetrized_master(const Graph& g, const ParamPoint& p, double beta,
                                   double log_scale);

/// exp(s * H_true) for the frozen generator, evaluated through the
/// symmetrised eigendecomposition. Serves as the independent propagator
/// reference for constant drives.
Eigen::MatrixXd propagator_frozen(const Graph& g, const ParamPoint& p, double beta, double s);

/// Edge current J = tau_d g^{-1} coboundary kappa rho. Positive entries flow
/// from d0 towards d1; loop edges carry no current.
Eigen::VectorXd instantaneous_current(const Graph& g, const ParamPoint& p, double beta,
                                      double tau_d, const Eigen::VectorXd& rho);

enum class Scheme {
    Auto,         ///< explicit stepping unless the drive is stiff
    RK4,          ///< adaptive classical Runge-Kutta with step doubling
    ExpMidpoint,  ///< adaptive exponential midpoint rule (frozen-coefficient exp)
};

struct EvolveOptions {
    double tol = 1e-8;   ///< target accuracy per unit time
    Scheme scheme = Scheme::Auto;
    long max_steps = 2'000'000;
};

/// Propagates a distribution through the driven master equation
/// drho/dt = tau_d H(t) rho from t0 to t1. Total mass is preserved to
/// rounding; throws StepFailureError when the controller stalls.
Eigen::VectorXd evolve(const Graph& g, const Protocol& proto, double beta, double tau_d,
                       const Eigen::VectorXd& p0, double t0, double t1,
                       const EvolveOptions& opts = {});

/// Period propagator U(1, 0).
Eigen::MatrixXd monodromy(const Graph& g, const Protocol& proto, double beta, double tau_d,
                          const EvolveOptions& opts = {});

/// Orthonormal basis of the zero-sum subspace, as columns of an n x (n-1)
/// matrix orthogonal to the all-ones vector.
Eigen::MatrixXd zero_sum_basis(int n);

/// Operator 2-norm of M restricted to the zero-sum subspace.
double restricted_norm(const Eigen::MatrixXd& M);

/// Eigenvector of M at the eigenvalue closest to 1, normalised to unit sum.
Eigen::VectorXd monodromy_fixed_point(const Eigen::MatrixXd& M);

/// The unique periodic solution of the driven master equation, constructed
/// from the deviation xi = rho - rho^B: solve
/// (I - U(1,0)) xi(0) = -int_0^1 U(1,s) drho^B/ds ds on the zero-sum subspace
/// and propagate rho(0) = rho^B(0) + xi(0) across one period.
struct PeriodicSolution {
    std::vector<double> t_grid;
    std::vector<Eigen::VectorXd> rho;
    Eigen::VectorXd xi0;
    Eigen::MatrixXd monodromy_mat;
    double restricted_inverse_norm = 0.0;  ///< ||(I - U_r)^{-1}|| on zero-sum
    double period_residual = 0.0;          ///< ||rho(1) - rho(0)||_inf

    Eigen::VectorXd rho_at(double t) const;
};

PeriodicSolution periodic_solution(const Graph& g, const Protocol& proto, double beta,
                                   double tau_d, const EvolveOptions& opts = {},
                                   int grid_points = 257);

/// Pumped charge over one period of the periodic solution, with its cycle
/// coordinates; the boundary residual of the report equals rho(0) - rho(1)
/// up to integration error.
CurrentReport average_current(const Graph& g, const Protocol& proto, double beta, double tau_d,
                              const EvolveOptions& opts = {});

/// Relaxation data of the drive: lambda is the slowest instantaneous decay
/// rate over the period (infimum of the spectral gap), monodromy_norm the
/// restricted norm of U(1,0), and fitted_c = monodromy_norm * exp(lambda tau_d).
struct DecayEstimate {
    double lambda = 0.0;
    double monodromy_norm = 0.0;
    double fitted_c = 0.0;
};

DecayEstimate decay_constants(const Graph& g, const Protocol& proto, double beta, double tau_d,
                              int samples = 64, const EvolveOptions& opts = {});

}  // namespace pumpq
