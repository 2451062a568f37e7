#include "pumpq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "assembly_detail.hpp"

namespace pumpq {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using detail::master_shift;

void assemble_scaled_master(const Graph& g, const VectorXd& E, const VectorXd& W, double beta,
                            double shift, MatrixXd& H) {
    H.setZero(g.n_vertices, g.n_vertices);
    detail::accumulate_master(g, E, W, beta, shift, H, [](int) { return 1.0; });
}

void assemble_scaled_flux(const Graph& g, const VectorXd& E, const VectorXd& W, double beta,
                          double shift, MatrixXd& F) {
    F.setZero(g.n_edges(), g.n_vertices);
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        if (e.is_loop()) continue;
        F(a, e.d0) += std::exp(beta * (E[e.d0] - W[a] - shift));
        F(a, e.d1) -= std::exp(beta * (E[e.d1] - W[a] - shift));
    }
}

struct DriveContext {
    const Graph* g = nullptr;
    const Protocol* proto = nullptr;
    double beta = 0.0;
    double tau_d = 0.0;
    double cstar = 0.0;    // global shift over the whole period
    double tau_eff = 0.0;  // tau_d * exp(beta * cstar)
    double stiffness = 0.0;
};

DriveContext make_context(const Graph& g, const Protocol& proto, double beta, double tau_d) {
    check_protocol_arity(g, proto);
    DriveContext ctx{&g, &proto, beta, tau_d};

    double c = -std::numeric_limits<double>::infinity();
    const int scan = 1024;
    for (int k = 0; k <= scan; ++k) {
        ProtocolSample s = evaluate_protocol(proto, static_cast<double>(k) / scan);
        c = std::max(c, master_shift(g, s.E, s.W));
    }
    ctx.cstar = std::isfinite(c) ? c : 0.0;

    ctx.tau_eff = tau_d * std::exp(beta * ctx.cstar);
    if (!std::isfinite(ctx.tau_eff))
        throw OverflowError("effective rate tau_d * exp(beta * " + std::to_string(ctx.cstar) +
                            ") exceeds double range");

    MatrixXd H;
    double maxdiag = 0.0;
    for (int k = 0; k < 64; ++k) {
        ProtocolSample s = evaluate_protocol(proto, (k + 0.5) / 64.0);
        assemble_scaled_master(g, s.E, s.W, beta, ctx.cstar, H);
        maxdiag = std::max(maxdiag, H.diagonal().cwiseAbs().maxCoeff());
    }
    ctx.stiffness = ctx.tau_eff * maxdiag;
    return ctx;
}

Scheme resolve_scheme(const DriveContext& ctx, const EvolveOptions& opts) {
    if (opts.scheme != Scheme::Auto) return opts.scheme;
    // Explicit stepping needs roughly stiffness/2.8 steps for stability; switch
    // to the frozen-coefficient exponential rule when that becomes the binder.
    return ctx.stiffness > 2.0e5 ? Scheme::ExpMidpoint : Scheme::RK4;
}

// Vector runs integrate the deviation y = rho - rho^B(t), which obeys
// y' = tau H y - (rho^B)'. The deviation is zero-sum and stays O(1/tau) once
// relaxed, so step doubling measures a genuinely convergent quantity even when
// tau H relaxes far below the step size; integrating rho itself there would
// compare frozen quasi-stationary profiles at shifted times, an O(h) gap that
// no step size can beat. Matrix runs propagate the plain linear flow.
struct IntegratorTask {
    const DriveContext* ctx;
    bool deviation = false;  // vector run: forced deviation equation
    bool quad = false;       // accumulate the edge flux quadrature alongside
};

VectorXd forcing_at(const DriveContext& ctx, double t) {
    ProtocolSample s = evaluate_protocol(*ctx.proto, t);
    return -boltzmann_derivative(s.E, s.Edot, ctx.beta);
}

// Classical RK4 update over [t, t+h] from preassembled operators at t, t+h/2
// and t+h. The optional quadrature component integrates tau_eff F(t) y(t).
void rk4_sub(const IntegratorTask& task, double h, const MatrixXd& H0, const MatrixXd& Hm,
             const MatrixXd& H1, const VectorXd* f0, const VectorXd* fm, const VectorXd* f1,
             const MatrixXd* F0, const MatrixXd* Fm, const MatrixXd* F1, MatrixXd& X,
             VectorXd* q) {
    const double te = task.ctx->tau_eff;
    auto stage = [&](const MatrixXd& H, const VectorXd* f, const MatrixXd& Y) -> MatrixXd {
        MatrixXd r = te * (H * Y);
        if (task.deviation && f) r.col(0) += *f;
        return r;
    };
    MatrixXd k1 = stage(H0, f0, X);
    MatrixXd k2 = stage(Hm, fm, X + (h / 2) * k1);
    MatrixXd k3 = stage(Hm, fm, X + (h / 2) * k2);
    MatrixXd k4 = stage(H1, f1, X + h * k3);
    if (task.quad && q) {
        VectorXd q1 = te * (*F0 * X.col(0));
        VectorXd q2 = te * (*Fm * (X.col(0) + (h / 2) * k1.col(0)));
        VectorXd q3 = te * (*Fm * (X.col(0) + (h / 2) * k2.col(0)));
        VectorXd q4 = te * (*F1 * (X.col(0) + h * k3.col(0)));
        *q += (h / 6) * (q1 + 2 * q2 + 2 * q3 + q4);
    }
    X += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

// exp of the nilpotent-augmented block [[A, I, 0], [0, 0, I], [0, 0, 0]]
// yields e^A together with phi1(A) = A^-1(e^A - I) and phi2(A) =
// A^-2(e^A - I - A) in the top row; with_phi2 trims the block when the
// quadrature is not needed.
void exp_phis(const MatrixXd& A, bool with_phi2, MatrixXd& E, MatrixXd& P1, MatrixXd& P2) {
    const int n = static_cast<int>(A.rows());
    const int m = with_phi2 ? 3 * n : 2 * n;
    MatrixXd B = MatrixXd::Zero(m, m);
    B.topLeftCorner(n, n) = A;
    B.block(0, n, n, n) = MatrixXd::Identity(n, n);
    if (with_phi2) B.block(n, 2 * n, n, n) = MatrixXd::Identity(n, n);
    MatrixXd EB = B.exp();
    E = EB.topLeftCorner(n, n);
    P1 = EB.block(0, n, n, n);
    if (with_phi2) P2 = EB.block(0, 2 * n, n, n);
}

// Exponential midpoint update over [t, t+h]: exact for a frozen generator,
// second order under a varying one, and uniformly stable however fast the
// relaxation. The within-step quadrature integrates the frozen flow exactly:
// int_0^h y(s) ds = h phi1(A) y0 + h^2 phi2(A) r with A = h tau H(mid).
void expm_sub(const IntegratorTask& task, double t, double h, MatrixXd& X, VectorXd* q) {
    const DriveContext& ctx = *task.ctx;
    ProtocolSample s = evaluate_protocol(*ctx.proto, t + h / 2);
    MatrixXd H;
    assemble_scaled_master(*ctx.g, s.E, s.W, ctx.beta, ctx.cstar, H);
    MatrixXd E, P1, P2;
    exp_phis((h * ctx.tau_eff) * H, task.quad, E, P1, P2);
    VectorXd r;
    if (task.deviation) r = forcing_at(ctx, t + h / 2);
    if (task.quad && q) {
        MatrixXd F;
        assemble_scaled_flux(*ctx.g, s.E, s.W, ctx.beta, ctx.cstar, F);
        VectorXd ybar = P1 * X.col(0);
        if (task.deviation) ybar += h * (P2 * r);
        *q += ctx.tau_eff * h * (F * ybar);
    }
    MatrixXd X1 = E * X;
    if (task.deviation) X1.col(0) += h * (P1 * r);
    X = X1;
}

void integrate(const IntegratorTask& task, Scheme scheme, double tol, long max_steps, double t0,
               double t1, MatrixXd& X, VectorXd* q, double* h_carry = nullptr) {
    const DriveContext& ctx = *task.ctx;
    const double span = t1 - t0;
    if (span <= 0.0) return;
    double t = t0;
    double h = (h_carry && *h_carry > 0) ? std::min(*h_carry, span) : span / 64.0;
    const double h_floor = 1e-13 * std::max(span, 1.0);
    const int order = (scheme == Scheme::RK4) ? 4 : 2;
    const double richardson = (scheme == Scheme::RK4) ? 15.0 : 3.0;
    long steps = 0;

    MatrixXd Hs[5], Fs[5];
    VectorXd fs[5];

    while (t < t1 - 1e-15 * std::max(1.0, std::abs(t1))) {
        h = std::min(h, t1 - t);
        if (++steps > max_steps)
            throw StepFailureError("integrator exceeded " + std::to_string(max_steps) + " steps");

        MatrixXd X1 = X, X2 = X;
        VectorXd q1, q2;
        if (q) q1 = q2 = *q;

        if (scheme == Scheme::RK4) {
            for (int j = 0; j < 5; ++j) {
                double tj = t + j * h / 4;
                ProtocolSample s = evaluate_protocol(*ctx.proto, tj);
                assemble_scaled_master(*ctx.g, s.E, s.W, ctx.beta, ctx.cstar, Hs[j]);
                if (task.quad)
                    assemble_scaled_flux(*ctx.g, s.E, s.W, ctx.beta, ctx.cstar, Fs[j]);
                if (task.deviation) fs[j] = -boltzmann_derivative(s.E, s.Edot, ctx.beta);
            }
            rk4_sub(task, h, Hs[0], Hs[2], Hs[4], &fs[0], &fs[2], &fs[4], &Fs[0], &Fs[2], &Fs[4],
                    X1, q ? &q1 : nullptr);
            rk4_sub(task, h / 2, Hs[0], Hs[1], Hs[2], &fs[0], &fs[1], &fs[2], &Fs[0], &Fs[1],
                    &Fs[2], X2, q ? &q2 : nullptr);
            rk4_sub(task, h / 2, Hs[2], Hs[3], Hs[4], &fs[2], &fs[3], &fs[4], &Fs[2], &Fs[3],
                    &Fs[4], X2, q ? &q2 : nullptr);
        } else {
            expm_sub(task, t, h, X1, q ? &q1 : nullptr);
            expm_sub(task, t, h / 2, X2, q ? &q2 : nullptr);
            expm_sub(task, t + h / 2, h / 2, X2, q ? &q2 : nullptr);
        }

        MatrixXd diff = X2 - X1;
        if (!task.deviation && scheme == Scheme::ExpMidpoint) {
            // Column sums are conserved exactly, and in the strongly relaxing
            // regime every column approaches the same quasi-stationary
            // profile: the column-constant part of the difference is the
            // O(h) phase of that profile, which cancels on zero-sum inputs.
            // Judge the propagator by its action on zero-sum vectors.
            const int n = static_cast<int>(diff.cols());
            diff -= (diff.rowwise().sum() / n).replicate(1, n);
        }
        // Error-per-unit-step acceptance on the state and, separately, on the
        // accumulated charge. Each budget keeps an absolute floor below which
        // the measured difference is ignored: a flat eps-scale one against
        // the roundoff of a single update, and for deviation runs a larger
        // one (1e-10) because there the difference measures the phase of a
        // slaved quasi-stationary lag, which every step recomputes from
        // scratch rather than accumulates; transported charge never sees it,
        // having its own budget here.
        double err = diff.cwiseAbs().maxCoeff();
        double errq = q ? (q2 - q1).cwiseAbs().maxCoeff() : 0.0;
        double floor_x = task.deviation ? 1e-10 : 1e-12;
        double acc_x = std::max(tol * h, floor_x) * std::max(1.0, X.cwiseAbs().maxCoeff());
        double acc_q = q ? std::max(tol * h, 1e-12) * std::max(1.0, q->cwiseAbs().maxCoeff())
                         : 1.0;
        if (!std::isfinite(err) || !std::isfinite(errq))
            err = errq = std::numeric_limits<double>::max();
        if (std::getenv("PUMPQ_TRACE") && steps % 1000 == 1)
            std::fprintf(stderr, "t=%.9g h=%.3g err=%.3g errq=%.3g acc=%.3g dev=%d q=%d X=%.3g\n",
                         t, h, err, errq, acc_x, static_cast<int>(task.deviation),
                         static_cast<int>(task.quad), X.cwiseAbs().maxCoeff());

        if (err <= acc_x && errq <= acc_q) {
            X = X2 + (X2 - X1) / richardson;
            if (q) *q = q2 + (q2 - q1) / richardson;
            t += h;
            double ratio = std::min(err > 0 ? acc_x / err : 1e6,
                                    errq > 0 ? acc_q / errq : 1e6);
            h *= std::clamp(0.9 * std::pow(ratio, 1.0 / (order + 1)), 1.0, 4.0);
        } else {
            double ratio = std::min(err > 0 ? acc_x / err : 1.0, errq > 0 ? acc_q / errq : 1.0);
            h *= std::clamp(0.9 * std::pow(ratio, 1.0 / (order + 1)), 0.05, 0.9);
        }
        if (h < h_floor)
            throw StepFailureError("step size collapsed below " + std::to_string(h_floor) +
                                   " at t = " + std::to_string(t));
    }
    if (h_carry) *h_carry = h;
}

}  // namespace

double MasterOperator::scale() const {
    double s = std::exp(log_scale);
    if (!std::isfinite(s))
        throw OverflowError("generator scale exp(" + std::to_string(log_scale) +
                            ") exceeds double range");
    return s;
}

Eigen::MatrixXd MasterOperator::true_matrix() const { return scale() * matrix; }

MasterOperator master_operator(const Graph& g, const ParamPoint& p, double beta) {
    validate_graph(g);
    if (p.E.size() != g.n_vertices || p.W.size() != g.n_edges())
        throw DimensionMismatchError("parameter point does not match the graph shape");

    MasterOperator op;
    double shift = master_shift(g, p.E, p.W);
    op.log_scale = beta * shift;
    if (!std::isfinite(std::exp(op.log_scale))) {
        // Report the pair realising the extreme rate.
        for (int a = 0; a < g.n_edges(); ++a) {
            const Edge& e = g.edges[a];
            if (e.is_loop()) continue;
            int v = p.E[e.d0] >= p.E[e.d1] ? e.d0 : e.d1;
            if (p.E[v] - p.W[a] == shift)
                throw OverflowError("rate exp(beta (E_" + std::to_string(v) + " - W_" +
                                    std::to_string(a) + ")) = exp(" +
                                    std::to_string(op.log_scale) + ") exceeds double range");
        }
        throw OverflowError("rate exponent " + std::to_string(op.log_scale) +
                            " exceeds double range");
    }
    assemble_scaled_master(g, p.E, p.W, beta, shift, op.matrix);
    op.kappa_scaled = (beta * (p.E.array() - p.E.maxCoeff())).exp();
    return op;
}

Eigen::MatrixXd symmetrized_master(const Graph& g, const ParamPoint& p, double beta,
                                   double log_scale) {
    double shift = beta != 0.0 ? log_scale / beta : 0.0;
    MatrixXd S = MatrixXd::Zero(g.n_vertices, g.n_vertices);
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        if (e.is_loop()) continue;
        S(e.d0, e.d0) -= std::exp(beta * (p.E[e.d0] - p.W[a] - shift));
        S(e.d1, e.d1) -= std::exp(beta * (p.E[e.d1] - p.W[a] - shift));
        double off = std::exp(beta * ((p.E[e.d0] + p.E[e.d1]) / 2 - p.W[a] - shift));
        S(e.d0, e.d1) += off;
        S(e.d1, e.d0) += off;
    }
    return S;
}

Eigen::MatrixXd propagator_frozen(const Graph& g, const ParamPoint& p, double beta, double s) {
    MasterOperator op = master_operator(g, p, beta);
    MatrixXd S = symmetrized_master(g, p, beta, op.log_scale);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    double s_eff = s * op.scale();
    VectorXd expo(es.eigenvalues().size());
    for (int k = 0; k < expo.size(); ++k) {
        double lam = es.eigenvalues()[k];
        expo[k] = std::abs(lam) < 1e-14 ? 1.0 : std::exp(s_eff * lam);
    }
    Eigen::ArrayXd half = op.kappa_scaled.array().sqrt();
    MatrixXd core = es.eigenvectors() * expo.asDiagonal() * es.eigenvectors().transpose();
    return (1.0 / half).matrix().asDiagonal() * core * half.matrix().asDiagonal();
}

Eigen::VectorXd instantaneous_current(const Graph& g, const ParamPoint& p, double beta,
                                      double tau_d, const Eigen::VectorXd& rho) {
    if (rho.size() != g.n_vertices)
        throw DimensionMismatchError("distribution length does not match the vertex count");
    double shift = master_shift(g, p.E, p.W);
    double tau_eff = tau_d * std::exp(beta * shift);
    if (!std::isfinite(tau_eff))
        throw OverflowError("current scale tau_d * exp(" + std::to_string(beta * shift) +
                            ") exceeds double range");
    MatrixXd F;
    assemble_scaled_flux(g, p.E, p.W, beta, shift, F);
    return tau_eff * (F * rho);
}

Eigen::VectorXd evolve(const Graph& g, const Protocol& proto, double beta, double tau_d,
                       const Eigen::VectorXd& p0, double t0, double t1,
                       const EvolveOptions& opts) {
    if (p0.size() != g.n_vertices)
        throw DimensionMismatchError("initial distribution does not match the vertex count");
    DriveContext ctx = make_context(g, proto, beta, tau_d);
    IntegratorTask task{&ctx, /*deviation=*/true};
    MatrixXd X = p0 - boltzmann(evaluate_protocol(proto, t0).E, beta);
    integrate(task, resolve_scheme(ctx, opts), opts.tol, opts.max_steps, t0, t1, X, nullptr);
    return boltzmann(evaluate_protocol(proto, t1).E, beta) + X.col(0);
}

Eigen::MatrixXd monodromy(const Graph& g, const Protocol& proto, double beta, double tau_d,
                          const EvolveOptions& opts) {
    DriveContext ctx = make_context(g, proto, beta, tau_d);
    IntegratorTask task{&ctx};
    MatrixXd X = MatrixXd::Identity(g.n_vertices, g.n_vertices);
    integrate(task, resolve_scheme(ctx, opts), opts.tol, opts.max_steps, 0.0, 1.0, X, nullptr);
    return X;
}

Eigen::MatrixXd zero_sum_basis(int n) {
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    Eigen::MatrixXd Q = qr.householderQ();
    return Q.rightCols(n - 1);
}

double restricted_norm(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    if (n <= 1) return 0.0;
    MatrixXd B = zero_sum_basis(n);
    MatrixXd Mr = B.transpose() * M * B;
    return Mr.jacobiSvd().singularValues()(0);
}

Eigen::VectorXd monodromy_fixed_point(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<MatrixXd> es(M);
    int best = 0;
    double dist = std::numeric_limits<double>::max();
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        double d = std::abs(es.eigenvalues()[k] - std::complex<double>(1.0, 0.0));
        if (d < dist) {
            dist = d;
            best = k;
        }
    }
    VectorXd v = es.eigenvectors().col(best).real();
    double total = v.sum();
    if (std::abs(total) < 1e-12)
        throw NearSingularMonodromyError("fixed-point eigenvector has vanishing mass");
    return v / total;
}

Eigen::VectorXd PeriodicSolution::rho_at(double t) const {
    t -= std::floor(t);
    const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
    std::size_t k = std::min(t_grid.size() - 1,
                             static_cast<std::size_t>(std::max<long>(1, it - t_grid.begin())));
    double t0 = t_grid[k - 1], t1 = t_grid[k];
    double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
    return (1 - w) * rho[k - 1] + w * rho[k];
}

PeriodicSolution periodic_solution(const Graph& g, const Protocol& proto, double beta,
                                   double tau_d, const EvolveOptions& opts, int grid_points) {
    DriveContext ctx = make_context(g, proto, beta, tau_d);
    Scheme scheme = resolve_scheme(ctx, opts);
    const int n = g.n_vertices;

    PeriodicSolution sol;

    // Period propagator.
    {
        IntegratorTask task{&ctx};
        MatrixXd X = MatrixXd::Identity(n, n);
        integrate(task, scheme, opts.tol, opts.max_steps, 0.0, 1.0, X, nullptr);
        sol.monodromy_mat = X;
    }

    // w = y(1) for the deviation started at zero: y' = tau H y - (rho^B)'.
    MatrixXd Y = MatrixXd::Zero(n, 1);
    {
        IntegratorTask task{&ctx, /*deviation=*/true};
        integrate(task, scheme, opts.tol, opts.max_steps, 0.0, 1.0, Y, nullptr);
    }

    // Periodicity xi = M xi + w on the zero-sum subspace.
    if (n == 1) {
        sol.xi0 = VectorXd::Zero(1);
    } else {
        MatrixXd B = zero_sum_basis(n);
        MatrixXd Ar = MatrixXd::Identity(n - 1, n - 1) - B.transpose() * sol.monodromy_mat * B;
        Eigen::JacobiSVD<MatrixXd> svd(Ar, Eigen::ComputeThinU | Eigen::ComputeThinV);
        double smin = svd.singularValues()(svd.singularValues().size() - 1);
        sol.restricted_inverse_norm = smin > 0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
        if (sol.restricted_inverse_norm > 1e6)
            throw NearSingularMonodromyError(
                "restricted (I - U(1,0)) is near singular: inverse norm " +
                std::to_string(sol.restricted_inverse_norm));
        VectorXd xir = svd.solve(B.transpose() * Y.col(0));
        sol.xi0 = B * xir;
    }

    // Trajectory on a uniform grid across one period.
    sol.t_grid.resize(grid_points);
    sol.rho.resize(grid_points);
    MatrixXd X = sol.xi0;
    sol.t_grid[0] = 0.0;
    sol.rho[0] = boltzmann(evaluate_protocol(proto, 0.0).E, beta) + sol.xi0;
    IntegratorTask task{&ctx, /*deviation=*/true};
    double h_carry = 0.0;
    for (int k = 1; k < grid_points; ++k) {
        double ta = static_cast<double>(k - 1) / (grid_points - 1);
        double tb = static_cast<double>(k) / (grid_points - 1);
        integrate(task, scheme, opts.tol, opts.max_steps, ta, tb, X, nullptr, &h_carry);
        sol.t_grid[k] = tb;
        sol.rho[k] = boltzmann(evaluate_protocol(proto, tb).E, beta) + X.col(0);
    }
    sol.period_residual = (sol.rho.back() - sol.rho.front()).cwiseAbs().maxCoeff();
    return sol;
}

CurrentReport average_current(const Graph& g, const Protocol& proto, double beta, double tau_d,
                              const EvolveOptions& opts) {
    PeriodicSolution sol = periodic_solution(g, proto, beta, tau_d, opts);
    DriveContext ctx = make_context(g, proto, beta, tau_d);
    // The edge flux vanishes identically on the Boltzmann profile (detailed
    // balance), so integrating tau F y over the deviation alone gives the
    // full transported charge.
    IntegratorTask task{&ctx, /*deviation=*/true, /*quad=*/true};
    MatrixXd X = sol.xi0;
    VectorXd q = VectorXd::Zero(g.n_edges());
    integrate(task, resolve_scheme(ctx, opts), opts.tol, opts.max_steps, 0.0, 1.0, X, &q);
    return make_current_report(g, cycle_basis(g), q);
}

DecayEstimate decay_constants(const Graph& g, const Protocol& proto, double beta, double tau_d,
                              int samples, const EvolveOptions& opts) {
    DriveContext ctx = make_context(g, proto, beta, tau_d);
    DecayEstimate est;
    if (g.n_vertices <= 1) return est;

    double min_gap = std::numeric_limits<double>::max();
    for (int k = 0; k < samples; ++k) {
        ProtocolSample s = evaluate_protocol(proto, static_cast<double>(k) / samples);
        MatrixXd S = symmetrized_master(g, ParamPoint{s.E, s.W}, beta, beta * ctx.cstar);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
        min_gap = std::min(min_gap, -es.eigenvalues()(g.n_vertices - 2));
    }
    double scale = std::exp(beta * ctx.cstar);
    if (!std::isfinite(scale)) throw OverflowError("decay scale exceeds double range");
    est.lambda = scale * min_gap;

    est.monodromy_norm = restricted_norm(monodromy(g, proto, beta, tau_d, opts));
    est.fitted_c = est.monodromy_norm * std::exp(std::min(700.0, est.lambda * tau_d));
    return est;
}

}  // namespace pumpq
