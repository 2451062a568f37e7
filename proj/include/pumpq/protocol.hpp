#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pumpq/params.hpp"

namespace pumpq {

/// Real Fourier series on the unit circle:
/// f(t) = c0 + sum_k cos_k cos(2 pi k t) + sin_k sin(2 pi k t).
struct FourierSeries {
    double c0 = 0.0;
    std::vector<double> cos_coef;
    std::vector<double> sin_coef;

    double eval(double t) const;
    double deriv(double t) const;
};

/// Smooth 1-periodic drive of every vertex energy and edge barrier.
struct Protocol {
    std::vector<FourierSeries> E;
    std::vector<FourierSeries> W;

    int n_vertices() const { return static_cast<int>(E.size()); }
    int n_edges() const { return static_cast<int>(W.size()); }
};

/// One evaluation of a drive: values and exact time derivatives.
struct ProtocolSample {
    Eigen::VectorXd E;
    Eigen::VectorXd W;
    Eigen::VectorXd Edot;
    Eigen::VectorXd Wdot;

    ParamPoint point() const { return ParamPoint{E, W}; }
};

ProtocolSample evaluate_protocol(const Protocol& p, double t);

/// Throws ArityMismatchError unless the drive matches the graph shape.
void check_protocol_arity(const Graph& g, const Protocol& p);

/// Point sampler abstraction: anything that can be evaluated on the circle.
/// Used by the combinatorial loop analysis, which needs no derivatives.
using LoopSampler = std::function<ParamPoint(double)>;

LoopSampler loop_of(const Protocol& p);

/// Full sampler abstraction carrying derivatives, for quadrature routes.
using DriveSampler = std::function<ProtocolSample(double)>;

DriveSampler drive_of(const Protocol& p);

/// Same drive started at t0: exact Fourier phase shift, used by tests to
/// check parametrisation invariance.
Protocol shift_protocol(const Protocol& p, double t0);

}  // namespace pumpq
