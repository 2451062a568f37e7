#include "pumpq/protocol.hpp"

#include <cmath>

namespace pumpq {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double FourierSeries::eval(double t) const {
    double v = c0;
    for (std::size_t k = 0; k < cos_coef.size(); ++k)
        v += cos_coef[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * t);
    for (std::size_t k = 0; k < sin_coef.size(); ++k)
        v += sin_coef[k] * std::sin(kTwoPi * static_cast<double>(k + 1) * t);
    return v;
}

double FourierSeries::deriv(double t) const {
    double v = 0.0;
    for (std::size_t k = 0; k < cos_coef.size(); ++k) {
        double w = kTwoPi * static_cast<double>(k + 1);
        v -= cos_coef[k] * w * std::sin(w * t);
    }
    for (std::size_t k = 0; k < sin_coef.size(); ++k) {
        double w = kTwoPi * static_cast<double>(k + 1);
        v += sin_coef[k] * w * std::cos(w * t);
    }
    return v;
}

ProtocolSample evaluate_protocol(const Protocol& p, double t) {
    ProtocolSample s;
    s.E.resize(p.E.size());
    s.Edot.resize(p.E.size());
    s.W.resize(p.W.size());
    s.Wdot.resize(p.W.size());
    for (std::size_t i = 0; i < p.E.size(); ++i) {
        s.E[i] = p.E[i].eval(t);
        s.Edot[i] = p.E[i].deriv(t);
    }
    for (std::size_t a = 0; a < p.W.size(); ++a) {
        s.W[a] = p.W[a].eval(t);
        s.Wdot[a] = p.W[a].deriv(t);
    }
    return s;
}

void check_protocol_arity(const Graph& g, const Protocol& p) {
    if (p.n_vertices() != g.n_vertices)
        throw ArityMismatchError("protocol drives " + std::to_string(p.n_vertices()) +
                                 " vertex energies but the graph has " +
                                 std::to_string(g.n_vertices) + " vertices");
    if (p.n_edges() != g.n_edges())
        throw ArityMismatchError("protocol drives " + std::to_string(p.n_edges()) +
                                 " barriers but the graph has " + std::to_string(g.n_edges()) +
                                 " edges");
}

LoopSampler loop_of(const Protocol& p) {
    return [p](double t) {
        ProtocolSample s = evaluate_protocol(p, t);
        return ParamPoint{s.E, s.W};
    };
}

DriveSampler drive_of(const Protocol& p) {
    return [p](double t) { return evaluate_protocol(p, t); };
}

namespace {

FourierSeries shift_series(const FourierSeries& f, double t0) {
    FourierSeries out;
    out.c0 = f.c0;
    std::size_t n = std::max(f.cos_coef.size(), f.sin_coef.size());
    out.cos_coef.assign(n, 0.0);
    out.sin_coef.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double a = k < f.cos_coef.size() ? f.cos_coef[k] : 0.0;
        double b = k < f.sin_coef.size() ? f.sin_coef[k] : 0.0;
        double ph = kTwoPi * static_cast<double>(k + 1) * t0;
        // cos(w(t+t0)) = cos wt cos wt0 - sin wt sin wt0, and similarly for sin.
        out.cos_coef[k] = a * std::cos(ph) + b * std::sin(ph);
        out.sin_coef[k] = b * std::cos(ph) - a * std::sin(ph);
    }
    return out;
}

}  // namespace

Protocol shift_protocol(const Protocol& p, double t0) {
    Protocol out;
    out.E.reserve(p.E.size());
    out.W.reserve(p.W.size());
    for (const auto& f : p.E) out.E.push_back(shift_series(f, t0));
    for (const auto& f : p.W) out.W.push_back(shift_series(f, t0));
    return out;
}

}  // namespace pumpq
