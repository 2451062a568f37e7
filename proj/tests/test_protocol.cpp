#include "doctest.h"

#include <cmath>
#include <random>

#include "pumpq/protocol.hpp"
#include "test_support.hpp"

using namespace pumpq;
using testutil::fixture_protocol;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

FourierSeries series(double c0, std::vector<double> c, std::vector<double> s) {
    FourierSeries f;
    f.c0 = c0;
    f.cos_coef = std::move(c);
    f.sin_coef = std::move(s);
    return f;
}

}  // namespace

TEST_CASE("series evaluation matches the trig expansion") {
    FourierSeries f = series(0.5, {1.0, -0.25}, {0.75});
    std::mt19937 rng(910);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 40; ++k) {
        double t = u(rng);
        double expect = 0.5 + std::cos(kTau * t) - 0.25 * std::cos(2.0 * kTau * t) +
                        0.75 * std::sin(kTau * t);
        CHECK(f.eval(t) == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(f.eval(0.0) == doctest::Approx(f.eval(1.0)).epsilon(1e-14));
    CHECK(f.eval(0.3) == doctest::Approx(f.eval(1.3)).epsilon(1e-12));
}

TEST_CASE("series derivative matches finite differences") {
    FourierSeries f = series(-0.2, {0.4, 0.1, -0.6}, {1.0, 0.0, 0.2});
    std::mt19937 rng(920);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
        double t = u(rng);
        double h = 1e-6;
        double fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        CHECK(f.deriv(t) == doctest::Approx(fd).epsilon(1e-6));
    }
    // Ragged coefficient lists are allowed: only cosines, no sines.
    FourierSeries g = series(0.0, {2.0}, {});
    CHECK(g.deriv(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g.deriv(0.25) == doctest::Approx(-2.0 * kTau));
}

TEST_CASE("protocol evaluation bundles values and derivatives") {
    Protocol p = fixture_protocol("loop_g2.json");
    REQUIRE(p.n_vertices() == 2);
    REQUIRE(p.n_edges() == 2);

    ProtocolSample s0 = evaluate_protocol(p, 0.0);
    CHECK(s0.E[0] == doctest::Approx(1.0));
    CHECK(s0.E[1] == doctest::Approx(0.0));
    CHECK(s0.W[0] == doctest::Approx(0.0));
    CHECK(s0.W[1] == doctest::Approx(0.0));
    CHECK(s0.Edot[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s0.Wdot[0] == doctest::Approx(kTau));

    ProtocolSample sq = evaluate_protocol(p, 0.25);
    CHECK(sq.E[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sq.W[0] == doctest::Approx(1.0));
    CHECK(sq.Edot[0] == doctest::Approx(-kTau));
    CHECK(sq.point().E[0] == doctest::Approx(sq.E[0]));
}

TEST_CASE("arity check matches drives against graphs") {
    Graph g2 = make_graph(2, {{0, 1}, {0, 1}});
    Graph c3 = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    Protocol p = fixture_protocol("loop_g2.json");
    CHECK_NOTHROW(check_protocol_arity(g2, p));
    CHECK_THROWS_AS(check_protocol_arity(c3, p), ArityMismatchError);
}

TEST_CASE("samplers wrap the protocol faithfully") {
    Protocol p = fixture_protocol("loop_c3.json");
    LoopSampler loop = loop_of(p);
    DriveSampler drive = drive_of(p);
    for (double t : {0.0, 0.17, 0.5, 0.93}) {
        ProtocolSample s = evaluate_protocol(p, t);
        ParamPoint q = loop(t);
        CHECK((q.E - s.E).cwiseAbs().maxCoeff() == 0.0);
        CHECK((q.W - s.W).cwiseAbs().maxCoeff() == 0.0);
        ProtocolSample d = drive(t);
        CHECK((d.Edot - s.Edot).cwiseAbs().maxCoeff() == 0.0);
        CHECK((d.Wdot - s.Wdot).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("phase shift reparametrises exactly") {
    Protocol p = fixture_protocol("loop_c3.json");
    Protocol q = shift_protocol(p, 0.3);
    std::mt19937 rng(930);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 25; ++k) {
        double t = u(rng);
        ProtocolSample a = evaluate_protocol(q, t);
        ProtocolSample b = evaluate_protocol(p, t + 0.3);
        CHECK((a.E - b.E).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((a.W - b.W).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((a.Edot - b.Edot).cwiseAbs().maxCoeff() <= 1e-11);
        CHECK((a.Wdot - b.Wdot).cwiseAbs().maxCoeff() <= 1e-11);
    }
    // Shifting by a full period is the identity on coefficients up to rounding.
    Protocol full = shift_protocol(p, 1.0);
    for (int i = 0; i < p.n_vertices(); ++i)
        CHECK(full.E[i].eval(0.42) == doctest::Approx(p.E[i].eval(0.42)).epsilon(1e-12));
}
