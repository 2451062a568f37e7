#include "doctest.h"

#include <cmath>
#include <random>

#include "pumpq/adiabatic.hpp"
#include "pumpq/dynamics.hpp"
#include "test_support.hpp"

using namespace pumpq;
using testutil::fixture_graph;
using testutil::fixture_protocol;
using testutil::random_connected_graph;
using testutil::random_vector;

TEST_CASE("conduction solve on two parallel edges splits like conductances") {
    Graph g2 = fixture_graph("g2.json");
    Eigen::VectorXd W(2);
    W << 0.3, -0.4;
    double beta = 1.7;
    Eigen::VectorXd x(2);
    x << 1.0, -1.0;
    Eigen::VectorXd y = solve_A(g2, W, beta, x);

    // Unit flow from vertex 1 into vertex 0 splits proportionally to the
    // inverse barrier weights 1/g_a.
    double c0 = std::exp(-beta * W[0]), c1 = std::exp(-beta * W[1]);
    CHECK(y[0] == doctest::Approx(-c0 / (c0 + c1)).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(-c1 / (c0 + c1)).epsilon(1e-12));
}

TEST_CASE("conduction solve properties on random instances") {
    std::mt19937 rng(1110);
    for (int trial = 0; trial < 40; ++trial) {
        Graph g = random_connected_graph(rng, 6, 9);
        Eigen::VectorXd W = random_vector(rng, g.n_edges(), -1.0, 1.0);
        double beta = 2.0;
        Eigen::VectorXd x = random_vector(rng, g.n_vertices);
        x.array() -= x.mean();

        Eigen::VectorXd y = solve_A(g, W, beta, x);
        CHECK((boundary(g, y) + x).cwiseAbs().maxCoeff() <= 1e-11);

        // Gauge: y is kappa-orthogonal to every fundamental cycle under the
        // edge weights g = exp(beta W).
        CycleBasis basis = cycle_basis(g);
        Eigen::VectorXd gy = (beta * W).array().exp() * y.array();
        for (int k = 0; k < basis.size(); ++k)
            CHECK(std::abs(gy.dot(basis.cycles.col(k).cast<double>())) <= 1e-10);

        // Linearity in the load.
        Eigen::VectorXd x2 = random_vector(rng, g.n_vertices);
        x2.array() -= x2.mean();
        Eigen::VectorXd both = solve_A(g, W, beta, x + x2);
        CHECK((both - y - solve_A(g, W, beta, x2)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("conduction solve rejects unbalanced loads") {
    Graph g2 = fixture_graph("g2.json");
    Eigen::VectorXd W = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(solve_A(g2, W, 1.0, bad), NotZeroSumError);
}

TEST_CASE("barrier shift invariance allows very large beta") {
    Graph g = fixture_graph("c3.json");
    Eigen::VectorXd W(3);
    W << 5.0, 5.5, 4.0;
    Eigen::VectorXd x(3);
    x << 1.0, 0.0, -1.0;
    Eigen::VectorXd y = solve_A(g, W, 1000.0, x);
    CHECK(y.allFinite());
    Eigen::VectorXd shifted = solve_A(g, W.array() - 5.0, 1000.0, x);
    CHECK((y - shifted).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("tree expansion on two parallel edges") {
    Graph g2 = fixture_graph("g2.json");
    Eigen::VectorXd W(2);
    W << 0.2, 0.9;
    double beta = 1.3;
    // Gibbs weights of the trees {e0} and {e1} under the barrier sums.
    double p0 = std::exp(-beta * W[0]), p1 = std::exp(-beta * W[1]);
    double z = p0 + p1;
    Eigen::VectorXd a = tree_A(g2, W, beta, 0, 1);
    CHECK(a[0] == doctest::Approx(p0 / z).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(p1 / z).epsilon(1e-12));
    // The base only enters through a j-independent offset.
    Eigen::VectorXd d0 = tree_A(g2, W, beta, 0, 0) - tree_A(g2, W, beta, 1, 0);
    Eigen::VectorXd d1 = tree_A(g2, W, beta, 0, 1) - tree_A(g2, W, beta, 1, 1);
    CHECK((d0 - d1).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("tree expansion agrees with the Laplacian solve") {
    std::mt19937 rng(1120);
    for (int trial = 0; trial < 25; ++trial) {
        Graph g = random_connected_graph(rng, 6, 9);
        Eigen::VectorXd W = random_vector(rng, g.n_edges(), -1.0, 1.0);
        double beta = 1.5;
        Eigen::VectorXd x = random_vector(rng, g.n_vertices);
        x.array() -= x.mean();
        Eigen::VectorXd via_trees = tree_A_apply(g, W, beta, x);
        Eigen::VectorXd via_solve = solve_A(g, W, beta, x);
        CHECK((via_trees - via_solve).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("adiabatic charge of a constant drive vanishes") {
    Graph g = fixture_graph("g2.json");
    Protocol flat;
    for (int i = 0; i < 2; ++i) {
        FourierSeries f;
        f.c0 = 0.4 * i;
        flat.E.push_back(f);
    }
    for (int a = 0; a < 2; ++a) {
        FourierSeries f;
        f.c0 = 0.1 * a;
        flat.W.push_back(f);
    }
    CurrentReport rep = analytic_current(g, flat, 3.0);
    CHECK(rep.chain.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(rep.divergence_residual <= 1e-12);
}

TEST_CASE("adiabatic charge of the two-state loop approaches one quantum") {
    Graph g = fixture_graph("g2.json");
    Protocol proto = fixture_protocol("loop_g2.json");
    CurrentReport rep = analytic_current(g, proto, 8.0);
    REQUIRE(rep.coords.size() == 1);
    CHECK(rep.coords[0] == doctest::Approx(-0.99821796).epsilon(1e-5));
    CHECK(rep.divergence_residual <= 1e-10);

    CurrentReport cold = analytic_current(g, proto, 16.0);
    CHECK(std::abs(cold.coords[0] + 1.0) < 0.02);
}

TEST_CASE("adiabatic charge is parametrisation invariant") {
    Graph g = fixture_graph("g2.json");
    Protocol proto = fixture_protocol("loop_g2.json");
    double beta = 4.0;
    CurrentReport base = analytic_current(g, proto, beta);

    // Exact phase shift of the start point.
    CurrentReport shifted = analytic_current(g, shift_protocol(proto, 0.3), beta);
    CHECK((shifted.chain - base.chain).cwiseAbs().maxCoeff() <= 1e-7);

    // Smooth monotone time change s(t) = t + 0.1 sin(2 pi t).
    DriveSampler warped = [&proto](double t) {
        const double tau = 6.283185307179586476925286766559;
        double s = t + 0.1 * std::sin(tau * t);
        double sdot = 1.0 + 0.1 * tau * std::cos(tau * t);
        ProtocolSample raw = evaluate_protocol(proto, s);
        raw.Edot *= sdot;
        raw.Wdot *= sdot;
        return raw;
    };
    CurrentReport rep = analytic_current_sampled(g, warped, beta);
    CHECK((rep.chain - base.chain).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("slow finite-time charge approaches the adiabatic value") {
    Graph g = fixture_graph("g2.json");
    Protocol proto = fixture_protocol("loop_g2.json");
    double beta = 2.0;
    CurrentReport adiab = analytic_current(g, proto, beta);
    EvolveOptions opts;
    opts.tol = 1e-8;
    CurrentReport finite = average_current(g, proto, beta, 400.0, opts);
    CHECK(std::abs(finite.coords[0] - adiab.coords[0]) < 0.01);
}
