#include "doctest.h"

#include <random>

#include "pumpq/graph.hpp"
#include "test_support.hpp"

using namespace pumpq;
using testutil::incidence_matrix;
using testutil::random_connected_graph;
using testutil::random_vector;

TEST_CASE("make_graph validates endpoints, orientation and connectivity") {
    CHECK_NOTHROW(make_graph(2, {{0, 1}, {0, 1}}));
    CHECK_NOTHROW(make_graph(1, {{0, 0}}));
    CHECK_THROWS_AS(make_graph(2, {{1, 0}}), IndexOutOfRangeError);
    CHECK_THROWS_AS(make_graph(2, {{0, 2}}), IndexOutOfRangeError);
    CHECK_THROWS_AS(make_graph(2, {{-1, 0}}), IndexOutOfRangeError);
    CHECK_THROWS_AS(make_graph(3, {{0, 1}}), DisconnectedError);
    CHECK_THROWS_AS(make_graph(4, {{0, 1}, {2, 3}}), DisconnectedError);
}

TEST_CASE("boundary matches the incidence matrix on random graphs") {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        Graph g = random_connected_graph(rng, 6, 10);
        Eigen::MatrixXd D = incidence_matrix(g);
        Eigen::VectorXd c = random_vector(rng, g.n_edges());
        CHECK((boundary(g, c) - D * c).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("integer boundary agrees with the real one") {
    Graph g = make_graph(3, {{0, 1}, {1, 2}, {1, 2}});
    Eigen::VectorXi c(3);
    c << 2, -1, 3;
    Eigen::VectorXi b = boundary(g, c);
    Eigen::VectorXd creal = c.cast<double>();
    CHECK((b.cast<double>() - boundary(g, creal)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.sum() == 0);
}

TEST_CASE("loop edges carry no boundary") {
    Graph g = make_graph(2, {{0, 1}, {1, 1}});
    Eigen::VectorXd c(2);
    c << 0.0, 5.0;
    CHECK(boundary(g, c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary and coboundary are adjoint") {
    std::mt19937 rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        Graph g = random_connected_graph(rng, 6, 10);
        Eigen::VectorXd c = random_vector(rng, g.n_edges());
        Eigen::VectorXd f = random_vector(rng, g.n_vertices);
        double lhs = boundary(g, c).dot(f);
        double rhs = c.dot(coboundary(g, f));
        CHECK(std::abs(lhs - rhs) <= 1e-13);
    }
}

TEST_CASE("coboundary of a constant vanishes") {
    std::mt19937 rng(303);
    Graph g = random_connected_graph(rng, 5, 9);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.n_vertices);
    CHECK(coboundary(g, ones).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cycle basis size is the first Betti number") {
    std::mt19937 rng(404);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = random_connected_graph(rng, 6, 10);
        CycleBasis basis = cycle_basis(g);
        CHECK(basis.size() == g.betti());
        CHECK(static_cast<int>(basis.tree_edges.size()) == g.n_vertices - 1);
        CHECK(basis.cycles.rows() == g.n_edges());
        CHECK(basis.cycles.cols() == g.betti());
    }
}

TEST_CASE("every basis cycle is conserved and carries its own edge once") {
    std::mt19937 rng(505);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = random_connected_graph(rng, 6, 10);
        CycleBasis basis = cycle_basis(g);
        for (int k = 0; k < basis.size(); ++k) {
            Eigen::VectorXi z = basis.cycles.col(k);
            CHECK(boundary(g, z).cwiseAbs().maxCoeff() == 0);
            CHECK(z[basis.basis_edges[k]] == 1);
            // The cycle stays off the other non-tree edges.
            for (int j = 0; j < basis.size(); ++j)
                if (j != k) CHECK(z[basis.basis_edges[j]] == 0);
        }
    }
}

TEST_CASE("reference tree keeps the lowest-index edges") {
    Graph g = make_graph(2, {{0, 1}, {0, 1}});
    CycleBasis basis = cycle_basis(g);
    REQUIRE(basis.tree_edges == std::vector<int>{0});
    REQUIRE(basis.basis_edges == std::vector<int>{1});
    Eigen::VectorXi z = basis.cycles.col(0);
    CHECK(z[0] == -1);
    CHECK(z[1] == 1);
}

TEST_CASE("loop edge forms its own cycle") {
    Graph g = make_graph(2, {{0, 1}, {1, 1}});
    CycleBasis basis = cycle_basis(g);
    REQUIRE(basis.basis_edges == std::vector<int>{1});
    CHECK(basis.cycles(1, 0) == 1);
    CHECK(basis.cycles(0, 0) == 0);
}

TEST_CASE("cycle coordinates invert the basis expansion") {
    std::mt19937 rng(606);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = random_connected_graph(rng, 6, 10);
        CycleBasis basis = cycle_basis(g);
        if (basis.size() == 0) continue;
        Eigen::VectorXd coords = random_vector(rng, basis.size(), -3.0, 3.0);
        Eigen::VectorXd chain = basis.cycles.cast<double>() * coords;
        Eigen::VectorXd back = to_cycle_coords(g, basis, chain);
        CHECK((back - coords).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("integer coordinates reproduce integer combinations exactly") {
    Graph g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}, {1, 2}});
    CycleBasis basis = cycle_basis(g);
    REQUIRE(basis.size() == 2);
    Eigen::VectorXi coords(2);
    coords << 3, -2;
    Eigen::VectorXi chain = basis.cycles * coords;
    CHECK(to_cycle_coords(g, basis, chain) == coords);
}

TEST_CASE("non-conserved chains are rejected") {
    Graph g = make_graph(2, {{0, 1}, {0, 1}});
    CycleBasis basis = cycle_basis(g);
    Eigen::VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(to_cycle_coords(g, basis, bad), NotConservedError);
    Eigen::VectorXi badi(2);
    badi << 1, 0;
    CHECK_THROWS_AS(to_cycle_coords(g, basis, badi), NotConservedError);
    // Just below tolerance passes.
    Eigen::VectorXd near(2);
    near << 1.0, -1.0 + 1e-12;
    CHECK_NOTHROW(to_cycle_coords(g, basis, near));
}

TEST_CASE("current reports expose residuals instead of throwing") {
    Graph g = make_graph(2, {{0, 1}, {0, 1}});
    CycleBasis basis = cycle_basis(g);

    Eigen::VectorXd chain(2);
    chain << -1.0, 1.0;
    CurrentReport rep = make_current_report(g, basis, chain);
    CHECK(rep.divergence_residual <= 1e-15);
    CHECK(rep.coords.size() == 1);
    CHECK(rep.coords[0] == doctest::Approx(1.0));

    Eigen::VectorXd leaky(2);
    leaky << 1.0, -0.75;
    CurrentReport bad = make_current_report(g, basis, leaky);
    CHECK(bad.divergence_residual == doctest::Approx(0.25));
}

TEST_CASE("integer current reports carry exact lattice data") {
    Graph g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    CycleBasis basis = cycle_basis(g);
    Eigen::VectorXi chain(3);
    chain << 1, 1, -1;
    CurrentReport rep = make_current_report(g, basis, chain);
    CHECK(rep.integral);
    CHECK(rep.chain_int == chain);
    REQUIRE(rep.coords_int.size() == 1);
    CHECK(rep.coords_int[0] == -1);
    CHECK(rep.divergence_residual == 0.0);
}
