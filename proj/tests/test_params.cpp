#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "pumpq/params.hpp"
#include "test_support.hpp"

using namespace pumpq;
using testutil::random_connected_graph;
using testutil::random_vector;

TEST_CASE("vertex Gibbs weights: closed form, shift invariance, sharp limit") {
    Eigen::VectorXd E(2);
    E << 0.0, 1.0;
    double beta = 1.7;
    Eigen::VectorXd rho = boltzmann(E, beta);
    double z = 1.0 + std::exp(-beta);
    CHECK(rho[0] == doctest::Approx(1.0 / z).epsilon(1e-14));
    CHECK(rho[1] == doctest::Approx(std::exp(-beta) / z).epsilon(1e-14));

    std::mt19937 rng(810);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd e = random_vector(rng, 5, -2.0, 2.0);
        Eigen::VectorXd p = boltzmann(e, 3.0);
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p.minCoeff() > 0.0);
        Eigen::VectorXd shifted = boltzmann(e.array() + 7.5, 3.0);
        CHECK((p - shifted).cwiseAbs().maxCoeff() <= 1e-15);
    }

    CHECK((boltzmann(E, 0.0).array() == 0.5).all());

    // Huge beta must not overflow and concentrates on the minimum.
    Eigen::VectorXd wide(3);
    wide << 5.0, -3.0, 40.0;
    Eigen::VectorXd sharp = boltzmann(wide, 2000.0);
    CHECK(std::isfinite(sharp.sum()));
    CHECK(sharp[1] == doctest::Approx(1.0));
}

TEST_CASE("Gibbs derivative matches finite differences") {
    std::mt19937 rng(820);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::VectorXd E = random_vector(rng, 4, -1.0, 1.0);
        Eigen::VectorXd Edot = random_vector(rng, 4, -1.0, 1.0);
        double beta = 2.3;
        Eigen::VectorXd d = boltzmann_derivative(E, Edot, beta);
        double h = 1e-6;
        Eigen::VectorXd fd =
            (boltzmann(E + h * Edot, beta) - boltzmann(E - h * Edot, beta)) / (2.0 * h);
        CHECK((d - fd).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::abs(d.sum()) <= 1e-14);  // stays on the simplex
    }
}

namespace {

ParamPoint point(std::initializer_list<double> e, std::initializer_list<double> w) {
    ParamPoint p;
    p.E = Eigen::VectorXd(static_cast<Eigen::Index>(e.size()));
    int i = 0;
    for (double v : e) p.E[i++] = v;
    p.W = Eigen::VectorXd(static_cast<Eigen::Index>(w.size()));
    i = 0;
    for (double v : w) p.W[i++] = v;
    return p;
}

}  // namespace

TEST_CASE("height function marks minima within tolerance") {
    HeightFunction h = height_function(point({0.0, 1.0}, {0.0, 0.0}));
    CHECK(h.h0 == std::vector<int>{1, 2});
    CHECK(h.minima() == std::vector<int>{0});
    CHECK(h.levels == 1);
    CHECK(h.h1 == std::vector<int>{1, 1});

    HeightFunction tied = height_function(point({0.0, 5e-7}, {0.0, 0.0}));
    CHECK(tied.minima() == std::vector<int>{0, 1});

    HeightFunction apart = height_function(point({0.0, 3e-6}, {0.0, 0.0}));
    CHECK(apart.minima() == std::vector<int>{0});
}

TEST_CASE("barrier grouping: single linkage with an ambiguity guard") {
    // Gaps at or below delta_w merge, gaps at or above 2*delta_w split.
    HeightFunction merged = height_function(point({0.0, 1.0}, {0.0, 1e-6, 5.0}));
    CHECK(merged.levels == 2);
    CHECK(merged.h1 == std::vector<int>{1, 1, 2});

    HeightFunction split = height_function(point({0.0, 1.0}, {0.0, 2e-6, 5.0}));
    CHECK(split.levels == 3);
    CHECK(split.h1 == std::vector<int>{1, 2, 3});

    // A gap strictly between delta_w and 2*delta_w is refused.
    CHECK_THROWS_AS(height_function(point({0.0, 1.0}, {0.0, 1.5e-6, 5.0})),
                    AmbiguousGroupingError);

    // Chained near-ties merge transitively through single linkage.
    HeightFunction chain = height_function(point({0.0, 1.0}, {0.0, 9e-7, 1.8e-6}));
    CHECK(chain.levels == 1);
}

TEST_CASE("stratum dimension counts free directions") {
    // Unique minimum, injective barriers on 2 edges: (1+1) + 2 = 4.
    CHECK(cell_dimension(height_function(point({0.0, 1.0}, {0.0, 1.0}))) == 4);
    // Tied minima and tied barriers: (1+0) + 1 = 2, a top cell of G2.
    CHECK(cell_dimension(height_function(point({0.0, 0.0}, {0.0, 0.0}))) == 2);
}

TEST_CASE("barrier resolutions enumerate order refinements") {
    HeightFunction inj = height_function(point({0.0}, {0.0, 1.0, 2.0}));
    auto r1 = barrier_resolutions(inj);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0] == EdgeOrder{0, 1, 2});

    HeightFunction one_tie = height_function(point({0.0}, {1.0, 0.0, 1.0}));
    auto r2 = barrier_resolutions(one_tie);
    REQUIRE(r2.size() == 2);
    CHECK(r2[0] == EdgeOrder{1, 0, 2});
    CHECK(r2[1] == EdgeOrder{1, 2, 0});

    // Groups of sizes 2 and 3 give 2! * 3! = 12 refinements.
    HeightFunction two_groups =
        height_function(point({0.0}, {0.0, 0.0, 1.0, 1.0, 1.0}));
    CHECK(barrier_resolutions(two_groups).size() == 12);
    CHECK_THROWS_AS(barrier_resolutions(two_groups, 5), CountLimitError);
}

TEST_CASE("forest of a height function intersects the greedy trees") {
    Graph g2 = make_graph(2, {{0, 1}, {0, 1}});
    // Tied barriers: greedy trees {e0} and {e1} intersect to nothing.
    Forest f = forest_of(g2, height_function(point({0.0, 0.0}, {0.0, 0.0})));
    CHECK(f.edges.empty());
    CHECK(f.n_components == 2);
    CHECK(f.component[0] != f.component[1]);

    // Injective barriers: single greedy tree survives whole.
    Forest fi = forest_of(g2, height_function(point({0.0, 0.0}, {0.0, 1.0})));
    CHECK(fi.edges == std::vector<int>{0});
    CHECK(fi.n_components == 1);

    // Bridge plus tied parallel pair: the bridge always survives.
    Graph g3 = make_graph(3, {{0, 1}, {1, 2}, {1, 2}});
    Forest fb = forest_of(g3, height_function(point({0.0, 0.0, 1.0}, {0.0, 0.0, 0.0})));
    CHECK(fb.edges == std::vector<int>{0});
    CHECK(fb.n_components == 2);
    CHECK(fb.component[0] == fb.component[1]);
    CHECK(fb.component[2] != fb.component[0]);
}

TEST_CASE("single-minimum heights are inessential without enumeration") {
    // Many tied edges would overflow a tiny resolution cap; the one-minimum
    // shortcut must not enumerate at all.
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < 9; ++v) edges.emplace_back(0, v);
    Graph star = make_graph(9, edges);
    ParamPoint p;
    p.E = Eigen::VectorXd::Zero(9);
    p.E.tail(8).setConstant(1.0);
    p.W = Eigen::VectorXd::Zero(8);
    InessentialResult res = is_inessential(star, height_function(p), 1);
    CHECK(res.inessential);
    CHECK(res.tree.vertices == std::vector<int>{0});
    CHECK(res.tree.edges.empty());
    CHECK(res.tree.contains_vertex(0));
    CHECK_FALSE(res.tree.contains_vertex(3));
}

TEST_CASE("essentiality splits exactly when minima land in different forest components") {
    Graph g2 = make_graph(2, {{0, 1}, {0, 1}});
    InessentialResult split =
        is_inessential(g2, height_function(point({0.0, 0.0}, {0.0, 0.0})));
    CHECK_FALSE(split.inessential);

    InessentialResult joined =
        is_inessential(g2, height_function(point({0.0, 0.0}, {0.0, 1.0})));
    CHECK(joined.inessential);
    CHECK(joined.tree.vertices == std::vector<int>{0, 1});
    CHECK(joined.tree.edges == std::vector<int>{0});

    // Bridge graph with both minima on the bridge: tied parallel pair is
    // harmless because the bridge joins the minima.
    Graph g3 = make_graph(3, {{0, 1}, {1, 2}, {1, 2}});
    InessentialResult bridge =
        is_inessential(g3, height_function(point({0.0, 0.0, 1.0}, {0.0, 0.0, 0.0})));
    CHECK(bridge.inessential);
    CHECK(bridge.tree.vertices == std::vector<int>{0, 1});
}

TEST_CASE("wall jump current on the two-edge cycle") {
    Graph g2 = make_graph(2, {{0, 1}, {0, 1}});
    HeightFunction h = height_function(point({0.0, 0.0}, {0.0, 0.0}));
    Eigen::VectorXi q = top_cell_current(g2, {0, 1}, {0, 1}, h);
    REQUIRE(q.size() == 2);
    CHECK(q[0] == 1);
    CHECK(q[1] == -1);
    // Swapping the tie orientation flips the jump.
    Eigen::VectorXi qswap = top_cell_current(g2, {0, 1}, {1, 0}, h);
    CHECK(qswap == -q);
}

TEST_CASE("wall jump vanishes across an inessential wall") {
    Graph g3 = make_graph(3, {{0, 1}, {1, 2}, {1, 2}});
    // Tie between the parallel edges only, minima joined by the bridge below.
    HeightFunction h = height_function(point({0.0, 0.0, 1.0}, {0.0, 0.5, 0.5}));
    Eigen::VectorXi q = top_cell_current(g3, {0, 1}, {1, 2}, h);
    CHECK(q.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("wall jump validates its tie against the ranking") {
    Graph g2 = make_graph(2, {{0, 1}, {0, 1}});
    HeightFunction h = height_function(point({0.0, 0.0}, {0.0, 0.0}));
    CHECK_THROWS_AS(top_cell_current(g2, {0, 1}, {0, 5}, h), IndexOutOfRangeError);
    HeightFunction inj = height_function(point({0.0, 0.0}, {0.0, 1.0}));
    CHECK_THROWS_AS(top_cell_current(g2, {0, 1}, {0, 1}, inj), DimensionMismatchError);
}

TEST_CASE("top cell enumeration on the fixtures") {
    Graph g2 = make_graph(2, {{0, 1}, {0, 1}});
    auto cells2 = enumerate_top_cells(g2);
    REQUIRE(cells2.size() == 1);
    CHECK(cells2[0].minima == std::pair<int, int>(0, 1));
    CHECK(cells2[0].tie == std::pair<int, int>(0, 1));
    CHECK(cells2[0].dimension == 2);
    CHECK(cells2[0].essential_by_current);
    CHECK(cells2[0].essential_by_forest);
    CHECK(cells2[0].current[0] == 1);
    CHECK(cells2[0].current[1] == -1);
    CHECK(enumerate_essential_cells(g2).size() == 1);

    Graph g3 = make_graph(3, {{0, 1}, {1, 2}, {1, 2}});
    auto cells3 = enumerate_top_cells(g3);
    CHECK(cells3.size() == 18);
    for (const auto& c : cells3) {
        CHECK(c.essential_by_current == c.essential_by_forest);
        // Minima joined by the bridge never make an essential wall.
        if (c.minima == std::pair<int, int>(0, 1)) CHECK_FALSE(c.essential_by_current);
    }
    auto ess3 = enumerate_essential_cells(g3);
    CHECK(!ess3.empty());
    for (const auto& c : ess3) {
        CHECK(c.tie == std::pair<int, int>(1, 2));
        CHECK(c.current.cwiseAbs().maxCoeff() == 1);
    }
}

TEST_CASE("both essentiality routes agree on random graphs") {
    std::mt19937 rng(830);
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = random_connected_graph(rng, 5, 7);
        for (const auto& c : enumerate_top_cells(g)) {
            CHECK(c.essential_by_current == c.essential_by_forest);
            CHECK(c.essential_by_current == (c.current.cwiseAbs().maxCoeff() != 0));
        }
    }
}
