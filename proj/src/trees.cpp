#include "pumpq/trees.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace pumpq {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

void enumerate_rec(const Graph& g, int next_edge, int picked, std::vector<int>& current,
                   UnionFind uf, std::vector<SpanningTree>& out, std::size_t cap) {
    int need = g.n_vertices - 1;
    if (picked == need) {
        if (out.size() == cap)
            throw CountLimitError("spanning tree enumeration exceeded cap of " +
                                  std::to_string(cap));
        out.push_back(SpanningTree{current});
        return;
    }
    if (g.n_edges() - next_edge < need - picked) return;
    for (int a = next_edge; a < g.n_edges(); ++a) {
        if (g.edges[a].is_loop()) continue;
        UnionFind uf2 = uf;
        if (!uf2.unite(g.edges[a].d0, g.edges[a].d1)) continue;
        current.push_back(a);
        enumerate_rec(g, a + 1, picked + 1, current, std::move(uf2), out, cap);
        current.pop_back();
    }
}

}  // namespace

std::vector<SpanningTree> enumerate_spanning_trees(const Graph& g, std::size_t cap) {
    validate_graph(g);
    std::vector<SpanningTree> out;
    std::vector<int> current;
    if (g.n_vertices == 1) {
        out.push_back(SpanningTree{});
        return out;
    }
    enumerate_rec(g, 0, 0, current, UnionFind(g.n_vertices), out, cap);
    return out;
}

SpanningTree sigma_tree(const Graph& g, const EdgeOrder& order) {
    validate_graph(g);
    if (static_cast<int>(order.size()) != g.n_edges())
        throw DimensionMismatchError("edge order must rank every edge exactly once");
    std::vector<char> seen(g.n_edges(), 0);
    for (int a : order) {
        if (a < 0 || a >= g.n_edges() || seen[a])
            throw IndexOutOfRangeError("edge order is not a permutation of the edge ids");
        seen[a] = 1;
    }

    std::vector<char> kept(g.n_edges(), 1);
    auto still_connected = [&]() {
        std::vector<std::vector<int>> adj(g.n_vertices);
        for (int a = 0; a < g.n_edges(); ++a) {
            if (!kept[a] || g.edges[a].is_loop()) continue;
            adj[g.edges[a].d0].push_back(g.edges[a].d1);
            adj[g.edges[a].d1].push_back(g.edges[a].d0);
        }
        std::vector<char> vis(g.n_vertices, 0);
        std::queue<int> q;
        q.push(0);
        vis[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v])
                if (!vis[w]) {
                    vis[w] = 1;
                    ++count;
                    q.push(w);
                }
        }
        return count == g.n_vertices;
    };

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int a = *it;
        if (g.edges[a].is_loop()) {
            kept[a] = 0;
            continue;
        }
        kept[a] = 0;
        if (!still_connected()) kept[a] = 1;
    }

    SpanningTree t;
    for (int a = 0; a < g.n_edges(); ++a)
        if (kept[a]) t.edges.push_back(a);
    return t;
}

double tree_weight(const Graph& g, const SpanningTree& tree, const Eigen::VectorXd& W) {
    if (W.size() != g.n_edges())
        throw DimensionMismatchError("barrier vector length does not match the edge count");
    std::vector<char> in_tree(g.n_edges(), 0);
    for (int a : tree.edges) in_tree[a] = 1;
    double w = 0.0;
    for (int a = 0; a < g.n_edges(); ++a)
        if (!in_tree[a]) w += W[a];
    return w;
}

Eigen::VectorXi path_chain(const Graph& g, const std::vector<int>& tree_edges, int i, int j) {
    if (i < 0 || j < 0 || i >= g.n_vertices || j >= g.n_vertices)
        throw IndexOutOfRangeError("path endpoints outside the vertex range");
    Eigen::VectorXi chain = Eigen::VectorXi::Zero(g.n_edges());
    if (i == j) return chain;

    std::vector<std::vector<std::pair<int, int>>> adj(g.n_vertices);
    for (int a : tree_edges) {
        if (a < 0 || a >= g.n_edges())
            throw IndexOutOfRangeError("subforest references an unknown edge");
        if (g.edges[a].is_loop()) continue;
        adj[g.edges[a].d0].emplace_back(g.edges[a].d1, a);
        adj[g.edges[a].d1].emplace_back(g.edges[a].d0, a);
    }
    std::vector<int> prev_v(g.n_vertices, -1), prev_e(g.n_vertices, -1);
    std::queue<int> q;
    q.push(i);
    prev_v[i] = i;
    while (!q.empty() && prev_v[j] == -1) {
        int v = q.front();
        q.pop();
        for (auto [w, e] : adj[v])
            if (prev_v[w] == -1) {
                prev_v[w] = v;
                prev_e[w] = e;
                q.push(w);
            }
    }
    if (prev_v[j] == -1)
        throw Error(ErrorKind::InvalidInput, "vertices " + std::to_string(i) + " and " +
                                                 std::to_string(j) +
                                                 " are not connected in the given subforest");
    for (int v = j; v != i; v = prev_v[v]) {
        int e = prev_e[v];
        chain[e] += (g.edges[e].d0 == prev_v[v] && g.edges[e].d1 == v) ? 1 : -1;
    }
    return chain;
}

Eigen::VectorXi path_chain(const Graph& g, const SpanningTree& tree, int i, int j) {
    return path_chain(g, tree.edges, i, j);
}

Eigen::VectorXd tree_boltzmann(const std::vector<SpanningTree>& trees, const Eigen::VectorXd& W,
                               double beta) {
    if (trees.empty()) throw DimensionMismatchError("tree family must be non-empty");
    Eigen::VectorXd energy(trees.size());
    for (std::size_t t = 0; t < trees.size(); ++t) {
        double e = 0.0;
        for (int a : trees[t].edges) {
            if (a < 0 || a >= W.size())
                throw DimensionMismatchError("tree references an edge outside the barrier vector");
            e += W[a];
        }
        energy[t] = e;
    }
    Eigen::VectorXd p = (-beta * (energy.array() - energy.minCoeff())).exp();
    return p / p.sum();
}

}  // namespace pumpq
