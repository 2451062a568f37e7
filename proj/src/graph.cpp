#include "pumpq/graph.hpp"

#include <algorithm>
#include <queue>

namespace pumpq {

namespace {

// Connectivity over the edges whose ids satisfy `keep`. Loop edges are
// irrelevant for connectivity and simply ignored.
template <typename Pred>
bool connected_with(const Graph& g, Pred keep) {
    if (g.n_vertices <= 1) return true;
    std::vector<std::vector<int>> adj(g.n_vertices);
    for (int a = 0; a < g.n_edges(); ++a) {
        if (!keep(a) || g.edges[a].is_loop()) continue;
        adj[g.edges[a].d0].push_back(g.edges[a].d1);
        adj[g.edges[a].d1].push_back(g.edges[a].d0);
    }
    std::vector<char> seen(g.n_vertices, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                q.push(w);
            }
    }
    return count == g.n_vertices;
}

}  // namespace

Graph make_graph(int n_vertices, const std::vector<std::pair<int, int>>& edges) {
    Graph g;
    g.n_vertices = n_vertices;
    g.edges.reserve(edges.size());
    for (auto [a, b] : edges) g.edges.push_back(Edge{a, b});
    validate_graph(g);
    return g;
}

void validate_graph(const Graph& g) {
    if (g.n_vertices < 1)
        throw IndexOutOfRangeError("graph must have at least one vertex");
    for (int a = 0; a < g.n_edges(); ++a) {
        const Edge& e = g.edges[a];
        if (e.d0 < 0 || e.d1 < 0 || e.d0 >= g.n_vertices || e.d1 >= g.n_vertices)
            throw IndexOutOfRangeError("edge " + std::to_string(a) +
                                       " references a vertex outside [0, " +
                                       std::to_string(g.n_vertices) + ")");
        if (e.d0 > e.d1)
            throw IndexOutOfRangeError("edge " + std::to_string(a) +
                                       " must be oriented from the smaller vertex index");
    }
    if (!connected_with(g, [](int) { return true; }))
        throw DisconnectedError("graph is not connected");
}

Eigen::VectorXd boundary(const Graph& g, const Eigen::VectorXd& chain) {
    if (chain.size() != g.n_edges())
        throw DimensionMismatchError("chain length does not match the edge count");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_vertices);
    for (int a = 0; a < g.n_edges(); ++a) {
        out[g.edges[a].d0] += chain[a];
        out[g.edges[a].d1] -= chain[a];
    }
    return out;
}

Eigen::VectorXi boundary(const Graph& g, const Eigen::VectorXi& chain) {
    if (chain.size() != g.n_edges())
        throw DimensionMismatchError("chain length does not match the edge count");
    Eigen::VectorXi out = Eigen::VectorXi::Zero(g.n_vertices);
    for (int a = 0; a < g.n_edges(); ++a) {
        out[g.edges[a].d0] += chain[a];
        out[g.edges[a].d1] -= chain[a];
    }
    return out;
}

Eigen::VectorXd coboundary(const Graph& g, const Eigen::VectorXd& f) {
    if (f.size() != g.n_vertices)
        throw DimensionMismatchError("vertex function length does not match the vertex count");
    Eigen::VectorXd out(g.n_edges());
    for (int a = 0; a < g.n_edges(); ++a)
        out[a] = f[g.edges[a].d0] - f[g.edges[a].d1];
    return out;
}

CycleBasis cycle_basis(const Graph& g) {
    validate_graph(g);
    // Reference tree: walk edge ids from the top and drop every edge whose
    // removal keeps the rest connected, so low-index edges are preferred.
    std::vector<char> kept(g.n_edges(), 1);
    for (int a = g.n_edges() - 1; a >= 0; --a) {
        if (g.edges[a].is_loop()) {
            kept[a] = 0;
            continue;
        }
        kept[a] = 0;
        if (!connected_with(g, [&](int b) { return kept[b] != 0; })) kept[a] = 1;
    }

    CycleBasis basis;
    for (int a = 0; a < g.n_edges(); ++a)
        (kept[a] ? basis.tree_edges : basis.basis_edges).push_back(a);

    // Tree adjacency for path construction.
    std::vector<std::vector<std::pair<int, int>>> adj(g.n_vertices);  // (neighbour, edge)
    for (int a : basis.tree_edges) {
        adj[g.edges[a].d0].emplace_back(g.edges[a].d1, a);
        adj[g.edges[a].d1].emplace_back(g.edges[a].d0, a);
    }

    basis.cycles = Eigen::MatrixXi::Zero(g.n_edges(), static_cast<int>(basis.basis_edges.size()));
    for (int k = 0; k < basis.size(); ++k) {
        int a = basis.basis_edges[k];
        basis.cycles(a, k) = 1;
        int src = g.edges[a].d0, dst = g.edges[a].d1;
        if (src == dst) continue;  // a loop edge is its own cycle
        // BFS path src -> dst inside the tree; subtract the signed tree path so
        // the column has zero boundary.
        std::vector<int> prev_v(g.n_vertices, -1), prev_e(g.n_vertices, -1);
        std::queue<int> q;
        q.push(src);
        prev_v[src] = src;
        while (!q.empty() && prev_v[dst] == -1) {
            int v = q.front();
            q.pop();
            for (auto [w, e] : adj[v])
                if (prev_v[w] == -1) {
                    prev_v[w] = v;
                    prev_e[w] = e;
                    q.push(w);
                }
        }
        for (int v = dst; v != src; v = prev_v[v]) {
            int e = prev_e[v];
            // Traversal step prev_v[v] -> v; positive sign iff it coincides
            // with the stored orientation.
            basis.cycles(e, k) -= (g.edges[e].d0 == prev_v[v] && g.edges[e].d1 == v) ? 1 : -1;
        }
    }
    return basis;
}

Eigen::VectorXd to_cycle_coords(const Graph& g, const CycleBasis& basis,
                                const Eigen::VectorXd& chain, double tol) {
    double residual = boundary(g, chain).cwiseAbs().maxCoeff();
    if (!(residual <= tol))
        throw NotConservedError("chain has boundary residual " + std::to_string(residual) +
                                " above tolerance " + std::to_string(tol));
    Eigen::VectorXd coords(basis.size());
    for (int k = 0; k < basis.size(); ++k) coords[k] = chain[basis.basis_edges[k]];
    return coords;
}

Eigen::VectorXi to_cycle_coords(const Graph& g, const CycleBasis& basis,
                                const Eigen::VectorXi& chain) {
    if (boundary(g, chain).cwiseAbs().maxCoeff() != 0)
        throw NotConservedError("integer chain is not conserved");
    Eigen::VectorXi coords(basis.size());
    for (int k = 0; k < basis.size(); ++k) coords[k] = chain[basis.basis_edges[k]];
    return coords;
}

CurrentReport make_current_report(const Graph& g, const CycleBasis& basis,
                                  const Eigen::VectorXd& chain) {
    CurrentReport r;
    r.chain = chain;
    r.divergence_residual = boundary(g, chain).cwiseAbs().maxCoeff();
    r.coords.resize(basis.size());
    for (int k = 0; k < basis.size(); ++k) r.coords[k] = chain[basis.basis_edges[k]];
    return r;
}

CurrentReport make_current_report(const Graph& g, const CycleBasis& basis,
                                  const Eigen::VectorXi& chain) {
    CurrentReport r;
    r.integral = true;
    r.chain_int = chain;
    r.chain = chain.cast<double>();
    r.divergence_residual = boundary(g, chain).cwiseAbs().maxCoeff();
    r.coords_int.resize(basis.size());
    for (int k = 0; k < basis.size(); ++k) r.coords_int[k] = chain[basis.basis_edges[k]];
    r.coords = r.coords_int.cast<double>();
    return r;
}

}  // namespace pumpq
