#include "pumpq/params.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace pumpq {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(b)] = find(a); }
};

}  // namespace

Eigen::VectorXd boltzmann(const Eigen::VectorXd& E, double beta) {
    Eigen::VectorXd p = (-beta * (E.array() - E.minCoeff())).exp();
    return p / p.sum();
}

Eigen::VectorXd boltzmann_derivative(const Eigen::VectorXd& E, const Eigen::VectorXd& Edot,
                                     double beta) {
    if (E.size() != Edot.size())
        throw DimensionMismatchError("energy and rate vectors must have equal length");
    Eigen::VectorXd rho = boltzmann(E, beta);
    double mean = rho.dot(Edot);
    return beta * rho.array() * (mean - Edot.array());
}

std::vector<int> HeightFunction::minima() const {
    std::vector<int> out;
    for (std::size_t v = 0; v < h0.size(); ++v)
        if (h0[v] == 1) out.push_back(static_cast<int>(v));
    return out;
}

HeightFunction height_function(const ParamPoint& p, double delta_e, double delta_w) {
    HeightFunction h;
    h.h0.assign(p.E.size(), 2);
    double emin = p.E.minCoeff();
    for (int v = 0; v < p.E.size(); ++v)
        if (p.E[v] <= emin + delta_e) h.h0[v] = 1;

    const int m = static_cast<int>(p.W.size());
    h.h1.assign(m, 0);
    if (m == 0) return h;
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return p.W[a] < p.W[b]; });

    int level = 1;
    h.h1[idx[0]] = level;
    for (int k = 1; k < m; ++k) {
        double gap = p.W[idx[k]] - p.W[idx[k - 1]];
        if (gap > delta_w) {
            if (gap < 2 * delta_w)
                throw AmbiguousGroupingError(
                    "barrier gap " + std::to_string(gap) + " between edges " +
                    std::to_string(idx[k - 1]) + " and " + std::to_string(idx[k]) +
                    " falls inside (delta_w, 2*delta_w); grouping is order dependent");
            ++level;
        }
        h.h1[idx[k]] = level;
    }
    h.levels = level;
    return h;
}

int cell_dimension(const HeightFunction& h) {
    int non_minimal = 0;
    for (int v : h.h0)
        if (v != 1) ++non_minimal;
    return 1 + non_minimal + h.levels;
}

std::vector<EdgeOrder> barrier_resolutions(const HeightFunction& h, std::size_t cap) {
    std::vector<std::vector<int>> groups(h.levels);
    for (std::size_t a = 0; a < h.h1.size(); ++a) {
        int lv = h.h1[a];
        if (lv < 1 || lv > h.levels)
            throw DimensionMismatchError("barrier ranking uses a level outside 1..levels");
        groups[lv - 1].push_back(static_cast<int>(a));
    }

    std::size_t count = 1;
    for (auto& grp : groups) {
        for (std::size_t k = 2; k <= grp.size(); ++k) {
            if (count > cap / k)
                throw CountLimitError("barrier resolution count exceeds cap of " +
                                      std::to_string(cap));
            count *= k;
        }
    }

    std::vector<EdgeOrder> out;
    out.reserve(count);
    // Odometer over per-group permutations, later groups varying fastest, so
    // the concatenated orders come out lexicographically.
    std::vector<std::vector<int>> perm = groups;
    while (true) {
        EdgeOrder order;
        for (auto& grp : perm) order.insert(order.end(), grp.begin(), grp.end());
        out.push_back(std::move(order));
        int g = static_cast<int>(perm.size()) - 1;
        while (g >= 0 && !std::next_permutation(perm[g].begin(), perm[g].end())) --g;
        if (g < 0) break;
    }
    return out;
}

Forest forest_of(const Graph& g, const HeightFunction& h, std::size_t cap) {
    if (static_cast<int>(h.h1.size()) != g.n_edges())
        throw DimensionMismatchError("barrier ranking length does not match the edge count");
    std::vector<char> in_all(g.n_edges(), 0);
    bool first = true;
    for (const EdgeOrder& order : barrier_resolutions(h, cap)) {
        SpanningTree t = sigma_tree(g, order);
        std::vector<char> in_tree(g.n_edges(), 0);
        for (int a : t.edges) in_tree[a] = 1;
        if (first) {
            in_all = in_tree;
            first = false;
        } else {
            for (int a = 0; a < g.n_edges(); ++a) in_all[a] &= in_tree[a];
        }
    }

    Forest f;
    UnionFind uf(g.n_vertices);
    for (int a = 0; a < g.n_edges(); ++a)
        if (in_all[a]) {
            f.edges.push_back(a);
            uf.unite(g.edges[a].d0, g.edges[a].d1);
        }
    f.component.assign(g.n_vertices, -1);
    for (int v = 0; v < g.n_vertices; ++v) {
        int root = uf.find(v);
        if (f.component[root] == -1) f.component[root] = f.n_components++;
        f.component[v] = f.component[root];
    }
    return f;
}

bool TreeComponent::contains_vertex(int v) const {
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

InessentialResult is_inessential(const Graph& g, const HeightFunction& h, std::size_t cap) {
    if (static_cast<int>(h.h0.size()) != g.n_vertices)
        throw DimensionMismatchError("vertex marking length does not match the vertex count");
    std::vector<int> mins = h.minima();

    InessentialResult r;
    if (mins.size() == 1) {
        // A single well never produces a jump; skip the resolution blow-up.
        r.inessential = true;
        r.tree.vertices = {mins[0]};
        return r;
    }

    Forest f = forest_of(g, h, cap);
    if (mins.empty()) {
        r.inessential = true;
        if (f.n_components == 1) {
            r.tree.vertices.resize(g.n_vertices);
            std::iota(r.tree.vertices.begin(), r.tree.vertices.end(), 0);
            r.tree.edges = f.edges;
        }
        return r;
    }

    int comp = f.component[mins[0]];
    for (int v : mins)
        if (f.component[v] != comp) return r;  // essential

    r.inessential = true;
    for (int v = 0; v < g.n_vertices; ++v)
        if (f.component[v] == comp) r.tree.vertices.push_back(v);
    for (int a : f.edges)
        if (f.component[g.edges[a].d0] == comp) r.tree.edges.push_back(a);
    return r;
}

namespace {

// The two refinements of a single-tie ranking, the designated edge placed low.
EdgeOrder resolve_tie(const HeightFunction& h, int low, int high) {
    std::vector<int> idx(h.h1.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (h.h1[a] != h.h1[b]) return h.h1[a] < h.h1[b];
        if (a == low && b == high) return true;
        if (a == high && b == low) return false;
        return a < b;
    });
    return idx;
}

}  // namespace

Eigen::VectorXi top_cell_current(const Graph& g, std::pair<int, int> minima,
                                 std::pair<int, int> tie, const HeightFunction& h) {
    auto [i, j] = minima;
    auto [a, b] = tie;
    if (a == b || a < 0 || b < 0 || a >= g.n_edges() || b >= g.n_edges())
        throw IndexOutOfRangeError("tie must name two distinct edges");
    if (h.h1[a] != h.h1[b])
        throw DimensionMismatchError("tie edges must share a barrier level");
    for (std::size_t e = 0; e < h.h1.size(); ++e)
        if (static_cast<int>(e) != a && static_cast<int>(e) != b && h.h1[e] == h.h1[a])
            throw DimensionMismatchError("tie level must contain exactly the two tied edges");

    SpanningTree t_a = sigma_tree(g, resolve_tie(h, a, b));
    SpanningTree t_b = sigma_tree(g, resolve_tie(h, b, a));
    return path_chain(g, t_a, i, j) - path_chain(g, t_b, i, j);
}

std::vector<CellDescriptor> enumerate_top_cells(const Graph& g, std::size_t cap) {
    validate_graph(g);
    const int m = g.n_edges();
    const int n = g.n_vertices;
    std::vector<CellDescriptor> out;
    if (m < 2 || n < 2) return out;

    std::map<EdgeOrder, SpanningTree> tree_cache;
    auto cached_tree = [&](const EdgeOrder& order) -> const SpanningTree& {
        auto it = tree_cache.find(order);
        if (it == tree_cache.end()) it = tree_cache.emplace(order, sigma_tree(g, order)).first;
        return it->second;
    };

    std::size_t produced = 0;
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            std::vector<int> rest;
            for (int e = 0; e < m; ++e)
                if (e != a && e != b) rest.push_back(e);
            std::sort(rest.begin(), rest.end());
            do {
                for (int pos = 0; pos <= static_cast<int>(rest.size()); ++pos) {
                    HeightFunction h;
                    h.h0.assign(n, 2);
                    h.h1.assign(m, 0);
                    h.levels = m - 1;
                    int level = 1;
                    for (int k = 0; k < static_cast<int>(rest.size()); ++k) {
                        if (k == pos) ++level;  // slot the tie below rest[pos]
                        h.h1[rest[k]] = level++;
                    }
                    int tie_level = pos + 1;
                    h.h1[a] = h.h1[b] = tie_level;

                    const SpanningTree& t_low_a = cached_tree(resolve_tie(h, a, b));
                    const SpanningTree& t_low_b = cached_tree(resolve_tie(h, b, a));

                    std::vector<char> in_a(m, 0);
                    for (int e : t_low_a.edges) in_a[e] = 1;
                    UnionFind uf(n);
                    for (int e : t_low_b.edges)
                        if (in_a[e]) uf.unite(g.edges[e].d0, g.edges[e].d1);

                    for (int i = 0; i < n; ++i) {
                        for (int j = i + 1; j < n; ++j) {
                            if (++produced > cap)
                                throw CountLimitError("top cell enumeration exceeded cap of " +
                                                      std::to_string(cap));
                            CellDescriptor cell;
                            cell.minima = {i, j};
                            cell.tie = {a, b};
                            cell.h = h;
                            cell.h.h0[i] = cell.h.h0[j] = 1;
                            cell.dimension = cell_dimension(cell.h);
                            cell.current =
                                path_chain(g, t_low_a, i, j) - path_chain(g, t_low_b, i, j);
                            cell.essential_by_current = cell.current.cwiseAbs().maxCoeff() > 0;
                            cell.essential_by_forest = uf.find(i) != uf.find(j);
                            out.push_back(std::move(cell));
                        }
                    }
                }
            } while (std::next_permutation(rest.begin(), rest.end()));
        }
    }
    return out;
}

std::vector<CellDescriptor> enumerate_essential_cells(const Graph& g, std::size_t cap) {
    std::vector<CellDescriptor> all = enumerate_top_cells(g, cap);
    std::vector<CellDescriptor> out;
    for (auto& c : all)
        if (c.essential_by_current) out.push_back(std::move(c));
    return out;
}

}  // namespace pumpq
