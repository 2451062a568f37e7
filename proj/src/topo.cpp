#include "pumpq/topo.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include "assembly_detail.hpp"
#include "pumpq/trees.hpp"

namespace pumpq {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kWidthFloor = 1e-12;  // below this a boundary counts as direct contact
constexpr int kMaxDepth = 64;
constexpr std::size_t kMaxArcs = 20'000;

std::string fmt_t(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", t);
    return buf;
}

struct ClassifyCtx {
    const Graph* g = nullptr;
    const LoopSampler* loop = nullptr;
    double delta_e = 0.0;
    double delta_w = 0.0;
    bool strict = true;  // throw on inadmissible points instead of recording
    std::vector<RobustReport::Offence>* offences = nullptr;
};

PointClass classify_at(const ClassifyCtx& c, double t) {
    return classify_point(*c.g, (*c.loop)(t), c.delta_e, c.delta_w);
}

// Records or throws for a point the loop must not contain. Returns false so
// collect-mode callers can stop refining the offending stretch.
bool flag_offence(const ClassifyCtx& c, double t, const std::string& reason) {
    if (c.strict) throw NotRobustError("loop fails at t=" + fmt_t(t) + ": " + reason);
    if (c.offences->size() < 64) c.offences->push_back({t, reason});
    return false;
}

struct ArcSeed {
    double t_rep = 0.0;  // a time classified as cls
    PointClass cls;
};

// Resolves the boundary between distinct admissible classes A at ta and B at
// tb (ta < tb, both times may exceed 1 across the wrap). Intermediate arcs
// narrower than the sample spacing are discovered by bisection: whenever the
// midpoint shows a third class the interval splits around it. Appends the
// discovered arcs to `mids` and the boundary times to `cuts` in increasing t
// order; cuts always ends up one longer than mids.
bool resolve_boundary(const ClassifyCtx& c, double ta, const PointClass& A, double tb,
                      const PointClass& B, std::vector<ArcSeed>& mids, std::vector<double>& cuts,
                      int depth) {
    if (tb - ta < kWidthFloor || depth > kMaxDepth) {
        cuts.push_back(0.5 * (ta + tb));
        return true;
    }
    double tm = 0.5 * (ta + tb);
    PointClass M = classify_at(c, tm);
    if (!M.admissible()) {
        cuts.push_back(tm);  // keep the bookkeeping shape for collect mode
        return flag_offence(c, tm, M.reason);
    }
    if (M.same_class(A)) return resolve_boundary(c, tm, A, tb, B, mids, cuts, depth + 1);
    if (M.same_class(B)) return resolve_boundary(c, ta, A, tm, B, mids, cuts, depth + 1);
    if (mids.size() > kMaxArcs)
        throw RefinementLimitError("boundary refinement produced more than " +
                                   std::to_string(kMaxArcs) + " arcs");
    bool ok = resolve_boundary(c, ta, A, tm, M, mids, cuts, depth + 1);
    mids.push_back({tm, M});
    if (!resolve_boundary(c, tm, M, tb, B, mids, cuts, depth + 1)) ok = false;
    return ok;
}

struct Attempt {
    std::vector<ArcSeed> arcs;  // cyclic order around the loop
    std::vector<double> cuts;   // cuts[m] separates arcs[m] from arcs[m+1 mod M]
};

// One full decomposition pass at a fixed sample count (strict mode only).
Attempt decompose_once(const ClassifyCtx& c, int n) {
    std::vector<PointClass> cls(n);
    for (int k = 0; k < n; ++k) {
        double t = static_cast<double>(k) / n;
        cls[k] = classify_at(c, t);
        if (!cls[k].admissible()) flag_offence(c, t, cls[k].reason);
    }

    // Anchor the cyclic run scan at a classification change.
    int anchor = -1;
    for (int k = 0; k < n && anchor < 0; ++k)
        if (!cls[k].same_class(cls[(k + n - 1) % n])) anchor = k;

    Attempt out;
    if (anchor < 0) {
        out.arcs.push_back({0.0, cls[0]});
        return out;
    }

    std::vector<std::vector<int>> runs;  // sample indices per run, in visit order
    for (int off = 0; off < n; ++off) {
        int idx = (anchor + off) % n;
        if (off == 0 || !cls[idx].same_class(cls[(anchor + off - 1) % n]))
            runs.push_back({idx});
        else
            runs.back().push_back(idx);
    }

    const int R = static_cast<int>(runs.size());
    for (int r = 0; r < R; ++r) {
        out.arcs.push_back({static_cast<double>(runs[r].front()) / n, cls[runs[r].front()]});
        int q = runs[r].back();
        double ta = static_cast<double>(q) / n;  // may cross t=1 towards the next run
        double tb = ta + 1.0 / n;
        std::vector<ArcSeed> mids;
        std::vector<double> cuts;
        resolve_boundary(c, ta, cls[q], tb, cls[runs[(r + 1) % R].front()], mids, cuts, 0);
        for (std::size_t i = 0; i < mids.size(); ++i) {
            out.cuts.push_back(cuts[i]);
            out.arcs.push_back(mids[i]);
        }
        out.cuts.push_back(cuts.back());
        if (out.arcs.size() > kMaxArcs)
            throw RefinementLimitError("loop decomposes into more than " +
                                       std::to_string(kMaxArcs) + " arcs");
    }
    return out;
}

std::string class_key(const PointClass& c) {
    std::string key(1, "UVY"[static_cast<int>(c.kind)]);
    key += ";v";
    for (int v : c.tree.vertices) key += ":" + std::to_string(v);
    key += ";e";
    for (int e : c.tree.edges) key += ":" + std::to_string(e);
    return key;
}

bool cyclic_equal(const Attempt& a, const Attempt& b) {
    if (a.arcs.size() != b.arcs.size()) return false;
    const std::size_t m = a.arcs.size();
    std::vector<std::string> ka(m), kb(m);
    for (std::size_t i = 0; i < m; ++i) {
        ka[i] = class_key(a.arcs[i].cls);
        kb[i] = class_key(b.arcs[i].cls);
    }
    for (std::size_t shift = 0; shift < m; ++shift) {
        bool match = true;
        for (std::size_t i = 0; i < m && match; ++i) match = ka[i] == kb[(i + shift) % m];
        if (match) return true;
    }
    return false;
}

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// The junction vertex shared by two adjacent arc trees. Vertices carrying
// the low-temperature mass at the junction time are preferred; either way all
// candidates must be interchangeable, i.e. connected inside the common
// subforest, so that the charge formula does not depend on the pick.
int pick_junction(const ClassifyCtx& ctx, const PointClass& left, const PointClass& right,
                  double t, bool high) {
    const Graph& g = *ctx.g;
    std::vector<int> shared;
    std::set_intersection(left.tree.vertices.begin(), left.tree.vertices.end(),
                          right.tree.vertices.begin(), right.tree.vertices.end(),
                          std::back_inserter(shared));
    if (shared.empty())
        throw RefinementLimitError("no shared tree vertex at the junction near t=" + fmt_t(t));

    Eigen::VectorXd E = (*ctx.loop)(t).E;
    double emin = E.minCoeff();
    std::vector<int> cand;
    for (int v : shared)
        if (E[v] <= emin + ctx.delta_e) cand.push_back(v);
    if (cand.empty()) cand = shared;

    if (cand.size() > 1) {
        std::vector<int> common;
        std::set_intersection(left.tree.edges.begin(), left.tree.edges.end(),
                              right.tree.edges.begin(), right.tree.edges.end(),
                              std::back_inserter(common));
        Dsu dsu(g.n_vertices);
        for (int a : common) dsu.unite(g.edges[a].d0, g.edges[a].d1);
        int root = dsu.find(cand.front());
        for (int v : cand)
            if (dsu.find(v) != root)
                throw RefinementLimitError(
                    "junction near t=" + fmt_t(t) +
                    " admits inequivalent vertices; refine the tolerances");
    }
    return high ? cand.back() : cand.front();
}

double fold_unit(double t) { return t - std::floor(t); }

}  // namespace

bool PointClass::same_class(const PointClass& o) const {
    if (!valid || !o.valid) return false;
    return kind == o.kind && inessential == o.inessential && min_vertex == o.min_vertex &&
           tree.vertices == o.tree.vertices && tree.edges == o.tree.edges;
}

PointClass classify_point(const Graph& g, const ParamPoint& p, double delta_e, double delta_w) {
    validate_graph(g);
    if (p.E.size() != g.n_vertices || p.W.size() != g.n_edges())
        throw DimensionMismatchError("parameter point does not match the graph shape");

    PointClass c;
    double emin = p.E.minCoeff();
    std::vector<int> wells;
    for (int v = 0; v < g.n_vertices; ++v)
        if (p.E[v] <= emin + delta_e) wells.push_back(v);
    if (wells.size() == 1) {
        c.kind = PointClass::U;
        c.min_vertex = wells.front();
        c.tree.vertices = {wells.front()};
        return c;
    }

    std::vector<int> order(g.n_edges());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return p.W[a] < p.W[b]; });
    bool injective = g.n_edges() > 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k)
        if (p.W[order[k + 1]] - p.W[order[k]] <= delta_w) injective = false;
    if (injective) {
        c.kind = PointClass::V;
        c.order = order;
        SpanningTree st = sigma_tree(g, order);
        c.tree.vertices.resize(g.n_vertices);
        std::iota(c.tree.vertices.begin(), c.tree.vertices.end(), 0);
        c.tree.edges = st.edges;
        std::sort(c.tree.edges.begin(), c.tree.edges.end());
        return c;
    }

    c.kind = PointClass::Y;
    try {
        c.h = height_function(p, delta_e, delta_w);
    } catch (const AmbiguousGroupingError& err) {
        c.valid = false;
        c.reason = err.what();
        return c;
    }
    InessentialResult r;
    try {
        r = is_inessential(g, c.h);
    } catch (const CountLimitError& err) {
        c.valid = false;
        c.reason = err.what();
        return c;
    }
    c.inessential = r.inessential;
    if (r.inessential) {
        c.tree = r.tree;
        std::sort(c.tree.vertices.begin(), c.tree.vertices.end());
        std::sort(c.tree.edges.begin(), c.tree.edges.end());
    } else {
        c.reason = "essential degeneracy: the minima split across forest components";
    }
    return c;
}

RobustReport check_loop_robust(const Graph& g, const LoopSampler& loop, const LoopOptions& opts) {
    validate_graph(g);
    RobustReport rep;
    ClassifyCtx c{&g, &loop, opts.delta_e, opts.delta_w, false, &rep.offences};

    const int n = opts.n_samples;
    std::vector<PointClass> cls(n);
    for (int k = 0; k < n; ++k) {
        double t = static_cast<double>(k) / n;
        cls[k] = classify_at(c, t);
        if (!cls[k].admissible()) flag_offence(c, t, cls[k].reason);
    }
    for (int k = 0; k < n && rep.offences.size() < 64; ++k) {
        int q = (k + 1) % n;
        if (!cls[k].admissible() || !cls[q].admissible()) continue;
        if (cls[k].same_class(cls[q])) continue;
        std::vector<ArcSeed> mids;
        std::vector<double> cuts;
        double ta = static_cast<double>(k) / n;
        resolve_boundary(c, ta, cls[k], ta + 1.0 / n, cls[q], mids, cuts, 0);
    }
    rep.robust = rep.offences.empty();
    return rep;
}

namespace {

// Turns a raw attempt into the final decomposition; junction resolution can
// still reject it with RefinementLimitError.
ArcDecomposition assemble_arcs(const ClassifyCtx& c, Attempt&& attempt, const LoopOptions& opts) {
    ArcDecomposition dec;
    const int M = static_cast<int>(attempt.arcs.size());
    dec.arcs.resize(M);
    for (int m = 0; m < M; ++m) {
        Arc& a = dec.arcs[m];
        a.cls = std::move(attempt.arcs[m].cls);
        const std::vector<int>& verts = a.cls.tree.vertices;
        a.base_vertex = opts.high_base ? verts.back() : verts.front();
    }
    if (M == 1) {
        dec.arcs[0].t0 = 0.0;
        dec.arcs[0].t1 = 1.0;
        return dec;
    }

    if (static_cast<int>(attempt.cuts.size()) != M)
        throw Error(ErrorKind::Numerical, "junction bookkeeping out of step with the arcs");
    dec.junction_t.resize(M);
    dec.junction_vertex.resize(M);
    for (int m = 0; m < M; ++m) {
        dec.junction_t[m] = fold_unit(attempt.cuts[m]);
        dec.junction_vertex[m] = pick_junction(c, dec.arcs[m].cls, dec.arcs[(m + 1) % M].cls,
                                               dec.junction_t[m], opts.high_junction);
    }
    for (int m = 0; m < M; ++m) {
        dec.arcs[m].t0 = dec.junction_t[(m + M - 1) % M];
        dec.arcs[m].t1 = dec.junction_t[m];
    }
    return dec;
}

}  // namespace

ArcDecomposition arc_decompose(const Graph& g, const LoopSampler& loop, const LoopOptions& opts) {
    validate_graph(g);
    ClassifyCtx c{&g, &loop, opts.delta_e, opts.delta_w, true, nullptr};

    // The structure is accepted once it repeats under sample doubling and all
    // junctions resolve; short arcs otherwise slip between samples unnoticed.
    int n = std::max(2, opts.n_samples);
    Attempt prev = decompose_once(c, n);
    std::string last_failure = "arc structure still changing";
    for (int round = 0; round < opts.max_refine; ++round) {
        n *= 2;
        Attempt cur = decompose_once(c, n);
        bool repeated = cyclic_equal(prev, cur);
        prev = std::move(cur);
        if (!repeated) continue;
        try {
            Attempt keep = prev;  // assemble consumes the attempt
            return assemble_arcs(c, std::move(keep), opts);
        } catch (const RefinementLimitError& err) {
            last_failure = err.what();  // more samples may split the bad junction
        }
    }
    throw RefinementLimitError(last_failure + " at " + std::to_string(n) +
                               " samples per period");
}

CurrentReport topological_current(const Graph& g, const ArcDecomposition& dec) {
    validate_graph(g);
    CycleBasis basis = cycle_basis(g);
    VectorXi charge = VectorXi::Zero(g.n_edges());
    const int M = static_cast<int>(dec.arcs.size());
    if (M >= 2) {
        for (int m = 0; m < M; ++m) {
            const Arc& cur = dec.arcs[m];
            const Arc& nxt = dec.arcs[(m + 1) % M];
            int j = dec.junction_vertex[m];
            charge += path_chain(g, cur.cls.tree.edges, cur.base_vertex, j);
            charge -= path_chain(g, nxt.cls.tree.edges, nxt.base_vertex, j);
        }
    }
    return make_current_report(g, basis, charge);
}

std::complex<double> holonomy_of_chain(const Graph& g, const VectorXi& chain,
                                       const VectorXd& theta) {
    if (chain.size() != g.n_edges() || theta.size() != g.n_edges())
        throw DimensionMismatchError("chain and angles must have one entry per edge");
    VectorXi div = boundary(g, chain);
    if (div.size() > 0 && div.cwiseAbs().maxCoeff() != 0)
        throw NotConservedError("holonomy is defined for conserved chains only");
    double phase = 0.0;
    for (int a = 0; a < g.n_edges(); ++a) phase += chain[a] * theta[a];
    return std::polar(1.0, phase);
}

std::complex<double> holonomy_around(const Graph& g, const ArcDecomposition& dec,
                                     const VectorXd& theta) {
    if (theta.size() != g.n_edges())
        throw DimensionMismatchError("angles must have one entry per edge");
    const int M = static_cast<int>(dec.arcs.size());
    std::complex<double> h{1.0, 0.0};
    if (M < 2) return h;
    for (int m = 0; m < M; ++m) {
        int jp = dec.junction_vertex[(m + M - 1) % M];
        int jn = dec.junction_vertex[m];
        VectorXi path = path_chain(g, dec.arcs[m].cls.tree.edges, jp, jn);
        double phase = 0.0;
        for (int a = 0; a < g.n_edges(); ++a) phase += path[a] * theta[a];
        h *= std::polar(1.0, phase);
    }
    return h;
}

TwistedOperator twisted_master(const Graph& g, const ParamPoint& p, double beta,
                               const VectorXcd& lambda) {
    validate_graph(g);
    if (p.E.size() != g.n_vertices || p.W.size() != g.n_edges() || lambda.size() != g.n_edges())
        throw DimensionMismatchError("twist must supply one multiplier per edge");
    TwistedOperator op;
    double shift = detail::master_shift(g, p.E, p.W);
    op.log_scale = beta * shift;
    op.matrix.setZero(g.n_vertices, g.n_vertices);
    detail::accumulate_master(g, p.E, p.W, beta, shift, op.matrix,
                              [&](int a) { return lambda[a]; });
    return op;
}

GroundState ground_state(const TwistedOperator& op) {
    const int n = static_cast<int>(op.matrix.rows());
    double scale = std::exp(op.log_scale);
    if (!std::isfinite(scale))
        throw OverflowError("spectral scale exp(" + std::to_string(op.log_scale) +
                            ") exceeds double range");
    GroundState gs;
    if (n == 1) {
        gs.eigenvalue = op.matrix(0, 0) * scale;
        gs.line = VectorXcd::Ones(1);
        gs.gap = std::numeric_limits<double>::infinity();
        return gs;
    }

    Eigen::ComplexEigenSolver<MatrixXcd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::Numerical, "twisted spectrum failed to converge");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return es.eigenvalues()[a].real() > es.eigenvalues()[b].real();
    });

    gs.eigenvalue = es.eigenvalues()[idx[0]] * scale;
    gs.gap = (es.eigenvalues()[idx[0]].real() - es.eigenvalues()[idx[1]].real()) * scale;
    gs.degenerate = !(gs.gap > 1e-9);

    VectorXcd v = es.eigenvectors().col(idx[0]);
    v.normalize();
    int top = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[top])) top = i;
    if (std::abs(v[top]) > 0.0) v *= std::conj(v[top]) / std::abs(v[top]);
    gs.line = v;
    return gs;
}

namespace {

ProbeResult probe_sweep(const Graph& g, const Protocol& proto, double beta, int twist_edge,
                        int steps, int n_angles) {
    ProbeResult res;
    res.beta_used = beta;
    res.steps_used = steps;
    res.min_gap = std::numeric_limits<double>::infinity();

    std::vector<double> phases;
    phases.reserve(n_angles + 1);
    for (int j = 0; j <= n_angles; ++j) {
        // Offset angles keep the sweep clear of the untwisted point s = 0.
        double s = kTwoPi * (j + 0.5) / n_angles;
        VectorXcd lam = VectorXcd::Ones(g.n_edges());
        lam[twist_edge] = std::polar(1.0, s);

        std::vector<VectorXcd> lines(steps);
        for (int i = 0; i < steps; ++i) {
            ProtocolSample ps = evaluate_protocol(proto, static_cast<double>(i) / steps);
            GroundState gs = ground_state(twisted_master(g, ps.point(), beta, lam));
            res.min_gap = std::min(res.min_gap, gs.gap);
            if (gs.degenerate) {
                res.degenerate = true;
                res.note = "spectral gap collapse at t=" + fmt_t(static_cast<double>(i) / steps) +
                           ", angle=" + fmt_t(s);
                return res;
            }
            lines[i] = gs.line;
        }

        std::complex<double> wilson{1.0, 0.0};
        for (int i = 0; i < steps; ++i) {
            std::complex<double> o = lines[i].dot(lines[(i + 1) % steps]);
            if (std::norm(o) < 0.5) {
                res.degenerate = true;
                res.note = "ground branch jump between t=" + fmt_t(static_cast<double>(i) / steps) +
                           " and the next node, angle=" + fmt_t(s);
                return res;
            }
            wilson *= o / std::abs(o);
        }
        phases.push_back(std::arg(wilson));
    }

    double unwrapped = phases.front();
    double start = unwrapped;
    for (std::size_t j = 1; j < phases.size(); ++j)
        unwrapped += std::remainder(phases[j] - phases[j - 1], kTwoPi);
    res.winding = static_cast<int>(std::lround((unwrapped - start) / kTwoPi));
    return res;
}

}  // namespace

ProbeResult ground_holonomy_probe(const Graph& g, const Protocol& proto, double beta,
                                  int generator, int steps) {
    validate_graph(g);
    check_protocol_arity(g, proto);
    CycleBasis basis = cycle_basis(g);
    if (generator < 0 || generator >= basis.size())
        throw IndexOutOfRangeError("generator " + std::to_string(generator) + " out of range 0.." +
                                   std::to_string(basis.size() - 1));
    int twist_edge = basis.basis_edges[generator];
    steps = std::max(steps, 256);

    // Sharpen beta and the loop grid until the winding repeats; a degeneracy
    // anywhere ends the probe right away, diagnostics attached.
    ProbeResult prev = probe_sweep(g, proto, beta, twist_edge, steps, 24);
    if (prev.degenerate) return prev;
    for (int round = 0; round < 3; ++round) {
        beta *= 2;
        steps *= 2;
        ProbeResult next = probe_sweep(g, proto, beta, twist_edge, steps, 24);
        if (next.degenerate) return next;
        if (next.winding == prev.winding) {
            next.note = "winding stable under refinement";
            return next;
        }
        prev = next;
    }
    prev.degenerate = true;
    prev.note = "winding did not stabilise under refinement";
    return prev;
}

}  // namespace pumpq
