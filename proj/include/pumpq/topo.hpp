#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "pumpq/graph.hpp"
#include "pumpq/params.hpp"
#include "pumpq/protocol.hpp"

namespace pumpq {

/// Pointwise classification of a parameter point at fixed tolerances.
/// Priority: a unique well gives a U point (tree = the well alone); otherwise
/// an injective barrier ranking gives a V point (tree = the greedy tree);
/// otherwise the full height function decides, and only its inessential side
/// is admissible on a robust loop.
struct PointClass {
    enum Kind { U, V, Y } kind = U;
    bool valid = true;          ///< false when the classification itself failed
    std::string reason;         ///< diagnostic when invalid or essential
    int min_vertex = -1;        ///< the well (U points)
    EdgeOrder order;            ///< barrier ranking (V points)
    HeightFunction h;           ///< full height (Y points)
    bool inessential = true;
    TreeComponent tree;         ///< arc tree: single well, greedy tree, or
                                ///< the forest component holding the minima

    bool admissible() const { return valid && inessential; }
    bool same_class(const PointClass& o) const;
};

PointClass classify_point(const Graph& g, const ParamPoint& p, double delta_e = 1e-6,
                          double delta_w = 1e-6);

struct LoopOptions {
    int n_samples = 256;
    double delta_e = 1e-6;
    double delta_w = 1e-6;
    int max_refine = 6;          ///< sample-doubling rounds before giving up
    bool high_base = false;      ///< pick the largest eligible base vertices
    bool high_junction = false;  ///< pick the largest eligible junction vertices
};

struct RobustReport {
    bool robust = true;
    struct Offence {
        double t;
        std::string reason;
    };
    std::vector<Offence> offences;
};

/// Samples the loop, locates every classification change by bisection, and
/// checks that all samples and change points stay on the admissible side.
RobustReport check_loop_robust(const Graph& g, const LoopSampler& loop,
                               const LoopOptions& opts = {});

/// Maximal parameter arcs of constant classification around the loop. Arcs
/// shorter than the sampling resolution appear as the degenerate intervals
/// discovered at classification changes. junction[m] joins arcs[m] to
/// arcs[m+1] (cyclically) and lies in both arc trees.
struct Arc {
    double t0 = 0.0;
    double t1 = 0.0;
    PointClass cls;
    int base_vertex = -1;
};

struct ArcDecomposition {
    std::vector<Arc> arcs;
    std::vector<double> junction_t;
    std::vector<int> junction_vertex;
};

ArcDecomposition arc_decompose(const Graph& g, const LoopSampler& loop,
                               const LoopOptions& opts = {});

/// Low-temperature pumped charge read off the arc structure: at each junction
/// the tree path from the current arc's base to the junction vertex, minus
/// the next arc's path to the same junction. Integer, conserved, and
/// independent of the base and junction choices.
CurrentReport topological_current(const Graph& g, const ArcDecomposition& dec);

/// exp(i <c, theta>) for a conserved integer chain.
std::complex<double> holonomy_of_chain(const Graph& g, const Eigen::VectorXi& chain,
                                       const Eigen::VectorXd& theta);

/// Same holonomy assembled arc by arc: the product over arcs of the phases
/// along the tree path between consecutive junction vertices. Provides the
/// independent route for consistency checks.
std::complex<double> holonomy_around(const Graph& g, const ArcDecomposition& dec,
                                     const Eigen::VectorXd& theta);

/// Edge-twisted generator -boundary g^{-1} lambda coboundary kappa with one
/// complex multiplier per edge, under the usual exponent shift. lambda = 1
/// reproduces the untwisted generator entry for entry. Note the twist scales
/// whole edge blocks (diagonal included), so generic twists deform the
/// spectrum; only the chain holonomy itself is a gauge invariant.
struct TwistedOperator {
    Eigen::MatrixXcd matrix;  ///< true operator = exp(log_scale) * matrix
    double log_scale = 0.0;
};

TwistedOperator twisted_master(const Graph& g, const ParamPoint& p, double beta,
                               const Eigen::VectorXcd& lambda);

/// Top eigenvalue data of a twisted generator. Degenerate when the gap
/// between the two largest real parts falls under 1e-9 in true units or the
/// top eigenvalue repeats.
struct GroundState {
    std::complex<double> eigenvalue;  ///< true units
    Eigen::VectorXcd line;            ///< unit eigenvector, largest entry made real positive
    double gap = 0.0;                 ///< true units
    bool degenerate = false;
};

GroundState ground_state(const TwistedOperator& op);

/// Sweeps a twist angle on the generator's non-tree edge (all other edges at
/// multiplier 1) and transports the twisted ground line around the drive loop
/// at each angle, accumulating the Wilson phase. Reports the winding of that
/// phase over a full angle sweep, doubling beta and the loop grid until the
/// winding repeats; a degeneracy on the way (gap collapse or ground-branch
/// crossing) stops the probe with diagnostics instead of a winding. The loop
/// grid never drops below 256 nodes.
struct ProbeResult {
    bool degenerate = false;
    int winding = 0;
    double min_gap = 0.0;
    double beta_used = 0.0;
    int steps_used = 0;
    std::string note;
};

ProbeResult ground_holonomy_probe(const Graph& g, const Protocol& proto, double beta,
                                  int generator, int steps = 256);

}  // namespace pumpq
