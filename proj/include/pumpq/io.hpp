#pragma once

#include <string>
#include <vector>

#include "pumpq/dynamics.hpp"
#include "pumpq/graph.hpp"
#include "pumpq/protocol.hpp"

namespace pumpq {

/// Graph files look like {"vertices": 2, "edges": [[0, 1], [0, 1]]}. Every
/// edge stores its smaller endpoint first; a reversed pair is a parse error
/// naming the offending edge rather than a silent reorder.
Graph parse_graph_json(const std::string& text);
std::string graph_to_json(const Graph& g);

/// Drive files carry one Fourier series per vertex and per edge:
/// {"E": [{"const": 0, "cos": [1], "sin": []}, ...], "W": [...]},
/// f(t) = const + sum_k cos_k cos(2 pi k t) + sin_k sin(2 pi k t).
Protocol parse_protocol_json(const std::string& text);
std::string protocol_to_json(const Protocol& p);

std::string read_text_file(const std::string& path);
Graph load_graph(const std::string& path);
Protocol load_protocol(const std::string& path);

/// Euclidean distance from the coordinates to the nearest integer point.
double lattice_distance(const Eigen::VectorXd& coords);

/// JSON object for a pumped-charge report: raw chain, cycle coordinates,
/// boundary residual, and the nearest integer coordinates with the distance
/// to them.
std::string report_to_json(const CurrentReport& report);

struct SweepSpec {
    std::vector<double> betas;
    std::vector<double> tau_ds;
    bool include_adiabatic = false;  ///< close each beta block with a tau_d = inf row
    double tol = 1e-8;
    Scheme scheme = Scheme::Auto;
    int samples = 256;
    double delta_e = 1e-6;
    double delta_w = 1e-6;
};

/// Deterministic CSV table of pumped-charge coordinates over a parameter
/// grid, beta-major in the given order. Rows are computed concurrently but
/// emitted in grid order with fixed 12-digit formatting, so repeated runs
/// produce identical bytes.
std::string sweep_csv(const Graph& g, const Protocol& proto, const SweepSpec& spec);

/// Command line entry point; returns the process exit code. Failures map by
/// family: 2 invalid input, 3 loop not robust, 4 numerical trouble.
int run_command(int argc, const char* const* argv);

}  // namespace pumpq
