#include "pumpq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pumpq/adiabatic.hpp"
#include "pumpq/params.hpp"
#include "pumpq/topo.hpp"

namespace pumpq {

using nlohmann::ordered_json;

namespace {

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double require_number(const ordered_json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + " must be a number");
    return j.get<double>();
}

FourierSeries parse_series(const ordered_json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + " must be an object with const/cos/sin");
    FourierSeries s;
    for (const auto& [key, value] : j.items()) {
        if (key == "const") {
            s.c0 = require_number(value, where + ".const");
        } else if (key == "cos" || key == "sin") {
            if (!value.is_array()) throw ParseError(where + "." + key + " must be an array");
            auto& dst = key == "cos" ? s.cos_coef : s.sin_coef;
            for (std::size_t k = 0; k < value.size(); ++k)
                dst.push_back(require_number(value[k], where + "." + key));
        } else {
            throw ParseError(where + " has unknown key '" + key + "'");
        }
    }
    return s;
}

ordered_json series_to_json(const FourierSeries& s) {
    ordered_json j;
    j["const"] = s.c0;
    j["cos"] = s.cos_coef;
    j["sin"] = s.sin_coef;
    return j;
}

ordered_json report_json(const CurrentReport& rep) {
    ordered_json out;
    out["charge"] = std::vector<double>(rep.chain.begin(), rep.chain.end());
    out["coords"] = std::vector<double>(rep.coords.begin(), rep.coords.end());
    out["divergence_residual"] = rep.divergence_residual;
    out["integral"] = rep.integral;
    if (rep.integral) {
        out["charge_int"] = std::vector<int>(rep.chain_int.begin(), rep.chain_int.end());
        out["coords_int"] = std::vector<int>(rep.coords_int.begin(), rep.coords_int.end());
    }
    std::vector<long> nearest(rep.coords.size());
    for (int k = 0; k < rep.coords.size(); ++k) nearest[k] = std::lround(rep.coords[k]);
    out["nearest_lattice"] = nearest;
    out["lattice_distance"] = lattice_distance(rep.coords);
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    std::string text = content;
    if (text.empty() || text.back() != '\n') text += '\n';
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "' for writing");
    f << text;
}

Scheme scheme_from(const std::string& name) {
    if (name == "auto") return Scheme::Auto;
    if (name == "rk4") return Scheme::RK4;
    if (name == "expmidpoint") return Scheme::ExpMidpoint;
    throw Error(ErrorKind::InvalidInput, "unknown scheme '" + name + "'");
}

}  // namespace

Graph parse_graph_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ParseError(std::string("graph: ") + e.what());
    }
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw ParseError("graph: expected an object with 'vertices' and 'edges'");
    if (!j["vertices"].is_number_integer())
        throw ParseError("graph: 'vertices' must be an integer");
    if (!j["edges"].is_array()) throw ParseError("graph: 'edges' must be an array");

    std::vector<std::pair<int, int>> edges;
    const ordered_json& je = j["edges"];
    for (std::size_t k = 0; k < je.size(); ++k) {
        const ordered_json& e = je[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            throw ParseError("graph: edge " + std::to_string(k) + " must be a pair of integers");
        int d0 = e[0].get<int>();
        int d1 = e[1].get<int>();
        if (d0 > d1)
            throw ParseError("graph: edge " + std::to_string(k) + " lists [" +
                             std::to_string(d0) + ", " + std::to_string(d1) +
                             "]; store the smaller endpoint first");
        edges.emplace_back(d0, d1);
    }
    return make_graph(j["vertices"].get<int>(), edges);
}

std::string graph_to_json(const Graph& g) {
    ordered_json j;
    j["vertices"] = g.n_vertices;
    ordered_json edges = ordered_json::array();
    for (const Edge& e : g.edges) edges.push_back({e.d0, e.d1});
    j["edges"] = edges;
    return j.dump(2);
}

Protocol parse_protocol_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ParseError(std::string("protocol: ") + e.what());
    }
    if (!j.is_object() || !j.contains("E") || !j.contains("W"))
        throw ParseError("protocol: expected an object with 'E' and 'W'");
    if (!j["E"].is_array() || !j["W"].is_array())
        throw ParseError("protocol: 'E' and 'W' must be arrays of series");

    Protocol p;
    for (std::size_t k = 0; k < j["E"].size(); ++k)
        p.E.push_back(parse_series(j["E"][k], "protocol: E[" + std::to_string(k) + "]"));
    for (std::size_t k = 0; k < j["W"].size(); ++k)
        p.W.push_back(parse_series(j["W"][k], "protocol: W[" + std::to_string(k) + "]"));
    return p;
}

std::string protocol_to_json(const Protocol& p) {
    ordered_json j;
    ordered_json e = ordered_json::array();
    for (const FourierSeries& s : p.E) e.push_back(series_to_json(s));
    ordered_json w = ordered_json::array();
    for (const FourierSeries& s : p.W) w.push_back(series_to_json(s));
    j["E"] = e;
    j["W"] = w;
    return j.dump(2);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Graph load_graph(const std::string& path) { return parse_graph_json(read_text_file(path)); }

Protocol load_protocol(const std::string& path) {
    return parse_protocol_json(read_text_file(path));
}

double lattice_distance(const Eigen::VectorXd& coords) {
    double d2 = 0.0;
    for (int k = 0; k < coords.size(); ++k) {
        double r = coords[k] - std::round(coords[k]);
        d2 += r * r;
    }
    return std::sqrt(d2);
}

std::string report_to_json(const CurrentReport& report) { return report_json(report).dump(2); }

std::string sweep_csv(const Graph& g, const Protocol& proto, const SweepSpec& spec) {
    check_protocol_arity(g, proto);
    CycleBasis basis = cycle_basis(g);

    LoopOptions lopts;
    lopts.n_samples = spec.samples;
    lopts.delta_e = spec.delta_e;
    lopts.delta_w = spec.delta_w;
    const bool robust = check_loop_robust(g, loop_of(proto), lopts).robust;

    EvolveOptions eopts;
    eopts.tol = spec.tol;
    eopts.scheme = spec.scheme;

    // A cell that fails numerically becomes a nan row; the grid survives.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto guard = [&g, nan](auto&& compute) -> CurrentReport {
        try {
            return compute();
        } catch (const Error&) {
            CurrentReport bad;
            bad.chain = Eigen::VectorXd::Constant(g.n_edges(), nan);
            bad.coords = Eigen::VectorXd::Constant(g.betti(), nan);
            bad.divergence_residual = nan;
            return bad;
        }
    };

    struct Cell {
        double beta;
        double tau_d;
        std::future<CurrentReport> fut;
    };
    std::vector<Cell> cells;
    const double inf = std::numeric_limits<double>::infinity();
    for (double beta : spec.betas) {
        for (double tau_d : spec.tau_ds)
            cells.push_back({beta, tau_d,
                             std::async(std::launch::async, [&g, &proto, beta, tau_d, eopts,
                                                             &guard] {
                                 return guard([&] {
                                     return average_current(g, proto, beta, tau_d, eopts);
                                 });
                             })});
        if (spec.include_adiabatic)
            cells.push_back({beta, inf, std::async(std::launch::async, [&g, &proto, beta,
                                                                        &guard] {
                                 return guard([&] { return analytic_current(g, proto, beta); });
                             })});
    }

    std::string out = "beta,tau_d";
    for (int k = 0; k < basis.size(); ++k) out += ",coord_" + std::to_string(k);
    out += ",lattice_distance,robust,divergence_residual\n";
    for (Cell& cell : cells) {
        CurrentReport rep = cell.fut.get();
        out += fmt12(cell.beta) + "," + fmt12(cell.tau_d);
        for (int k = 0; k < rep.coords.size(); ++k) out += "," + fmt12(rep.coords[k]);
        out += "," + fmt12(lattice_distance(rep.coords));
        out += robust ? ",1" : ",0";
        out += "," + fmt12(rep.divergence_residual) + "\n";
    }
    return out;
}

namespace {

ordered_json arcs_json(const ArcDecomposition& dec) {
    ordered_json arcs = ordered_json::array();
    for (const Arc& a : dec.arcs) {
        ordered_json ja;
        ja["t0"] = a.t0;
        ja["t1"] = a.t1;
        ja["kind"] = std::string(1, "UVY"[static_cast<int>(a.cls.kind)]);
        ja["base_vertex"] = a.base_vertex;
        ja["tree_vertices"] = a.cls.tree.vertices;
        ja["tree_edges"] = a.cls.tree.edges;
        arcs.push_back(ja);
    }
    return arcs;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"quantised pump currents on driven multigraph networks"};
    app.require_subcommand(1);

    std::string graph_path, proto_path, out_path, format = "json", scheme_name = "auto";
    double beta = 1.0, tau_d = 1.0, tol = 1e-8, delta_e = 1e-6, delta_w = 1e-6;
    double coord_tol = 1e-8, residual_tol = 1e-10, probe_beta = 10.0;
    int samples = 256, generator = 0, probe_steps = 256;
    std::size_t cap = 5'000'000;
    std::vector<double> betas, tau_ds;
    bool essential_only = false, include_adiabatic = false;
    bool high_base = false, high_junction = false, with_decay = false;

    auto add_graph = [&](CLI::App* cmd) {
        cmd->add_option("--graph,graph", graph_path, "graph json file")->required();
        cmd->add_option("--out", out_path, "write the result here instead of stdout");
    };
    auto add_drive = [&](CLI::App* cmd) {
        cmd->add_option("--graph,graph", graph_path, "graph json file")->required();
        cmd->add_option("--protocol,protocol", proto_path, "drive json file")->required();
        cmd->add_option("--out", out_path, "write the result here instead of stdout");
    };
    auto add_loop_tols = [&](CLI::App* cmd) {
        cmd->add_option("--samples", samples, "loop samples per period");
        cmd->add_option("--delta-e", delta_e, "well degeneracy tolerance");
        cmd->add_option("--delta-w", delta_w, "barrier grouping tolerance");
    };

    CLI::App* info = app.add_subcommand("graph-info", "graph shape and cycle basis");
    add_graph(info);

    CLI::App* cells = app.add_subcommand("cells", "walls of the classification and their charge");
    add_graph(cells);
    cells->add_flag("--essential-only", essential_only, "keep only the charged walls");
    cells->add_option("--cap", cap, "enumeration budget");
    cells->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sim = app.add_subcommand("simulate", "pumped charge of the driven dynamics");
    add_drive(sim);
    sim->add_option("--beta", beta, "inverse temperature")->required();
    sim->add_option("--tau-d,--tau", tau_d, "driving period")->required();
    sim->add_option("--tol", tol, "integrator tolerance per unit time");
    sim->add_option("--scheme", scheme_name)->check(CLI::IsMember({"auto", "rk4", "expmidpoint"}));
    sim->add_flag("--decay", with_decay, "include relaxation estimates");

    CLI::App* adia = app.add_subcommand("adiabatic", "pumped charge of the quasistatic envelope");
    add_drive(adia);
    adia->add_option("--beta", beta, "inverse temperature")->required();
    adia->add_option("--coord-tol", coord_tol, "quadrature settle tolerance");
    adia->add_option("--residual-tol", residual_tol, "boundary residual tolerance");

    CLI::App* topo = app.add_subcommand("topological", "arc structure and integer charge");
    add_drive(topo);
    add_loop_tols(topo);
    topo->add_flag("--high-base", high_base, "prefer the largest eligible base vertices");
    topo->add_flag("--high-junction", high_junction, "prefer the largest eligible junctions");

    CLI::App* holo = app.add_subcommand("holonomy", "ground-line winding probe on one generator");
    add_drive(holo);
    holo->add_option("--beta", probe_beta, "inverse temperature for the probe");
    holo->add_option("--generator", generator, "cycle-basis generator index");
    holo->add_option("--steps", probe_steps, "loop grid nodes (floor 256)");

    CLI::App* sweep = app.add_subcommand("sweep", "charge table over a parameter grid");
    add_drive(sweep);
    add_loop_tols(sweep);
    sweep->add_option("--betas", betas, "inverse temperatures")->delimiter(',')->required();
    sweep->add_option("--tau-ds", tau_ds, "driving periods")->delimiter(',');
    sweep->add_flag("--adiabatic", include_adiabatic, "append a tau_d=inf row per beta");
    sweep->add_option("--tol", tol, "integrator tolerance per unit time");
    sweep->add_option("--scheme", scheme_name)->check(CLI::IsMember({"auto", "rk4", "expmidpoint"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (info->parsed()) {
            Graph g = load_graph(graph_path);
            CycleBasis basis = cycle_basis(g);
            ordered_json out;
            out["vertices"] = g.n_vertices;
            ordered_json edges = ordered_json::array();
            for (const Edge& e : g.edges) edges.push_back({e.d0, e.d1});
            out["edges"] = edges;
            out["betti"] = g.betti();
            out["spanning_trees"] = enumerate_spanning_trees(g).size();
            out["reference_tree"] = basis.tree_edges;
            out["basis_edges"] = basis.basis_edges;
            ordered_json cyc = ordered_json::array();
            for (int k = 0; k < basis.size(); ++k) {
                std::vector<int> col(g.n_edges());
                for (int a = 0; a < g.n_edges(); ++a) col[a] = basis.cycles(a, k);
                cyc.push_back(col);
            }
            out["cycles"] = cyc;
            write_output(out_path, out.dump(2));
        } else if (cells->parsed()) {
            Graph g = load_graph(graph_path);
            std::vector<CellDescriptor> list =
                essential_only ? enumerate_essential_cells(g, cap) : enumerate_top_cells(g, cap);
            if (format == "csv") {
                std::string out = "min_i,min_j,tie_a,tie_b,dimension,essential_by_current,"
                                  "essential_by_forest";
                for (int a = 0; a < g.n_edges(); ++a) out += ",current_" + std::to_string(a);
                out += "\n";
                for (const CellDescriptor& c : list) {
                    out += std::to_string(c.minima.first) + "," + std::to_string(c.minima.second) +
                           "," + std::to_string(c.tie.first) + "," + std::to_string(c.tie.second) +
                           "," + std::to_string(c.dimension) + "," +
                           (c.essential_by_current ? "1" : "0") + "," +
                           (c.essential_by_forest ? "1" : "0");
                    for (int a = 0; a < g.n_edges(); ++a)
                        out += "," + std::to_string(c.current[a]);
                    out += "\n";
                }
                write_output(out_path, out);
            } else {
                ordered_json out = ordered_json::array();
                for (const CellDescriptor& c : list) {
                    ordered_json jc;
                    jc["minima"] = {c.minima.first, c.minima.second};
                    jc["tie"] = {c.tie.first, c.tie.second};
                    jc["dimension"] = c.dimension;
                    jc["essential_by_current"] = c.essential_by_current;
                    jc["essential_by_forest"] = c.essential_by_forest;
                    jc["current"] = std::vector<int>(c.current.begin(), c.current.end());
                    out.push_back(jc);
                }
                write_output(out_path, out.dump(2));
            }
        } else if (sim->parsed()) {
            Graph g = load_graph(graph_path);
            Protocol p = load_protocol(proto_path);
            check_protocol_arity(g, p);
            EvolveOptions eopts;
            eopts.tol = tol;
            eopts.scheme = scheme_from(scheme_name);
            CurrentReport rep = average_current(g, p, beta, tau_d, eopts);
            ordered_json out = report_json(rep);
            out["beta"] = beta;
            out["tau_d"] = tau_d;
            if (with_decay) {
                DecayEstimate d = decay_constants(g, p, beta, tau_d, 64, eopts);
                out["decay"] = {{"lambda", d.lambda},
                                {"monodromy_norm", d.monodromy_norm},
                                {"fitted_c", d.fitted_c}};
            }
            write_output(out_path, out.dump(2));
        } else if (adia->parsed()) {
            Graph g = load_graph(graph_path);
            Protocol p = load_protocol(proto_path);
            check_protocol_arity(g, p);
            AdiabaticOptions aopts;
            aopts.coord_tol = coord_tol;
            aopts.residual_tol = residual_tol;
            CurrentReport rep = analytic_current(g, p, beta, aopts);
            ordered_json out = report_json(rep);
            out["beta"] = beta;
            out["tau_d"] = "inf";
            write_output(out_path, out.dump(2));
        } else if (topo->parsed()) {
            Graph g = load_graph(graph_path);
            Protocol p = load_protocol(proto_path);
            check_protocol_arity(g, p);
            LoopOptions lopts;
            lopts.n_samples = samples;
            lopts.delta_e = delta_e;
            lopts.delta_w = delta_w;
            lopts.high_base = high_base;
            lopts.high_junction = high_junction;
            ArcDecomposition dec = arc_decompose(g, loop_of(p), lopts);
            CurrentReport rep = topological_current(g, dec);
            ordered_json out = report_json(rep);
            out["arcs"] = arcs_json(dec);
            ordered_json js = ordered_json::array();
            for (std::size_t m = 0; m < dec.junction_t.size(); ++m)
                js.push_back({{"t", dec.junction_t[m]}, {"vertex", dec.junction_vertex[m]}});
            out["junctions"] = js;
            write_output(out_path, out.dump(2));
        } else if (holo->parsed()) {
            Graph g = load_graph(graph_path);
            Protocol p = load_protocol(proto_path);
            check_protocol_arity(g, p);
            ProbeResult res = ground_holonomy_probe(g, p, probe_beta, generator, probe_steps);
            ordered_json out;
            out["degenerate"] = res.degenerate;
            out["winding"] = res.winding;
            out["min_gap"] = res.min_gap;
            out["beta_used"] = res.beta_used;
            out["steps_used"] = res.steps_used;
            out["note"] = res.note;
            write_output(out_path, out.dump(2));
        } else if (sweep->parsed()) {
            Graph g = load_graph(graph_path);
            Protocol p = load_protocol(proto_path);
            SweepSpec spec;
            spec.betas = betas;
            spec.tau_ds = tau_ds;
            spec.include_adiabatic = include_adiabatic;
            spec.tol = tol;
            spec.scheme = scheme_from(scheme_name);
            spec.samples = samples;
            spec.delta_e = delta_e;
            spec.delta_w = delta_w;
            write_output(out_path, sweep_csv(g, p, spec));
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::InvalidInput: return 2;
            case ErrorKind::NotRobust: return 3;
            case ErrorKind::Numerical: return 4;
        }
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace pumpq
