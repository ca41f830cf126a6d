// gaptooth: construct, post-process and simulate holistic/gap-tooth models.
//
//   gaptooth construct --n 2 --r 1/2 --K 4 --output model.json
//   gaptooth construct --analytic --o 6 --K 3 --output element.json
//   gaptooth table --n 2,3,4,5 > gnon.csv
//   gaptooth pade --n 2,3,4 --c 1/72,1/60,179/10136
//   gaptooth equivpde --model model.json --gamma 1
//   gaptooth fdform --model model.json
//   gaptooth simulate --model model.json --N 16 --T 1 --output traj.csv
//   gaptooth gaptooth --n 2 --r 1/2 --N 16 --output micro.csv
//   gaptooth compare --a traj.csv --b micro.csv
//
// Every subcommand accepts --config FILE (a JSON object keyed by long option
// names); flags given on the command line override it.

#include <CLI11.hpp>
#include <json.hpp>

#include <gaptooth/gaptooth.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace gaptooth;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Config file support: JSON entries become command-line tokens placed before
// the user's own flags; an option given on the command line replaces its entry.

std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigurationError("config file " + path + " is not JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigurationError("config file must hold a JSON object");
    std::vector<std::string> out;
    auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) {
            std::ostringstream s;
            s.precision(17);
            s << v.get<double>();
            return s.str();
        }
        throw ConfigurationError("unsupported config value " + v.dump());
    };
    for (const auto& [key, value] : j.items()) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_array()) {
            if (value.empty()) continue;
            out.push_back(flag);
            for (const auto& v : value) out.push_back(scalar(v));
        } else {
            out.push_back(flag);
            out.push_back(scalar(value));
        }
    }
    return out;
}

std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t k = 0; k < args.size(); ++k) {
        std::string path;
        if (args[k] == "--config" && k + 1 < args.size()) {
            path = args[k + 1];
        } else if (args[k].rfind("--config=", 0) == 0) {
            path = args[k].substr(9);
        } else {
            continue;
        }
        std::vector<std::string> given;
        for (const auto& a : args)
            if (a.rfind("--", 0) == 0) given.push_back(a.substr(0, a.find('=')));
        std::vector<std::string> extra;
        const auto all = config_tokens(path);
        for (std::size_t t = 0; t < all.size(); ++t) {
            if (all[t].rfind("--", 0) == 0 && std::find(given.begin(), given.end(), all[t]) != given.end()) {
                while (t + 1 < all.size() && all[t + 1].rfind("--", 0) != 0) ++t;  // the command line wins
                continue;
            }
            extra.push_back(all[t]);
        }
        const std::size_t at = args.empty() || args[0].rfind("-", 0) == 0 ? 0 : 1;  // after the subcommand
        args.insert(args.begin() + static_cast<long>(at), extra.begin(), extra.end());
        break;
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    return args;
}

/// Resolved option values of a subcommand, for provenance headers.
json resolved_config(const CLI::App* sub) {
    json j;
    j["command"] = sub->get_name();
    j["version"] = kVersion;
    for (const CLI::Option* o : sub->get_options()) {
        const std::string name = o->get_single_name();
        if (name == "help" || name == "config" || name.empty()) continue;
        if (o->get_type_size() == 0) {
            j[name] = o->count() > 0;
        } else if (o->count() > 0) {
            const auto res = o->reduced_results();
            if (o->get_expected_max() > 1) {
                j[name] = res;
            } else {
                j[name] = res.empty() ? std::string() : res.back();
            }
        } else if (!o->get_default_str().empty()) {
            j[name] = o->get_default_str();
        }
    }
    return j;
}

std::string header_lines(const json& cfg) {
    std::string s;
    s += "# config: " + cfg.dump() + "\n";
    return s;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw ConfigurationError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

Coupling parse_coupling(const std::string& s) {
    if (s == "auto") return Coupling::Automatic;
    if (s == "interpolation") return Coupling::Interpolation;
    if (s == "interelement") return Coupling::Interelement;
    throw ConfigurationError("unknown coupling '" + s + "' (expected auto, interpolation or interelement)");
}

std::vector<int> parse_int_list(const std::vector<std::string>& items) {
    std::vector<int> out;
    for (const auto& s : items) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw ConfigurationError("not an integer: '" + s + "'");
        }
    }
    return out;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read trajectory " + path);
    std::string line;
    bool header = false;
    std::vector<std::pair<double, std::vector<std::tuple<int, int, double>>>> rows;
    int N = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "t,i,j,U") throw ConfigurationError(path + ": expected header t,i,j,U");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, c, d;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ',') || !std::getline(ls, d))
            throw ConfigurationError(path + ": malformed row '" + line + "'");
        const double t = std::stod(a);
        const int i = std::stoi(b), j = std::stoi(c);
        if (rows.empty() || rows.back().first != t) rows.push_back({t, {}});
        rows.back().second.emplace_back(i, j, std::stod(d));
        N = std::max({N, i + 1, j + 1});
    }
    Trajectory tr;
    for (const auto& [t, vals] : rows) {
        if (vals.size() != static_cast<std::size_t>(N * N)) throw ConfigurationError(path + ": incomplete snapshot");
        Field2D f(N, N);
        for (const auto& [i, j, v] : vals) f(i, j) = v;
        tr.record(t, f);
    }
    return tr;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Options shared by the two simulators

struct SimOptions {
    int N{8};
    double L{2.0 * std::numbers::pi};
    double alpha{1.0};
    double gamma{1.0};
    double dt{0.0};
    double T{1.0};
    int outputs{10};
    std::string boundary{"periodic"};
    double amplitude{0.1};
    unsigned seed{1};
    int modes{2};
    std::string restriction{"centre"};
    std::string output;
    std::string summary;

    void add(CLI::App* c) {
        c->add_option("--N", N, "Macroscale nodes per direction")->check(CLI::PositiveNumber);
        c->add_option("--L", L, "Domain length")->check(CLI::PositiveNumber);
        c->add_option("--alpha", alpha, "Reaction strength");
        c->add_option("--gamma", gamma, "Coupling strength")->check(CLI::Range(0.0, 1.0));
        c->add_option("--dt", dt, "Time step (0 picks a stable default)")->check(CLI::NonNegativeNumber);
        c->add_option("--T", T, "Final time")->check(CLI::PositiveNumber);
        c->add_option("--outputs", outputs, "Snapshots after t = 0")->check(CLI::PositiveNumber);
        c->add_option("--boundary", boundary, "periodic | odd-even");
        c->add_option("--amplitude", amplitude, "Initial amplitude");
        c->add_option("--seed", seed, "Initial-data seed");
        c->add_option("--modes", modes, "Fourier modes per direction in the initial data")->check(CLI::PositiveNumber);
        c->add_option("--restriction", restriction, "centre | patch-mean");
        c->add_option("--output,-o", output, "Trajectory CSV (default stdout)");
        c->add_option("--summary", summary, "Run-summary JSON");
    }

    SmoothProfile profile() const {
        SmoothProfile p;
        p.amplitude = amplitude;
        p.L = L;
        p.boundary = parse_boundary(boundary);
        p.seed = seed;
        p.modes = modes;
        return p;
    }

    RunOptions run(std::vector<std::string>* warnings) const {
        RunOptions o;
        o.t_end = T;
        o.dt = dt;
        o.outputs = outputs;
        o.warnings = warnings;
        return o;
    }
};

void write_run(const SimOptions& so, const json& cfg, const Trajectory& tr, const std::vector<std::string>& warnings,
               double seconds) {
    Output out(so.output);
    write_trajectory_csv(out.stream(), tr, "config: " + cfg.dump());
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (!so.summary.empty()) {
        double mx = 0.0;
        for (double v : tr.snapshots.back().values) mx = std::max(mx, std::abs(v));
        json s{{"config", cfg},
               {"snapshots", tr.snapshots.size()},
               {"final_time", tr.snapshots.back().t},
               {"final_max_abs", mx},
               {"warnings", warnings},
               {"seconds", seconds}};
        Output so_out(so.summary);
        so_out.stream() << s.dump(1) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holistic discretisation and gap-tooth patch models for 2D reaction-diffusion"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    std::string config_path;
    auto add_config = [&](CLI::App* c) { c->add_option("--config", config_path, "JSON config file (flags override)"); };

    // construct
    auto* c_construct = app.add_subcommand("construct", "Construct a macroscale model");
    int n = 2, K = 0, alf_weight = 2, o_order = 6, max_iters = 0;
    std::string r_text = "1/2", coupling = "auto", out_path, log_path;
    bool analytic = false, solvability = false;
    c_construct->add_option("--n", n, "Subgrid half-width")->check(CLI::PositiveNumber);
    c_construct->add_option("--r", r_text, "Patch ratio p/q in (0,1]");
    c_construct->add_option("--K", K, "Truncation order (0: 4 numeric, 3 analytic)");
    c_construct->add_option("--alf-weight", alf_weight, "Smallness grade of alpha (numeric)")->check(CLI::PositiveNumber);
    c_construct->add_option("--coupling", coupling, "auto | interpolation | interelement");
    c_construct->add_option("--max-iters", max_iters, "Iteration cap (0: 19 numeric, 10 analytic)");
    c_construct->add_flag("--analytic", analytic, "Overlapping-element analytic construction");
    c_construct->add_option("--o,--order", o_order, "Multinomial order of the element field (analytic)");
    c_construct->add_flag("--solvability", solvability, "Add one order from the solvability condition (analytic)");
    c_construct->add_option("--output", out_path, "Model file (default stdout)");
    c_construct->add_option("--log", log_path, "Construction log (JSON)");
    add_config(c_construct);

    // table
    auto* c_table = app.add_subcommand("table", "Coefficient table versus subgrid resolution");
    std::vector<std::string> n_list;
    std::string t_r = "1/2", t_coupling = "auto";
    int t_K = 4;
    c_table->add_option("--n", n_list, "Subgrid half-widths")->delimiter(',')->expected(0, -1);
    c_table->add_option("--r", t_r, "Patch ratio p/q");
    c_table->add_option("--K", t_K, "Truncation order");
    c_table->add_option("--coupling", t_coupling, "auto | interpolation | interelement");
    c_table->add_option("--output,-o", out_path, "CSV file (default stdout)");
    add_config(c_table);

    // pade
    auto* c_pade = app.add_subcommand("pade", "Rational extrapolation in 1/n^2");
    std::vector<std::string> p_n, p_c;
    std::string p_table, p_column = "gnon";
    c_pade->add_option("--n", p_n, "Resolutions")->delimiter(',')->expected(0, -1);
    c_pade->add_option("--c", p_c, "Coefficients p/q")->delimiter(',')->expected(0, -1);
    c_pade->add_option("--table", p_table, "CSV from the table command");
    c_pade->add_option("--column", p_column, "Column of the table to fit");
    c_pade->add_option("--output,-o", out_path, "Report (default stdout)");
    add_config(c_pade);

    // equivpde
    auto* c_epde = app.add_subcommand("equivpde", "Equivalent PDE of a model");
    std::string model_path, e_gamma = "1";
    int e_order = 0;
    c_epde->add_option("--model", model_path, "Model file")->required();
    c_epde->add_option("--gamma", e_gamma, "Coupling value p/q, or keep");
    c_epde->add_option("--order", e_order, "Taylor order in H (0: 2 + 2K)");
    c_epde->add_option("--output,-o", out_path, "Report (default stdout)");
    add_config(c_epde);

    // fdform
    auto* c_fd = app.add_subcommand("fdform", "Centred-difference form of a model");
    c_fd->add_option("--model", model_path, "Model file")->required();
    c_fd->add_option("--output,-o", out_path, "Report (default stdout)");
    add_config(c_fd);

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "Integrate a model (or the fine-grid reference)");
    SimOptions sim;
    int fine_M = 0;
    std::string init = "profile", patch_r = "1/2";
    double init_value = 0.0;
    sim.add(c_sim);
    c_sim->add_option("--model", model_path, "Model file");
    c_sim->add_option("--fine", fine_M, "Fine grid size M: run the reference solver instead of a model");
    c_sim->add_option("--init", init, "profile | constant");
    c_sim->add_option("--value", init_value, "Value for constant initial data");
    c_sim->add_option("--patch-r", patch_r, "Patch ratio for patch-mean restriction of the fine grid");
    add_config(c_sim);

    // gaptooth
    auto* c_gt = app.add_subcommand("gaptooth", "Dynamic gap-tooth microsimulation");
    SimOptions gt;
    std::string g_r = "1/2", g_init = "sample";
    int g_n = 2, g_K = 4;
    gt.add(c_gt);
    c_gt->add_option("--n", g_n, "Subgrid half-width")->check(CLI::PositiveNumber);
    c_gt->add_option("--r", g_r, "Patch ratio p/q");
    c_gt->add_option("--K", g_K, "Interpolant truncation order");
    c_gt->add_option("--init", g_init, "sample | manifold | centres");
    add_config(c_gt);

    // compare
    auto* c_cmp = app.add_subcommand("compare", "Error between trajectories");
    std::vector<std::string> cmp_a, cmp_b;
    std::vector<double> cmp_H;
    c_cmp->add_option("--a", cmp_a, "Trajectory CSV(s)")->required()->expected(1, -1);
    c_cmp->add_option("--b", cmp_b, "Trajectory CSV(s) to compare against")->required()->expected(1, -1);
    c_cmp->add_option("--H", cmp_H, "Macroscale spacings of a sweep, for order estimates")->expected(0, -1);
    c_cmp->add_option("--output,-o", out_path, "Report (default stdout)");
    add_config(c_cmp);

    try {
        auto args = expand_config(argc, argv);
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (c_construct->parsed()) {
            json cfg = resolved_config(c_construct);
            const auto t0 = std::chrono::steady_clock::now();
            json log = json::array();
            StencilModel model;
            if (analytic) {
                const int k = K == 0 ? 3 : K;
                const int cap = max_iters == 0 ? 10 : max_iters;
                cfg["K"] = std::to_string(k);
                cfg["max-iters"] = std::to_string(cap);
                ElementState s = iterate(ElementState::initial(k, o_order), cap);
                for (std::size_t p = 0; p < s.log.size(); ++p) {
                    log.push_back({{"pass", p}, {"residual_terms", s.log[p]}});
                    std::cerr << "pass " << p << " residual terms";
                    for (auto x : s.log[p]) std::cerr << " " << x;
                    std::cerr << "\n";
                }
                if (!s.converged) throw ConstructionError("analytic construction did not converge in " + std::to_string(cap) + " passes");
                if (solvability) solvability_order(s);
                model = to_model(s);
            } else {
                PatchSpec spec;
                spec.n = n;
                spec.r = parse_rational(r_text);
                spec.K = K == 0 ? 4 : K;
                spec.alf_weight = alf_weight;
                spec.max_iters = max_iters == 0 ? 19 : max_iters;
                spec.coupling = parse_coupling(coupling);
                cfg["K"] = std::to_string(spec.K);
                cfg["max-iters"] = std::to_string(spec.max_iters);
                if (solvability) throw ConfigurationError("--solvability applies to --analytic only");
                const auto res = construct(spec, [&](const IterationLog& l) {
                    log.push_back({{"iteration", l.iteration}, {"nonzero_residuals", l.nonzero_residuals},
                                   {"residual_terms", l.residual_terms}, {"seconds", l.seconds}});
                    std::cerr << "iteration " << l.iteration << ": " << l.nonzero_residuals << " nonzero residuals, "
                              << l.residual_terms << " terms, " << l.seconds << " s\n";
                });
                model = res.model;
            }
            std::cerr << "converged in " << seconds_since(t0) << " s, " << model.terms.size() << " terms\n";
            auto j = to_json(model);
            j["config"] = cfg;
            Output out(out_path);
            out.stream() << j.dump(1) << "\n";
            if (!log_path.empty()) {
                Output lo(log_path);
                lo.stream() << json{{"config", cfg}, {"log", log}}.dump(1) << "\n";
            }
            return 0;
        }

        if (c_table->parsed()) {
            const auto ns = parse_int_list(n_list);
            if (ns.empty()) {
                std::cerr << "usage error: table needs a non-empty --n list\n";
                return 2;
            }
            const json cfg = resolved_config(c_table);
            std::vector<StencilModel> models;
            for (int nn : ns) {
                PatchSpec spec;
                spec.n = nn;
                spec.r = parse_rational(t_r);
                spec.K = t_K;
                spec.coupling = parse_coupling(t_coupling);
                models.push_back(construct(spec).model);
                std::cerr << "n = " << nn << " constructed\n";
            }
            Output out(out_path);
            out.stream() << header_lines(cfg) << coefficient_csv(coefficient_tables(models));
            return 0;
        }

        if (c_pade->parsed()) {
            const json cfg = resolved_config(c_pade);
            std::vector<int> ns;
            std::vector<Rational> cs;
            if (!p_table.empty()) {
                if (!p_n.empty() || !p_c.empty()) throw ConfigurationError("give either --table or --n/--c");
                std::ifstream in(p_table);
                if (!in) throw ConfigurationError("cannot read " + p_table);
                std::string line;
                std::vector<std::string> cols;
                while (std::getline(in, line)) {
                    if (line.empty() || line[0] == '#') continue;
                    std::vector<std::string> cells;
                    std::istringstream ls(line);
                    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
                    if (cols.empty()) {
                        cols = cells;
                        continue;
                    }
                    const auto ci = std::find(cols.begin(), cols.end(), p_column) - cols.begin();
                    if (static_cast<std::size_t>(ci) >= cols.size()) throw ConfigurationError("no column " + p_column);
                    ns.push_back(parse_int_list({cells.at(0)}).front());
                    cs.push_back(parse_rational(cells.at(static_cast<std::size_t>(ci))));
                }
            } else {
                ns = parse_int_list(p_n);
                for (const auto& s : p_c) cs.push_back(parse_rational(s));
            }
            const auto fit = pade_fit(ns, cs);
            json nodes = json::array();
            for (std::size_t l = 0; l < ns.size(); ++l) {
                const Rational v = fit.at_n(ns[l]);
                nodes.push_back({{"n", ns[l]}, {"c", to_string(cs[l])}, {"fit", to_string(v)}, {"exact", v == 4 * cs[l]}});
            }
            json a = json::array(), b = json::array();
            for (const auto& x : fit.a) a.push_back(to_string(x));
            for (const auto& x : fit.b) b.push_back(to_string(x));
            const json rep{{"config", cfg},       {"order", fit.order},
                           {"a", a},              {"b", b},
                           {"limit", to_string(fit.limit)}, {"limit_decimal", fit.limit.get_d()},
                           {"nodes", nodes}};
            Output out(out_path);
            out.stream() << rep.dump(1) << "\n";
            return 0;
        }

        if (c_epde->parsed()) {
            json cfg = resolved_config(c_epde);
            const StencilModel m = load_model(model_path);
            std::optional<Rational> g;
            if (e_gamma != "keep") g = parse_rational(e_gamma);
            const int order = e_order == 0 ? default_pde_order(m) : e_order;
            cfg["order"] = std::to_string(order);
            const auto e = equivalent_pde(m, g, order);
            const json rep{{"config", cfg},
                           {"order", order},
                           {"u_xx", e.linear_coefficient(2, 0).to_string()},
                           {"u_yy", e.linear_coefficient(0, 2).to_string()},
                           {"reaction", e.reaction_part().to_string()},
                           {"remainder", e.remainder().to_string()},
                           {"expression", e.expr.to_string()}};
            Output out(out_path);
            out.stream() << rep.dump(1) << "\n";
            return 0;
        }

        if (c_fd->parsed()) {
            const json cfg = resolved_config(c_fd);
            const StencilModel m = load_model(model_path);
            const DiffExpr d = to_difference_form(m);
            json blocks = json::array();
            const int max_alf = (m.K + m.alf_weight - 1) / std::max(1, m.alf_weight);
            for (int a = 0; a <= max_alf; ++a)
                for (int g = 0; g <= m.K; ++g) {
                    const Poly b = block(d, g, a);
                    if (!b.is_zero()) blocks.push_back({{"gam", g}, {"alf", a}, {"expr", b.to_string()}});
                }
            const auto row = coefficient_row(m);
            const json rep{{"config", cfg},
                           {"blocks", blocks},
                           {"g2nd", to_string(row.g2nd)},
                           {"g3rd", to_string(row.g3rd)},
                           {"gnon", to_string(row.gnon)}};
            Output out(out_path);
            out.stream() << rep.dump(1) << "\n";
            return 0;
        }

        if (c_sim->parsed()) {
            const json cfg = resolved_config(c_sim);
            const auto t0 = std::chrono::steady_clock::now();
            const Boundary bc = parse_boundary(sim.boundary);
            const double H = sim.L / sim.N;
            const SmoothProfile prof = sim.profile();
            auto initial = [&](double x, double y) { return init == "constant" ? init_value : prof(x, y); };
            if (init != "profile" && init != "constant") throw ConfigurationError("unknown --init " + init);
            std::vector<std::string> warnings;
            Trajectory tr;
            if (fine_M > 0) {
                if (fine_M % sim.N != 0) throw ConfigurationError("--fine must be a multiple of --N");
                FineGrid f(fine_M, sim.L / fine_M, bc);
                const Field2D u0 = sample(initial, fine_M, f.h, bc);
                for (int i = 0; i < fine_M; ++i)
                    for (int j = 0; j < fine_M; ++j) f.u(i, j) = u0(i, j);
                tr = simulate_fine(f, sim.alpha, sim.N, parse_restriction(sim.restriction), parse_rational(patch_r).get_d(),
                                   sim.run(&warnings));
            } else {
                if (model_path.empty()) throw ConfigurationError("simulate needs --model or --fine");
                const StencilModel m = load_model(model_path);
                const CompiledModel cm(m, sim.gamma, sim.alpha, H);
                MacroGrid g(sim.N, H, bc, cm.width());
                const Field2D u0 = sample(initial, sim.N, H, bc);
                for (int i = 0; i < sim.N; ++i)
                    for (int j = 0; j < sim.N; ++j) g.u(i, j) = u0(i, j);
                tr = simulate_macro(g, cm, sim.run(&warnings));
            }
            write_run(sim, cfg, tr, warnings, seconds_since(t0));
            return 0;
        }

        if (c_gt->parsed()) {
            const json cfg = resolved_config(c_gt);
            const auto t0 = std::chrono::steady_clock::now();
            PatchSpec spec;
            spec.n = g_n;
            spec.r = parse_rational(g_r);
            spec.K = g_K;
            const Boundary bc = parse_boundary(gt.boundary);
            const double H = gt.L / gt.N;
            const GapToothScheme scheme(spec, gt.N, H, bc, gt.gamma, gt.alpha);
            const SmoothProfile prof = gt.profile();
            GapToothState s;
            if (g_init == "sample") {
                s = scheme.from_function(prof);
            } else if (g_init == "centres") {
                s = scheme.from_centres(sample(prof, gt.N, H, bc));
            } else if (g_init == "manifold") {
                s = scheme.from_manifold(construct(spec).field, sample(prof, gt.N, H, bc));
            } else {
                throw ConfigurationError("unknown --init " + g_init);
            }
            std::vector<std::string> warnings;
            const Trajectory tr = simulate_gaptooth(scheme, s, parse_restriction(gt.restriction), gt.run(&warnings));
            write_run(gt, cfg, tr, warnings, seconds_since(t0));
            return 0;
        }

        if (c_cmp->parsed()) {
            const json cfg = resolved_config(c_cmp);
            if (cmp_a.size() != cmp_b.size()) throw ConfigurationError("--a and --b need the same number of files");
            json pairs = json::array();
            std::vector<double> maxima;
            for (std::size_t k = 0; k < cmp_a.size(); ++k) {
                const auto rep = compare(read_trajectory_csv(cmp_a[k]), read_trajectory_csv(cmp_b[k]));
                maxima.push_back(rep.max_linf());
                pairs.push_back({{"a", cmp_a[k]}, {"b", cmp_b[k]}, {"times", rep.times}, {"linf", rep.linf},
                                 {"l2", rep.l2}, {"max_linf", rep.max_linf()}});
            }
            json rep{{"config", cfg}, {"pairs", pairs}};
            if (!cmp_H.empty()) rep["orders"] = convergence_orders(cmp_H, maxima);
            Output out(out_path);
            out.stream() << rep.dump(1) << "\n";
            return 0;
        }
    } catch (const ConstructionError& e) {
        std::cerr << "construction failed: " << e.what() << "\n";
        return 3;
    } catch (const DivergenceError& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return 4;
    } catch (const SingularMatrixError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
