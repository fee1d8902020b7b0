#pragma once

// Command-line front end: verify, geometry, symmetry and export runs driven
// by a JSON family specification.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "guichard/errors.hpp"
#include "guichard/geometry.hpp"
#include "guichard/io.hpp"
#include "guichard/lame_core.hpp"
#include "guichard/symmetry.hpp"

namespace guichard::cli {

enum ExitCode : int {
    exit_pass = 0,
    exit_usage = 1,
    exit_failure = 2,
    exit_singularity = 3,
};

struct RunConfig {
    std::string command;
    std::optional<std::string> spec;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> ansatz;
    std::array<std::size_t, 3> grid{9, 9, 9};
    std::map<std::string, double> tolerances{
        {"first_order", 1e-8}, {"second_order", 1e-6}, {"curvature_sum", 1e-10}, {"phi", 1e-7}, {"action", 1e-8}};
    std::uint64_t seed = 1;
};

inline std::array<std::size_t, 3> parse_grid(const std::string& s) {
    std::array<std::size_t, 3> g{};
    std::istringstream in(s);
    for (std::size_t a = 0; a < 3; ++a) {
        long v = 0;
        if (!(in >> v)) {
            throw ValidationError("--grid must look like N1xN2xN3");
        }
        if (v < 3) {
            throw ValidationError("--grid sample counts must be at least 3");
        }
        g[a] = static_cast<std::size_t>(v);
        if (a < 2 && in.get() != 'x') {
            throw ValidationError("--grid must look like N1xN2xN3");
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ValidationError("--grid must look like N1xN2xN3");
    }
    return g;
}

inline void apply_tolerance(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("--tol expects name=value");
    }
    const std::string name = assignment.substr(0, eq);
    if (!cfg.tolerances.contains(name)) {
        std::string known;
        for (const auto& [k, v] : cfg.tolerances) {
            known += (known.empty() ? "" : ", ") + k;
        }
        throw ValidationError("unknown tolerance '" + name + "' (known: " + known + ")");
    }
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(assignment.substr(eq + 1), &used);
        if (used != assignment.size() - eq - 1) {
            throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw ValidationError("tolerance '" + name + "' is not a number");
    }
    if (!(value > 0.0)) {
        throw ValidationError("tolerance '" + name + "' must be positive");
    }
    cfg.tolerances[name] = value;
}

namespace detail {

/// Data output goes to --out when given, otherwise to the console stream.
class Sink {
public:
    Sink(const std::optional<std::string>& path, std::ostream& console) : console_(console) {
        if (path) {
            file_.open(*path, std::ios::binary);
            if (!file_) {
                throw ValidationError("cannot write '" + *path + "'");
            }
        }
    }

    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : console_; }

private:
    std::ofstream file_;
    std::ostream& console_;
};

inline std::string format_or(const RunConfig& cfg, const std::string& fallback,
                             std::initializer_list<const char*> allowed) {
    const std::string f = cfg.format.value_or(fallback);
    for (const char* a : allowed) {
        if (f == a) {
            return f;
        }
    }
    throw ValidationError("format '" + f + "' is not available for '" + cfg.command + "'");
}

inline io::LoadedFamily require_family(const RunConfig& cfg) {
    if (!cfg.spec) {
        throw ValidationError("'" + cfg.command + "' needs --spec <family.json>");
    }
    return io::load_family_file(*cfg.spec);
}

inline io::Json header(const RunConfig& cfg, const std::string& family) {
    io::Json h;
    h["command"] = cfg.command;
    h["seed"] = cfg.seed;
    h["family"] = family;
    h["grid"] = io::Json::array({cfg.grid[0], cfg.grid[1], cfg.grid[2]});
    io::Json tol = io::Json::object();
    for (const auto& [k, v] : cfg.tolerances) {
        tol[k] = v;
    }
    h["tolerances"] = tol;
    return h;
}

} // namespace detail

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const auto fam = detail::require_family(cfg);
    const std::string format = detail::format_or(cfg, "json", {"json", "csv"});
    const GuichardNet& net = *fam.net;
    const auto grid = sample_grid(net.domain(), cfg.grid);
    const ResidualReport first = first_order_residuals(net, grid, cfg.tolerances.at("first_order"));
    const ResidualReport second = second_order_residuals(net, grid, cfg.tolerances.at("second_order"));
    const bool pass = first.pass && second.pass;

    detail::Sink sink(cfg.out, out);
    std::ostream& os = sink.stream();
    if (format == "json") {
        io::Json j = detail::header(cfg, fam.type);
        j["first_order"] = io::to_json(first);
        j["second_order"] = io::to_json(second);
        j["pass"] = pass;
        os << io::dump(j);
    } else {
        os << "system,family,max_abs,mean_abs,pass\n";
        for (const auto* rep : {&first, &second}) {
            for (const auto& e : rep->entries) {
                os << (rep == &first ? "first_order" : "second_order") << ',' << e.family << ','
                   << io::format_double(e.max_abs) << ',' << io::format_double(e.mean_abs) << ','
                   << (e.pass ? "true" : "false") << '\n';
            }
        }
    }
    if (cfg.out) {
        out << "verify: " << (pass ? "pass" : "FAIL") << " (first-order max " << io::format_double(first.max_abs())
            << ", second-order max " << io::format_double(second.max_abs()) << ")\n";
    }
    return pass ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

struct GeometryRow {
    Point x{};
    Vec3 l{};
    Vec3 K{};
    double sum = 0.0;
    double xi = std::nan("");
    double grad_norm = std::nan("");
    double H = std::nan("");
};

inline int cmd_geometry(const RunConfig& cfg, std::ostream& out) {
    const auto fam = detail::require_family(cfg);
    const std::string format = detail::format_or(cfg, "csv", {"csv", "json", "gnuplot"});
    const GuichardNet& net = *fam.net;
    const bool translation = net.info().alpha.has_value();
    const double sum_tol = cfg.tolerances.at("curvature_sum");

    std::vector<GeometryRow> rows;
    double worst_sum = 0.0;
    for (const Point& p : sample_grid(net.domain(), cfg.grid)) {
        GeometryRow r;
        r.x = p;
        r.l = net.evaluate(p).l;
        r.K = coordinate_surface_curvatures(net, p);
        r.sum = r.K[0] + r.K[1] + r.K[2];
        worst_sum = std::max(worst_sum, std::abs(r.sum));
        if (net.info().invariant) {
            r.xi = net.info().invariant(p);
        }
        if (translation) {
            r.grad_norm = level_surface_grad_norm(net, p);
            r.H = level_surface_mean_curvature_at(net, p);
        }
        rows.push_back(r);
    }
    bool pass = worst_sum < sum_tol;

    // level sets: 5 levels, 50 seeded points each
    io::Json levels = io::Json::array();
    if (translation) {
        const Vec3& a = *net.info().alpha;
        const Interval img = invariant_image(a, net.domain());
        for (int m = 0; m < 5; ++m) {
            const double xi = img.mid() + (m - 2) * 0.25 * img.length() * 0.5;
            io::Json lv;
            lv["xi"] = xi;
            try {
                const auto pts = level_set_points(net, xi, 50, cfg.seed + static_cast<std::uint64_t>(m));
                std::vector<double> g;
                std::vector<double> h;
                for (const Point& p : pts) {
                    g.push_back(level_surface_grad_norm(net, p));
                    h.push_back(level_surface_mean_curvature_at(net, p));
                }
                lv["grad_norm_mean"] = sample_mean(g);
                lv["grad_norm_variance"] = sample_variance(g);
                lv["H_mean"] = sample_mean(h);
                lv["H_variance"] = sample_variance(h);
            } catch (const DomainError& e) {
                lv["skipped"] = e.what();
            }
            levels.push_back(lv);
        }
    }

    io::Json cyc;
    std::string verdict = "unavailable";
    try {
        const CyclicityReport rep = cyclicity_check(net, sample_grid(net.domain(), cfg.grid));
        verdict = verdict_name(rep.verdict);
        cyc["form"] = phi_form_name(rep.form);
        cyc["verdict"] = verdict;
        io::Json pairs = io::Json::array();
        for (const auto& mp : rep.pairs) {
            pairs.push_back(io::Json{{"pair", io::Json::array({mp.i + 1, mp.j + 1})},
                                     {"max_abs", mp.max_abs},
                                     {"min_abs", mp.min_abs},
                                     {"vanishes", mp.vanishes},
                                     {"relevant", mp.relevant}});
        }
        cyc["pairs"] = pairs;
    } catch (const DomainError& e) {
        cyc["verdict"] = verdict;
        cyc["error"] = e.what();
    }

    io::Json phi_json;
    if (net.info().translation_c) {
        const Interval img = invariant_image(*net.info().alpha, net.domain());
        std::vector<double> xs;
        for (int n = 0; n <= 20; ++n) {
            xs.push_back(img.mid() + (n / 20.0 - 0.5) * 0.5 * img.length());
        }
        try {
            const ResidualReport r = phi_ode_residuals(net, xs, cfg.tolerances.at("phi"));
            phi_json = io::to_json(r);
            pass = pass && r.pass;
        } catch (const DomainError& e) {
            phi_json["error"] = e.what();
        }
    }

    detail::Sink sink(cfg.out, out);
    std::ostream& os = sink.stream();
    if (format == "csv") {
        os << "x1,x2,x3,K1,K2,K3,sum,grad_norm,H\n";
        for (const auto& r : rows) {
            os << io::format_double(r.x[0]) << ',' << io::format_double(r.x[1]) << ',' << io::format_double(r.x[2])
               << ',' << io::format_double(r.K[0]) << ',' << io::format_double(r.K[1]) << ','
               << io::format_double(r.K[2]) << ',' << io::format_double(r.sum) << ','
               << io::format_double(r.grad_norm) << ',' << io::format_double(r.H) << '\n';
        }
    } else if (format == "gnuplot") {
        std::vector<GeometryRow> sorted = rows;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const GeometryRow& a, const GeometryRow& b) { return a.xi < b.xi; });
        os << "# guichard geometry family=" << fam.type << " seed=" << cfg.seed << "\n";
        os << "# xi l1 l2 l3 K1 K2 K3\n";
        for (const auto& r : sorted) {
            os << io::format_double(r.xi) << ' ' << io::format_double(r.l[0]) << ' ' << io::format_double(r.l[1])
               << ' ' << io::format_double(r.l[2]) << ' ' << io::format_double(r.K[0]) << ' '
               << io::format_double(r.K[1]) << ' ' << io::format_double(r.K[2]) << '\n';
        }
    } else {
        io::Json j = detail::header(cfg, fam.type);
        io::Json pts = io::Json::array();
        for (const auto& r : rows) {
            pts.push_back(io::Json{{"x", io::to_json(r.x)},
                                   {"K", io::to_json(r.K)},
                                   {"sum", r.sum},
                                   {"grad_norm", r.grad_norm},
                                   {"H", r.H}});
        }
        j["max_abs_curvature_sum"] = worst_sum;
        j["points"] = pts;
        j["level_sets"] = levels;
        j["cyclicity"] = cyc;
        if (!phi_json.is_null()) {
            j["phi_ode"] = phi_json;
        }
        j["pass"] = pass;
        os << io::dump(j);
    }
    out << "curvature sum max |K1+K2+K3| = " << io::format_double(worst_sum) << "\n";
    out << "cyclicity: " << verdict << "\n";
    return pass ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------
// symmetry
// ---------------------------------------------------------------------------

inline int cmd_symmetry(const RunConfig& cfg, std::ostream& out) {
    detail::format_or(cfg, "json", {"json"});
    const sym::VectorField field = cfg.ansatz ? sym::load_ansatz(*cfg.ansatz) : sym::theorem_field();
    const sym::GeneratorReport rep = sym::verify_generator(field);
    bool pass = rep.pass;

    io::Json j = detail::header(cfg, cfg.spec ? std::string("from spec") : std::string("none"));
    j["ansatz"] = cfg.ansatz ? *cfg.ansatz : std::string("builtin");
    // plain summary lines go to the console only when the report goes to a file
    std::ostringstream summary;
    io::Json families = io::Json::array();
    for (FirstOrderFamily f : sym::all_families) {
        const bool zero = rep.family_zero(f);
        families.push_back(io::Json{{"family", family_name(f)}, {"zero", zero}});
        summary << family_name(f) << ": " << (zero ? "zero" : "nonzero") << "\n";
    }
    j["families"] = families;
    io::Json checks = io::Json::array();
    for (const auto& c : rep.checks) {
        checks.push_back(io::Json{{"family", family_name(c.family)},
                                  {"indices", io::Json::array({c.indices[0] + 1, c.indices[1] + 1, c.indices[2] + 1})},
                                  {"reduced", sym::to_string(c.reduced)},
                                  {"zero", c.zero}});
    }
    j["checks"] = checks;

    if (cfg.spec) {
        const auto fam = io::load_family_file(*cfg.spec);
        j["family"] = fam.type;
        const double tol = cfg.tolerances.at("action");
        struct Named {
            const char* name;
            sym::GroupAction action;
            io::Json parameters;
        };
        const std::vector<Named> actions{
            {"translate", sym::Translate{{1.0, -2.0, 0.5}}, io::Json::array({1.0, -2.0, 0.5})},
            {"dilate_x", sym::DilateX{3.0}, io::Json::array({3.0})},
            {"dilate_l", sym::DilateL{2.0}, io::Json::array({2.0})},
        };
        io::Json acts = io::Json::array();
        for (const auto& a : actions) {
            const ResidualReport r = sym::group_action_test(*fam.net, a.action, tol, cfg.grid);
            pass = pass && r.pass;
            summary << "action " << a.name << ": " << (r.pass ? "pass" : "FAIL") << "\n";
            acts.push_back(io::Json{{"action", a.name}, {"parameters", a.parameters}, {"report", io::to_json(r)}});
        }
        j["group_actions"] = acts;
    }
    j["pass"] = pass;
    detail::Sink sink(cfg.out, out);
    sink.stream() << io::dump(j);
    if (cfg.out) {
        out << summary.str();
    }
    return pass ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------
// export
// ---------------------------------------------------------------------------

inline int cmd_export(const RunConfig& cfg, std::ostream& out) {
    const auto fam = detail::require_family(cfg);
    const std::string format = detail::format_or(cfg, "csv", {"csv", "json", "gnuplot"});
    const GuichardNet& net = *fam.net;
    const auto grid = sample_grid(net.domain(), cfg.grid, 0.0);
    detail::Sink sink(cfg.out, out);
    std::ostream& os = sink.stream();
    if (format == "csv") {
        io::write_grid_csv(os, net, grid);
    } else if (format == "gnuplot") {
        os << "# guichard export family=" << fam.type << " seed=" << cfg.seed << "\n";
        os << "# x1 x2 x3 l1 l2 l3\n";
        for (const Point& p : grid) {
            const Vec3 l = net.evaluate(p).l;
            os << io::format_double(p[0]) << ' ' << io::format_double(p[1]) << ' ' << io::format_double(p[2]) << ' '
               << io::format_double(l[0]) << ' ' << io::format_double(l[1]) << ' ' << io::format_double(l[2])
               << '\n';
        }
    } else {
        io::Json j = detail::header(cfg, fam.type);
        io::Json pts = io::Json::array();
        for (const Point& p : grid) {
            pts.push_back(io::Json{{"x", io::to_json(p)}, {"l", io::to_json(net.evaluate(p).l)}});
        }
        j["points"] = pts;
        os << io::dump(j);
    }
    return exit_pass;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == "verify") {
            return cmd_verify(cfg, out);
        }
        if (cfg.command == "geometry") {
            return cmd_geometry(cfg, out);
        }
        if (cfg.command == "symmetry") {
            return cmd_symmetry(cfg, out);
        }
        if (cfg.command == "export") {
            return cmd_export(cfg, out);
        }
        err << "error: unknown command '" << cfg.command << "'\n";
        return exit_usage;
    } catch (const SingularityError& e) {
        err << "singularity: " << e.what() << "\n";
        return exit_singularity;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Guichard nets: invariant solutions, residual checks, geometry and symmetries"};
    RunConfig cfg;
    std::string grid;
    std::vector<std::string> tols;
    app.add_option("command", cfg.command, "verify | geometry | symmetry | export")
        ->required()
        ->check(CLI::IsMember({"verify", "geometry", "symmetry", "export"}));
    app.add_option("--spec", cfg.spec, "family specification (JSON)");
    app.add_option("--out", cfg.out, "output file (default: standard output)");
    app.add_option("--format", cfg.format, "csv | json | gnuplot")
        ->check(CLI::IsMember({"csv", "json", "gnuplot"}));
    app.add_option("--tol", tols, "tolerance override name=value (repeatable)");
    app.add_option("--grid", grid, "sample counts N1xN2xN3 (each >= 3)");
    app.add_option("--seed", cfg.seed, "seed for sampled level sets");
    app.add_option("--ansatz", cfg.ansatz, "vector-field ansatz file for 'symmetry'");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }
    try {
        if (!grid.empty()) {
            cfg.grid = parse_grid(grid);
        }
        for (const auto& t : tols) {
            apply_tolerance(cfg, t);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return dispatch(cfg, out, err);
}

} // namespace guichard::cli
