#ifndef CURVHOM_CLI_HPP
#define CURVHOM_CLI_HPP

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenario.hpp"

namespace curvhom {

// exit codes: 0 success / all checks pass, 1 verification failure, 2 usage
namespace cli_detail {

constexpr std::uint64_t kDefaultSeed = 12345;

inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("CURVHOM_SEED")) {
        try {
            size_t used = 0;
            unsigned long long v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (...) {
        }
    }
    return kDefaultSeed;
}

// uniform draw via explicit modulo so the stream is identical on every platform
inline long long draw_mod(std::mt19937_64& rng, long long n) {
    return (long long)(rng() % (std::uint64_t)n);
}

inline std::vector<Rational> random_xi(std::uint64_t seed, int h) {
    std::mt19937_64 rng(seed);
    std::vector<Rational> xi;
    for (int i = 0; i < h; ++i) {
        long long num = draw_mod(rng, 13) - 6;       // -6..6
        long long den = draw_mod(rng, 3) + 1;        // 1..3
        xi.push_back(make_rational(num, den));
    }
    return xi;
}

inline std::string xi_text(const std::vector<Rational>& xi) {
    std::string out;
    for (size_t i = 0; i < xi.size(); ++i) {
        if (i) out += ",";
        out += rational_to_string(xi[i]);
    }
    return out;
}

inline void print_json_value(std::ostream& out, const ordered_json& v) {
    if (v.is_string()) out << v.get<std::string>();
    else out << v.dump();
}

inline void print_matrix(std::ostream& out, const ordered_json& rows, const std::string& indent) {
    for (auto& row : rows) {
        out << indent << "[";
        bool first = true;
        for (auto& cell : row) {
            if (!first) out << ", ";
            first = false;
            print_json_value(out, cell);
        }
        out << "]\n";
    }
}

inline void print_dim_table(std::ostream& out, const ordered_json& values) {
    out << "  k      computed  formula  pass\n";
    for (auto& row : values["rows"]) {
        std::ostringstream kcell;
        print_json_value(kcell, row["k"]);
        out << "  " << std::left << std::setw(7) << kcell.str() << std::right << std::setw(8)
            << row["computed"].get<int>() << std::setw(9) << row["formula"].get<int>() << "  "
            << (row["pass"].get<bool>() ? "yes" : "NO") << "\n";
    }
}

inline void print_model(std::ostream& out, const ordered_json& mj) {
    out << "  p = " << mj["p"].get<int>() << ", k = " << mj["k"].get<int>() << "\n";
    out << "  inner product:\n";
    print_matrix(out, mj["inner"], "    ");
    for (auto& t : mj["tensors"]) {
        out << "  rank-" << t["rank"].get<int>() << " tensor, " << t["entries"].size()
            << " entries:\n";
        for (auto& e : t["entries"]) {
            out << "    [";
            bool first = true;
            for (auto& i : e["index"]) {
                if (!first) out << ",";
                first = false;
                out << i.get<int>();
            }
            out << "] = ";
            print_json_value(out, e["value"]);
            out << "\n";
        }
    }
}

inline void print_result_table(std::ostream& out, const TaskResult& r) {
    out << "task: " << r.task << "\n";
    out << "status: " << r.status << "\n";
    if (!r.message.empty()) out << "note: " << r.message << "\n";
    for (auto& [key, value] : r.values.items()) {
        if (key == "rows") {
            print_dim_table(out, r.values);
            continue;
        }
        if (key == "model") {
            out << "model:\n";
            print_model(out, value);
            continue;
        }
        if (key == "form" || key == "map") {
            out << key << ":\n";
            print_matrix(out, value, "  ");
            continue;
        }
        out << key << ": ";
        print_json_value(out, value);
        out << "\n";
    }
    for (auto& [key, value] : r.residuals.items()) {
        out << "residual " << key << ": ";
        print_json_value(out, value);
        out << "\n";
    }
}

struct CommonFlags {
    int p = 1;
    int k = 0;
    bool k_given = false;
    std::string F_text;
    std::string psi_text;
    std::vector<std::string> at;
    std::string format = "table";
    double tolerance = 1e-9;
    std::uint64_t seed = kDefaultSeed;
};

inline void add_common(CLI::App* cmd, CommonFlags& f, bool with_point) {
    cmd->add_option("--p", f.p, "number of z coordinate pairs (p >= 1)")->required();
    cmd->add_option("--format", f.format, "output format: table or json")
        ->check(CLI::IsMember({"table", "json"}));
    cmd->add_option("--tolerance", f.tolerance, "numeric comparison tolerance");
    cmd->add_option("--seed", f.seed, "seed for randomized inputs");
    if (with_point)
        cmd->add_option("--at", f.at, "point coordinate binding coord=value (repeatable)");
}

// builds the family part of the config; throws ParseError / invalid_argument
inline ScenarioConfig make_config(const CommonFlags& f) {
    if (f.p < 1 || f.p > 9) throw std::invalid_argument("--p must lie in [1, 9]");
    ScenarioConfig cfg;
    cfg.p = f.p;
    if (!f.psi_text.empty()) {
        cfg.family = "Npsi";
        cfg.psi = parse_expression(f.psi_text, f.p);
        if (!cfg.psi.depends_only_on_y())
            throw std::invalid_argument("--psi must depend on y only");
    } else {
        cfg.family = "Mk";
        if (f.k < 0 || f.k > f.p + 2)
            throw std::invalid_argument("--k must lie in [0, " + std::to_string(f.p + 2) + "]");
        cfg.k = f.k;
    }
    if (!f.F_text.empty()) {
        Expr F = parse_expression(f.F_text, f.p);
        if (!F.depends_only_on_y_z(Coordinates(f.p)))
            throw std::invalid_argument("--F must depend on y and z only");
        cfg.custom_F = F;
    }
    Coordinates co(f.p);
    for (auto& binding : f.at) {
        size_t eq = binding.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--at expects coord=value, got '" + binding + "'");
        std::string cname = binding.substr(0, eq);
        auto idx = co.parse_name(cname);
        if (!idx) throw std::invalid_argument("unknown coordinate '" + cname + "'");
        Expr e = parse_expression(binding.substr(eq + 1), f.p);
        if (!e.is_constant())
            throw std::invalid_argument("--at value must be a rational constant");
        cfg.point.v[*idx] = e.constant_value();
    }
    return cfg;
}

inline int finish(std::ostream& out, const ScenarioConfig& cfg, const std::vector<TaskResult>& rs,
                  const std::string& format) {
    if (format == "json") {
        out << emit_report(cfg, rs);
    } else {
        bool first = true;
        for (auto& r : rs) {
            if (!first) out << "\n";
            first = false;
            print_result_table(out, r);
        }
    }
    for (auto& r : rs)
        if (r.status != "ok") return 1;
    return 0;
}

} // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using cli_detail::CommonFlags;
    CLI::App app{"exact workbench for a family of neutral-signature metrics on R^(6+4p)"};
    app.require_subcommand(1);

    CommonFlags curvature_f, model_f, stabdim_f, thm_f, alpha_f, classify_f, orbit_f, okp_f;
    int order = 2;
    bool check_closed = false;
    int nu = 2;
    int nu_max = 6;
    bool affine = false;
    bool closure = false;
    std::string xi_text;
    std::string scenario_path;
    std::string run_format = "json";

    CLI::App* c_curv = app.add_subcommand("curvature", "covariant derivatives of the curvature");
    cli_detail::add_common(c_curv, curvature_f, true);
    c_curv->add_option("--k", curvature_f.k, "builtin family order");
    c_curv->add_option("--F", curvature_f.F_text, "potential F(y,z) expression");
    c_curv->add_option("--psi", curvature_f.psi_text, "profile psi(y) expression");
    c_curv->add_option("--order", order, "highest covariant derivative order");
    c_curv->add_flag("--check-closed-form", check_closed,
                     "verify the symbolic entries against the closed form");

    CLI::App* c_model = app.add_subcommand("model", "extract the curvature model at a point");
    cli_detail::add_common(c_model, model_f, true);
    c_model->add_option("--k", model_f.k, "model order")->required();
    c_model->add_option("--F", model_f.F_text, "potential F(y,z) expression");
    c_model->add_option("--psi", model_f.psi_text, "profile psi(y) expression");

    CLI::App* c_stab = app.add_subcommand("stabdim", "stabilizer algebra dimension");
    cli_detail::add_common(c_stab, stabdim_f, false);
    c_stab->add_option("--k", stabdim_f.k, "model order")->required();
    c_stab->add_flag("--affine", affine, "use the metric-suppressed affine model");

    CLI::App* c_thm = app.add_subcommand("verify-thm15", "isometry dimension table");
    cli_detail::add_common(c_thm, thm_f, false);
    c_thm->add_flag("--check-closure", closure, "also verify Lie bracket closure");

    CLI::App* c_alpha = app.add_subcommand("alpha", "curvature reading of the alpha invariant");
    cli_detail::add_common(c_alpha, alpha_f, true);
    c_alpha->add_option("--psi", alpha_f.psi_text, "profile psi(y) expression")->required();
    c_alpha->add_option("--nu", nu, "invariant index")->required();

    CLI::App* c_classify = app.add_subcommand("classify-psi", "screen a profile function");
    cli_detail::add_common(c_classify, classify_f, false);
    c_classify->add_option("--psi", classify_f.psi_text, "profile psi(y) expression")->required();
    c_classify->add_option("--nu-max", nu_max, "largest nu tried for a witness");

    CLI::App* c_orbit = app.add_subcommand("orbit-map", "isometry candidate moving X or Y to xi");
    cli_detail::add_common(c_orbit, orbit_f, false);
    c_orbit->add_option("--k", orbit_f.k, "model order")->required();
    c_orbit->add_option("--xi", xi_text,
                        "target vector, comma-separated rationals in basis order "
                        "X,Y,Z_1..Z_p,Yt,Zt_1..Zt_p (default: seeded random)");

    CLI::App* c_okp = app.add_subcommand("okp", "split-orthogonal stabilizer on the dual span");
    cli_detail::add_common(c_okp, okp_f, false);
    c_okp->add_option("--k", okp_f.k, "number of fixed covectors")->required();

    CLI::App* c_run = app.add_subcommand("run", "run a scenario file");
    c_run->add_option("file", scenario_path, "scenario file path")->required();
    c_run->add_option("--format", run_format, "output format: table or json")
        ->check(CLI::IsMember({"table", "json"}));

    for (CommonFlags* f :
         {&curvature_f, &model_f, &stabdim_f, &thm_f, &alpha_f, &classify_f, &orbit_f, &okp_f})
        f->seed = cli_detail::default_seed();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << app.help();
        return 2;
    }

    try {
        if (c_run->parsed()) {
            std::ifstream in(scenario_path);
            if (!in) {
                err << "error: cannot open '" << scenario_path << "'\n";
                return 2;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            ScenarioConfig cfg = parse_scenario(buf.str());
            std::vector<TaskResult> rs = run_scenario(cfg);
            return cli_detail::finish(out, cfg, rs, run_format);
        }

        CLI::App* sub = app.get_subcommands().at(0);
        std::string name = sub->get_name();
        CommonFlags* f = nullptr;
        TaskSpec spec;
        if (name == "curvature") {
            f = &curvature_f;
            spec.name = "curvature";
            spec.options.emplace_back("order", std::to_string(order));
            if (check_closed) spec.options.emplace_back("check_closed_form", "true");
        } else if (name == "model") {
            f = &model_f;
            spec.name = "model";
            spec.options.emplace_back("k", std::to_string(model_f.k));
        } else if (name == "stabdim") {
            f = &stabdim_f;
            spec.name = "stabdim";
            spec.options.emplace_back("k", std::to_string(stabdim_f.k));
            if (affine) spec.options.emplace_back("affine", "true");
        } else if (name == "verify-thm15") {
            f = &thm_f;
            spec.name = "verify-thm15";
        } else if (name == "alpha") {
            f = &alpha_f;
            spec.name = "alpha";
            spec.options.emplace_back("nu", std::to_string(nu));
            spec.options.emplace_back("tolerance", double_to_string(alpha_f.tolerance));
        } else if (name == "classify-psi") {
            f = &classify_f;
            spec.name = "classify-psi";
            spec.options.emplace_back("nu_max", std::to_string(nu_max));
        } else if (name == "orbit-map") {
            f = &orbit_f;
            spec.name = "orbit-map";
            spec.options.emplace_back("k", std::to_string(orbit_f.k));
            std::string xi = xi_text.empty()
                                 ? cli_detail::xi_text(cli_detail::random_xi(
                                       orbit_f.seed, 3 + 2 * orbit_f.p))
                                 : xi_text;
            spec.options.emplace_back("xi", xi);
        } else if (name == "okp") {
            f = &okp_f;
            spec.name = "okp";
            spec.options.emplace_back("k", std::to_string(okp_f.k));
        } else {
            err << "error: unknown command\n";
            return 2;
        }

        // usage-level range checks before any computation
        if (f->p < 1 || f->p > 9) {
            err << "error: --p must lie in [1, 9]\n";
            return 2;
        }
        if (name == "stabdim" || name == "orbit-map") {
            if (f->k < 0 || f->k > f->p + 2) {
                err << "error: --k must lie in [0, " << f->p + 2 << "]\n";
                return 2;
            }
        }
        if (name == "model" && (f->k < 0 || f->k > 12)) {
            err << "error: --k must lie in [0, 12]\n";
            return 2;
        }
        if (name == "okp" && (f->k < 0 || f->k > f->p)) {
            err << "error: --k must lie in [0, " << f->p << "]\n";
            return 2;
        }
        if (name == "curvature" && (order < 0 || order > 12)) {
            err << "error: --order must lie in [0, 12]\n";
            return 2;
        }

        ScenarioConfig cfg = cli_detail::make_config(*f);
        if (name == "verify-thm15" && closure)
            spec.options.emplace_back("check_closure", "true");
        spec.index = 1;
        cfg.tasks.push_back(spec);
        TaskResult r = run_task(cfg, cfg.tasks[0]);
        return cli_detail::finish(out, cfg, {r}, f->format);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace curvhom

#endif
