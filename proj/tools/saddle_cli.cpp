// Command-line front end: generate or import a double saddle-point problem,
// run the stationary or Krylov solvers, scan parameter regions, dump spectra,
// and evaluate the convergence/preconditioning bounds.
//
// Exit codes: 0 success or converged, 2 iteration cap, 3 divergence,
// 4 configuration error, 5 numeric failure.

#include <algorithm>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "saddle/saddle.hpp"

namespace {

using nlohmann::ordered_json;
using namespace saddle;

constexpr int kExitOk = 0;
constexpr int kExitMaxIter = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitConfig = 4;
constexpr int kExitNumeric = 5;

/// Flat-or-nested JSON config file support: top-level keys name options of
/// the main app, one nested object per subcommand. Command-line flags take
/// precedence over file values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::FileError(std::string("config parse error: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        walk(j, {}, items);
        return items;
    }

private:
    static void walk(const nlohmann::json& j, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto deeper = parents;
                deeper.push_back(key);
                walk(value, deeper, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar_to_string(v));
            } else {
                item.inputs.push_back(scalar_to_string(value));
            }
            items.push_back(std::move(item));
        }
    }

    static std::string scalar_to_string(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }
};

struct ProblemSource {
    std::string generate;  // lc-like | darcy-like | synthetic
    std::string import_manifest;
    int N = 4;
    int n = 48, m = 12, p = 12;
    std::string shape = "uniform";
    std::uint64_t seed = 1;
    double target_nu = -1.0;
    std::string p_kind = "default";
};

void add_source_flags(CLI::App* cmd, ProblemSource& src) {
    cmd->add_option("--generate", src.generate, "Problem family: lc-like, darcy-like, synthetic")
        ->check(CLI::IsMember({"lc-like", "darcy-like", "synthetic"}));
    cmd->add_option("--import", src.import_manifest, "Manifest JSON of a Matrix Market bundle");
    cmd->add_option("-N,--size", src.N, "Structured family size parameter");
    cmd->add_option("--n", src.n, "Synthetic leading block order");
    cmd->add_option("--m", src.m, "Synthetic second block order");
    cmd->add_option("--p", src.p, "Synthetic third block order");
    cmd->add_option("--shape", src.shape, "Synthetic spectrum shape")
        ->check(CLI::IsMember({"uniform", "clustered", "ill-conditioned"}));
    cmd->add_option("--seed", src.seed, "Generator seed");
    cmd->add_option("--target-nu", src.target_nu, "Synthetic target nu_max (off when negative)");
    cmd->add_option("--p-kind", src.p_kind, "Synthetic scaling matrix choice")
        ->check(CLI::IsMember({"default", "diag-schur", "scaled-identity"}));
}

DoubleSaddleProblem load_problem(const ProblemSource& src) {
    const bool gen = !src.generate.empty();
    const bool imp = !src.import_manifest.empty();
    if (gen == imp)
        throw CLI::ValidationError("problem source",
                                   "exactly one of --generate/--import is required");
    if (imp) return import_problem(src.import_manifest);
    if (src.generate == "lc-like")
        return generate_structured(src.seed, src.N, StructuredFamily::LcLike);
    if (src.generate == "darcy-like")
        return generate_structured(src.seed, src.N, StructuredFamily::DarcyLike);
    GeneratorOptions opts;
    if (src.shape == "clustered") opts.shape = SpectrumShape::Clustered;
    if (src.shape == "ill-conditioned") opts.shape = SpectrumShape::IllConditioned;
    if (src.p_kind == "diag-schur") opts.p_choice = PChoice::DiagSchur;
    if (src.p_kind == "scaled-identity") opts.p_choice = PChoice::ScaledIdentity;
    opts.target_nu = src.target_nu;
    return generate_synthetic(src.seed, src.n, src.m, src.p, opts);
}

ordered_json problem_json(const ProblemSource& src, const DoubleSaddleProblem& pr) {
    ordered_json j;
    j["n"] = pr.n();
    j["m"] = pr.m();
    j["p"] = pr.p();
    j["source"] = src.generate.empty() ? "import:" + src.import_manifest
                                       : "generate:" + src.generate;
    if (src.generate.empty() == false) j["seed"] = src.seed;
    j["p_defaulted"] = pr.p_defaulted();
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_history_csv(const std::string& path, const std::vector<double>& history) {
    std::string text = "iteration,res\n";
    for (std::size_t k = 0; k < history.size(); ++k)
        text += std::to_string(k) + "," + format17(history[k]) + "\n";
    write_text(path, text);
}

void write_spectrum_csv(const std::string& path, std::vector<std::complex<double>> spectrum) {
    std::sort(spectrum.begin(), spectrum.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::string text = "real,imag\n";
    for (const auto& ev : spectrum)
        text += format17(ev.real()) + "," + format17(ev.imag()) + "\n";
    write_text(path, text);
}

int status_exit_code(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return kExitOk;
        case SolveStatus::MaxIter: return kExitMaxIter;
        case SolveStatus::Diverged: return kExitDiverged;
    }
    return kExitNumeric;
}

GridAxis parse_grid(const std::string& spec) {
    // param:lo:hi:steps
    GridAxis axis;
    std::string token;
    std::vector<std::string> parts;
    std::istringstream ss(spec);
    while (std::getline(ss, token, ':')) parts.push_back(token);
    if (parts.size() != 4) throw CLI::ValidationError("--grid", "expected param:lo:hi:steps");
    if (parts[0] == "omega") axis.param = ScanParam::Omega;
    else if (parts[0] == "tau") axis.param = ScanParam::Tau;
    else if (parts[0] == "theta") axis.param = ScanParam::Theta;
    else throw CLI::ValidationError("--grid", "param must be omega, tau or theta");
    try {
        axis.lo = std::stod(parts[1]);
        axis.hi = std::stod(parts[2]);
        axis.steps = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "bad numeric field in " + spec);
    }
    if (axis.steps < 1) throw CLI::ValidationError("--grid", "steps must be at least 1");
    return axis;
}

std::pair<ScanParam, double> parse_fixed(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--fixed", "expected param=value");
    const std::string name = spec.substr(0, eq);
    ScanParam param;
    if (name == "omega") param = ScanParam::Omega;
    else if (name == "tau") param = ScanParam::Tau;
    else if (name == "theta") param = ScanParam::Theta;
    else throw CLI::ValidationError("--fixed", "param must be omega, tau or theta");
    try {
        return {param, std::stod(spec.substr(eq + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--fixed", "bad value in " + spec);
    }
}

struct SolveArgs {
    ProblemSource src;
    std::string solver = "gsor";
    double omega = 1.0, tau = 1.0, theta = 1.0;
    bool auto_params = false;
    double tol = 1e-8;
    long max_iter = 100000;
    int restart = 100;
    std::string precond = "gsor";
    std::string out;
    std::string history;
    bool no_timing = false;
    bool dry_run = false;
};

int run_solve(const SolveArgs& args, bool omega_given, bool theta_given) {
    const detail::Stopwatch factor_clock;
    const DoubleSaddleProblem pr = load_problem(args.src);
    const double factor_seconds = factor_clock.seconds();

    ordered_json report;
    report["command"] = "solve";
    report["solver"] = args.solver;
    report["problem"] = problem_json(args.src, pr);

    if (args.dry_run) {
        report["dry_run"] = true;
        write_text(args.out, report.dump(2) + "\n");
        return kExitOk;
    }

    SolveOptions opts;
    opts.tol = args.tol;
    opts.max_iter = args.max_iter;
    opts.record_history = !args.history.empty();

    Vec solution;
    SolveReport sr;
    if (args.solver == "gsor" || args.solver == "uzawa") {
        GsorParams params{args.omega, args.tau, args.theta};
        if (args.solver == "uzawa") {
            params.omega = 1.0;
            params.theta = 1.0;
        } else if (args.auto_params) {
            const auto sd = spectral_data(pr);
            params = select_params(sd, theta_given ? args.theta : 1.0);
            report["spectral_data"] = {{"mu_min", sd.mu_min},
                                       {"mu_max", sd.mu_max},
                                       {"nu_max", sd.nu_max},
                                       {"converged", sd.converged}};
        }
        report["params"] = {{"omega", params.omega}, {"tau", params.tau},
                            {"theta", params.theta}};
        std::tie(solution, sr) = gsor_solve(pr, params, opts);
    } else if (args.solver == "gbsor") {
        const double omega =
            omega_given ? args.omega : gbsor_default_omega(spectral_data(pr));
        report["params"] = {{"omega", omega}, {"defaulted", !omega_given}};
        std::tie(solution, sr) = gbsor_solve(pr, omega, opts);
    } else if (args.solver == "gmres" || args.solver == "minres") {
        KrylovOptions kopts;
        kopts.tol = args.tol;
        kopts.max_iter = args.max_iter;
        kopts.restart = args.restart;
        kopts.record_history = !args.history.empty();
        const auto op = make_operator(assemble(pr, BlockLayout::Symmetric));
        std::optional<Preconditioner> pc;
        if (args.solver == "minres") {
            if (args.precond != "none") pc = Preconditioner::block_diagonal(pr);
        } else if (args.precond == "gsor") {
            pc = Preconditioner::gsor_lower(pr, args.tau, args.theta);
        } else if (args.precond == "block-diagonal") {
            pc = Preconditioner::block_diagonal(pr);
        } else if (args.precond == "block-triangular") {
            pc = Preconditioner::block_triangular(pr);
        }
        report["precond"] = pc ? to_string(pc->kind()) : "none";
        if (args.solver == "gmres" && args.precond == "gsor")
            report["params"] = {{"tau", args.tau}, {"theta", args.theta}};
        report["restart"] = args.restart;
        if (args.solver == "gmres")
            std::tie(solution, sr) = gmres_solve(op, pc ? &*pc : nullptr, pr.rhs(), kopts);
        else
            std::tie(solution, sr) = minres_solve(op, pc ? &*pc : nullptr, pr.rhs(), kopts);
    } else {
        throw CLI::ValidationError("--solver", "unknown solver " + args.solver);
    }

    report["status"] = to_string(sr.status);
    report["iterations"] = sr.iterations;
    report["final_res"] = sr.final_res;
    report["residual_absolute"] = sr.residual_absolute;
    report["tol"] = args.tol;
    report["max_iter"] = args.max_iter;
    report["counts"] = {{"spd_solves", sr.spd_solves},
                        {"setup_spd_solves", sr.setup_spd_solves}};
    if (!args.no_timing)
        report["timing"] = {{"factor_seconds", factor_seconds},
                            {"setup_seconds", sr.setup_seconds},
                            {"solve_seconds", sr.solve_seconds}};
    if (!args.history.empty()) {
        write_history_csv(args.history, sr.history);
        report["history_file"] = args.history;
    }
    write_text(args.out, report.dump(2) + "\n");
    return status_exit_code(sr.status);
}

struct RegionArgs {
    ProblemSource src;
    std::vector<std::string> grids;
    std::string fixed = "theta=1.0";
    double tol = 1e-8;
    long max_iter = 5000;
    bool spectral = false;
    int threads = 0;
    std::string out;
};

int run_region(const RegionArgs& args) {
    const DoubleSaddleProblem pr = load_problem(args.src);
    if (args.grids.size() != 2)
        throw CLI::ValidationError("--grid", "exactly two --grid axes are required");
    RegionScanConfig cfg;
    cfg.axis1 = parse_grid(args.grids[0]);
    cfg.axis2 = parse_grid(args.grids[1]);
    if (cfg.axis1.param == cfg.axis2.param)
        throw CLI::ValidationError("--grid", "the two grid axes must differ");
    const auto [fixed_param, fixed_value] = parse_fixed(args.fixed);
    if (fixed_param == cfg.axis1.param || fixed_param == cfg.axis2.param)
        throw CLI::ValidationError("--fixed", "fixed parameter collides with a grid axis");
    cfg.fixed_value = fixed_value;
    cfg.opts.tol = args.tol;
    cfg.opts.max_iter = args.max_iter;
    cfg.spectral_mode = args.spectral;
    cfg.threads = args.threads;

    const auto cells = region_scan(pr, cfg);
    std::ostringstream csv;
    write_region_csv(csv, cells, cfg);
    write_text(args.out, csv.str());
    return kExitOk;
}

struct SpectrumArgs {
    ProblemSource src;
    double tau = 1.0, theta = 1.0;
    std::string out = "spectrum";
};

int run_spectrum(const SpectrumArgs& args) {
    const DoubleSaddleProblem pr = load_problem(args.src);
    const auto original = dense_eigenvalues(assemble(pr, BlockLayout::Symmetric).dense());
    const auto pc = Preconditioner::gsor_lower(pr, args.tau, args.theta);
    const auto preconditioned = preconditioned_spectrum(pc);
    write_spectrum_csv(args.out + "_original.csv", original);
    write_spectrum_csv(args.out + "_preconditioned.csv", preconditioned);
    return kExitOk;
}

struct BoundsArgs {
    ProblemSource src;
    double tau = 1.0, theta = 1.0;
    std::string out;
};

int run_bounds(const BoundsArgs& args) {
    const DoubleSaddleProblem pr = load_problem(args.src);
    const auto sd = spectral_data(pr);

    ordered_json j;
    j["command"] = "bounds";
    j["problem"] = problem_json(args.src, pr);
    j["spectral_data"] = {{"mu_min", sd.mu_min},
                          {"mu_max", sd.mu_max},
                          {"nu_max", sd.nu_max},
                          {"converged", sd.converged}};
    j["theta"] = args.theta;
    j["tau"] = args.tau;

    const auto pb = gsor_convergence_bounds(sd, args.theta, args.tau);
    const auto selected = select_params(sd, args.theta);
    j["gsor"] = {{"theta_range", {pb.theta_lo, pb.theta_hi}},
                 {"omega_upper", pb.omega_upper},
                 {"tau_selection_upper", pb.tau_upper},
                 {"tau_upper_at_selected_omega", gsor_tau_upper(sd, selected.omega, args.theta)},
                 {"selected",
                  {{"omega", selected.omega}, {"tau", selected.tau}, {"theta", selected.theta}}}};
    j["omega1"] = {{"theta_upper", omega1_theta_upper(sd)},
                   {"tau_upper", omega1_tau_upper(sd, args.theta)},
                   {"holds", omega1_conditions(sd, args.theta, args.tau)}};
    j["uzawa"] = {{"tau_upper", uzawa_tau_upper(sd)},
                  {"holds", uzawa_conditions(sd, args.tau)}};
    const auto si = preconditioned_interval(sd, args.tau, args.theta);
    j["interval"] = {{"lambda_lower", si.lambda_lower},
                     {"lambda_upper", si.lambda_upper},
                     {"Lambda_low", si.Lambda_low},
                     {"Lambda_high", si.Lambda_high}};
    const auto cb = condition_number_bound(sd, args.tau, args.theta);
    j["condition_bound"] = {{"literal", cb.literal}, {"simplified", cb.simplified}};
    j["gbsor"] = {{"default_omega", gbsor_default_omega(sd)}};

    write_text(args.out, j.dump(2) + "\n");
    return sd.converged ? kExitOk : kExitNumeric;
}

struct ExportArgs {
    ProblemSource src;
    std::string out_dir = "problem_bundle";
};

int run_export(const ExportArgs& args) {
    const DoubleSaddleProblem pr = load_problem(args.src);
    export_problem(pr, args.out_dir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block 3x3 double saddle-point solvers: three-parameter SOR iteration, "
                 "induced block triangular preconditioning, and spectral diagnostics"};
    app.require_subcommand(1);
    const auto json_config = std::make_shared<JsonConfig>();
    app.config_formatter(json_config);
    app.set_config("--config", "",
                   "JSON config file with one object per subcommand; flags take precedence");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Run a solver and write a JSON report");
    add_source_flags(solve, solve_args.src);
    solve->add_option("--solver", solve_args.solver, "gsor, uzawa, gbsor, gmres, minres")
        ->check(CLI::IsMember({"gsor", "uzawa", "gbsor", "gmres", "minres"}));
    auto* omega_opt = solve->add_option("--omega", solve_args.omega, "Relaxation omega");
    solve->add_option("--tau", solve_args.tau, "Relaxation tau");
    auto* theta_opt = solve->add_option("--theta", solve_args.theta, "Relaxation theta");
    solve->add_flag("--auto-params", solve_args.auto_params,
                    "Pick (omega, tau) from the measured spectral data");
    solve->add_option("--tol", solve_args.tol, "Relative residual tolerance");
    solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap");
    solve->add_option("--restart", solve_args.restart, "GMRES restart length");
    solve->add_option("--precond", solve_args.precond,
                      "gsor, block-diagonal, block-triangular, none")
        ->check(CLI::IsMember({"gsor", "block-diagonal", "block-triangular", "none"}));
    solve->add_option("--out", solve_args.out, "Report path (default stdout)");
    solve->add_option("--history", solve_args.history, "Residual history CSV path");
    solve->add_flag("--no-timing", solve_args.no_timing,
                    "Omit wall-clock fields for byte-reproducible reports");
    solve->add_flag("--dry-run", solve_args.dry_run, "Validate the configuration and stop");

    RegionArgs region_args;
    auto* region = app.add_subcommand("region", "Convergence-region grid scan to CSV");
    add_source_flags(region, region_args.src);
    region->add_option("--grid", region_args.grids,
                       "Axis spec param:lo:hi:steps (give exactly two)");
    region->add_option("--fixed", region_args.fixed, "Fixed third parameter, e.g. theta=1.0");
    region->add_option("--tol", region_args.tol, "Relative residual tolerance");
    region->add_option("--max-iter", region_args.max_iter, "Iteration cap per cell");
    region->add_flag("--spectral", region_args.spectral,
                     "Also report the iteration-operator spectral radius per cell");
    region->add_option("--threads", region_args.threads, "Worker threads (0 = hardware)");
    region->add_option("--out", region_args.out, "CSV path (default stdout)");

    SpectrumArgs spectrum_args;
    auto* spectrum = app.add_subcommand(
        "spectrum", "Eigenvalues of the system and its preconditioned form, to CSV");
    add_source_flags(spectrum, spectrum_args.src);
    spectrum->add_option("--tau", spectrum_args.tau, "Preconditioner tau");
    spectrum->add_option("--theta", spectrum_args.theta, "Preconditioner theta");
    spectrum->add_option("--out", spectrum_args.out,
                         "Output prefix: writes <prefix>_original.csv and "
                         "<prefix>_preconditioned.csv");

    BoundsArgs bounds_args;
    auto* bounds = app.add_subcommand(
        "bounds", "Spectral data, convergence bounds and interval/condition bounds as JSON");
    add_source_flags(bounds, bounds_args.src);
    bounds->add_option("--tau", bounds_args.tau, "tau for the bound evaluations");
    bounds->add_option("--theta", bounds_args.theta, "theta for the bound evaluations");
    bounds->add_option("--out", bounds_args.out, "JSON path (default stdout)");

    ExportArgs export_args;
    auto* exporter =
        app.add_subcommand("export", "Write the problem as a Matrix Market bundle + manifest");
    add_source_flags(exporter, export_args.src);
    exporter->add_option("--out-dir", export_args.out_dir, "Bundle directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (solve->parsed())
            return run_solve(solve_args, omega_opt->count() > 0, theta_opt->count() > 0);
        if (region->parsed()) return run_region(region_args);
        if (spectrum->parsed()) return run_spectrum(spectrum_args);
        if (bounds->parsed()) return run_bounds(bounds_args);
        if (exporter->parsed()) return run_export(export_args);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
