// Experiment runner for the gridless blind deconvolution/demixing pipeline.
// Exit codes: 0 ok, 1 I/O or usage, 2 validation, 3 solver non-optimal,
// 4 not certified.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "gb2d/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gb2d;

namespace {

struct CommonArgs {
    std::string preset;
    std::string config_file;
    std::string out_dir = ".";
    bool paper_scale = false;
    std::uint64_t seed = 1;
    bool seed_set = false;
};

GenConfig resolve_config(const CommonArgs& args) {
    GenConfig cfg;
    if (!args.config_file.empty()) {
        std::ifstream f(args.config_file);
        if (!f) throw std::runtime_error("cannot open config '" + args.config_file + "'");
        json j;
        f >> j;
        cfg = gen_config_from_json(j);
    } else if (!args.preset.empty()) {
        cfg = preset_config(args.preset, args.paper_scale);
    } else {
        throw CLI::ValidationError("need --preset or --config");
    }
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--preset", args.preset, "named experiment setup");
    cmd->add_option("--config", args.config_file, "generation config JSON file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_flag("--paper-scale", args.paper_scale, "use published experiment sizes");
    cmd->add_option("--seed", args.seed, "generation seed")->each([&args](const std::string&) {
        args.seed_set = true;
    });
}

void add_tol_overrides(CLI::App* cmd, PipelineOptions& opts) {
    cmd->add_option("--max-iters", opts.solver.max_iters, "solver iteration cap");
    cmd->add_option("--eps-abs", opts.solver.eps_abs, "solver absolute tolerance");
    cmd->add_option("--eps-rel", opts.solver.eps_rel, "solver relative tolerance");
    cmd->add_option("--peak-threshold", opts.localize.threshold, "peak detection threshold");
    cmd->add_option("--grid-factor", opts.localize.grid_factor, "scan grid density (x N)");
    cmd->add_option("--cert-tol", opts.cert_tol, "on-support certification tolerance");
}

void print_report(const ValidationReport& rep) {
    for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    if (rep.ok() && rep.warnings.empty()) std::cout << "scenario valid\n";
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridless blind deconvolution and demixing (GB2D) toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    PipelineOptions opts;
    std::string scenario_file, solution_file;
    std::vector<int> n_values;
    int repetitions = 10;
    int gen_n = 0, gen_k = 1;
    std::vector<int> gen_paths, gen_msg;

    auto* gen = app.add_subcommand("gen", "generate and write a scenario");
    add_common(gen, args);
    gen->add_option("-n,--n", gen_n, "sample count N (inline config)");
    gen->add_option("-k,--k", gen_k, "user count (inline config)");
    gen->add_option("--paths", gen_paths, "paths per user (inline config)");
    gen->add_option("--msg", gen_msg, "message sizes per user (inline config)");

    auto* solve_cmd = app.add_subcommand("solve", "solve the dual SDP for a scenario file");
    add_common(solve_cmd, args);
    add_tol_overrides(solve_cmd, opts);
    solve_cmd->add_option("scenario", scenario_file, "scenario JSON")->required();

    auto* loc = app.add_subcommand("localize", "extract delays from a solved instance");
    add_common(loc, args);
    add_tol_overrides(loc, opts);
    loc->add_option("scenario", scenario_file, "scenario JSON")->required();
    loc->add_option("solution", solution_file, "solution JSON")->required();

    auto* rec = app.add_subcommand("recover", "recover messages/amplitudes");
    add_common(rec, args);
    add_tol_overrides(rec, opts);
    rec->add_option("scenario", scenario_file, "scenario JSON")->required();
    rec->add_option("solution", solution_file, "solution JSON")->required();

    auto* pipe = app.add_subcommand("pipeline", "run the full pipeline");
    add_common(pipe, args);
    add_tol_overrides(pipe, opts);

    auto* sweep = app.add_subcommand("sweep", "MSE-vs-N sweep with paired seeds");
    add_common(sweep, args);
    add_tol_overrides(sweep, opts);
    sweep->add_option("--n-list", n_values, "N values")->required();
    sweep->add_option("--reps", repetitions, "repetitions per N");

    auto* cert = app.add_subcommand("certify", "check dual-certificate conditions");
    add_common(cert, args);
    add_tol_overrides(cert, opts);
    cert->add_option("scenario", scenario_file, "scenario JSON")->required();
    cert->add_option("solution", solution_file, "solution JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            GenConfig cfg;
            if (gen_n > 0) {
                cfg.n_samples = gen_n;
                cfg.user_count = gen_k;
                cfg.path_counts = gen_paths.empty() ? std::vector<int>(gen_k, 1) : gen_paths;
                cfg.message_sizes = gen_msg.empty() ? std::vector<int>(gen_k, 1) : gen_msg;
                if (args.seed_set) cfg.seed = args.seed;
            } else {
                cfg = resolve_config(args);
            }
            const Scenario s = generate_scenario(cfg);
            const auto rep = validate_scenario(s);
            print_report(rep);
            save_scenario(s, out_path(args, "scenario.json"));
            std::cout << "wrote " << out_path(args, "scenario.json") << "\n";
            return rep.ok() ? 0 : 2;
        }

        if (solve_cmd->parsed()) {
            auto [s, rep] = load_scenario(scenario_file);
            print_report(rep);
            if (!rep.ok()) return 2;
            const CVec y = synthesize_measurements(s);
            const auto model = MeasurementModel::from_scenario(s);
            const auto t0 = std::chrono::steady_clock::now();
            const DualSolution sol = solve(assemble_dual_sdp(model, y), opts.solver);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            save_solution(sol, out_path(args, "solution.json"));
            std::printf("status=%s objective=%.8f iters=%d (%.1fs)\n",
                        to_string(sol.status).c_str(), sol.objective, sol.iterations, secs);
            return sol.status == SolveStatus::Optimal ? 0 : 3;
        }

        if (loc->parsed() || rec->parsed() || cert->parsed()) {
            auto [s, rep] = load_scenario(scenario_file);
            if (!rep.ok()) {
                print_report(rep);
                return 2;
            }
            const DualSolution sol = load_solution(solution_file);
            if (sol.lambda.size() != s.m_measurements() || sol.Q.rows() != s.n_samples) {
                std::cerr << "error: solution dimensions do not match scenario\n";
                return 1;
            }
            const auto model = MeasurementModel::from_scenario(s);
            const auto polys = DualPolynomialSet::from_solution(sol, model);

            if (cert->parsed()) {
                const auto report = certify(s, sol, opts.cert_tol);
                std::cout << certificate_to_json(report).dump(2) << "\n";
                return report.certified ? 0 : 4;
            }
            const DelayEstimates est = localize_delays(polys, s.n_samples, opts.localize);
            if (loc->parsed()) {
                write_curve_csv(out_path(args, "curves.csv"), polys, s.n_samples,
                                opts.localize.grid_factor * s.n_samples);
                write_support_csv(out_path(args, "support.csv"), s, est);
                std::cout << "wrote curves.csv and support.csv\n";
                return 0;
            }
            const CVec y = synthesize_measurements(s);
            const RecoveryResult res = recover_messages(y, s, est);
            std::cout << recovery_to_json(res).dump(2) << "\n";
            return 0;
        }

        if (pipe->parsed()) {
            const GenConfig cfg = resolve_config(args);
            const Scenario s = generate_scenario(cfg);
            const auto t0 = std::chrono::steady_clock::now();
            const PipelineOutcome out = run_pipeline(s, opts);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto model = MeasurementModel::from_scenario(s);
            const auto polys = DualPolynomialSet::from_solution(out.solution, model);
            std::ofstream rf(out_path(args, "result.json"));
            rf << outcome_to_json(out, gen_config_to_json(cfg)).dump(2) << "\n";
            write_curve_csv(out_path(args, "curves.csv"), polys, s.n_samples,
                            opts.localize.grid_factor * s.n_samples);
            write_support_csv(out_path(args, "support.csv"), s, out.delays);
            write_polar_csv(out_path(args, "polar.csv"), s, out.delays);
            std::printf(
                "status=%s objective=%.8f max_delay_err=%.3e max_mse=%.3e certified=%d (%.1fs)\n",
                to_string(out.solution.status).c_str(), out.solution.objective,
                out.max_delay_error, out.max_message_mse, out.certificate.certified ? 1 : 0,
                secs);
            return out.solution.status == SolveStatus::Optimal ? 0 : 3;
        }

        if (sweep->parsed()) {
            const GenConfig cfg = resolve_config(args);
            const auto rows = run_sweep(cfg, n_values, repetitions, opts);
            write_sweep_csv(out_path(args, "sweep.csv"), rows);
            for (const auto& r : rows)
                std::printf("N=%d mse_mean=%.3e success=%.2f\n", r.n_samples, r.mse_mean,
                            r.success_rate);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
