#include "gb2d/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gb2d {

std::vector<std::string> preset_names() {
    return {"fig2", "fig3a", "fig3b-text", "fig3b-caption", "fig3c", "fig4"};
}

GenConfig preset_config(const std::string& name, bool paper_scale) {
    GenConfig cfg;
    if (name == "fig2") {
        cfg.n_samples = 64;
        cfg.user_count = 2;
        cfg.path_counts = {2, 1};
        cfg.message_sizes = {5, 5};
    } else if (name == "fig3a") {
        cfg.n_samples = paper_scale ? 200 : 100;
        cfg.user_count = 4;
        cfg.path_counts = {3, 3, 3, 3};
        cfg.message_sizes = {5, 5, 5, 5};
    } else if (name == "fig3b-text") {
        cfg.n_samples = paper_scale ? 128 : 64;
        cfg.user_count = 3;
        cfg.path_counts = {3, 3, 3};
        cfg.message_sizes = {3, 2, 1};
    } else if (name == "fig3b-caption") {
        cfg.n_samples = paper_scale ? 128 : 64;
        cfg.user_count = 3;
        cfg.path_counts = {3, 2, 1};
        cfg.message_sizes = {5, 5, 5};
    } else if (name == "fig3c") {
        cfg.n_samples = paper_scale ? 128 : 64;
        cfg.user_count = 2;
        cfg.path_counts = {3, 3};
        cfg.message_sizes = {16, 16};
        cfg.sensing_mode = SensingMode::UniformSubsample;
        cfg.m_measurements = cfg.n_samples / 2;
    } else if (name == "fig4") {
        cfg.n_samples = 64;
        cfg.user_count = 2;
        cfg.path_counts = {5, 5};
        cfg.message_sizes = {4, 4};
        cfg.message_mode = MessageMode::UnitSpherePositive;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return cfg;
}

PipelineOutcome run_pipeline(const Scenario& s, const PipelineOptions& opts) {
    PipelineOutcome out;
    out.scenario = s;
    out.y = synthesize_measurements(s);
    const auto model = MeasurementModel::from_scenario(s);
    const auto problem = assemble_dual_sdp(model, out.y);
    out.solution = solve(problem, opts.solver);
    const auto polys = DualPolynomialSet::from_solution(out.solution, model);
    out.delays = localize_delays(polys, s.n_samples, opts.localize);
    out.recovery = recover_messages(out.y, s, out.delays);
    out.certificate = certify(s, out.solution, opts.cert_tol);
    for (const auto& dm : out.recovery.delay_matches) {
        for (double e : dm.errors) out.max_delay_error = std::max(out.max_delay_error, e);
        out.total_misses += dm.misses;
        out.total_false_alarms += dm.false_alarms;
    }
    for (double mse : out.recovery.message_mse)
        out.max_message_mse = std::max(out.max_message_mse, mse);
    return out;
}

json outcome_to_json(const PipelineOutcome& out, const json& resolved_config) {
    json j;
    j["config"] = resolved_config;
    j["seed"] = out.scenario.seed;
    j["solver"] = {{"status", to_string(out.solution.status)},
                   {"objective", out.solution.objective},
                   {"iterations", out.solution.iterations},
                   {"primal_residual", out.solution.primal_residual},
                   {"dual_residual", out.solution.dual_residual}};
    json delays = json::array();
    for (const auto& user : out.delays.per_user) {
        json taus = json::array();
        for (const auto& p : user) taus.push_back({{"tau", p.tau}, {"peak", p.peak_value}});
        delays.push_back(std::move(taus));
    }
    j["estimated_delays"] = std::move(delays);
    j["recovery"] = recovery_to_json(out.recovery);
    j["certificate"] = certificate_to_json(out.certificate);
    j["max_delay_error"] = out.max_delay_error;
    j["max_message_mse"] = out.max_message_mse;
    j["misses"] = out.total_misses;
    j["false_alarms"] = out.total_false_alarms;
    return j;
}

void write_polar_csv(const std::string& path, const Scenario& truth, const DelayEstimates& est) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "user,kind,tau,x,y\n";
    char buf[64];
    auto row = [&](int user, const char* kind, double tau) {
        f << user << ',' << kind << ',';
        std::snprintf(buf, sizeof buf, "%.17g", tau);
        f << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", std::cos(2.0 * M_PI * tau));
        f << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", std::sin(2.0 * M_PI * tau));
        f << buf << "\n";
    };
    for (int k = 0; k < truth.user_count(); ++k) {
        for (const auto& p : truth.channels[k].paths) row(k + 1, "true", p.tau);
        if (k < static_cast<int>(est.per_user.size()))
            for (const auto& p : est.per_user[k]) row(k + 1, "estimated", p.tau);
    }
}

std::vector<SweepRow> run_sweep(const GenConfig& base, const std::vector<int>& n_values,
                                int repetitions, const PipelineOptions& opts,
                                double success_delay_tol) {
    if (n_values.size() < 2) throw std::invalid_argument("sweep: need >= 2 values of N");
    if (repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");

    const int total = static_cast<int>(n_values.size()) * repetitions;
    std::vector<double> mses(total, 0.0), delay_errs(total, 0.0);
    std::vector<char> successes(total, 0);

    // paired design: repetition r reuses seed base.seed + r for every N
#ifdef GB2D_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < total; ++t) {
        const int ni = t / repetitions;
        const int rep = t % repetitions;
        GenConfig cfg = base;
        cfg.n_samples = n_values[ni];
        if (cfg.sensing_mode == SensingMode::UniformSubsample && base.n_samples > 0)
            cfg.m_measurements =
                std::max(1, cfg.n_samples * base.m_measurements / base.n_samples);
        cfg.seed = base.seed + static_cast<std::uint64_t>(rep);
        const Scenario s = generate_scenario(cfg);
        const PipelineOutcome out = run_pipeline(s, opts);
        double mse = 0.0;
        for (double v : out.recovery.message_mse) mse += v;
        mses[t] = mse / std::max<std::size_t>(1, out.recovery.message_mse.size());
        delay_errs[t] = out.max_delay_error;
        successes[t] = (out.total_misses == 0 && out.total_false_alarms == 0 &&
                        out.max_delay_error <= success_delay_tol)
                           ? 1
                           : 0;
    }

    std::vector<SweepRow> rows;
    for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
        SweepRow r;
        r.n_samples = n_values[ni];
        std::vector<double> m(mses.begin() + ni * repetitions,
                              mses.begin() + (ni + 1) * repetitions);
        double esum = 0.0;
        int succ = 0;
        for (int i = 0; i < repetitions; ++i) {
            r.mse_mean += m[i];
            esum += delay_errs[ni * repetitions + i];
            succ += successes[ni * repetitions + i];
        }
        r.mse_mean /= repetitions;
        r.delay_err_mean = esum / repetitions;
        r.success_rate = static_cast<double>(succ) / repetitions;
        std::sort(m.begin(), m.end());
        r.mse_median = repetitions % 2 == 1
                           ? m[repetitions / 2]
                           : 0.5 * (m[repetitions / 2 - 1] + m[repetitions / 2]);
        rows.push_back(r);
    }
    return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "N,mse_mean,mse_median,success_rate,delay_err_mean\n";
    char buf[64];
    for (const auto& r : rows) {
        f << r.n_samples;
        for (double v : {r.mse_mean, r.mse_median, r.success_rate, r.delay_err_mean}) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            f << ',' << buf;
        }
        f << "\n";
    }
}

}  // namespace gb2d
