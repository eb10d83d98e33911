#pragma once

#include "gb2d/recover.hpp"

namespace gb2d {

/// Named experiment setups. Desk-scale N by default; paper_scale restores
/// the published sizes.
GenConfig preset_config(const std::string& name, bool paper_scale);
std::vector<std::string> preset_names();

struct PipelineOptions {
    SolverOptions solver;
    LocalizeOptions localize;
    double cert_tol = 1e-2;
};

struct PipelineOutcome {
    Scenario scenario;
    CVec y;
    DualSolution solution;
    DelayEstimates delays;
    RecoveryResult recovery;
    CertificateReport certificate;
    double max_delay_error = 0.0;  // over matched pairs, all users
    double max_message_mse = 0.0;
    int total_misses = 0;
    int total_false_alarms = 0;
};

/// synthesize -> solve -> localize -> recover -> certify.
PipelineOutcome run_pipeline(const Scenario& s, const PipelineOptions& opts);

json outcome_to_json(const PipelineOutcome& out, const json& resolved_config);

/// Unit-circle scatter of true vs estimated delays (cos 2 pi tau, sin 2 pi tau).
void write_polar_csv(const std::string& path, const Scenario& truth, const DelayEstimates& est);

struct SweepRow {
    int n_samples = 0;
    double mse_mean = 0.0;
    double mse_median = 0.0;
    double success_rate = 0.0;
    double delay_err_mean = 0.0;
};

/// Paired-seed sweep over N: repetition r uses seed base_seed + r for every
/// N value.
std::vector<SweepRow> run_sweep(const GenConfig& base, const std::vector<int>& n_values,
                                int repetitions, const PipelineOptions& opts,
                                double success_delay_tol = 1e-3);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace gb2d
