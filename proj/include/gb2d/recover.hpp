#pragma once

#include "gb2d/localize.hpp"
#include "gb2d/scenario.hpp"

namespace gb2d {

struct UserRecovery {
    CVec message;        // x_hat, unit norm
    CVec amplitudes;     // g_hat per estimated path
    double rank_one_gap = 0.0;  // sigma2 / sigma1 diagnostic
};

struct DelayMatch {
    std::vector<std::pair<int, int>> pairs;  // (estimated idx, true idx)
    std::vector<double> errors;              // wrap distance per pair
    int misses = 0;       // true delays with no estimate
    int false_alarms = 0; // estimates with no true delay
    double total_cost = 0.0;
};

struct RecoveryResult {
    std::vector<UserRecovery> users;
    double residual = 0.0;  // ||y - y_hat|| / ||y||
    std::vector<DelayMatch> delay_matches;   // vs ground truth, when known
    std::vector<double> message_mse;         // oracle-aligned, per user
    bool underdetermined_warning = false;
    bool rank_deficient_warning = false;
};

struct CertificateReport {
    struct PerUser {
        double on_support_deviation = 0.0;
        double off_support_max = 0.0;
    };
    std::vector<PerUser> users;
    double on_support_deviation = 0.0;  // max over users
    double off_support_max = 0.0;       // max over users
    bool separation_ok = false;
    bool certified = false;
};

/// Stacked per-path least squares: y ~ sum_{k,l} D diag(a(tau_kl)) conj(C_k) b_kl.
/// Columns ordered user-major, path-minor. Minimum-norm solution on rank
/// deficiency (flagged).
struct PathCoefficients {
    std::vector<CMat> per_user;  // M_k x P_hat_k, column l = b_{k,l}
    double residual = 0.0;       // relative
    bool underdetermined = false;
    bool rank_deficient = false;
};

PathCoefficients least_squares_paths(const CVec& y, const MeasurementModel& model,
                                     const DelayEstimates& delays);

/// Best rank-one factorization B ~ x g^T via SVD; x unit norm.
UserRecovery factor_rank_one(const CMat& b);

/// Removes the per-user phase ambiguity. With positivity convention the
/// phase maximizing sum Re(e^{j phi} x_i) is applied; with an oracle
/// reference the closed-form phi = -arg<x_hat, x_true> is used. g is
/// counter-rotated so x g^T is unchanged.
void align_positivity(CVec& x_hat, CVec& g_hat);
void align_to_reference(CVec& x_hat, CVec& g_hat, const CVec& x_true);

/// Minimum-total-cost assignment between estimated and true delays under the
/// wrap-around metric (Hungarian algorithm; count mismatches reported as
/// misses / false alarms).
DelayMatch match_delays(const std::vector<double>& estimated, const std::vector<double>& truth);

/// ||x_hat_aligned - x_true||^2 / M_k after oracle alignment.
double message_mse(const CVec& x_hat, const CVec& x_true);

/// Numeric check of the dual-certificate conditions at the ground truth:
/// q_k(tau_l) = sgn(g_l) x_k on support, ||q_k|| < 1 off support (32N grid
/// excluding +-0.5/N around each true delay), separation >= 1/N.
CertificateReport certify(const Scenario& scenario, const DualSolution& solution,
                          double cert_tol = 1e-2);

/// Full message/amplitude recovery with error metrics against the truth.
RecoveryResult recover_messages(const CVec& y, const Scenario& truth,
                                const DelayEstimates& delays);

json certificate_to_json(const CertificateReport& rep);
json recovery_to_json(const RecoveryResult& res);

}  // namespace gb2d
