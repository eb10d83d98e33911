#pragma once

#include <memory>
#include <string>

#include "gb2d/operators.hpp"
#include "gb2d/serialize.hpp"

namespace gb2d {

/// Dual program of the atomic-norm minimization:
///   max Re<lambda, y>
///   s.t. [[Q_k, G_k], [G_k^H, I_{M_k}]] >= 0,  G_k = ((B* lambda)_k)^H,
///        trace(Q_k) = 1, off-diagonal sums of Q_k all zero.
/// One Gram matrix Q_k per user: this is the exact semidefinite
/// characterization of the sup-norm constraint ||q_k(tau)|| <= 1 (a single
/// shared Q only gives an inner approximation and leaves a duality gap on
/// multi-user instances).
/// Stored structurally (model + data); helpers materialize the blocks and
/// report the real-embedded dimensions.
struct ConicProblem {
    MeasurementModel model;
    CVec y;
    /// Collapse identical codebooks to a single PSD block (all dual
    /// constraints coincide when every user shares one codebook).
    bool collapse_common_codebook = false;

    int n() const { return model.n_samples; }
    int m() const { return model.m_measurements(); }
    /// PSD blocks after optional collapsing.
    int block_count() const;
    /// Complex dimension N + M_k of block k.
    int block_dim(int k) const;
    /// Real-embedded dimension 2(N + M_k).
    int block_real_dim(int k) const { return 2 * block_dim(k); }
    /// Per block: trace(Q_k) = 1 plus re/im of each off-diagonal sum,
    /// i.e. 2N - 1 equations per PSD block.
    int equality_count() const { return block_count() * (2 * n() - 1); }

    /// [[Q_k, G_k], [G_k^H, I]] for the given iterate.
    CMat assemble_block(int k, const CVec& lambda, const CMat& Q) const;
    /// True when all codebooks are entrywise identical.
    bool codebooks_identical() const;
};

struct SolverOptions {
    int max_iters = 50000;
    double eps_abs = 1e-7;
    double eps_rel = 1e-6;
    double rho = 1.0;
    bool adaptive_rho = true;
    double over_relaxation = 1.6;
    int check_interval = 25;
    bool verbose = false;
};

enum class SolveStatus { Optimal, MaxIters, InfeasibleSuspect };

std::string to_string(SolveStatus s);

struct DualSolution {
    CVec lambda;  // length M
    CMat Q;       // Hermitian N x N; mean of the per-user Gram matrices
    std::vector<CMat> Qs;  // per-user Gram matrices, one per PSD block
    double objective = 0.0;  // Re<lambda, y>
    SolveStatus status = SolveStatus::MaxIters;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

ConicProblem assemble_dual_sdp(const MeasurementModel& model, const CVec& y);

/// [[Re H, -Im H], [Im H, Re H]]; shares H's spectrum with doubled
/// multiplicity.
RMat realify(const CMat& h);

/// Euclidean projection onto the PSD cone (eigenvalue clamp).
RMat psd_project(const RMat& s);
CMat psd_project_hermitian(const CMat& h);

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual DualSolution solve(const ConicProblem& problem, const SolverOptions& opts,
                               const DualSolution* warm_start) = 0;
    virtual std::string name() const = 0;
};

/// In-repo operator-splitting (ADMM) backend; the default.
std::unique_ptr<SolverBackend> make_admm_backend();

DualSolution solve(const ConicProblem& problem, const SolverOptions& opts,
                   const DualSolution* warm_start = nullptr);

json solution_to_json(const DualSolution& sol);
DualSolution solution_from_json(const json& j);
void save_solution(const DualSolution& sol, const std::string& path);
DualSolution load_solution(const std::string& path);

}  // namespace gb2d
