#include "gb2d/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gb2d {

int ConicProblem::block_count() const {
    if (collapse_common_codebook && codebooks_identical()) return 1;
    return model.user_count();
}

int ConicProblem::block_dim(int k) const {
    return n() + model.codebooks[k].message_size();
}

bool ConicProblem::codebooks_identical() const {
    for (int k = 1; k < model.user_count(); ++k) {
        if (model.codebooks[k].entries.rows() != model.codebooks[0].entries.rows() ||
            model.codebooks[k].entries.cols() != model.codebooks[0].entries.cols() ||
            model.codebooks[k].entries != model.codebooks[0].entries)
            return false;
    }
    return true;
}

CMat ConicProblem::assemble_block(int k, const CVec& lambda, const CMat& Q) const {
    const int nn = n();
    const int mk = model.codebooks[k].message_size();
    const CVec lt = model.sensing.identity
                        ? CVec(lambda)
                        : CVec(model.sensing.entries.adjoint() * lambda);
    CMat h(nn + mk, nn + mk);
    h.topLeftCorner(nn, nn) = Q;
    // G_k = ((B* lambda)_k)^H: row n is conj(lt_n) * conj(c_n^k)
    CMat g = lt.conjugate().asDiagonal() * model.codebooks[k].entries.conjugate();
    h.topRightCorner(nn, mk) = g;
    h.bottomLeftCorner(mk, nn) = g.adjoint();
    h.bottomRightCorner(mk, mk) = CMat::Identity(mk, mk);
    return h;
}

ConicProblem assemble_dual_sdp(const MeasurementModel& model, const CVec& y) {
    if (y.size() != model.m_measurements())
        throw std::invalid_argument("assemble_dual_sdp: y length != M");
    ConicProblem p;
    p.model = model;
    p.y = y;
    return p;
}

RMat realify(const CMat& h) {
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::domain_error("realify: input not Hermitian");
    const Eigen::Index n = h.rows();
    RMat r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = h.real();
    r.topRightCorner(n, n) = -h.imag();
    r.bottomLeftCorner(n, n) = h.imag();
    r.bottomRightCorner(n, n) = h.real();
    return r;
}

RMat psd_project(const RMat& s) {
    const RMat sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> eig(sym);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_project: eigendecomposition failed (dim " +
                                 std::to_string(s.rows()) + ")");
    RVec d = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

CMat psd_project_hermitian(const CMat& h) {
    const CMat herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(herm);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_project: eigendecomposition failed (dim " +
                                 std::to_string(h.rows()) + ")");
    RVec d = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().adjoint();
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::InfeasibleSuspect: return "infeasible_suspect";
    }
    return "unknown";
}

namespace {

/// Projection onto {Hermitian Q : trace(Q) = 1, off-diagonal sums = 0}.
/// The diagonal-sum constraints are orthogonal across offsets, so the
/// projection shifts each diagonal by a constant.
CMat project_toeplitz_constraints(const CMat& x) {
    const int n = static_cast<int>(x.rows());
    CMat q = 0.5 * (x + x.adjoint());
    const cxd tr = q.trace();
    const cxd shift0 = (tr - 1.0) / static_cast<double>(n);
    for (int i = 0; i < n; ++i) q(i, i) -= shift0;
    for (int off = 1; off < n; ++off) {
        cxd s{0.0, 0.0};
        const int len = n - off;
        for (int i = 0; i < len; ++i) s += q(i, i + off);
        const cxd shift = s / static_cast<double>(len);
        for (int i = 0; i < len; ++i) {
            q(i, i + off) -= shift;
            q(i + off, i) -= std::conj(shift);
        }
    }
    return q;
}

class AdmmBackend final : public SolverBackend {
public:
    std::string name() const override { return "admm"; }

    DualSolution solve(const ConicProblem& prob, const SolverOptions& opts,
                       const DualSolution* warm) override {
        if (opts.eps_abs <= 0.0 || opts.eps_rel <= 0.0)
            throw std::invalid_argument("solver: tolerances must be positive");
        if (opts.over_relaxation < 1.0 || opts.over_relaxation >= 2.0)
            throw std::invalid_argument("solver: over_relaxation must be in [1, 2)");

        const int n = prob.n();
        const int m = prob.m();
        const int nblocks = prob.block_count();
        const double alpha = opts.over_relaxation;
        double rho = opts.rho;

        // w_n = sum over blocks of |c_n|^2; the lambda step reduces to the
        // normal equations (D W D^H) lambda = D conj(gamma) + y/(2 rho).
        RVec w = RVec::Zero(n);
        for (int k = 0; k < nblocks; ++k)
            w += prob.model.codebooks[k].entries.rowwise().squaredNorm();
        const bool identity_d = prob.model.sensing.identity;
        Eigen::LDLT<CMat> lambda_solver;
        CVec w_inv;
        if (identity_d) {
            w_inv = CVec(n);
            for (int i = 0; i < n; ++i) {
                if (w(i) <= 0.0) throw std::runtime_error("solver: zero codebook row weight");
                w_inv(i) = 1.0 / w(i);
            }
        } else {
            const CMat& d = prob.model.sensing.entries;
            CMat normal = d * w.cast<cxd>().asDiagonal() * d.adjoint();
            normal += (1e-13 * std::real(normal.trace()) / m) * CMat::Identity(m, m);
            lambda_solver.compute(normal);
            if (lambda_solver.info() != Eigen::Success)
                throw std::runtime_error("solver: lambda normal equations not factorizable");
        }

        CVec lambda = CVec::Zero(m);
        std::vector<CMat> q(nblocks, CMat::Identity(n, n) / static_cast<double>(n));
        if (warm && warm->lambda.size() == m && warm->Q.rows() == n) {
            lambda = warm->lambda;
            for (int k = 0; k < nblocks; ++k) {
                const CMat& src = static_cast<int>(warm->Qs.size()) == nblocks
                                      ? warm->Qs[k]
                                      : warm->Q;
                q[k] = project_toeplitz_constraints(src);
            }
        }

        std::vector<CMat> s(nblocks), u(nblocks), h(nblocks);
        double total_dim = 0.0;
        for (int k = 0; k < nblocks; ++k) {
            h[k] = prob.assemble_block(k, lambda, q[k]);
            s[k] = psd_project_hermitian(h[k]);
            u[k] = CMat::Zero(h[k].rows(), h[k].cols());
            total_dim += 2.0 * h[k].size();
        }
        const double sqrt_dim = std::sqrt(total_dim);

        DualSolution out;
        out.status = SolveStatus::MaxIters;
        double prev_obj = 0.0;
        double initial_r = -1.0;
        int it = 0;
        for (it = 1; it <= opts.max_iters; ++it) {
            // (lambda, Q_k)-step
            CVec gamma = CVec::Zero(n);
            for (int k = 0; k < nblocks; ++k) {
                const CMat a = s[k] - u[k];
                q[k] = project_toeplitz_constraints(a.topLeftCorner(n, n));
                const int mk = prob.model.codebooks[k].message_size();
                gamma += (a.topRightCorner(n, mk).cwiseProduct(prob.model.codebooks[k].entries))
                             .rowwise()
                             .sum();
            }
            if (identity_d) {
                lambda = (gamma.conjugate() + prob.y / (2.0 * rho)).cwiseProduct(w_inv);
            } else {
                const CVec rhs =
                    prob.model.sensing.entries * gamma.conjugate() + prob.y / (2.0 * rho);
                lambda = lambda_solver.solve(rhs);
            }

            // S and U steps with over-relaxation
            double r_sq = 0.0, s_sq = 0.0;
#ifdef GB2D_HAVE_OPENMP
#pragma omp parallel for reduction(+ : r_sq, s_sq) schedule(static) if (nblocks > 1)
#endif
            for (int k = 0; k < nblocks; ++k) {
                h[k] = prob.assemble_block(k, lambda, q[k]);
                const CMat h_relaxed = alpha * h[k] + (1.0 - alpha) * s[k];
                const CMat s_new = psd_project_hermitian(h_relaxed + u[k]);
                s_sq += (s_new - s[k]).squaredNorm();
                u[k] += h_relaxed - s_new;
                s[k] = s_new;
                r_sq += (h[k] - s[k]).squaredNorm();
            }
            const double r_norm = std::sqrt(2.0 * r_sq);  // real embedding doubles Frobenius^2
            const double s_norm = rho * std::sqrt(2.0 * s_sq);
            if (initial_r < 0.0) initial_r = std::max(r_norm, 1.0);

            if (it % opts.check_interval != 0 && it != opts.max_iters) continue;

            double h_nrm = 0.0, s_nrm = 0.0, u_nrm = 0.0;
            for (int k = 0; k < nblocks; ++k) {
                h_nrm += h[k].squaredNorm();
                s_nrm += s[k].squaredNorm();
                u_nrm += u[k].squaredNorm();
            }
            const double eps_pri = sqrt_dim * opts.eps_abs +
                                   opts.eps_rel * std::sqrt(2.0 * std::max(h_nrm, s_nrm));
            const double eps_dua =
                sqrt_dim * opts.eps_abs + opts.eps_rel * rho * std::sqrt(2.0 * u_nrm);

            const double obj = std::real(prob.y.dot(lambda));
            out.primal_residual = r_norm;
            out.dual_residual = s_norm;
            if (opts.verbose && it % (opts.check_interval * 40) == 0)
                std::fprintf(stderr, "  admm it=%6d r=%.3e s=%.3e rho=%.2e obj=%.8f\n", it,
                             r_norm, s_norm, rho, obj);

            if (r_norm <= eps_pri && s_norm <= eps_dua) {
                // status=optimal additionally demands near-PSD iterate blocks
                // and a stationary objective.
                double min_eig = 0.0;
                for (int k = 0; k < nblocks; ++k) {
                    Eigen::SelfAdjointEigenSolver<CMat> eig(h[k], Eigen::EigenvaluesOnly);
                    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
                }
                const double obj_scale = std::max(std::abs(obj), 1.0);
                if (min_eig >= -opts.eps_abs &&
                    std::abs(obj - prev_obj) <= opts.eps_rel * obj_scale) {
                    out.status = SolveStatus::Optimal;
                    break;
                }
            }
            prev_obj = obj;

            if (it % 100 < opts.check_interval) {
                if (!std::isfinite(r_norm) || r_norm > 1e8 * initial_r) {
                    out.status = SolveStatus::InfeasibleSuspect;
                    break;
                }
                if (opts.adaptive_rho) {
                    if (r_norm > 10.0 * s_norm && rho < 1e4) {
                        rho *= 2.0;
                        for (auto& uk : u) uk *= 0.5;
                    } else if (s_norm > 10.0 * r_norm && rho > 1e-4) {
                        rho *= 0.5;
                        for (auto& uk : u) uk *= 2.0;
                    }
                }
            }
        }

        out.lambda = lambda;
        out.Qs.resize(nblocks);
        CMat q_mean = CMat::Zero(n, n);
        for (int k = 0; k < nblocks; ++k) {
            out.Qs[k] = 0.5 * (q[k] + q[k].adjoint());
            q_mean += out.Qs[k];
        }
        out.Q = q_mean / static_cast<double>(nblocks);
        out.objective = std::real(prob.y.dot(lambda));
        out.iterations = std::min(it, opts.max_iters);
        return out;
    }
};

}  // namespace

std::unique_ptr<SolverBackend> make_admm_backend() { return std::make_unique<AdmmBackend>(); }

DualSolution solve(const ConicProblem& problem, const SolverOptions& opts,
                   const DualSolution* warm_start) {
    return make_admm_backend()->solve(problem, opts, warm_start);
}

json solution_to_json(const DualSolution& sol) {
    json j;
    j["lambda"] = vector_to_json(sol.lambda);
    j["Q"] = matrix_to_json(sol.Q);
    j["Q_blocks"] = json::array();
    for (const auto& qk : sol.Qs) j["Q_blocks"].push_back(matrix_to_json(qk));
    j["objective"] = sol.objective;
    j["status"] = to_string(sol.status);
    j["residuals"] = {{"primal", sol.primal_residual}, {"dual", sol.dual_residual}};
    j["iterations"] = sol.iterations;
    return j;
}

DualSolution solution_from_json(const json& j) {
    DualSolution sol;
    sol.lambda = vector_from_json(j.at("lambda"), "lambda");
    sol.Q = matrix_from_json(j.at("Q"), "Q");
    if (j.contains("Q_blocks"))
        for (const auto& qk : j.at("Q_blocks"))
            sol.Qs.push_back(matrix_from_json(qk, "Q_blocks"));
    sol.objective = j.at("objective").get<double>();
    const std::string st = j.at("status").get<std::string>();
    if (st == "optimal")
        sol.status = SolveStatus::Optimal;
    else if (st == "max_iters")
        sol.status = SolveStatus::MaxIters;
    else
        sol.status = SolveStatus::InfeasibleSuspect;
    sol.primal_residual = j.at("residuals").at("primal").get<double>();
    sol.dual_residual = j.at("residuals").at("dual").get<double>();
    sol.iterations = j.at("iterations").get<int>();
    return sol;
}

void save_solution(const DualSolution& sol, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << solution_to_json(sol).dump(2) << '\n';
}

DualSolution load_solution(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    f >> j;
    return solution_from_json(j);
}

}  // namespace gb2d
