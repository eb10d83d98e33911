#pragma once

#include "gb2d/core.hpp"

namespace gb2d {

/// Everything the measurement operator B = D.C needs: codebooks plus the
/// sensing filter. Independent of any particular ground truth.
struct MeasurementModel {
    int n_samples = 0;
    std::vector<Codebook> codebooks;
    SensingMatrix sensing;

    int user_count() const { return static_cast<int>(codebooks.size()); }
    int m_measurements() const { return sensing.rows(); }
    static MeasurementModel from_scenario(const Scenario& s);
};

/// X_k = sum_l g_l x_k a(tau_l)^T, the lifted rank-constrained unknown.
MatrixTuple lift_ground_truth(const Scenario& s);

/// v_n = sum_k <X_k, c_n e_n^T> = sum_k c_n^H X_k[:,n] (conjugate-linear
/// inner product <A,B> = tr(B^H A)).
CVec apply_C(const MatrixTuple& x, const MeasurementModel& model);

/// y = D C(X).
CVec forward(const MatrixTuple& x, const MeasurementModel& model);

/// (B* lambda)_k: column n is lt_n c_n^k with lt = D^H lambda. Satisfies
/// <forward(X), lambda> = <X, adjoint(lambda)> to machine precision.
MatrixTuple adjoint(const CVec& lambda, const MeasurementModel& model);

/// sum_k tr(B_k^H A_k).
cxd tuple_inner(const MatrixTuple& a, const MatrixTuple& b);

}  // namespace gb2d
