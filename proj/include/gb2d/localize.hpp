#pragma once

#include "gb2d/operators.hpp"
#include "gb2d/sdp.hpp"

namespace gb2d {

/// Coefficient matrices G_k = (B* lambda)_k of the vector-valued dual
/// polynomials q_k(tau) = G_k conj(a(tau)).
struct DualPolynomialSet {
    std::vector<CMat> blocks;  // M_k x N each

    static DualPolynomialSet from_solution(const DualSolution& sol,
                                           const MeasurementModel& model);
};

struct DelayPeak {
    double tau = 0.0;
    double peak_value = 0.0;  // ||q_k(tau)||_2
};

struct DelayEstimates {
    std::vector<std::vector<DelayPeak>> per_user;  // sorted by tau within user
};

struct LocalizeOptions {
    int grid_factor = 16;          // grid size = grid_factor * N
    double threshold = 1.0 - 1e-3;
    double merge_radius = 0.0;     // 0 means default 0.5/N
    int expected_count = 0;        // optional hint: keep top-P peaks
};

CVec eval_dual_poly(const CMat& g, double tau);
double dual_poly_norm(const CMat& g, double tau);
/// f(tau) = ||q(tau)||^2 with analytic first and second derivatives.
void dual_poly_norm_sq_derivs(const CMat& g, double tau, double& f, double& fp, double& fpp);

/// Norm curve ||q(tau)|| on a uniform grid of the given size.
RVec scan_norm_curve(const CMat& g, int grid_size);
namespace serial {
/// Reference single-thread version of scan_norm_curve (kept for testing the
/// parallel kernel and for the benchmark target).
RVec scan_norm_curve(const CMat& g, int grid_size);
}  // namespace serial

/// Grid-local maxima of ||q(tau)|| above threshold, Newton-refined and
/// de-duplicated within merge_radius.
std::vector<DelayPeak> scan_peaks(const CMat& g, int n_samples, const LocalizeOptions& opts);

/// Newton refinement of a grid-local maximum of ||q(tau)||^2 inside its grid
/// cell; falls back to golden-section when a step leaves the bracket.
double refine_peak(const CMat& g, double tau0, double cell_half_width);

DelayEstimates localize_delays(const DualPolynomialSet& polys, int n_samples,
                               const LocalizeOptions& opts);

/// Fig.-2-style CSV: columns t, D1..DK with ||q_k(t)||; plus a support file
/// listing true and estimated delays.
void write_curve_csv(const std::string& path, const DualPolynomialSet& polys, int n_samples,
                     int grid_size);
void write_support_csv(const std::string& path, const Scenario& truth,
                       const DelayEstimates& est);

}  // namespace gb2d
