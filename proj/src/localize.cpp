#include "gb2d/localize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gb2d {

DualPolynomialSet DualPolynomialSet::from_solution(const DualSolution& sol,
                                                   const MeasurementModel& model) {
    DualPolynomialSet p;
    p.blocks = adjoint(sol.lambda, model).blocks;
    return p;
}

CVec eval_dual_poly(const CMat& g, double tau) {
    return g * steering_vector_conj(tau, static_cast<int>(g.cols()));
}

double dual_poly_norm(const CMat& g, double tau) { return eval_dual_poly(g, tau).norm(); }

void dual_poly_norm_sq_derivs(const CMat& g, double tau, double& f, double& fp, double& fpp) {
    const int n = static_cast<int>(g.cols());
    const CVec a = steering_vector_conj(tau, n);
    CVec da(n), dda(n);
    for (int i = 0; i < n; ++i) {
        const double om = 2.0 * M_PI * i;
        da(i) = cxd(0.0, om) * a(i);
        dda(i) = -om * om * a(i);
    }
    const CVec q = g * a;
    const CVec qp = g * da;
    const CVec qpp = g * dda;
    f = q.squaredNorm();
    fp = 2.0 * std::real(q.dot(qp));
    fpp = 2.0 * (qp.squaredNorm() + std::real(q.dot(qpp)));
}

namespace serial {
RVec scan_norm_curve(const CMat& g, int grid_size) {
    RVec out(grid_size);
    for (int i = 0; i < grid_size; ++i)
        out(i) = dual_poly_norm(g, static_cast<double>(i) / grid_size);
    return out;
}
}  // namespace serial

RVec scan_norm_curve(const CMat& g, int grid_size) {
    RVec out(grid_size);
#ifdef GB2D_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < grid_size; ++i)
        out(i) = dual_poly_norm(g, static_cast<double>(i) / grid_size);
    return out;
}

namespace {

double golden_section_max(const CMat& g, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    auto val = [&](double t) {
        double tt = t - std::floor(t);
        return dual_poly_norm(g, tt);
    };
    double fc = val(c), fd = val(d);
    for (int i = 0; i < 80 && (b - a) > 1e-14; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = val(d);
        }
    }
    return 0.5 * (a + b);
}

double wrap01(double t) {
    t = t - std::floor(t);
    return t >= 1.0 ? 0.0 : t;
}

}  // namespace

double refine_peak(const CMat& g, double tau0, double cell_half_width) {
    const double lo = tau0 - cell_half_width;
    const double hi = tau0 + cell_half_width;
    double t = tau0;
    double f0, fp, fpp;
    dual_poly_norm_sq_derivs(g, wrap01(tau0), f0, fp, fpp);
    bool fell_back = false;
    for (int i = 0; i < 20; ++i) {
        double f;
        dual_poly_norm_sq_derivs(g, wrap01(t), f, fp, fpp);
        if (std::abs(fp) < 1e-12) break;
        if (fpp >= 0.0) {  // not locally concave; Newton would walk uphill on f'
            fell_back = true;
            break;
        }
        const double step = fp / fpp;
        const double t_next = t - step;
        if (t_next < lo || t_next > hi) {
            fell_back = true;
            break;
        }
        t = t_next;
    }
    if (fell_back) t = golden_section_max(g, lo, hi);
    // never report a worse point than the grid candidate
    double ft = dual_poly_norm(g, wrap01(t));
    if (ft * ft < f0) t = tau0;
    return wrap01(t);
}

std::vector<DelayPeak> scan_peaks(const CMat& g, int n_samples, const LocalizeOptions& opts) {
    const int grid = std::max(4, opts.grid_factor) * n_samples;
    if (grid < 4 * n_samples) throw std::invalid_argument("scan_peaks: grid too coarse");
    const double merge_radius =
        opts.merge_radius > 0.0 ? opts.merge_radius : 0.5 / n_samples;

    const RVec curve = scan_norm_curve(g, grid);
    // A sharp peak can sag below the threshold at the nearest grid point
    // (second-order sag is bounded by (pi*N/grid)^2/2), so pre-filter with a
    // margin and apply the real threshold to the refined peak value.
    const double sag = 2.0 * std::pow(M_PI * n_samples / grid, 2);
    const double pre_threshold = opts.threshold - std::max(sag, 0.02);
    std::vector<DelayPeak> cands;
    for (int i = 0; i < grid; ++i) {
        const double prev = curve((i + grid - 1) % grid);
        const double next = curve((i + 1) % grid);
        if (curve(i) >= prev && curve(i) > next && curve(i) >= pre_threshold) {
            const double tau0 = static_cast<double>(i) / grid;
            const double tau = refine_peak(g, tau0, 1.0 / grid);
            const double val = dual_poly_norm(g, tau);
            if (val >= opts.threshold) cands.push_back({tau, val});
        }
    }
    // merge duplicates: keep the larger peak within merge_radius
    std::sort(cands.begin(), cands.end(),
              [](const DelayPeak& a, const DelayPeak& b) { return a.peak_value > b.peak_value; });
    std::vector<DelayPeak> kept;
    for (const auto& c : cands) {
        bool dup = false;
        for (const auto& k : kept)
            if (wrap_distance(c.tau, k.tau) <= merge_radius) dup = true;
        if (!dup) kept.push_back(c);
    }
    if (opts.expected_count > 0 && static_cast<int>(kept.size()) > opts.expected_count)
        kept.resize(opts.expected_count);
    std::sort(kept.begin(), kept.end(),
              [](const DelayPeak& a, const DelayPeak& b) { return a.tau < b.tau; });
    return kept;
}

DelayEstimates localize_delays(const DualPolynomialSet& polys, int n_samples,
                               const LocalizeOptions& opts) {
    DelayEstimates est;
    for (const auto& g : polys.blocks) est.per_user.push_back(scan_peaks(g, n_samples, opts));
    return est;
}

void write_curve_csv(const std::string& path, const DualPolynomialSet& polys, int n_samples,
                     int grid_size) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    const int kk = static_cast<int>(polys.blocks.size());
    f << "t";
    for (int k = 1; k <= kk; ++k) f << ",D" << k;
    f << "\n";
    std::vector<RVec> curves;
    for (const auto& g : polys.blocks) curves.push_back(scan_norm_curve(g, grid_size));
    char buf[64];
    for (int i = 0; i < grid_size; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(i) / grid_size);
        f << buf;
        for (int k = 0; k < kk; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", curves[k](i));
            f << ',' << buf;
        }
        f << "\n";
    }
}

void write_support_csv(const std::string& path, const Scenario& truth,
                       const DelayEstimates& est) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "user,kind,tau,value\n";
    char buf[64];
    for (int k = 0; k < truth.user_count(); ++k) {
        for (const auto& p : truth.channels[k].paths) {
            std::snprintf(buf, sizeof buf, "%.17g", p.tau);
            f << (k + 1) << ",true," << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", std::abs(p.amplitude));
            f << buf << "\n";
        }
        if (k < static_cast<int>(est.per_user.size())) {
            for (const auto& p : est.per_user[k]) {
                std::snprintf(buf, sizeof buf, "%.17g", p.tau);
                f << (k + 1) << ",estimated," << buf << ',';
                std::snprintf(buf, sizeof buf, "%.17g", p.peak_value);
                f << buf << "\n";
            }
        }
    }
}

}  // namespace gb2d
