// Compares the OpenMP grid-scan kernel against the serial reference and
// times the PSD projection used by the solver inner loop.

#include <chrono>
#include <cstdio>

#include "gb2d/localize.hpp"
#include "gb2d/rng.hpp"
#include "gb2d/sdp.hpp"

using namespace gb2d;

namespace {

double now_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

CMat random_coeffs(int mk, int n, std::uint64_t seed) {
    CounterRng rng(seed);
    CMat g(mk, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < mk; ++i) g(i, j) = rng.complex_gaussian();
    return g;
}

}  // namespace

int main() {
    for (int n : {64, 128, 256}) {
        const CMat g = random_coeffs(8, n, 42);
        const int grid = 16 * n;

        auto t0 = std::chrono::steady_clock::now();
        RVec serial_curve;
        for (int r = 0; r < 20; ++r) serial_curve = serial::scan_norm_curve(g, grid);
        const double t_serial = now_ms(t0) / 20.0;

        t0 = std::chrono::steady_clock::now();
        RVec par_curve;
        for (int r = 0; r < 20; ++r) par_curve = scan_norm_curve(g, grid);
        const double t_par = now_ms(t0) / 20.0;

        const double diff = (serial_curve - par_curve).cwiseAbs().maxCoeff();
        std::printf("scan_norm_curve N=%3d grid=%5d serial=%8.3f ms parallel=%8.3f ms "
                    "speedup=%.2fx max_diff=%.2e\n",
                    n, grid, t_serial, t_par, t_serial / t_par, diff);
    }

    for (int dim : {32, 69, 128}) {
        CounterRng rng(7);
        CMat h(dim, dim);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) h(i, j) = rng.complex_gaussian();
        h = 0.5 * (h + CMat(h.adjoint()));
        auto t0 = std::chrono::steady_clock::now();
        CMat p;
        for (int r = 0; r < 50; ++r) p = psd_project_hermitian(h);
        std::printf("psd_project_hermitian dim=%3d %8.3f ms\n", dim, now_ms(t0) / 50.0);
    }
    return 0;
}
