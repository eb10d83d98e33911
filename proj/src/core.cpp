#include "gb2d/core.hpp"

#include <cmath>
#include <stdexcept>

namespace gb2d {

SensingMatrix SensingMatrix::make_identity(int n) {
    if (n < 1) throw std::invalid_argument("sensing: n must be >= 1");
    SensingMatrix d;
    d.entries = CMat::Identity(n, n);
    d.identity = true;
    return d;
}

SensingMatrix SensingMatrix::uniform_subsample(int n, int m) {
    if (m < 1 || m > n) throw std::invalid_argument("sensing: need 1 <= m <= n");
    SensingMatrix d;
    d.entries = CMat::Zero(m, n);
    for (int i = 0; i < m; ++i) {
        // rows of I_N at indices floor(i*N/M), i = 0..M-1
        const int idx = static_cast<int>((static_cast<long long>(i) * n) / m);
        d.entries(i, idx) = 1.0;
    }
    d.identity = (m == n);
    return d;
}

double Scenario::min_separation() const {
    std::vector<double> all;
    for (const auto& ch : channels)
        for (const auto& p : ch.paths) all.push_back(p.tau);
    double best = 1.0;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            best = std::min(best, wrap_distance(all[i], all[j]));
    return best;
}

double Scenario::amplitude_l1() const {
    double s = 0.0;
    for (const auto& ch : channels)
        for (const auto& p : ch.paths) s += std::abs(p.amplitude);
    return s;
}

double MatrixTuple::frobenius_norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return std::sqrt(s);
}

MatrixTuple MatrixTuple::zeros_like(const Scenario& s) {
    MatrixTuple t;
    for (const auto& cb : s.codebooks)
        t.blocks.push_back(CMat::Zero(cb.message_size(), s.n_samples));
    return t;
}

double wrap_distance(double a, double b) {
    double d = std::abs(a - b);
    d = d - std::floor(d);  // delays may come in un-normalized from arithmetic
    return std::min(d, 1.0 - d);
}

CVec steering_vector(double tau, int n) {
    if (n < 1) throw std::domain_error("steering_vector: n must be >= 1");
    if (tau < 0.0 || tau >= 1.0) throw std::domain_error("steering_vector: tau outside [0,1)");
    CVec a(n);
    for (int i = 0; i < n; ++i) {
        const double phase = -2.0 * M_PI * i * tau;
        a(i) = cxd(std::cos(phase), std::sin(phase));
    }
    return a;
}

CVec steering_vector_conj(double tau, int n) {
    if (n < 1) throw std::domain_error("steering_vector_conj: n must be >= 1");
    if (tau < 0.0 || tau >= 1.0) throw std::domain_error("steering_vector_conj: tau outside [0,1)");
    CVec a(n);
    for (int i = 0; i < n; ++i) {
        const double phase = 2.0 * M_PI * i * tau;
        a(i) = cxd(std::cos(phase), std::sin(phase));
    }
    return a;
}

CMat toeplitz_lift(const CVec& x) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw std::domain_error("toeplitz_lift: empty input");
    CMat t(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j >= i)
                t(i, j) = x(j - i);
            else
                t(i, j) = std::conj(x(i - j));
        }
    }
    return t;
}

cxd diag_sum(const CMat& Q, int q) {
    const int n = static_cast<int>(Q.rows());
    if (std::abs(q) >= n) throw std::domain_error("diag_sum: |q| must be < N");
    cxd s{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
        const int i = j + q;
        if (i >= 0 && i < n) s += Q(i, j);
    }
    return s;
}

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport rep;
    auto bad = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    const int n = s.n_samples;
    const int k = s.user_count();
    if (n < 1) bad("n_samples must be >= 1");
    if (k < 1) bad("at least one user required");
    if (static_cast<int>(s.channels.size()) != k) bad("channel list length != user count");
    if (static_cast<int>(s.messages.size()) != k) bad("message list length != user count");

    for (int u = 0; u < k; ++u) {
        const auto& cb = s.codebooks[u];
        const std::string who = "user " + std::to_string(u) + ": ";
        if (cb.n_samples() != n) bad(who + "codebook row count != n_samples");
        if (cb.message_size() < 1 || cb.message_size() > n)
            bad(who + "codebook column count outside [1, N]");
        if (!cb.entries.allFinite()) bad(who + "codebook has non-finite entries");

        if (u < static_cast<int>(s.channels.size())) {
            const auto& ch = s.channels[u];
            if (ch.path_count() < 1) bad(who + "channel needs at least one path");
            for (const auto& p : ch.paths) {
                if (p.tau < 0.0 || p.tau >= 1.0) bad(who + "delay outside [0,1)");
                if (p.amplitude == cxd(0.0, 0.0)) bad(who + "zero path amplitude");
            }
            for (int i = 0; i < ch.path_count(); ++i)
                for (int j = i + 1; j < ch.path_count(); ++j)
                    if (ch.paths[i].tau == ch.paths[j].tau)
                        bad(who + "duplicate delays within user");
        }
        if (u < static_cast<int>(s.messages.size())) {
            const auto& msg = s.messages[u];
            if (msg.coords.size() != cb.message_size())
                bad(who + "message length != codebook message size");
            else {
                const double nrm = msg.coords.norm();
                if (std::abs(nrm - 1.0) > 1e-12) bad(who + "message not unit norm");
                if (msg.positivity_convention) {
                    for (int i = 0; i < msg.coords.size(); ++i) {
                        if (msg.coords(i).real() < 0.0 || msg.coords(i).imag() != 0.0) {
                            bad(who + "positivity convention violated");
                            break;
                        }
                    }
                }
            }
        }
    }

    const auto& d = s.sensing;
    if (d.rows() < 1 || d.rows() > d.cols()) bad("sensing: need 1 <= M <= N");
    if (d.cols() != n) bad("sensing column count != n_samples");
    if (!d.entries.allFinite()) bad("sensing has non-finite entries");
    if (d.identity && (d.rows() != d.cols() || !d.entries.isIdentity(0.0)))
        bad("sensing identity flag disagrees with entries");

    if (rep.violations.empty() && n >= 1) {
        const double delta = s.min_separation();
        if (delta < 1.0 / n) {
            rep.warnings.push_back("minimum separation " + std::to_string(delta) +
                                   " below 1/N = " + std::to_string(1.0 / n) +
                                   "; uniqueness not guaranteed");
        }
    }
    return rep;
}

}  // namespace gb2d
