#include "gb2d/scenario.hpp"

#include <cassert>
#include <stdexcept>

#include "gb2d/rng.hpp"

namespace gb2d {

static void check_config(const GenConfig& cfg) {
    if (cfg.n_samples < 1) throw std::invalid_argument("gen: n_samples must be >= 1");
    if (cfg.user_count < 1) throw std::invalid_argument("gen: user_count must be >= 1");
    if (static_cast<int>(cfg.path_counts.size()) != cfg.user_count)
        throw std::invalid_argument("gen: path_counts length != user_count");
    if (static_cast<int>(cfg.message_sizes.size()) != cfg.user_count)
        throw std::invalid_argument("gen: message_sizes length != user_count");
    int p_max = 2;
    for (int p : cfg.path_counts) {
        if (p < 1) throw std::invalid_argument("gen: path count must be >= 1");
        p_max = std::max(p_max, p);
    }
    for (int m : cfg.message_sizes)
        if (m < 1) throw std::invalid_argument("gen: message size must be >= 1");
    const double sep = cfg.effective_min_separation();
    if (sep <= 0.0 || sep > 1.0 / p_max)
        throw std::invalid_argument("gen: min_separation outside (0, 1/max(P_k,2)]");
    if (cfg.sensing_mode == SensingMode::UniformSubsample &&
        (cfg.m_measurements < 1 || cfg.m_measurements > cfg.n_samples))
        throw std::invalid_argument("gen: subsample M must be in [1, N]");
}

// Draw order (fixed for reproducibility): delays (all users, rejection
// rounds draw the full set), then per user: codebook column-major, message,
// amplitudes.
Scenario generate_scenario(const GenConfig& cfg) {
    check_config(cfg);
    CounterRng rng(cfg.seed);
    const int n = cfg.n_samples;
    const int kk = cfg.user_count;
    const double sep = cfg.effective_min_separation();

    int total_paths = 0;
    for (int p : cfg.path_counts) total_paths += p;
    if (cfg.cross_user_separation && total_paths * sep >= 1.0)
        throw std::invalid_argument("gen: cross-user separation infeasible");

    // Rejection sampling: simple and exactly uniform on the separated set.
    std::vector<double> delays(total_paths);
    bool ok = false;
    for (long round = 0; round < 1000000 && !ok; ++round) {
        for (double& t : delays) t = rng.uniform();
        ok = true;
        if (cfg.cross_user_separation) {
            for (int i = 0; i < total_paths && ok; ++i)
                for (int j = i + 1; j < total_paths && ok; ++j)
                    if (wrap_distance(delays[i], delays[j]) < sep) ok = false;
        } else {
            int off = 0;
            for (int u = 0; u < kk && ok; ++u) {
                const int p = cfg.path_counts[u];
                for (int i = 0; i < p && ok; ++i)
                    for (int j = i + 1; j < p && ok; ++j)
                        if (wrap_distance(delays[off + i], delays[off + j]) < sep) ok = false;
                off += p;
            }
        }
    }
    if (!ok) throw std::runtime_error("gen: separation rejection sampling exhausted");

    Scenario s;
    s.n_samples = n;
    s.seed = cfg.seed;
    int off = 0;
    for (int u = 0; u < kk; ++u) {
        const int mk = cfg.message_sizes[u];
        Codebook cb;
        cb.user_index = u;
        cb.entries = CMat(n, mk);
        for (int j = 0; j < mk; ++j)
            for (int i = 0; i < n; ++i) cb.entries(i, j) = rng.gaussian();
        s.codebooks.push_back(std::move(cb));

        Message msg;
        msg.coords = CVec(mk);
        for (int i = 0; i < mk; ++i) msg.coords(i) = rng.complex_gaussian();
        if (cfg.message_mode == MessageMode::UnitSpherePositive) {
            for (int i = 0; i < mk; ++i) msg.coords(i) = std::abs(msg.coords(i));
            msg.positivity_convention = true;
        }
        const double nrm = msg.coords.norm();
        if (nrm == 0.0) throw std::runtime_error("gen: degenerate zero message draw");
        msg.coords /= nrm;
        s.messages.push_back(std::move(msg));

        ChannelSpec ch;
        for (int l = 0; l < cfg.path_counts[u]; ++l) {
            PathSpec p;
            p.tau = delays[off + l];
            if (cfg.amplitude_dist == AmplitudeDist::ComplexGaussian) {
                p.amplitude = rng.complex_gaussian();
                if (p.amplitude == cxd(0.0, 0.0)) p.amplitude = cxd(1.0, 0.0);
            } else {
                const double phi = 2.0 * M_PI * rng.uniform();
                p.amplitude = cxd(std::cos(phi), std::sin(phi));
            }
            ch.paths.push_back(p);
        }
        off += cfg.path_counts[u];
        s.channels.push_back(std::move(ch));
    }

    s.sensing = cfg.sensing_mode == SensingMode::Identity
                    ? SensingMatrix::make_identity(n)
                    : SensingMatrix::uniform_subsample(n, cfg.m_measurements);

    if (cfg.cross_user_separation) assert(s.min_separation() >= sep);
    return s;
}

CVec synthesize_measurements(const Scenario& s) {
    const auto rep = validate_scenario(s);
    if (!rep.ok()) throw std::invalid_argument("synthesize: invalid scenario: " + rep.violations.front());
    const int n = s.n_samples;
    CVec v = CVec::Zero(n);
    for (int k = 0; k < s.user_count(); ++k) {
        const CVec sk = s.codebooks[k].entries.conjugate() * s.messages[k].coords;
        for (const auto& p : s.channels[k].paths) {
            const CVec a = steering_vector(p.tau, n);
            v += p.amplitude * a.cwiseProduct(sk);
        }
    }
    if (s.sensing.identity) return v;
    return s.sensing.entries * v;
}

}  // namespace gb2d
