#pragma once

#include "gb2d/core.hpp"

namespace gb2d {

enum class SensingMode { Identity, UniformSubsample };
enum class AmplitudeDist { ComplexGaussian, UnitModulusRandomPhase };
enum class MessageMode { UnitSphereComplex, UnitSpherePositive };

/// Recipe for deterministic random scenario generation.
struct GenConfig {
    int n_samples = 64;
    int user_count = 1;
    std::vector<int> path_counts;    // P_k per user
    std::vector<int> message_sizes;  // M_k per user
    SensingMode sensing_mode = SensingMode::Identity;
    int m_measurements = 0;  // used by UniformSubsample
    AmplitudeDist amplitude_dist = AmplitudeDist::ComplexGaussian;
    MessageMode message_mode = MessageMode::UnitSphereComplex;
    double min_separation = 0.0;  // 0 means default 1/N
    bool cross_user_separation = true;
    std::uint64_t seed = 1;

    double effective_min_separation() const {
        return min_separation > 0.0 ? min_separation : 1.0 / n_samples;
    }
};

/// Rejection-samples separated delays, draws real N(0,1) codebooks, unit
/// sphere messages and random amplitudes. Pure function of cfg (seed
/// included).
Scenario generate_scenario(const GenConfig& cfg);

/// y = D sum_k sum_l g a(tau) (.) conj(C_k) x_k, evaluated directly in the
/// Hadamard-product form (codebook rows enter conjugated, matching the
/// measurement map's inner product; real codebooks are unaffected).
CVec synthesize_measurements(const Scenario& s);

}  // namespace gb2d
