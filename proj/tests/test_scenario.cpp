#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gb2d/operators.hpp"
#include "gb2d/rng.hpp"
#include "gb2d/scenario.hpp"
#include "gb2d/serialize.hpp"

using namespace gb2d;
using doctest::Approx;

TEST_CASE("generate_scenario matches the multi-user setup") {
    GenConfig cfg;
    cfg.n_samples = 200;
    cfg.user_count = 4;
    cfg.path_counts = {3, 3, 3, 3};
    cfg.message_sizes = {5, 5, 5, 5};
    cfg.seed = 7;
    const Scenario s = generate_scenario(cfg);
    CHECK(s.n_samples == 200);
    CHECK(s.user_count() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(s.channels[k].path_count() == 3);
        CHECK(s.codebooks[k].message_size() == 5);
        CHECK(s.messages[k].coords.norm() == Approx(1.0).epsilon(1e-13));
        // codebooks are real N(0,1)
        CHECK(s.codebooks[k].entries.imag().norm() == 0.0);
    }
    CHECK(validate_scenario(s).ok());
    CHECK(s.min_separation() >= 1.0 / 200);
}

TEST_CASE("generate_scenario subsampled sensing setup") {
    GenConfig cfg;
    cfg.n_samples = 128;
    cfg.user_count = 2;
    cfg.path_counts = {2, 2};
    cfg.message_sizes = {16, 16};
    cfg.sensing_mode = SensingMode::UniformSubsample;
    cfg.m_measurements = 64;
    cfg.seed = 3;
    const Scenario s = generate_scenario(cfg);
    CHECK(s.m_measurements() == 64);
    CHECK_FALSE(s.sensing.identity);
    // each sensing row is a distinct row of I_N
    for (int i = 0; i < 64; ++i) {
        CHECK(s.sensing.entries.row(i).norm() == 1.0);
        CHECK(s.sensing.entries.row(i).cwiseAbs().maxCoeff() == 1.0);
    }
}

TEST_CASE("same seed gives bit-identical scenarios") {
    GenConfig cfg;
    cfg.n_samples = 32;
    cfg.user_count = 2;
    cfg.path_counts = {2, 1};
    cfg.message_sizes = {3, 2};
    cfg.seed = 99;
    const Scenario a = generate_scenario(cfg);
    const Scenario b = generate_scenario(cfg);
    CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());

    cfg.seed = 100;
    const Scenario c = generate_scenario(cfg);
    CHECK(scenario_to_json(a).dump() != scenario_to_json(c).dump());
}

TEST_CASE("positive message mode yields nonnegative real unit vectors") {
    GenConfig cfg;
    cfg.n_samples = 32;
    cfg.user_count = 2;
    cfg.path_counts = {2, 2};
    cfg.message_sizes = {4, 4};
    cfg.message_mode = MessageMode::UnitSpherePositive;
    cfg.seed = 17;
    const Scenario s = generate_scenario(cfg);
    for (const auto& m : s.messages) {
        CHECK(m.positivity_convention);
        CHECK(m.coords.norm() == Approx(1.0).epsilon(1e-13));
        for (int i = 0; i < m.coords.size(); ++i) {
            CHECK(m.coords(i).real() >= 0.0);
            CHECK(m.coords(i).imag() == 0.0);
        }
    }
}

TEST_CASE("generated separation honors the configured minimum") {
    CounterRng rng(4242);
    for (int t = 0; t < 30; ++t) {
        GenConfig cfg;
        cfg.n_samples = 16 + static_cast<int>(rng.next_u64() % 48);
        cfg.user_count = 1 + static_cast<int>(rng.next_u64() % 3);
        for (int u = 0; u < cfg.user_count; ++u) {
            cfg.path_counts.push_back(1 + static_cast<int>(rng.next_u64() % 3));
            cfg.message_sizes.push_back(1 + static_cast<int>(rng.next_u64() % 4));
        }
        cfg.seed = rng.next_u64();
        const Scenario s = generate_scenario(cfg);
        CHECK(s.min_separation() >= cfg.effective_min_separation());
    }
}

TEST_CASE("per-user-only separation switch") {
    GenConfig cfg;
    cfg.n_samples = 16;
    cfg.user_count = 4;
    cfg.path_counts = {3, 3, 3, 3};
    cfg.message_sizes = {1, 1, 1, 1};
    cfg.cross_user_separation = false;
    cfg.seed = 5;
    const Scenario s = generate_scenario(cfg);
    for (const auto& ch : s.channels)
        for (int i = 0; i < ch.path_count(); ++i)
            for (int j = i + 1; j < ch.path_count(); ++j)
                CHECK(wrap_distance(ch.paths[i].tau, ch.paths[j].tau) >= 1.0 / 16);
}

TEST_CASE("infeasible generation config is rejected") {
    GenConfig cfg;
    cfg.n_samples = 4;
    cfg.user_count = 1;
    cfg.path_counts = {5};
    cfg.message_sizes = {1};
    cfg.min_separation = 0.25;  // 5 paths cannot be 1/4 apart on the circle
    CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
}

TEST_CASE("synthesize_measurements hand evaluation") {
    Scenario s;
    s.n_samples = 2;
    Codebook cb;
    cb.entries = CMat::Ones(2, 1);
    s.codebooks.push_back(cb);
    s.channels.push_back({{{0.0, cxd(1, 0)}}});
    Message m;
    m.coords = CVec::Ones(1);
    s.messages.push_back(m);
    s.sensing = SensingMatrix::make_identity(2);
    const CVec y = synthesize_measurements(s);
    CHECK(std::abs(y(0) - cxd(1, 0)) < 1e-15);
    CHECK(std::abs(y(1) - cxd(1, 0)) < 1e-15);
}

TEST_CASE("synthesis is linear in each user's amplitudes") {
    GenConfig cfg;
    cfg.n_samples = 24;
    cfg.user_count = 2;
    cfg.path_counts = {2, 2};
    cfg.message_sizes = {3, 3};
    cfg.seed = 31;
    Scenario s = generate_scenario(cfg);
    const CVec base = synthesize_measurements(s);

    Scenario only_user0 = s;
    for (auto& p : only_user0.channels[1].paths) p.amplitude *= 1e-30;
    const CVec u0 = synthesize_measurements(only_user0);

    Scenario scaled = s;
    const cxd alpha(2.0, -1.0);
    for (auto& p : scaled.channels[0].paths) p.amplitude *= alpha;
    const CVec ys = synthesize_measurements(scaled);
    // scaling user 0 scales its contribution only
    const CVec expected = base + (alpha - 1.0) * u0;
    CHECK((ys - expected).norm() <= 1e-9 * expected.norm());
}

TEST_CASE("synthesize rejects an invalid scenario") {
    Scenario s;
    s.n_samples = 2;
    Codebook cb;
    cb.entries = CMat::Ones(2, 1);
    s.codebooks.push_back(cb);
    s.channels.push_back({{{0.0, cxd(0, 0)}}});  // zero amplitude forbidden
    Message m;
    m.coords = CVec::Ones(1);
    s.messages.push_back(m);
    s.sensing = SensingMatrix::make_identity(2);
    CHECK_THROWS_AS(synthesize_measurements(s), std::invalid_argument);
}

TEST_CASE("scenario JSON round trip is bit exact") {
    GenConfig cfg = gen_config_from_json(gen_config_to_json(GenConfig{}));
    cfg.n_samples = 40;
    cfg.user_count = 2;
    cfg.path_counts = {2, 1};
    cfg.message_sizes = {3, 2};
    cfg.sensing_mode = SensingMode::UniformSubsample;
    cfg.m_measurements = 20;
    cfg.seed = 77;
    const Scenario s = generate_scenario(cfg);
    const std::string path = "roundtrip_scenario.json";
    save_scenario(s, path);
    auto [loaded, rep] = load_scenario(path);
    CHECK(rep.ok());
    CHECK(scenario_to_json(loaded).dump() == scenario_to_json(s).dump());
    CHECK(loaded.codebooks[0].entries == s.codebooks[0].entries);
    CHECK(loaded.channels[1].paths[0].tau == s.channels[1].paths[0].tau);
    std::remove(path.c_str());
}

TEST_CASE("truncated scenario file reports a parse error") {
    const std::string path = "truncated_scenario.json";
    {
        std::ofstream f(path);
        f << "{\"n_samples\": 8, \"users\": [";
    }
    CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("parse error"),
                         std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("file with sub-1/N separation loads with a warning") {
    Scenario s;
    s.n_samples = 64;
    Codebook cb;
    cb.entries = CMat::Ones(64, 1);
    s.codebooks.push_back(cb);
    s.channels.push_back({{{0.5, cxd(1, 0)}, {0.5 + 0.4 / 64, cxd(1, 0)}}});
    Message m;
    m.coords = CVec::Ones(1);
    s.messages.push_back(m);
    s.sensing = SensingMatrix::make_identity(64);
    const std::string path = "close_delays.json";
    save_scenario(s, path);
    auto [loaded, rep] = load_scenario(path);
    CHECK(rep.ok());
    CHECK(rep.warnings.size() == 1);
    std::remove(path.c_str());
}
