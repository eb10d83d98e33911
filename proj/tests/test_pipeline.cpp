#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gb2d/pipeline.hpp"
#include "gb2d/serialize.hpp"

using namespace gb2d;
using doctest::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("all presets resolve to valid generation configs") {
    for (const auto& name : preset_names()) {
        for (bool paper : {false, true}) {
            const GenConfig cfg = preset_config(name, paper);
            CHECK(cfg.user_count >= 1);
            CHECK(static_cast<int>(cfg.path_counts.size()) == cfg.user_count);
            CHECK(static_cast<int>(cfg.message_sizes.size()) == cfg.user_count);
            CHECK(cfg.n_samples >= 8);
        }
    }
    CHECK_THROWS_AS(preset_config("no-such-preset", true), std::invalid_argument);
}

TEST_CASE("preset shapes match the published setups") {
    const GenConfig fig2 = preset_config("fig2", true);
    CHECK(fig2.n_samples == 64);
    CHECK(fig2.user_count == 2);
    CHECK(fig2.path_counts == std::vector<int>{2, 1});
    CHECK(fig2.message_sizes == std::vector<int>{5, 5});

    const GenConfig fig3a = preset_config("fig3a", true);
    CHECK(fig3a.n_samples == 200);
    CHECK(fig3a.user_count == 4);

    const GenConfig fig3c = preset_config("fig3c", true);
    CHECK(fig3c.sensing_mode == SensingMode::UniformSubsample);
    CHECK(fig3c.m_measurements == fig3c.n_samples / 2);
    CHECK(fig3c.message_sizes == std::vector<int>{16, 16});

    const GenConfig fig4 = preset_config("fig4", true);
    CHECK(fig4.message_mode == MessageMode::UnitSpherePositive);
    CHECK(fig4.path_counts == std::vector<int>{5, 5});
    CHECK(fig4.message_sizes == std::vector<int>{4, 4});
}

TEST_CASE("tiny instance runs end to end") {
    GenConfig cfg;
    cfg.n_samples = 16;
    cfg.user_count = 1;
    cfg.path_counts = {1};
    cfg.message_sizes = {2};
    cfg.seed = 5;
    const Scenario s = generate_scenario(cfg);
    const PipelineOutcome out = run_pipeline(s, PipelineOptions{});
    CHECK(out.solution.status == SolveStatus::Optimal);
    CHECK(out.total_misses == 0);
    CHECK(out.total_false_alarms == 0);
    CHECK(out.max_delay_error <= 1e-6);
    CHECK(out.max_message_mse <= 1e-8);
    CHECK(out.certificate.certified);
    const json j = outcome_to_json(out, gen_config_to_json(cfg));
    CHECK(j.at("solver").at("status") == "optimal");
    CHECK(j.at("misses") == 0);
}

TEST_CASE("pipeline reruns are byte identical") {
    GenConfig cfg;
    cfg.n_samples = 12;
    cfg.user_count = 2;
    cfg.path_counts = {1, 1};
    cfg.message_sizes = {2, 1};
    cfg.seed = 9;

    auto run_once = [&](const std::string& tag) {
        const Scenario s = generate_scenario(cfg);
        const PipelineOutcome out = run_pipeline(s, PipelineOptions{});
        const auto model = MeasurementModel::from_scenario(s);
        const auto polys = DualPolynomialSet::from_solution(out.solution, model);
        write_curve_csv("curves_" + tag + ".csv", polys, s.n_samples, 8 * s.n_samples);
        write_support_csv("support_" + tag + ".csv", s, out.delays);
        write_polar_csv("polar_" + tag + ".csv", s, out.delays);
        return outcome_to_json(out, gen_config_to_json(cfg)).dump(2);
    };
    const std::string a = run_once("a");
    const std::string b = run_once("b");
    CHECK(a == b);
    CHECK(slurp("curves_a.csv") == slurp("curves_b.csv"));
    CHECK(slurp("support_a.csv") == slurp("support_b.csv"));
    CHECK(slurp("polar_a.csv") == slurp("polar_b.csv"));
    for (const char* t : {"a", "b"}) {
        std::remove(("curves_" + std::string(t) + ".csv").c_str());
        std::remove(("support_" + std::string(t) + ".csv").c_str());
        std::remove(("polar_" + std::string(t) + ".csv").c_str());
    }
}

TEST_CASE("polar CSV lists true and estimated delays on the unit circle") {
    GenConfig cfg;
    cfg.n_samples = 16;
    cfg.user_count = 1;
    cfg.path_counts = {2};
    cfg.message_sizes = {1};
    cfg.seed = 3;
    const Scenario s = generate_scenario(cfg);
    DelayEstimates est;
    est.per_user.push_back({{s.channels[0].paths[0].tau, 1.0}});
    write_polar_csv("polar_test.csv", s, est);
    std::ifstream f("polar_test.csv");
    std::string line;
    REQUIRE(std::getline(f, line));
    CHECK(line == "user,kind,tau,x,y");
    int true_rows = 0, est_rows = 0;
    while (std::getline(f, line)) {
        if (line.find(",true,") != std::string::npos) ++true_rows;
        if (line.find(",estimated,") != std::string::npos) ++est_rows;
        // x,y fall on the unit circle
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        std::getline(ls, cell, ',');
        double tau = std::stod(cell);
        std::getline(ls, cell, ',');
        double x = std::stod(cell);
        std::getline(ls, cell, ',');
        double y = std::stod(cell);
        CHECK(x == Approx(std::cos(2 * M_PI * tau)).epsilon(1e-12));
        CHECK(y == Approx(std::sin(2 * M_PI * tau)).epsilon(1e-12));
    }
    CHECK(true_rows == 2);
    CHECK(est_rows == 1);
    std::remove("polar_test.csv");
}

TEST_CASE("sweep produces one row per N and is deterministic") {
    GenConfig base;
    base.n_samples = 16;
    base.user_count = 1;
    base.path_counts = {1};
    base.message_sizes = {1};
    base.seed = 100;
    const std::vector<int> ns = {12, 16};
    const auto rows = run_sweep(base, ns, 2, PipelineOptions{});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n_samples == 12);
    CHECK(rows[1].n_samples == 16);
    for (const auto& r : rows) {
        CHECK(r.success_rate == 1.0);
        CHECK(r.mse_mean <= 1e-8);
        CHECK(r.mse_median <= 1e-8);
        CHECK(r.delay_err_mean <= 1e-6);
    }
    write_sweep_csv("sweep_a.csv", rows);
    write_sweep_csv("sweep_b.csv", run_sweep(base, ns, 2, PipelineOptions{}));
    const std::string a = slurp("sweep_a.csv");
    CHECK(a == slurp("sweep_b.csv"));
    CHECK(a.rfind("N,mse_mean,mse_median,success_rate,delay_err_mean\n", 0) == 0);
    std::remove("sweep_a.csv");
    std::remove("sweep_b.csv");
}

TEST_CASE("sweep input validation") {
    GenConfig base;
    base.n_samples = 16;
    base.user_count = 1;
    base.path_counts = {1};
    base.message_sizes = {1};
    CHECK_THROWS_AS(run_sweep(base, {16}, 2, PipelineOptions{}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(base, {12, 16}, 0, PipelineOptions{}), std::invalid_argument);
}
