#include <doctest.h>

#include "gb2d/operators.hpp"
#include "gb2d/rng.hpp"
#include "gb2d/scenario.hpp"

using namespace gb2d;
using doctest::Approx;

namespace {

MeasurementModel random_model(CounterRng& rng, int n, int k, int m_sensing) {
    MeasurementModel model;
    model.n_samples = n;
    for (int u = 0; u < k; ++u) {
        Codebook cb;
        cb.user_index = u;
        const int mk = 1 + static_cast<int>(rng.next_u64() % 4);
        cb.entries = CMat(n, mk);
        for (int j = 0; j < mk; ++j)
            for (int i = 0; i < n; ++i) cb.entries(i, j) = rng.complex_gaussian();
        model.codebooks.push_back(std::move(cb));
    }
    model.sensing = m_sensing == n ? SensingMatrix::make_identity(n)
                                   : SensingMatrix::uniform_subsample(n, m_sensing);
    if (m_sensing < n) {
        // dense complex sensing exercises the D^H path properly
        for (int i = 0; i < m_sensing; ++i)
            for (int j = 0; j < n; ++j) model.sensing.entries(i, j) = rng.complex_gaussian();
        model.sensing.identity = false;
    }
    return model;
}

MatrixTuple random_tuple(CounterRng& rng, const MeasurementModel& model) {
    MatrixTuple t;
    for (const auto& cb : model.codebooks) {
        CMat b(cb.message_size(), model.n_samples);
        for (int j = 0; j < b.cols(); ++j)
            for (int i = 0; i < b.rows(); ++i) b(i, j) = rng.complex_gaussian();
        t.blocks.push_back(std::move(b));
    }
    return t;
}

}  // namespace

TEST_CASE("lift_ground_truth simple cases") {
    Scenario s;
    s.n_samples = 3;
    Codebook cb;
    cb.entries = CMat::Ones(3, 1);
    s.codebooks.push_back(cb);
    s.channels.push_back({{{0.0, cxd(1, 0)}}});
    Message m;
    m.coords = CVec::Ones(1);
    s.messages.push_back(m);
    s.sensing = SensingMatrix::make_identity(3);

    const auto t = lift_ground_truth(s);
    REQUIRE(t.blocks.size() == 1);
    CHECK((t.blocks[0] - CMat::Ones(1, 3)).norm() == Approx(0.0));
}

TEST_CASE("lift_ground_truth hand outer product") {
    Scenario s;
    s.n_samples = 2;
    Codebook cb;
    cb.entries = CMat::Ones(2, 2);
    s.codebooks.push_back(cb);
    s.channels.push_back({{{0.5, cxd(2, 0)}}});
    Message m;
    m.coords = CVec(2);
    m.coords << 1.0, 0.0;
    s.messages.push_back(m);
    s.sensing = SensingMatrix::make_identity(2);

    const auto t = lift_ground_truth(s);
    CHECK(t.blocks[0](0, 0) == cxd(2, 0));
    CHECK(std::abs(t.blocks[0](0, 1) - cxd(-2, 0)) < 1e-14);
    CHECK(t.blocks[0](1, 0) == cxd(0, 0));
    CHECK(std::abs(t.blocks[0](1, 1)) < 1e-14);
}

TEST_CASE("two paths sharing a message give a rank-one block") {
    Scenario s;
    s.n_samples = 8;
    Codebook cb;
    cb.entries = CMat::Ones(8, 3);
    s.codebooks.push_back(cb);
    s.channels.push_back({{{0.1, cxd(1, 1)}, {0.6, cxd(-2, 0.5)}}});
    Message m;
    m.coords = CVec(3);
    m.coords << 0.6, 0.8, 0.0;
    s.messages.push_back(m);
    s.sensing = SensingMatrix::make_identity(8);

    const auto t = lift_ground_truth(s);
    Eigen::JacobiSVD<CMat> svd(t.blocks[0]);
    CHECK(svd.singularValues()(1) / svd.singularValues()(0) < 1e-14);
}

TEST_CASE("apply_C direct evaluations") {
    MeasurementModel model;
    model.n_samples = 2;
    Codebook cb;
    cb.entries = CMat::Ones(2, 1);
    model.codebooks.push_back(cb);
    model.sensing = SensingMatrix::make_identity(2);

    MatrixTuple x;
    x.blocks.push_back(CMat::Ones(1, 2));
    CVec v = apply_C(x, model);
    CHECK(std::abs(v(0) - cxd(1, 0)) < 1e-15);
    CHECK(std::abs(v(1) - cxd(1, 0)) < 1e-15);

    // conjugation convention: c_1 = j contributes conj(j) = -j
    model.codebooks[0].entries(0, 0) = cxd(0, 1);
    v = apply_C(x, model);
    CHECK(std::abs(v(0) - cxd(0, -1)) < 1e-15);
    CHECK(std::abs(v(1) - cxd(1, 0)) < 1e-15);

    MatrixTuple zero;
    zero.blocks.push_back(CMat::Zero(1, 2));
    CHECK(apply_C(zero, model).norm() == 0.0);

    MatrixTuple bad;
    bad.blocks.push_back(CMat::Zero(2, 2));
    CHECK_THROWS_AS(apply_C(bad, model), std::domain_error);
}

TEST_CASE("forward applies the sensing matrix") {
    MeasurementModel model;
    model.n_samples = 2;
    Codebook cb;
    cb.entries = CMat(2, 1);
    cb.entries << cxd(0, 1), cxd(1, 0);
    model.codebooks.push_back(cb);
    model.sensing = SensingMatrix::make_identity(2);

    MatrixTuple x;
    x.blocks.push_back(CMat::Ones(1, 2));
    const CVec with_identity = forward(x, model);
    CHECK((with_identity - apply_C(x, model)).norm() == 0.0);

    model.sensing.entries = CMat::Zero(1, 2);
    model.sensing.entries(0, 0) = 1.0;
    model.sensing.identity = false;
    const CVec y = forward(x, model);
    REQUIRE(y.size() == 1);
    CHECK(std::abs(y(0) - cxd(0, -1)) < 1e-15);
}

TEST_CASE("adjoint basic structure") {
    MeasurementModel model;
    model.n_samples = 3;
    Codebook cb;
    cb.entries = CMat(3, 2);
    cb.entries << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    model.codebooks.push_back(cb);
    model.sensing = SensingMatrix::make_identity(3);

    CHECK(adjoint(CVec::Zero(3), model).frobenius_norm() == 0.0);

    CVec e1 = CVec::Zero(3);
    e1(0) = 1.0;
    const auto t = adjoint(e1, model);
    CHECK(std::abs(t.blocks[0](0, 0) - cxd(1, 0)) < 1e-15);
    CHECK(std::abs(t.blocks[0](1, 0) - cxd(2, 0)) < 1e-15);
    CHECK(t.blocks[0].col(1).norm() == 0.0);
    CHECK(t.blocks[0].col(2).norm() == 0.0);

    CHECK_THROWS_AS(adjoint(CVec::Zero(2), model), std::domain_error);
}

TEST_CASE("adjoint identity over random shapes and seeds") {
    CounterRng rng(1234);
    for (int t = 0; t < 120; ++t) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 10);
        const int k = 1 + static_cast<int>(rng.next_u64() % 3);
        const int m = 1 + static_cast<int>(rng.next_u64() % n);
        const auto model = random_model(rng, n, k, m);
        const auto x = random_tuple(rng, model);
        CVec lambda(model.m_measurements());
        for (int i = 0; i < lambda.size(); ++i) lambda(i) = rng.complex_gaussian();

        const cxd lhs = lambda.dot(forward(x, model));  // <forward(X), lambda>
        const cxd rhs = tuple_inner(x, adjoint(lambda, model));
        const double scale = x.frobenius_norm() * lambda.norm();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(scale, 1.0));
    }
}

TEST_CASE("forward is linear") {
    CounterRng rng(77);
    const auto model = random_model(rng, 6, 2, 6);
    const auto x = random_tuple(rng, model);
    const auto y = random_tuple(rng, model);
    const cxd a = rng.complex_gaussian();
    const cxd b = rng.complex_gaussian();
    MatrixTuple combo;
    for (std::size_t i = 0; i < x.blocks.size(); ++i)
        combo.blocks.push_back(a * x.blocks[i] + b * y.blocks[i]);
    const CVec lhs = forward(combo, model);
    const CVec rhs = a * forward(x, model) + b * forward(y, model);
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
}

TEST_CASE("lifting equivalence against the Hadamard-product model") {
    CounterRng rng(5150);
    for (int t = 0; t < 100; ++t) {
        GenConfig cfg;
        cfg.n_samples = 8 + static_cast<int>(rng.next_u64() % 24);
        cfg.user_count = 1 + static_cast<int>(rng.next_u64() % 3);
        for (int u = 0; u < cfg.user_count; ++u) {
            cfg.path_counts.push_back(1 + static_cast<int>(rng.next_u64() % 2));
            cfg.message_sizes.push_back(1 + static_cast<int>(rng.next_u64() % 3));
        }
        if (rng.uniform() < 0.3) {
            cfg.sensing_mode = SensingMode::UniformSubsample;
            cfg.m_measurements = std::max(1, cfg.n_samples / 2);
        }
        cfg.seed = rng.next_u64();
        const Scenario s = generate_scenario(cfg);
        const CVec direct = synthesize_measurements(s);
        const CVec lifted = forward(lift_ground_truth(s), MeasurementModel::from_scenario(s));
        CHECK((direct - lifted).norm() <= 1e-10 * std::max(1.0, direct.norm()));
    }
}
