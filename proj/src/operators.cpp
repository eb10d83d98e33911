#include "gb2d/operators.hpp"

#include <stdexcept>

namespace gb2d {

MeasurementModel MeasurementModel::from_scenario(const Scenario& s) {
    MeasurementModel m;
    m.n_samples = s.n_samples;
    m.codebooks = s.codebooks;
    m.sensing = s.sensing;
    return m;
}

MatrixTuple lift_ground_truth(const Scenario& s) {
    MatrixTuple t;
    for (int k = 0; k < s.user_count(); ++k) {
        CMat block = CMat::Zero(s.codebooks[k].message_size(), s.n_samples);
        for (const auto& p : s.channels[k].paths) {
            const CVec a = steering_vector(p.tau, s.n_samples);
            block.noalias() += p.amplitude * s.messages[k].coords * a.transpose();
        }
        t.blocks.push_back(std::move(block));
    }
    return t;
}

static void check_shapes(const MatrixTuple& x, const MeasurementModel& model) {
    if (static_cast<int>(x.blocks.size()) != model.user_count())
        throw std::domain_error("operator: tuple block count != user count");
    for (int k = 0; k < model.user_count(); ++k) {
        if (x.blocks[k].rows() != model.codebooks[k].message_size() ||
            x.blocks[k].cols() != model.n_samples)
            throw std::domain_error("operator: block shape mismatch");
    }
}

CVec apply_C(const MatrixTuple& x, const MeasurementModel& model) {
    check_shapes(x, model);
    const int n = model.n_samples;
    CVec v = CVec::Zero(n);
    for (int k = 0; k < model.user_count(); ++k) {
        const CMat& c = model.codebooks[k].entries;  // N x M_k
        for (int i = 0; i < n; ++i)
            v(i) += c.row(i).dot(x.blocks[k].col(i));  // conjugates the codebook row
    }
    return v;
}

CVec forward(const MatrixTuple& x, const MeasurementModel& model) {
    const CVec v = apply_C(x, model);
    if (model.sensing.identity) return v;
    return model.sensing.entries * v;
}

MatrixTuple adjoint(const CVec& lambda, const MeasurementModel& model) {
    if (lambda.size() != model.m_measurements())
        throw std::domain_error("adjoint: lambda length != M");
    const CVec lt = model.sensing.identity
                        ? CVec(lambda)
                        : CVec(model.sensing.entries.adjoint() * lambda);
    MatrixTuple t;
    for (int k = 0; k < model.user_count(); ++k) {
        const CMat& c = model.codebooks[k].entries;
        CMat block(c.cols(), model.n_samples);
        for (int i = 0; i < model.n_samples; ++i)
            block.col(i) = lt(i) * c.row(i).transpose();
        t.blocks.push_back(std::move(block));
    }
    return t;
}

cxd tuple_inner(const MatrixTuple& a, const MatrixTuple& b) {
    cxd s{0.0, 0.0};
    for (std::size_t k = 0; k < a.blocks.size(); ++k)
        s += (b.blocks[k].adjoint() * a.blocks[k]).trace();
    return s;
}

}  // namespace gb2d
