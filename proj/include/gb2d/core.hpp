#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace gb2d {

using cxd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Known linear encoder of one user: N x M_k matrix, row n is the codeword
/// weight vector applied at frequency sample n.
struct Codebook {
    int user_index = 0;
    CMat entries;  // N x M_k

    int n_samples() const { return static_cast<int>(entries.rows()); }
    int message_size() const { return static_cast<int>(entries.cols()); }
};

/// Linear sensing filter D (M x N). identity=true marks D == I_N so operator
/// code can skip the product; the flag must agree with the entries.
struct SensingMatrix {
    CMat entries;  // M x N
    bool identity = false;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }

    static SensingMatrix make_identity(int n);
    static SensingMatrix uniform_subsample(int n, int m);
};

struct PathSpec {
    double tau = 0.0;  // delay as fraction of the observation window, [0,1)
    cxd amplitude{0.0, 0.0};
};

/// Sparse multipath channel of one user: a few scaled Dirac spikes.
struct ChannelSpec {
    std::vector<PathSpec> paths;

    int path_count() const { return static_cast<int>(paths.size()); }
};

struct Message {
    CVec coords;  // length M_k, unit l2 norm
    bool positivity_convention = false;
};

/// Ground-truth description of one synthetic instance.
struct Scenario {
    int n_samples = 0;  // N
    std::vector<Codebook> codebooks;
    std::vector<ChannelSpec> channels;
    std::vector<Message> messages;
    SensingMatrix sensing;
    std::uint64_t seed = 0;  // 0 when hand-built

    int user_count() const { return static_cast<int>(codebooks.size()); }
    int m_measurements() const { return sensing.rows(); }
    /// Minimum wrap-around separation over all delay pairs (cross-user).
    double min_separation() const;
    double amplitude_l1() const;
};

/// Lifted unknown: one M_k x N block per user.
struct MatrixTuple {
    std::vector<CMat> blocks;

    double frobenius_norm() const;
    static MatrixTuple zeros_like(const Scenario& s);
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

/// Wrap-around distance on the delay circle [0,1).
double wrap_distance(double a, double b);

/// a(tau) = [1, e^{-j2pi tau}, ..., e^{-j2pi(n-1)tau}].
CVec steering_vector(double tau, int n);

/// conj(a(tau)): exponents +j2pi(i-1)tau. The dual polynomials contract
/// against this vector.
CVec steering_vector_conj(double tau, int n);

/// Hermitian Toeplitz matrix with first row x.
CMat toeplitz_lift(const CVec& x);

/// Sum of entries of Q along diagonal offset q (entries with row - col == q;
/// q > 0 is below the main diagonal). The dual SDP constrains these sums.
cxd diag_sum(const CMat& Q, int q);

ValidationReport validate_scenario(const Scenario& s);

}  // namespace gb2d
