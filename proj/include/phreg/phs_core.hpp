#pragma once

#include <span>
#include <string>
#include <vector>

#include "phreg/types.hpp"

namespace phreg {

/// Matrix-valued coefficient on [a, b]: either one constant matrix or one
/// sample per grid node.
class MatrixField {
   public:
    MatrixField() = default;

    static MatrixField constant(CMatrix value);
    static MatrixField sampled(std::vector<CMatrix> samples);

    bool is_constant() const { return samples_.size() == 1; }
    bool empty() const { return samples_.empty(); }
    std::size_t sample_count() const { return samples_.size(); }
    Eigen::Index dim() const { return samples_.empty() ? 0 : samples_.front().rows(); }

    /// Value at grid node `node`; constant fields ignore the index.
    const CMatrix& at(std::size_t node) const { return is_constant() ? samples_.front() : samples_.at(node); }
    const std::vector<CMatrix>& samples() const { return samples_; }

   private:
    explicit MatrixField(std::vector<CMatrix> samples) : samples_(std::move(samples)) {}
    std::vector<CMatrix> samples_;
};

/// Linear port-Hamiltonian system of order N on [a, b] with boundary
/// input W_B (f, e) and boundary output W_C (f, e).
struct PHModel {
    int order = 1;  // N
    int dim = 1;    // n
    double a = 0.0;
    double b = 1.0;
    std::vector<CMatrix> P;  // P_1 ... P_N
    MatrixField P0;
    MatrixField H;
    double h_lower = 1.0;  // m in m I <= H
    double h_upper = 1.0;  // M in H <= M I
    CMatrix W_B;
    CMatrix W_C;

    Eigen::Index port_dim() const { return static_cast<Eigen::Index>(dim) * order; }
};

/// Checks every structural invariant; throws InvariantViolation or
/// DimensionMismatch naming the first one that fails.
void validate(const PHModel& model);

struct PortMatrices {
    CMatrix Q;      // nN x nN
    CMatrix R_ext;  // 2nN x 2nN
    CMatrix Sigma;  // [[0, I], [I, 0]]
};

/// Block matrix Q_ij = (-1)^(j-1) P_(i+j-1) for i + j <= N + 1, zero otherwise.
CMatrix build_q(std::span<const CMatrix> P, int n, int N);

PortMatrices build_port_matrices(const PHModel& model);

struct PortVariables {
    CVector flow;    // f_d
    CVector effort;  // e_d
};

/// (f; e) = R_ext * jet, where jet is the signed boundary trace of Hx
/// (see trace_signs()).
PortVariables port_variables(const CVector& jet, const PortMatrices& pm);

enum class Passivity { EnergyPreserving, Passive, Neither };

const char* to_string(Passivity p);

struct PassivityReport {
    Passivity classification = Passivity::Neither;
    CMatrix gram;      // [[W_B S W_B*, W_B S W_C*], [W_C S W_B*, W_C S W_C*]]
    CMatrix P_WBWC;    // inverse of gram; empty when the gram is singular
    bool gram_singular = false;
    double equality_gap = 0.0;   // max |P_WBWC - Sigma| entry
    double max_eig_gap = 0.0;    // largest eigenvalue of P_WBWC - Sigma
    double max_re_p0 = 0.0;      // largest eigenvalue of Re P0 over samples
    double p0_skew_defect = 0.0; // max |P0 + P0*| entry over samples
    std::string diagnostic;
};

PassivityReport classify_passivity(const PHModel& model);

struct StabilityCertificate {
    bool certified = false;
    double min_eig = 0.0;  // smallest eigenvalue of W S W*
};

StabilityCertificate stability_certificate(const CMatrix& W_B, const CMatrix& Sigma);

struct FeedbackBoundary {
    double kappa = 0.0;
    CMatrix W_kappa;  // W_B + kappa W_C
    StabilityCertificate certificate;
};

/// Boundary map of the plant closed by u = -kappa y. Requires the impedance
/// passive identity W_B S W_C* = I and guarantees min eig(W_k S W_k*) >= 2 kappa.
FeedbackBoundary feedback_boundary(const CMatrix& W_B, const CMatrix& W_C, double kappa);

/// Signs (-1)^k carried by the k-th derivative entries of the boundary trace.
/// With this convention Re<Ax, x> = Re<f, e> holds for every order N with Q
/// as built by build_q.
RVector trace_signs(int n, int N);

enum class End { a, b };

/// One physical boundary value c * (d^k/dz^k (Hx)_component)(end).
struct JetTerm {
    End end = End::a;
    int derivative = 0;
    int component = 0;
    Complex coef{1.0, 0.0};
};

/// Row r of a boundary map is the sum of the terms in selection[r].
using JetSelection = std::vector<std::vector<JetTerm>>;

/// Index of a physical jet value inside the 2nN trace vector.
Eigen::Index jet_index(End end, int derivative, int component, int n, int N);

/// Expresses physically stated boundary maps (rows over endpoint derivative
/// values of Hx) as W such that W (f; e) reproduces them.
CMatrix boundary_map_from_selection(const JetSelection& selection, const PortMatrices& pm, int n, int N);

}  // namespace phreg
