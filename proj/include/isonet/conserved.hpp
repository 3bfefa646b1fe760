#pragma once

#include <string>
#include <vector>

#include "isonet/linalg.hpp"
#include "isonet/net.hpp"
#include "isonet/transforms.hpp"

namespace isonet {

// P(lambda) = P[0] + lambda P[1] + ... + lambda^n P[n], each coefficient a per-vertex field.
struct ConservedQuantity {
    std::vector<std::vector<MinkVec>> P;
    std::string normalization = "none";

    int order() const { return static_cast<int>(P.size()) - 1; }
    const std::vector<MinkVec>& Q() const { return P.front(); }
    const std::vector<MinkVec>& Z() const { return P.back(); }
    MinkVec eval(int vertex, double lambda) const;
};

// Q + lambda Z from per-vertex fields.
ConservedQuantity linear_cq(const std::vector<MinkVec>& Q, const std::vector<MinkVec>& Z);

struct CQReport {
    double max_coeff = 0;    // worst coefficient of (I + lambda tau) P_q - P_p (I + lambda tau)
    double max_sample = 0;   // same identity evaluated at lambda in {-1, 1/3, 2}
    int worst_edge = -1;
    int worst_coeff = -1;
    std::vector<double> edge_residual;  // per edge of edges(net)
    // Split conditions for order 1.
    double max_dQ = 0;
    double max_dZ = 0;       // dZ - (Q tau - tau Q)
    double max_tauZ = 0;     // tau Z_q - Z_p tau
    double max_ZF = 0;       // |<Z_p, F_p>| / (|Z_p| |F_p|)
    double max() const;
};

CQReport verify_cq(const QuadNet& net, const EdgeTau& tau, const ConservedQuantity& P);
inline CQReport verify_cq(const QuadNet& net, const ConservedQuantity& P) { return verify_cq(net, compute_tau(net), P); }

// dZ_pq = (a_pq / <F_p,F_q>) (<Q,F_q> F_p - <Q,F_p> F_q): any lift F gives the same Z.
std::vector<MinkVec> propagate_Z(const QuadNet& net, const MinkVec& Q, const MinkVec& Z_base, int base);

// Z at the star center (m,n) from <F_i, Z> = -a_{0i} <Q, F_i>, then propagated over the whole net.
// Throws SingularError when the edge star (m,n), (m+-1,n), (m,n+-1) is spherical.
ConservedQuantity solve_Z_given_Q(const QuadNet& net, const MinkVec& Q, int m, int n, double star_tol = 1e-9);
ConservedQuantity solve_Z_given_Q_3x3(const QuadNet& net, const MinkVec& Q);

struct LcqCandidate {
    ConservedQuantity cq;
    CQReport report;
};

struct Lcq5x5Result {
    bool found = false;
    std::vector<LcqCandidate> candidates;  // one per null space basis vector
    Eigen::VectorXd singular_values;       // of the 4x5 system
    double star_measure = 0;               // sigma_min / sigma_max of the center star
    int center_m = -1, center_n = -1;      // star center used
    std::string message;
};

// Without a center, the admissible non-spherical star nearest the middle is used; the two-step stars must exist.
Lcq5x5Result solve_lcq_5x5(const QuadNet& net, double tol = 1e-8, int m = -1, int n = -1,
                           double null_tol = 1e-8, double star_tol = 1e-9);

struct GlobalLcqResult {
    std::vector<ConservedQuantity> basis;
    Eigen::VectorXd singular_values;
};

// Null space of <F_p, Z_p(Q, Z_base)> = 0 over all vertices, unknowns (Q, Z_base) in R^10.
GlobalLcqResult solve_lcq_global(const QuadNet& net, double null_tol = 1e-8);

struct MeanCurvature {
    double H = 0;          // -<Z,Q> / ||Z||^2, i.e. after scaling P so that ||Z|| = 1
    double abs_H = 0;
    int orientation = 0;   // sign of H; flips with Z -> -Z
    double kappa = 0;      // -||Q||^2 / ||Z||^2, curvature of the space form after normalizing
    double H_unit = 0;     // H / sqrt|kappa|: mean curvature after rescaling the space form to kappa = -1, 0, 1
    double norm_Z = 0;     // ||Z|| before normalizing
    double max_drift = 0;  // vertex dependence of ||Z||^2 and <Q,Z>, relative
};

// Throws DegenerateError when ||Z||^2 <= 0.
MeanCurvature mean_curvature(const ConservedQuantity& P, double tol = 1e-12);

// Coefficients of P(lambda + mu) conjugated by T_p.
ConservedQuantity calapso_shift_cq(const ConservedQuantity& P, double mu, const CalapsoFrame& T);

struct DarbouxCQ {
    ConservedQuantity cq;       // order n + 1 after dropping the vanishing top term
    double max_top = 0;         // relative size of the dropped lambda^{n+2} coefficient
    double max_embed = 0;       // off-model parts of the matrix products
};

// mu (mu - lambda) A^{-1} P A with A_p = I - (lambda/mu) F_p Fh_p / (F_p Fh_p + Fh_p F_p).
DarbouxCQ darboux_cq(const ConservedQuantity& P, const QuadNet& net, const QuadNet& fhat, double mu);

struct DPFormulaReport {
    double max_first = 0;   // lambda a / <F_p,F_q> (<P_q,F_q> F_p - <P_p,F_p> F_q)
    double max_second = 0;  // lambda a / ((1 - lambda a) <F_p,F_q>) (<P_p,F_q> F_p - <P_q,F_p> F_q)
};

DPFormulaReport dP_edge_formula_check(const QuadNet& net, const ConservedQuantity& P,
                                      const std::vector<double>& lambdas = {-1.0, 1.0 / 3.0, 2.0});

struct BaecklundValues {
    std::vector<double> poly;              // coefficients of ||P(lambda)||^2, constant term first
    std::vector<double> roots;             // real roots
    std::vector<std::vector<MinkVec>> lifts;  // P(root) per vertex
    bool double_root = false;
    double max_vertex_dependence = 0;
};

BaecklundValues baecklund_values(const ConservedQuantity& P, double imag_tol = 1e-8);

struct BaecklundCheck {
    bool ok = false;
    double max_residual = 0;  // |<P_p(mu), Fh_p>| / (|P_p(mu)| |Fh_p|)
};

BaecklundCheck is_baecklund(const ConservedQuantity& P, double mu, const QuadNet& fhat, double tol = 1e-9);

struct EnvelopeReport {
    double max_incidence = 0;  // |<F_p, Z_p>| relative
    double max_touching = 0;   // distance of Z_p - Z_q from span{F_p, F_q}, relative
    double min_norm = 0;       // smallest ||Z_p||^2 / |Z_p|^2
};

EnvelopeReport envelope_check(const QuadNet& net, const std::vector<MinkVec>& Z);

struct SixFactsReport {
    double norms_constant = 0;     // ||Z||^2 and ||Q||^2
    double dP_formula = 0;
    double Z_perp_F = 0;
    double Z_norm = 0;             // ||Z||^2 / |Z|^2, nonnegative
    double Z_null_parallel = 0;    // when ||Z||^2 = 0: distance of Z from span{F}
    double sphere_two_sides = 0;   // S_pq computed from p and from q
    double QZ_constant = 0;        // order 1 only
    double sphere_incidence = 0;   // <S_pq, F_p>, <S_pq, F_q>
    double max() const;
};

SixFactsReport six_facts(const QuadNet& net, const ConservedQuantity& P);

}  // namespace isonet
