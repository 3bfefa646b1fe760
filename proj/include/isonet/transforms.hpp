#pragma once

#include <vector>

#include "isonet/linalg.hpp"
#include "isonet/net.hpp"

namespace isonet {

struct ChristoffelResult {
    QuadNet net;              // dual net, same edge factors
    double max_closure = 0;   // per-quad closure of the dual increments, relative
    int worst_m = -1, worst_n = -1;
};

// d f*_pq = a_pq (d f_pq)^{-1}, integrated from the base vertex, which maps to the origin.
ChristoffelResult christoffel(const QuadNet& net, double tol = 1e-8, int base = 0);

// tau_pq from the vertex coordinates and the dual increment.
QuatMat2 edge_tau(const QuadNet& net, int p, int q);

// tau_pq from lifts: -a F_pF_q / (F_pF_q + F_qF_p).
QuatMat2 edge_tau_lift(const MinkVec& Fp, const MinkVec& Fq, double a);

struct EdgeTau {
    std::vector<Edge> e;
    std::vector<QuatMat2> fwd;  // tau_pq
    std::vector<QuatMat2> bwd;  // tau_qp
};

EdgeTau compute_tau(const QuadNet& net);

struct TauReport {
    double max_formula = 0;   // coordinate form against lift form
    double max_sum = 0;       // tau_pq + tau_qp + a I
    double max_kernel = 0;    // F_p tau_pq and tau_pq F_q
    double max_quad_prod = 0; // tau_pq tau_qr - tau_ps tau_sr
    double max_quad_sum = 0;  // tau_pq + tau_qr - tau_ps - tau_sr
};

TauReport check_tau(const QuadNet& net);

struct CalapsoFrame {
    double lambda = 0;
    int base = 0;
    std::vector<QuatMat2> T;
    std::vector<QuatMat2> Tinv;  // propagated with (I + lambda tau_qp) / (1 - lambda a)
    std::vector<int> parent;  // base-outward orientation
};

struct CalapsoResult {
    CalapsoFrame frame;
    QuadNet net;                 // transformed net with a/(1 - lambda a)
    double max_frame = 0;        // T_q against T_p (I + lambda tau_pq) on every edge
    double max_plaquette = 0;    // quad path independence
    double max_group = 0;        // worst in_mob3 residual of T
};

// Throws PoleError when lambda a_pq = 1 on an edge.
CalapsoResult calapso(const QuadNet& net, double lambda, const QuatMat2& T0 = QuatMat2::identity(), int base = 0);

// Connection acting on R^{4,1} coordinates (x1, x2, x3, x0, xinf).
Mat5 flat_connection(const QuadNet& net, double lambda, int p, int q);

// Max deviation from the identity of the plaquette products.
double flat_connection_plaquette(const QuadNet& net, double lambda);

struct DarbouxResult {
    QuadNet net;
    double max_closure = 0;        // Riccati path dependence, relative
    double max_concircular = 0;    // f_p, f_q, fhat_q, fhat_p
    double max_cross_ratio = 0;    // |q_hat - q| / (1 + |q|)
    int worst_m = -1, worst_n = -1;
};

// Riccati propagation d fhat_pq = mu (fhat - f)_p d f*_pq (fhat - f)_q from fhat at the base vertex (0,0).
DarbouxResult darboux(const QuadNet& net, double mu, const Quaternion& fhat_base, double tol = 1e-8);

}  // namespace isonet
