#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "isonet/mink.hpp"
#include "isonet/quat.hpp"

namespace isonet {

// Rectangular lattice m in [0,M), n in [0,N) of points in Im H.
// Quad (m,n) has p=(m,n), q=(m+1,n), r=(m+1,n+1), s=(m,n+1).
// ah(m,n) lives on the edge (m,n)-(m+1,n), av(m,n) on (m,n)-(m,n+1).
struct QuadNet {
    int M = 0, N = 0;
    int m0 = 0, n0 = 0;  // labels of the first row and column
    double kappa = 0;
    std::vector<Quaternion> v;
    std::vector<std::uint8_t> mask;
    std::vector<double> ah, av;

    QuadNet() = default;
    QuadNet(int M_, int N_);

    int idx(int m, int n) const { return m * N + n; }
    bool inside(int m, int n) const { return m >= 0 && m < M && n >= 0 && n < N; }
    bool has(int m, int n) const { return inside(m, n) && mask[idx(m, n)]; }
    bool has_hedge(int m, int n) const { return has(m, n) && has(m + 1, n); }
    bool has_vedge(int m, int n) const { return has(m, n) && has(m, n + 1); }
    bool has_quad(int m, int n) const { return has(m, n) && has(m + 1, n) && has(m + 1, n + 1) && has(m, n + 1); }
    Quaternion& at(int m, int n) { return v[idx(m, n)]; }
    const Quaternion& at(int m, int n) const { return v[idx(m, n)]; }
    double& a_h(int m, int n) { return ah[idx(m, n)]; }
    double a_h(int m, int n) const { return ah[idx(m, n)]; }
    double& a_v(int m, int n) { return av[idx(m, n)]; }
    double a_v(int m, int n) const { return av[idx(m, n)]; }
    bool factorized() const;
    int vertex_count() const;
};

// Directed lattice edge p -> q with its factor; p precedes q in the lattice order.
struct Edge {
    int p, q;
    double a;
    bool horizontal;
};

std::vector<Edge> edges(const QuadNet& net);

struct Quad {
    int m, n;
    int p, q, r, s;
};

std::vector<Quad> quads(const QuadNet& net);

// Factor on the undirected edge between two adjacent vertex indices.
double edge_factor(const QuadNet& net, int p, int q);

// Breadth-first order from a base vertex; parent[i] = -1 for the base and unreached vertices.
struct Traversal {
    std::vector<int> order;
    std::vector<int> parent;
};

Traversal bfs(const QuadNet& net, int base);

// (fq-fp)(fr-fq)^{-1}(fs-fr)(fp-fs)^{-1}
Quaternion cross_ratio(const Quaternion& fp, const Quaternion& fq, const Quaternion& fr, const Quaternion& fs);

// Re q + i |Im q|
std::complex<double> hat_cross_ratio(const Quaternion& fp, const Quaternion& fq, const Quaternion& fr, const Quaternion& fs);

Quaternion quad_cross_ratio(const QuadNet& net, int m, int n);

// Scale-free concircularity defect |Im q| / (1 + |q|).
double concircularity_defect(const Quaternion& q);

struct GramCrossRatio {
    std::complex<double> value;
    double E = 0;        // determinant of the Gram matrix
    double E_floor = 0;  // rounding bound on E; |E| below it is zero
};

// s is the symmetric 4x4 Gram matrix of lifts of fp, fq, fr, fs.
GramCrossRatio cross_ratio_from_gram(const std::array<std::array<double, 4>, 4>& s);

struct FactorizeReport {
    bool ok = false;
    double max_concircularity = 0;
    double max_toda = 0;
    int worst_m = -1, worst_n = -1;
    std::string message;
};

// Fills ah, av with q = a_pq / a_ps on every quad. seed fixes ah at the base edge;
// seed = 0 selects the geometric mean of |q| over the base row.
FactorizeReport factorize(QuadNet& net, double tol = 1e-8, double seed = 0.0);

// Throws NotIsothermicError on failure.
void factorize_or_throw(QuadNet& net, double tol = 1e-8, double seed = 0.0);

struct MoutardLift {
    std::vector<MinkVec> F;
    int base = 0;
    double base_scale = 0.5;  // F_base = base_scale * lift(f_base, 0)
};

struct MoutardReport {
    double max_edge = 0;      // |F_pF_q + F_qF_p - a I| / max(|a|, |F_p||F_q|)
    double max_parallel = 0;  // sine of the angle between F_r - F_p and F_q - F_s
    double max_ratio = 0;     // <F_p,F_q> a_ps - <F_p,F_s> a_pq, relative
    double max_orthogonal = 0;  // <F_r + F_p, F_q - F_s> relative
};

MoutardLift moutard_lift(const QuadNet& net, double base_scale = 0.5, int base = 0, double tol = 1e-8);
MoutardReport check_moutard(const QuadNet& net, const MoutardLift& F);
MoutardLift checkerboard_rescale(const QuadNet& net, const MoutardLift& F, double alpha, double beta);

// sigma_min / sigma_max of the coordinate matrix of unit-normalized lifts.
double spherical_measure(const std::vector<MinkVec>& lifts);

// Determinant of the Gram matrix of the unit-normalized coordinate vectors.
double normalized_gram_det(const std::vector<MinkVec>& lifts);

struct StarSphere {
    MinkVec S;
    double measure = 0;
};

// Sphere through the diagonal star (m,n), (m+-1,n+-1).
StarSphere vertex_star_sphere(const QuadNet& net, int m, int n, double tol = 1e-8);

// Is the edge star (m,n), (m+-1,n), (m,n+-1) contained in one sphere.
bool is_vertex_star_spherical(const QuadNet& net, int m, int n, double tol = 1e-8);
double edge_star_measure(const QuadNet& net, int m, int n);

// Christoffel increment a (f_q - f_p)^{-1}.
Quaternion dual_edge(const Quaternion& fp, const Quaternion& fq, double a);

// Lifts of all vertices with the net's curvature tag.
std::vector<MinkVec> standard_lifts(const QuadNet& net, double kappa);

// Vertex set on one sphere: measure over all lifts.
double net_spherical_measure(const QuadNet& net);

}  // namespace isonet
