#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "isonet/mink.hpp"
#include "isonet/net.hpp"

namespace isonet {

// Complex lattice function g_{m,n}, m in [0,M), n in [0,N), labels offset by (m0, n0).
struct DiscreteHolo {
    int M = 0, N = 0;
    int m0 = 0, n0 = 0;
    std::vector<Cplx> g;
    std::vector<double> ah, av;

    DiscreteHolo() = default;
    DiscreteHolo(int M_, int N_);
    int idx(int m, int n) const { return m * N + n; }
    Cplx& at(int m, int n) { return g[idx(m, n)]; }
    const Cplx& at(int m, int n) const { return g[idx(m, n)]; }
};

// Complex cross ratio (gq-gp)/(gr-gq) * (gs-gr)/(gp-gs) of quad (m,n).
Cplx holo_cross_ratio(const DiscreteHolo& h, int m, int n);

struct HoloReport {
    bool ok = false;
    double max_imag = 0;     // |Im q| / (1 + |q|)
    double max_factor = 0;   // |q - ah/av| / |q|
    double min_edge = 0;     // smallest |g_q - g_p|
    std::string message;
};

// Factors ah, av from the real cross ratios (seed fixes ah on the first column; 0 = geometric mean).
HoloReport factorize_holo(DiscreteHolo& h, double tol = 1e-8, double seed = 0.0);

// g = c (m + i n) on m in [m0, m0+M), n in [n0, n0+N).
DiscreteHolo dhf_linear(Cplx c, int M, int N, int m0 = 0, int n0 = 0);

// g = exp(c1 m + i c2 n).
DiscreteHolo dhf_exp(double c1, double c2, int M, int N, int m0 = 0, int n0 = 0);

// Closed form of the constant cross ratio of dhf_exp.
double dhf_exp_cross_ratio(double c1, double c2);

// c1 > 0 with dhf_exp cross ratio equal to target (default -1), by bisection on the computed quad.
double solve_c1(double c2, double target = -1.0);

// Discrete z^alpha on [0,M) x [0,N) seeded by g00 = 0, g10 = 1, g01 = i^alpha.
DiscreteHolo dhf_zalpha(double alpha, int M, int N);

// Residual of the z^alpha recursion at interior vertices.
double zalpha_recursion_residual(const DiscreteHolo& h, double alpha);

// Net in span{i, j}: g1 + g2 i maps to g1 i + g2 j.
QuadNet planar_embedding(const DiscreteHolo& h);

QuadNet planar_grid(int M, int N);

struct MinimalNetResult {
    QuadNet net;
    double max_closure = 0;  // per-quad sum of increments
    double max_real = 0;     // real part of increments
};

// Weierstrass-type discrete minimal net; throws NotIsothermicError if the increments do not close.
MinimalNetResult minimal_net(const DiscreteHolo& h, double tol = 1e-9);

struct BryantNetResult {
    QuadNet net;                  // Poincare ball points, kappa = -1
    std::vector<CMat2> F;
    std::vector<CMat2> herm;      // F conj(F)^t / det F
    double max_compat = 0;        // per-quad path independence
    double max_det_imag = 0;      // |Im det F| / |det F|
    double max_det_drift = 0;     // |det F_q - det F_p (1 - lambda a)| / |det F_q|
    double max_herm = 0;          // Hermitian defect
    double max_det_one = 0;       // |det(herm) - 1| relative to |a d| + |b c|
    double min_trace = 0;
};

BryantNetResult bryant_net(const DiscreteHolo& h, double lambda, const CMat2& F0 = CMat2::identity(), double tol = 1e-9);

// Surfaces of revolution: f_{m,n} = r_m (cos t_n i + sin t_n j) + h_m k, t_n = 2 pi n / N.
struct RevolutionState {
    double r = 1, h = 0, H = 0, rho = -1, eta = 0;
};

struct RevolutionParams {
    int N = 8;
    double kappa = 0;
    double alpha = 0.5;
    double q = -1;       // cross ratio of every quad, fixes the m-edge factor
    int direction = 1;   // initial direction along the profile tangent
};

// Seed data (r, h, rho, eta) and H from the first equation.
RevolutionState revolution_seed(double r, double h, double rho, double eta, const RevolutionParams& p);

// alpha giving the prescribed H_kappa for the seed.
double revolution_alpha_for(double Hk, double r, double h, double rho, double eta, double kappa);

double revolution_Hk(const RevolutionState& s, double kappa);

struct RevolutionResiduals {
    std::array<double, 9> e{};
    double max() const;
};

RevolutionResiduals revolution_residuals(const RevolutionState& a, const RevolutionState& b, const RevolutionParams& p);

struct StepInfo {
    int iterations = 0;
    double residual = 0;
};

// Newton step; prev_dr, prev_dh is the last increment (both 0 for the first step).
RevolutionState revolution_step(const RevolutionState& s, const RevolutionParams& p, double prev_dr, double prev_dh,
                                StepInfo* info = nullptr);

struct ConservedQuantity;

struct RevolutionNet {
    QuadNet net;
    std::vector<RevolutionState> states;
    std::vector<RevolutionResiduals> residuals;  // per step
    std::vector<int> iterations;
    double Hk = 0;
    double max_Hk_drift = 0;
    double max_unit = 0;  // |rho^2 + eta^2 - 1|
    std::vector<MinkVec> Q, Z;  // hand-assembled linear conserved quantity
};

// steps + 1 profile rows, N + 1 columns (the last column repeats the first).
RevolutionNet revolution_net(const RevolutionState& seed, int steps, const RevolutionParams& p);

// Cylinder of coordinate radius r, N around, M rows with quad cross ratio -1.
RevolutionNet cylinder_net(double r, int N, int M);

// R^{2,1}: coordinates (x1, x2, x0), metric diag(1,1,-1).
double r21_inner(const Vec3& a, const Vec3& b);
Vec3 r21_cross(const Vec3& a, const Vec3& b);

// Cross ratio of four concircular points on a spacelike circle.
double r21_cross_ratio(const Vec3& p, const Vec3& q, const Vec3& r, const Vec3& s, double tol = 1e-9);

struct R21Net {
    int M = 0, N = 0;
    std::vector<Vec3> f, n;
    std::vector<double> ah, av;
    double h = 0, H = 0;
    int idx(int m, int k) const { return m * N + k; }
};

struct R21Report {
    double unit = 0;       // <n,n> + 1
    double wedge = 0;      // df ^ n_q + n_p ^ df
    double tangent = 0;    // <df, n_p + n_q>
    double structure = 0;  // h (dn + H df) + a df / |df|^2
    double max() const;
};

R21Report r21_cmc_verify(const R21Net& net);

// Spacelike hyperbolic cylinder f = (R sinh(m delta), n eps, R cosh(m delta)).
R21Net r21_cylinder(double R, double delta, double eps, int M, int N);

// Lorentz isometry x -> L x + b.
struct Lorentz {
    std::array<std::array<double, 3>, 3> L{};
    Vec3 b{};
    Vec3 apply(const Vec3& x) const;
};

// Random element of the identity component from a seed.
Lorentz random_lorentz(unsigned seed);

enum class Quadrature { Trapezoid, GaussLegendre };

struct KobayashiSample {
    int M = 0, N = 0;
    std::vector<Cplx> z;
    std::vector<Vec3> f;           // (x1, x2, x0)
    std::vector<Vec3> normal;
    std::vector<double> metric;    // (1 - |g|^2)^2 |eta|^2
    std::vector<std::uint8_t> singular;
    double max_cell_closure = 0;
    double max_loop_closure = 0;   // loops of constant m when the grid is periodic in n
    double max_path = 0;           // |f| difference between the two tree paths
};

// Samples f = Re int (1 + g^2, i (1 - g^2), -2 g) eta over a grid z_{m,n} (row-major, M x N).
// periodic: column N-1 is followed by column 0 on closed loops.
KobayashiSample kobayashi_sample(const std::function<Cplx(Cplx)>& g, const std::function<Cplx(Cplx)>& eta,
                                 const std::vector<Cplx>& grid, int M, int N, bool periodic = false,
                                 int refinement = 4, Quadrature rule = Quadrature::GaussLegendre, double sing_tol = 1e-12);

// Polar grid r_m e^{2 pi i n / N}.
std::vector<Cplx> annulus_grid(double r_min, double r_max, int M, int N);

}  // namespace isonet
