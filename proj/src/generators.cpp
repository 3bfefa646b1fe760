#include "isonet/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "isonet/errors.hpp"

namespace isonet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// a + b i in span{1, i}
Quaternion embed(Cplx z) { return {z.real(), z.imag(), 0, 0}; }

// Forward parent of (m,n) in the row-major sweep from (0,0).
int sweep_parent(int m, int n, int N) {
    if (n > 0) return m * N + n - 1;
    if (m > 0) return (m - 1) * N;
    return -1;
}

}  // namespace

DiscreteHolo::DiscreteHolo(int M_, int N_)
    : M(M_), N(N_), g(static_cast<size_t>(M_) * N_), ah(static_cast<size_t>(M_) * N_, kNaN),
      av(static_cast<size_t>(M_) * N_, kNaN) {}

Cplx holo_cross_ratio(const DiscreteHolo& h, int m, int n) {
    const Cplx p = h.at(m, n), q = h.at(m + 1, n), r = h.at(m + 1, n + 1), s = h.at(m, n + 1);
    return (q - p) / (r - q) * ((s - r) / (p - s));
}

QuadNet planar_embedding(const DiscreteHolo& h) {
    QuadNet net(h.M, h.N);
    net.m0 = h.m0, net.n0 = h.n0;
    for (size_t i = 0; i < h.g.size(); ++i) net.v[i] = Quaternion::imag(h.g[i].real(), h.g[i].imag(), 0);
    net.ah = h.ah, net.av = h.av;
    return net;
}

HoloReport factorize_holo(DiscreteHolo& h, double tol, double seed) {
    HoloReport rep;
    rep.min_edge = std::numeric_limits<double>::infinity();
    for (int m = 0; m < h.M; ++m)
        for (int n = 0; n < h.N; ++n) {
            if (m + 1 < h.M) rep.min_edge = std::min(rep.min_edge, std::abs(h.at(m + 1, n) - h.at(m, n)));
            if (n + 1 < h.N) rep.min_edge = std::min(rep.min_edge, std::abs(h.at(m, n + 1) - h.at(m, n)));
        }
    if (!(rep.min_edge > 0)) {
        rep.message = "g_q = g_p on some edge";
        return rep;
    }
    for (int m = 0; m + 1 < h.M; ++m)
        for (int n = 0; n + 1 < h.N; ++n) {
            const Cplx q = holo_cross_ratio(h, m, n);
            rep.max_imag = std::max(rep.max_imag, std::abs(q.imag()) / (1.0 + std::abs(q)));
        }
    QuadNet net = planar_embedding(h);
    const FactorizeReport f = factorize(net, tol, seed);
    if (!f.ok) {
        rep.message = f.message;
        rep.max_factor = f.max_toda;
        return rep;
    }
    h.ah = net.ah, h.av = net.av;
    for (int m = 0; m + 1 < h.M; ++m)
        for (int n = 0; n + 1 < h.N; ++n) {
            const Cplx q = holo_cross_ratio(h, m, n);
            const double want = h.ah[h.idx(m, n)] / h.av[h.idx(m, n)];
            rep.max_factor = std::max(rep.max_factor, std::abs(q - want) / std::abs(q));
        }
    rep.ok = rep.max_imag <= tol && rep.max_factor <= tol;
    if (!rep.ok) rep.message = "cross ratios are not real or do not factorize";
    return rep;
}

DiscreteHolo dhf_linear(Cplx c, int M, int N, int m0, int n0) {
    if (c == Cplx(0)) throw DomainError("dhf_linear: c must be nonzero");
    DiscreteHolo h(M, N);
    h.m0 = m0, h.n0 = n0;
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) h.at(m, n) = c * Cplx(m + m0, n + n0);
    return h;
}

DiscreteHolo dhf_exp(double c1, double c2, int M, int N, int m0, int n0) {
    if (c1 == 0 && c2 == 0) throw DomainError("dhf_exp: c1 and c2 both vanish");
    if (std::abs(std::sin(c2 / 2)) < 1e-14) throw DegenerateError("dhf_exp: c2 is a multiple of 2 pi");
    DiscreteHolo h(M, N);
    h.m0 = m0, h.n0 = n0;
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) h.at(m, n) = std::exp(Cplx(c1 * (m + m0), c2 * (n + n0)));
    return h;
}

double dhf_exp_cross_ratio(double c1, double c2) {
    const double a = std::sinh(c1 / 2), b = std::sin(c2 / 2);
    return -(a * a) / (b * b);
}

double solve_c1(double c2, double target) {
    if (!(target < 0)) throw DomainError("solve_c1: target cross ratio must be negative");
    auto f = [&](double c1) { return holo_cross_ratio(dhf_exp(c1, c2, 2, 2), 0, 0).real() - target; };
    double lo = 1e-12, hi = 1.0;
    while (f(hi) > 0) {
        hi *= 2;
        if (hi > 1e3) throw StepError("solve_c1: no bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DiscreteHolo dhf_zalpha(double alpha, int M, int N) {
    if (!(alpha > 0 && alpha < 2)) throw DomainError("dhf_zalpha: alpha must lie in (0,2)");
    if (M < 2 || N < 2) throw DomainError("dhf_zalpha: need at least 2 x 2 vertices");
    DiscreteHolo h(M, N);
    h.at(0, 0) = 0.0;
    h.at(1, 0) = 1.0;
    h.at(0, 1) = std::polar(1.0, alpha * kPi / 2);
    auto axis = [&](Cplx g, Cplx gm, int k) {
        const Cplx den = alpha * g - 2.0 * k * (g - gm);
        if (std::abs(den) < 1e-14 * (1.0 + std::abs(g))) throw DegenerateError("dhf_zalpha: recursion denominator vanishes");
        return (alpha * g * gm - 2.0 * k * g * (g - gm)) / den;
    };
    for (int m = 1; m + 1 < M; ++m) h.at(m + 1, 0) = axis(h.at(m, 0), h.at(m - 1, 0), m);
    for (int n = 1; n + 1 < N; ++n) h.at(0, n + 1) = axis(h.at(0, n), h.at(0, n - 1), n);
    for (int m = 0; m + 1 < M; ++m)
        for (int n = 0; n + 1 < N; ++n) {
            const Cplx p = h.at(m, n), q = h.at(m + 1, n), s = h.at(m, n + 1);
            const Cplx den = 2.0 * p - q - s;
            if (std::abs(den) < 1e-14 * (1.0 + std::abs(p))) throw DegenerateError("dhf_zalpha: fill denominator vanishes");
            h.at(m + 1, n + 1) = (p * (q + s) - 2.0 * q * s) / den;
        }
    return h;
}

double zalpha_recursion_residual(const DiscreteHolo& h, double alpha) {
    double worst = 0;
    for (int m = 0; m < h.M; ++m)
        for (int n = 0; n < h.N; ++n) {
            const Cplx g = h.at(m, n);
            Cplx rhs = 0;
            if (m > 0) {
                if (m + 1 >= h.M) continue;
                const Cplx a = h.at(m + 1, n), b = h.at(m - 1, n);
                rhs += 2.0 * m * (a - g) * (g - b) / (a - b);
            }
            if (n > 0) {
                if (n + 1 >= h.N) continue;
                const Cplx a = h.at(m, n + 1), b = h.at(m, n - 1);
                rhs += 2.0 * n * (a - g) * (g - b) / (a - b);
            }
            worst = std::max(worst, std::abs(alpha * g - rhs) / (1.0 + std::abs(g)));
        }
    return worst;
}

QuadNet planar_grid(int M, int N) {
    QuadNet net(M, N);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) net.at(m, n) = Quaternion::imag(m, n, 0);
    return net;
}

MinimalNetResult minimal_net(const DiscreteHolo& h, double tol) {
    DiscreteHolo g = h;
    if (!std::isfinite(g.ah.empty() ? kNaN : g.ah[0])) {
        const HoloReport r = factorize_holo(g);
        if (!r.ok) throw NotIsothermicError("minimal_net: input is not discrete holomorphic (" + r.message + ")");
    }
    auto incr = [&](int p, int q, double a) {
        const Quaternion gp = embed(g.g[p]), gq = embed(g.g[q]);
        const Quaternion c = embed(a / (g.g[q] - g.g[p]));
        return (I_ - gp * J_) * J_ * c * (I_ - gq * J_);
    };
    MinimalNetResult out;
    out.net = QuadNet(g.M, g.N);
    out.net.m0 = g.m0, out.net.n0 = g.n0;
    for (int m = 0; m < g.M; ++m)
        for (int n = 0; n < g.N; ++n) {
            const int i = g.idx(m, n), p = sweep_parent(m, n, g.N);
            if (p < 0) continue;
            const double a = (p == i - 1) ? g.av[p] : g.ah[p];
            const Quaternion d = incr(p, i, a);
            out.max_real = std::max(out.max_real, std::abs(d.w) / d.norm());
            out.net.v[i] = out.net.v[p] + d.im();
        }
    for (int m = 0; m + 1 < g.M; ++m)
        for (int n = 0; n + 1 < g.N; ++n) {
            const int p = g.idx(m, n), q = g.idx(m + 1, n), r = g.idx(m + 1, n + 1), s = g.idx(m, n + 1);
            const Quaternion d1 = incr(p, q, g.ah[p]), d2 = incr(q, r, g.av[q]);
            const Quaternion d3 = incr(p, s, g.av[p]), d4 = incr(s, r, g.ah[s]);
            const double sc = d1.norm() + d2.norm() + d3.norm() + d4.norm();
            out.max_closure = std::max(out.max_closure, (d1 + d2 - d3 - d4).norm() / sc);
        }
    if (out.max_closure > tol || out.max_real > tol)
        throw NotIsothermicError("minimal_net: edge increments do not close");
    out.net.ah = g.ah, out.net.av = g.av;
    return out;
}

BryantNetResult bryant_net(const DiscreteHolo& h, double lambda, const CMat2& F0, double tol) {
    DiscreteHolo g = h;
    if (!std::isfinite(g.ah.empty() ? kNaN : g.ah[0])) {
        const HoloReport r = factorize_holo(g);
        if (!r.ok) throw NotIsothermicError("bryant_net: input is not discrete holomorphic (" + r.message + ")");
    }
    if (lambda == 0.0) throw DegenerateError("bryant_net: lambda = 0 collapses the net to a point");
    const Cplx d0 = F0.det();
    if (std::abs(d0.imag()) > 1e-12 * std::abs(d0) || std::abs(d0) == 0)
        throw DomainError("bryant_net: det F0 must be real and nonzero");
    auto step = [&](int p, int q, double a) {
        if (1.0 - lambda * a == 0.0) throw PoleError("bryant_net: lambda a = 1 on an edge");
        const Cplx gp = g.g[p], gq = g.g[q];
        const Cplx c = lambda * a / (gq - gp);
        return CMat2::identity() + c * CMat2{gp, -gp * gq, 1.0, -gq};
    };
    BryantNetResult out;
    out.F.assign(g.g.size(), CMat2{});
    out.F[0] = F0;
    for (int m = 0; m < g.M; ++m)
        for (int n = 0; n < g.N; ++n) {
            const int i = g.idx(m, n), p = sweep_parent(m, n, g.N);
            if (p < 0) continue;
            const double a = (p == i - 1) ? g.av[p] : g.ah[p];
            out.F[i] = out.F[p] * step(p, i, a);
            const Cplx dq = out.F[i].det(), want = out.F[p].det() * (1.0 - lambda * a);
            out.max_det_drift = std::max(out.max_det_drift, std::abs(dq - want) / std::abs(dq));
        }
    for (int m = 0; m + 1 < g.M; ++m)
        for (int n = 0; n + 1 < g.N; ++n) {
            const int p = g.idx(m, n), q = g.idx(m + 1, n), r = g.idx(m + 1, n + 1), s = g.idx(m, n + 1);
            const CMat2 a = out.F[p] * step(p, q, g.ah[p]) * step(q, r, g.av[q]);
            const CMat2 b = out.F[p] * step(p, s, g.av[p]) * step(s, r, g.ah[s]);
            out.max_compat = std::max(out.max_compat, (a - b).max_abs() / a.max_abs());
        }
    out.net = QuadNet(g.M, g.N);
    out.net.m0 = g.m0, out.net.n0 = g.n0;
    out.net.kappa = -1;
    out.min_trace = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < g.g.size(); ++i) {
        const Cplx d = out.F[i].det();
        if (std::abs(d) == 0) throw DegenerateError("bryant_net: det F vanishes");
        out.max_det_imag = std::max(out.max_det_imag, std::abs(d.imag()) / std::abs(d));
        const CMat2 A = (1.0 / std::abs(d)) * (out.F[i] * out.F[i].conj_transpose());
        out.herm.push_back(A);
        const CMat2 Ah = A.conj_transpose();
        out.max_herm = std::max(out.max_herm, (A - Ah).max_abs() / A.max_abs());
        const double terms = std::abs(A.a) * std::abs(A.d) + std::abs(A.b) * std::abs(A.c);
        out.max_det_one = std::max(out.max_det_one, std::abs(A.det() - 1.0) / terms);
        out.min_trace = std::min(out.min_trace, (A.a + A.d).real());
        const Vec3 b = to_poincare(from_hermitian(A), 1e-6);
        out.net.v[i] = Quaternion::imag(b[0], b[1], b[2]);
    }
    if (out.max_compat > tol) throw NotIsothermicError("bryant_net: frame is not path independent");
    if (out.max_det_imag > tol) throw NotIsothermicError("bryant_net: det F is not real");
    // The frame is a Calapso-type transform, so edge factors follow a / (1 - lambda a).
    out.net.ah = g.ah, out.net.av = g.av;
    for (auto* f : {&out.net.ah, &out.net.av})
        for (double& a : *f)
            if (std::isfinite(a)) a /= 1.0 - lambda * a;
    return out;
}

// ---- surfaces of revolution

namespace {

// Value and gradient with respect to two variables.
struct Dual {
    double v = 0, d0 = 0, d1 = 0;
    Dual() = default;
    Dual(double x) : v(x) {}  // NOLINT(google-explicit-constructor)
    Dual(double x, double a, double b) : v(x), d0(a), d1(b) {}
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d0 + b.d0, a.d1 + b.d1}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d0 - b.d0, a.d1 - b.d1}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d0, -a.d1}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d0 * b.v + a.v * b.d0, a.d1 * b.v + a.v * b.d1}; }
inline Dual operator/(Dual a, Dual b) {
    const double iv = 1.0 / b.v;
    return {a.v * iv, (a.d0 - a.v * iv * b.d0) * iv, (a.d1 - a.v * iv * b.d1) * iv};
}

template <class T>
struct Next {
    T r, h, H, rho, eta;
};

// H, rho, eta at m+1 from equations (6), (7), (8).
template <class T>
Next<T> advance(const RevolutionState& s, T rn, T hn, double alpha, double k) {
    const double S0 = s.r * s.r + s.h * s.h;
    const T S1 = rn * rn + hn * hn;
    const T c = T(alpha) / (T(s.r) * rn);
    const T Hn = T(s.H) + c * T(k) * (T(S0) - S1);
    const T dr = rn - T(s.r), dh = hn - T(s.h);
    const T rhon = T(s.rho) - Hn * rn + T(s.H * s.r) + c * (dr + T(k) * (rn * T(S0) - T(s.r) * S1));
    const T etan = T(s.eta) - Hn * hn + T(s.H * s.h) + c * (dh + T(k) * (hn * T(S0) - T(s.h) * S1));
    return {rn, hn, Hn, rhon, etan};
}

template <class T>
std::array<T, 2> closing(const RevolutionState& s, T rn, T hn, const RevolutionParams& p, double c) {
    const Next<T> n = advance(s, rn, hn, p.alpha, p.kappa);
    const T dr = rn - T(s.r), dh = hn - T(s.h);
    const T e4 = (n.rho + T(s.rho)) * dr + (n.eta + T(s.eta)) * dh;
    const T ec = dr * dr + dh * dh - T(c) * T(s.r) * rn;
    return {e4, ec};
}

double edge_constant(const RevolutionParams& p) {
    const double s = std::sin(kPi / p.N);
    return -p.q * 4.0 * s * s;
}

}  // namespace

double RevolutionResiduals::max() const { return *std::max_element(e.begin(), e.end()); }

RevolutionState revolution_seed(double r, double h, double rho, double eta, const RevolutionParams& p) {
    if (!(r > 0)) throw DomainError("revolution_seed: r must be positive");
    RevolutionState s{r, h, 0, rho, eta};
    s.H = (-p.alpha / r * (1.0 + p.kappa * (r * r + h * h)) - rho) / r;
    return s;
}

double revolution_alpha_for(double Hk, double r, double h, double rho, double eta, double kappa) {
    const double u = 1.0 + kappa * (r * r + h * h);
    if (u == 0) throw DomainError("revolution_alpha_for: seed on the excluded set");
    return ((2.0 * kappa * (r * rho + h * eta) - 2.0 * Hk) * r / u - rho) * r / u;
}

double revolution_Hk(const RevolutionState& s, double kappa) {
    return 0.5 * (s.H * (1.0 + kappa * (s.r * s.r + s.h * s.h)) + 2.0 * kappa * (s.r * s.rho + s.h * s.eta));
}

RevolutionResiduals revolution_residuals(const RevolutionState& a, const RevolutionState& b, const RevolutionParams& p) {
    const double k = p.kappa, al = p.alpha;
    const double S0 = a.r * a.r + a.h * a.h, S1 = b.r * b.r + b.h * b.h;
    const double dr = b.r - a.r, dh = b.h - a.h, drho = b.rho - a.rho, deta = b.eta - a.eta;
    const double c = al / (a.r * b.r);
    RevolutionResiduals R;
    R.e[0] = std::abs(b.rho * b.rho + b.eta * b.eta - a.rho * a.rho - a.eta * a.eta);
    R.e[1] = 0.0;
    R.e[2] = std::max(std::abs(a.rho + a.H * a.r + al / a.r * (1 + k * S0)), std::abs(b.rho + b.H * b.r + al / b.r * (1 + k * S1)));
    R.e[3] = std::abs((b.rho + a.rho) * dr + (b.eta + a.eta) * dh);
    R.e[4] = std::abs(dr * deta - dh * drho);
    R.e[5] = std::abs(b.H - a.H - al * k / (a.r * b.r) * (S0 - S1));
    R.e[6] = std::abs(drho + b.H * b.r - a.H * a.r - c * (dr + k * (b.r * S0 - a.r * S1)));
    R.e[7] = std::abs(deta + b.H * b.h - a.H * a.h - c * (dh + k * (b.h * S0 - a.h * S1)));
    R.e[8] = std::abs(2 * (a.r * a.rho + a.h * a.eta - b.r * b.rho - b.h * b.eta) + a.H * S0 - b.H * S1 - c * (S0 - S1));
    return R;
}

RevolutionState revolution_step(const RevolutionState& s, const RevolutionParams& p, double prev_dr, double prev_dh,
                                StepInfo* info) {
    if (!(s.r > 0)) throw StepError("revolution_step: r must be positive");
    const double c = edge_constant(p);
    if (!(c > 0)) throw DomainError("revolution_step: cross ratio must be negative");
    // The constraint is the circle centered (r (1 + c/2), h) of radius r sqrt(c + c^2/4).
    const double cr = s.r * (1.0 + 0.5 * c), rad = s.r * std::sqrt(c + 0.25 * c * c);
    auto e4 = [&](double phi) { return closing<double>(s, cr + rad * std::cos(phi), s.h + rad * std::sin(phi), p, c)[0]; };
    double wr = prev_dr, wh = prev_dh;
    const bool first = wr == 0 && wh == 0;
    if (first) {
        const double tn = std::hypot(s.eta, s.rho);
        wr = p.direction * s.eta / tn;
        wh = -p.direction * s.rho / tn;
    }
    const int samples = 2880;
    double best_phi = 0, best_score = -std::numeric_limits<double>::infinity();
    double prev = e4(0.0);
    for (int i = 1; i <= samples; ++i) {
        double lo = 2.0 * kPi * (i - 1) / samples, hi = 2.0 * kPi * i / samples;
        const double cur = e4(hi);
        if (!std::isfinite(cur) || !std::isfinite(prev) || (prev > 0) == (cur > 0)) {
            prev = cur;
            continue;
        }
        double flo = prev;
        prev = cur;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi), fm = e4(mid);
            if ((fm > 0) == (flo > 0)) lo = mid, flo = fm;
            else hi = mid;
        }
        const double phi = 0.5 * (lo + hi);
        const double dr = cr + rad * std::cos(phi) - s.r, dh = rad * std::sin(phi);
        if (!first && std::hypot(dr + prev_dr, dh + prev_dh) < 1e-6 * std::hypot(prev_dr, prev_dh)) continue;
        const double score = (dr * wr + dh * wh) / std::hypot(dr, dh);
        if (score > best_score) best_score = score, best_phi = phi;
    }
    if (!std::isfinite(best_score)) throw StepError("revolution_step: no admissible next vertex");
    double rn = cr + rad * std::cos(best_phi), hn = s.h + rad * std::sin(best_phi);
    double res = 0;
    int it = 0;
    for (; it < 50; ++it) {
        const auto F = closing<Dual>(s, Dual(rn, 1, 0), Dual(hn, 0, 1), p, c);
        res = std::max(std::abs(F[0].v), std::abs(F[1].v));
        if (res < 1e-15) break;
        const double a = F[0].d0, b = F[0].d1, cc = F[1].d0, d = F[1].d1;
        const double det = a * d - b * cc;
        if (det == 0 || !std::isfinite(det)) throw StepError("revolution_step: singular Newton Jacobian");
        const double x = (d * F[0].v - b * F[1].v) / det, y = (a * F[1].v - cc * F[0].v) / det;
        rn -= x, hn -= y;
        if (std::max(std::abs(x), std::abs(y)) < 1e-16 * (1.0 + std::abs(rn) + std::abs(hn))) {
            ++it;
            const auto G = closing<double>(s, rn, hn, p, c);
            res = std::max(std::abs(G[0]), std::abs(G[1]));
            break;
        }
    }
    if (!(res < 1e-12)) throw StepError("revolution_step: Newton did not converge (residual " + std::to_string(res) + ")");
    if (!(rn > 0)) throw StepError("revolution_step: profile reaches the axis");
    const Next<double> n = advance(s, rn, hn, p.alpha, p.kappa);
    if (info) info->iterations = it, info->residual = res;
    return {n.r, n.h, n.H, n.rho, n.eta};
}

namespace {

void assemble_revolution(RevolutionNet& out, const RevolutionParams& p) {
    const int rows = static_cast<int>(out.states.size()), cols = p.N + 1;
    out.net = QuadNet(rows, cols);
    out.net.kappa = p.kappa;
    out.Q.assign(static_cast<size_t>(rows) * cols, space_form_q(p.kappa));
    out.Z.assign(static_cast<size_t>(rows) * cols, MinkVec{});
    const double s = std::sin(kPi / p.N);
    for (int m = 0; m < rows; ++m) {
        const RevolutionState& st = out.states[m];
        for (int n = 0; n < cols; ++n) {
            const double t = 2.0 * kPi * (n % p.N) / p.N;
            const Quaternion e = Quaternion::imag(std::cos(t), std::sin(t), 0);
            const Quaternion f = st.r * e + st.h * K_;
            const Quaternion nv = st.rho * e + st.eta * K_;
            out.net.at(m, n) = f;
            out.Z[out.net.idx(m, n)] = {nv + st.H * f, st.H, 2.0 * dot3(f, nv) + st.H * f.norm2()};
            if (m + 1 < rows) {
                const RevolutionState& sn = out.states[m + 1];
                const double d2 = (sn.r - st.r) * (sn.r - st.r) + (sn.h - st.h) * (sn.h - st.h);
                out.net.a_h(m, n) = -p.alpha * d2 / (st.r * sn.r);
            }
            if (n + 1 < cols) out.net.a_v(m, n) = 4.0 * p.alpha * s * s;
        }
    }
    out.Hk = revolution_Hk(out.states[0], p.kappa);
    for (const auto& st : out.states) {
        out.max_Hk_drift = std::max(out.max_Hk_drift, std::abs(revolution_Hk(st, p.kappa) - out.Hk));
        out.max_unit = std::max(out.max_unit, std::abs(st.rho * st.rho + st.eta * st.eta - 1.0));
    }
}

}  // namespace

RevolutionNet revolution_net(const RevolutionState& seed, int steps, const RevolutionParams& p) {
    if (p.N < 3) throw DomainError("revolution_net: N must be at least 3");
    RevolutionNet out;
    out.states.push_back(seed);
    double dr = 0, dh = 0;
    for (int m = 0; m < steps; ++m) {
        StepInfo info;
        RevolutionState next;
        try {
            next = revolution_step(out.states.back(), p, dr, dh, &info);
        } catch (const StepError& e) {
            throw StepError(std::string(e.what()) + " at step " + std::to_string(m));
        }
        if (p.kappa < 0 && next.r * next.r + next.h * next.h >= 1.0 / -p.kappa)
            throw StepError("revolution_net: profile leaves the space form at step " + std::to_string(m));
        out.residuals.push_back(revolution_residuals(out.states.back(), next, p));
        out.iterations.push_back(info.iterations);
        dr = next.r - out.states.back().r, dh = next.h - out.states.back().h;
        out.states.push_back(next);
    }
    assemble_revolution(out, p);
    return out;
}

RevolutionNet cylinder_net(double r, int N, int M) {
    if (!(r > 0)) throw DomainError("cylinder_net: radius must be positive");
    RevolutionParams p;
    p.N = N;
    p.alpha = r / 2;
    p.kappa = 0;
    RevolutionNet out;
    const double dh = 2.0 * r * std::sin(kPi / N);
    for (int m = 0; m < M; ++m) out.states.push_back({r, m * dh, 1.0 / (2.0 * r), -1.0, 0.0});
    for (int m = 0; m + 1 < M; ++m) out.residuals.push_back(revolution_residuals(out.states[m], out.states[m + 1], p));
    out.iterations.assign(M > 0 ? M - 1 : 0, 0);
    assemble_revolution(out, p);
    return out;
}

// ---- R^{2,1}

double r21_inner(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]; }

Vec3 r21_cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], -(a[0] * b[1] - a[1] * b[0])};
}

namespace {
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double enorm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
}  // namespace

double r21_cross_ratio(const Vec3& p, const Vec3& q, const Vec3& r, const Vec3& s, double tol) {
    const Vec3 u = sub(q, p), w = sub(r, p), x = sub(s, p);
    const double sc = std::max({enorm(u), enorm(w), enorm(x)});
    const double uu = r21_inner(u, u);
    if (!(uu > tol * sc * sc)) throw DomainError("r21_cross_ratio: points do not span a spacelike plane");
    const Vec3 e1 = scale(1.0 / std::sqrt(uu), u);
    const Vec3 w2 = sub(w, scale(r21_inner(w, e1), e1));
    const double ww = r21_inner(w2, w2);
    if (!(ww > tol * sc * sc)) throw DomainError("r21_cross_ratio: points do not span a spacelike plane");
    const Vec3 e2 = scale(1.0 / std::sqrt(ww), w2);
    auto coords = [&](const Vec3& v) { return std::array<double, 2>{r21_inner(v, e1), r21_inner(v, e2)}; };
    const Vec3 off = sub(x, add(scale(r21_inner(x, e1), e1), scale(r21_inner(x, e2), e2)));
    if (enorm(off) > tol * sc) throw DomainError("r21_cross_ratio: points are not coplanar");
    const std::array<double, 2> P{0, 0}, Qp = coords(u), R = coords(w), S = coords(x);
    const double d = 2 * (Qp[0] * R[1] - Qp[1] * R[0]);
    if (std::abs(d) < tol * sc * sc) throw DomainError("r21_cross_ratio: collinear points");
    const double q2 = Qp[0] * Qp[0] + Qp[1] * Qp[1], r2 = R[0] * R[0] + R[1] * R[1];
    const double cx = (R[1] * q2 - Qp[1] * r2) / d, cy = (Qp[0] * r2 - R[0] * q2) / d;
    const double rad = std::hypot(cx, cy);
    if (std::abs(std::hypot(S[0] - cx, S[1] - cy) - rad) > tol * sc) throw DomainError("r21_cross_ratio: points are not concircular");
    auto ang = [&](const std::array<double, 2>& a) { return std::atan2(a[1] - cy, a[0] - cx); };
    const double tp = ang(P), tq = ang(Qp), tr = ang(R), ts = ang(S);
    return std::sin((tq - tp) / 2) / std::sin((tr - tq) / 2) * std::sin((ts - tr) / 2) / std::sin((tp - ts) / 2);
}

double R21Report::max() const { return std::max({unit, wedge, tangent, structure}); }

R21Report r21_cmc_verify(const R21Net& net) {
    R21Report rep;
    for (const Vec3& n : net.n) rep.unit = std::max(rep.unit, std::abs(r21_inner(n, n) + 1.0));
    auto edge = [&](int p, int q, double a) {
        const Vec3 df = sub(net.f[q], net.f[p]), dn = sub(net.n[q], net.n[p]);
        const Vec3 np = net.n[p], nq = net.n[q];
        const double L = enorm(df);
        const double sn = std::max(enorm(np), enorm(nq));
        rep.wedge = std::max(rep.wedge, enorm(add(r21_cross(df, nq), r21_cross(np, df))) / (L * sn));
        rep.tangent = std::max(rep.tangent, std::abs(r21_inner(df, add(np, nq))) / (L * sn));
        const double d2 = r21_inner(df, df);
        const Vec3 lhs = scale(net.h, add(dn, scale(net.H, df)));
        const Vec3 rhs = scale(-a / d2, df);
        rep.structure = std::max(rep.structure, enorm(sub(lhs, rhs)) / std::max(enorm(lhs), enorm(rhs)));
    };
    for (int m = 0; m < net.M; ++m)
        for (int k = 0; k < net.N; ++k) {
            const int p = net.idx(m, k);
            if (m + 1 < net.M) edge(p, net.idx(m + 1, k), net.ah[p]);
            if (k + 1 < net.N) edge(p, net.idx(m, k + 1), net.av[p]);
        }
    return rep;
}

R21Net r21_cylinder(double R, double delta, double eps, int M, int N) {
    R21Net net;
    net.M = M, net.N = N;
    const double c = 1.0;
    const double L = 2 * R * std::sinh(delta / 2);
    net.h = -2 * c * R;
    net.H = -1.0 / (2 * R);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < N; ++k) {
            const double t = m * delta;
            net.f.push_back({R * std::sinh(t), k * eps, R * std::cosh(t)});
            net.n.push_back({std::sinh(t), 0, std::cosh(t)});
            net.ah.push_back(c * L * L);
            net.av.push_back(-c * eps * eps);
        }
    return net;
}

Vec3 Lorentz::apply(const Vec3& x) const {
    Vec3 y = b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) y[i] += L[i][j] * x[j];
    return y;
}

Lorentz random_lorentz(unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    using M3 = std::array<std::array<double, 3>, 3>;
    auto mul = [](const M3& A, const M3& B) {
        M3 C{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) C[i][j] += A[i][k] * B[k][j];
        return C;
    };
    auto rot = [](double t) { return M3{{{std::cos(t), -std::sin(t), 0}, {std::sin(t), std::cos(t), 0}, {0, 0, 1}}}; };
    auto boost = [](double b) { return M3{{{std::cosh(b), 0, std::sinh(b)}, {0, 1, 0}, {std::sinh(b), 0, std::cosh(b)}}}; };
    Lorentz T;
    T.L = mul(rot(kPi * U(rng)), mul(boost(1.5 * U(rng)), rot(kPi * U(rng))));
    T.b = {2 * U(rng), 2 * U(rng), 2 * U(rng)};
    return T;
}

// ---- Kobayashi representation

namespace {

using CVec3 = std::array<Cplx, 3>;

CVec3 integrand(const std::function<Cplx(Cplx)>& g, const std::function<Cplx(Cplx)>& eta, Cplx z) {
    const Cplx gz = g(z), e = eta(z), I(0, 1);
    return {(1.0 + gz * gz) * e, I * (1.0 - gz * gz) * e, -2.0 * gz * e};
}

CVec3 edge_integral(const std::function<Cplx(Cplx)>& g, const std::function<Cplx(Cplx)>& eta, Cplx a, Cplx b, int refinement,
                    Quadrature rule) {
    static const double x8[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double w8[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    CVec3 sum{};
    const int k = std::max(1, refinement);
    const Cplx h = (b - a) / static_cast<double>(k);
    for (int s = 0; s < k; ++s) {
        const Cplx z0 = a + static_cast<double>(s) * h;
        if (rule == Quadrature::GaussLegendre) {
            for (int i = 0; i < 8; ++i) {
                const CVec3 v = integrand(g, eta, z0 + 0.5 * (1.0 + x8[i]) * h);
                for (int c = 0; c < 3; ++c) sum[c] += 0.5 * w8[i] * h * v[c];
            }
        } else {
            const CVec3 v0 = integrand(g, eta, z0), v1 = integrand(g, eta, z0 + h);
            for (int c = 0; c < 3; ++c) sum[c] += 0.5 * h * (v0[c] + v1[c]);
        }
    }
    return sum;
}

Vec3 re(const CVec3& v) { return {v[0].real(), v[1].real(), v[2].real()}; }

}  // namespace

KobayashiSample kobayashi_sample(const std::function<Cplx(Cplx)>& g, const std::function<Cplx(Cplx)>& eta,
                                 const std::vector<Cplx>& grid, int M, int N, bool periodic, int refinement,
                                 Quadrature rule, double sing_tol) {
    if (static_cast<int>(grid.size()) != M * N || M < 1 || N < 1) throw DomainError("kobayashi_sample: grid size mismatch");
    KobayashiSample out;
    out.M = M, out.N = N, out.z = grid;
    out.f.assign(grid.size(), Vec3{});
    auto id = [&](int m, int n) { return m * N + n; };
    auto E = [&](int p, int q) { return re(edge_integral(g, eta, grid[p], grid[q], refinement, rule)); };
    for (int n = 1; n < N; ++n) out.f[id(0, n)] = add(out.f[id(0, n - 1)], E(id(0, n - 1), id(0, n)));
    for (int m = 1; m < M; ++m)
        for (int n = 0; n < N; ++n) out.f[id(m, n)] = add(out.f[id(m - 1, n)], E(id(m - 1, n), id(m, n)));
    std::vector<Vec3> alt(grid.size());
    for (int m = 1; m < M; ++m) alt[id(m, 0)] = add(alt[id(m - 1, 0)], E(id(m - 1, 0), id(m, 0)));
    for (int m = 0; m < M; ++m)
        for (int n = 1; n < N; ++n) alt[id(m, n)] = add(alt[id(m, n - 1)], E(id(m, n - 1), id(m, n)));
    for (size_t i = 0; i < grid.size(); ++i) out.max_path = std::max(out.max_path, enorm(sub(out.f[i], alt[i])));
    const int ncells = periodic ? N : N - 1;
    for (int m = 0; m + 1 < M; ++m)
        for (int n = 0; n < ncells; ++n) {
            const int n1 = (n + 1) % N;
            const int p = id(m, n), q = id(m + 1, n), r = id(m + 1, n1), s = id(m, n1);
            const Vec3 loop = add(add(E(p, q), E(q, r)), add(E(r, s), E(s, p)));
            out.max_cell_closure = std::max(out.max_cell_closure, enorm(loop));
        }
    if (periodic)
        for (int m = 0; m < M; ++m) {
            Vec3 loop{};
            for (int n = 0; n < N; ++n) loop = add(loop, E(id(m, n), id(m, (n + 1) % N)));
            out.max_loop_closure = std::max(out.max_loop_closure, enorm(loop));
        }
    for (const Cplx& z : grid) {
        const Cplx gz = g(z);
        const double a2 = std::norm(gz);
        out.metric.push_back((1 - a2) * (1 - a2) * std::norm(eta(z)));
        const bool sing = std::abs(std::abs(gz) - 1.0) < sing_tol;
        out.singular.push_back(sing ? 1 : 0);
        if (sing)
            out.normal.push_back({kNaN, kNaN, kNaN});
        else
            out.normal.push_back({-2 * gz.real() / (a2 - 1), -2 * gz.imag() / (a2 - 1), (a2 + 1) / (a2 - 1)});
    }
    return out;
}

std::vector<Cplx> annulus_grid(double r_min, double r_max, int M, int N) {
    std::vector<Cplx> z;
    for (int m = 0; m < M; ++m) {
        const double r = M == 1 ? r_min : r_min + (r_max - r_min) * m / (M - 1);
        for (int n = 0; n < N; ++n) z.push_back(std::polar(r, 2.0 * kPi * n / N));
    }
    return z;
}

}  // namespace isonet
