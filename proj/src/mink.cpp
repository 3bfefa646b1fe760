#include "isonet/mink.hpp"

#include <algorithm>
#include <cmath>

#include "isonet/errors.hpp"

namespace isonet {

double MinkVec::max_abs() const { return std::max({x.im_norm(), std::abs(x0), std::abs(xinf)}); }

MinkVec from_mat(const QuatMat2& M, double* residual) {
    MinkVec X;
    X.x = 0.5 * (M.a - M.d).im();
    X.xinf = M.b.w;
    X.x0 = M.c.w;
    if (residual) {
        const double r = std::max({std::abs(M.a.w), std::abs(M.d.w), (M.a + M.d).im_norm(), M.b.im_norm(), M.c.im_norm()});
        *residual = r;
    }
    return X;
}

double inner(const MinkVec& X, const MinkVec& Y) { return dot3(X.x, Y.x) - 0.5 * (X.x0 * Y.xinf + X.xinf * Y.x0); }

MinkVec space_form_q(double kappa) { return {Quaternion{}, kappa, 1.0}; }

MinkVec lift(const Quaternion& x, double kappa) {
    const Quaternion v = x.im();
    const double r2 = v.norm2();
    const double den = 1.0 + kappa * r2;
    if (std::abs(den) < 1e-14) throw DomainError("lift: point on the excluded set of the space form");
    const double s = 2.0 / den;
    return {s * v, s, s * r2};
}

Projection project(const MinkVec& X, double kappa, double tol) {
    Projection p;
    if (std::abs(X.x0) <= tol * std::max(1.0, X.max_abs())) {
        p.at_infinity = true;
        return p;
    }
    p.x = X.x / X.x0;
    const double q = inner(X, space_form_q(kappa));
    p.scale = q != 0.0 ? -1.0 / q : 0.0;
    return p;
}

MinkVec conjugate_by(const QuatMat2& T, const MinkVec& X, double* residual) {
    return from_mat(T * X.mat() * qmat_inv(T), residual);
}

SphereGeometry sphere_geometry(const MinkVec& S, double tol) {
    const double n2 = norm2(S);
    if (!(n2 > 0)) throw DomainError("sphere_geometry: vector is not spacelike");
    const double n = std::sqrt(n2);
    SphereGeometry g;
    if (std::abs(S.x0) <= tol * std::max(1.0, S.max_abs())) {
        g.is_plane = true;
        const double zn = S.x.im_norm();
        g.normal = S.x / zn;
        g.offset = S.xinf / (2.0 * zn);
        return g;
    }
    g.center = S.x / S.x0;
    g.coord_radius = n / std::abs(S.x0);
    g.radius = 2.0 * g.coord_radius;
    g.H0 = std::abs(S.x0) / (2.0 * n);
    return g;
}

double sphere_H_kappa(const MinkVec& S, double kappa) {
    const SphereGeometry g = sphere_geometry(S);
    if (g.is_plane) throw DomainError("sphere_H_kappa: plane");
    return g.H0 - kappa / (4.0 * g.H0) + g.H0 * kappa * g.center.norm2();
}

double sphere_angle(const MinkVec& S1, const MinkVec& S2) {
    const double n1 = norm2(S1), n2 = norm2(S2);
    if (!(n1 > 0) || !(n2 > 0)) throw DomainError("sphere_angle: vectors must be spacelike");
    double c = inner(S1, S2) / std::sqrt(n1 * n2);
    if (std::abs(c) > 1.0 + 1e-12) throw DomainError("sphere_angle: spheres do not intersect");
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

MinkVec invert_through(const MinkVec& S, const MinkVec& p) {
    const double n2 = norm2(S);
    if (!(n2 > 0)) throw DomainError("invert_through: vector is not spacelike");
    return p - (2.0 * inner(p, S) / n2) * S;
}

MinkVec sphere_from_center_radius(const Quaternion& center, double coord_radius) {
    const Quaternion c = center.im();
    return {c, 1.0, c.norm2() - coord_radius * coord_radius};
}

QuatMat2 antipodal_element(double kappa) {
    if (kappa == 0.0) throw DomainError("antipodal_element: kappa must be nonzero");
    return {0.0, 1.0, kappa, 0.0};
}

Vec3 to_poincare(const Vec4& X, double tol) {
    const double x0 = X[3];
    const double q = x0 * x0 - X[0] * X[0] - X[1] * X[1] - X[2] * X[2];
    if (!(x0 > 0) || std::abs(q - 1.0) > tol * std::max(1.0, x0 * x0)) throw DomainError("to_poincare: point is not on the hyperboloid");
    return {X[0] / (1.0 + x0), X[1] / (1.0 + x0), X[2] / (1.0 + x0)};
}

Vec4 from_poincare(const Vec3& b) {
    const double r2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if (!(r2 < 1.0)) throw DomainError("from_poincare: point outside the open ball");
    const double s = 1.0 / (1.0 - r2);
    return {2 * b[0] * s, 2 * b[1] * s, 2 * b[2] * s, (1.0 + r2) * s};
}

Vec3 to_upper_half(const Vec3& b) {
    const double r2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if (!(r2 < 1.0)) throw DomainError("to_upper_half: point outside the open ball");
    const double den = b[0] * b[0] + b[1] * b[1] + (b[2] - 1.0) * (b[2] - 1.0);
    return {2 * b[0] / den, 2 * b[1] / den, (1.0 - r2) / den};
}

Vec3 from_upper_half(const Vec3& u) {
    if (!(u[2] > 0)) throw DomainError("from_upper_half: point not in the upper half-space");
    const double r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const double den = u[0] * u[0] + u[1] * u[1] + (u[2] + 1.0) * (u[2] + 1.0);
    return {2 * u[0] / den, 2 * u[1] / den, (r2 - 1.0) / den};
}

double CMat2::max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

CMat2 to_hermitian(const Vec4& X) {
    return {Cplx(X[3] + X[2], 0), Cplx(X[0], X[1]), Cplx(X[0], -X[1]), Cplx(X[3] - X[2], 0)};
}

Vec4 from_hermitian(const CMat2& A) {
    return {0.5 * (A.b.real() + A.c.real()), 0.5 * (A.b.imag() - A.c.imag()), 0.5 * (A.a.real() - A.d.real()),
            0.5 * (A.a.real() + A.d.real())};
}

}  // namespace isonet
