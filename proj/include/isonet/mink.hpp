#pragma once

#include <array>
#include <complex>

#include "isonet/quat.hpp"

namespace isonet {

// Element [[x, xinf], [x0, -x]] of R^{4,1}, x imaginary.
struct MinkVec {
    Quaternion x;
    double x0 = 0;
    double xinf = 0;

    QuatMat2 mat() const { return {x, xinf, x0, -x}; }
    std::array<double, 5> coords() const { return {x.x, x.y, x.z, x0, xinf}; }
    static MinkVec from_coords(const std::array<double, 5>& c) { return {Quaternion::imag(c[0], c[1], c[2]), c[3], c[4]}; }
    double max_abs() const;
};

inline MinkVec operator+(const MinkVec& a, const MinkVec& b) { return {a.x + b.x, a.x0 + b.x0, a.xinf + b.xinf}; }
inline MinkVec operator-(const MinkVec& a, const MinkVec& b) { return {a.x - b.x, a.x0 - b.x0, a.xinf - b.xinf}; }
inline MinkVec operator-(const MinkVec& a) { return {-a.x, -a.x0, -a.xinf}; }
inline MinkVec operator*(double s, const MinkVec& a) { return {s * a.x, s * a.x0, s * a.xinf}; }
inline MinkVec& operator+=(MinkVec& a, const MinkVec& b) { return a = a + b; }

// Reads a matrix back as an element of R^{4,1}; off-model components go to *residual.
MinkVec from_mat(const QuatMat2& M, double* residual = nullptr);

// <X,Y> I = -(XY + YX)/2
double inner(const MinkVec& X, const MinkVec& Y);
inline double norm2(const MinkVec& X) { return inner(X, X); }

// Q = [[0,1],[kappa,0]] selecting the space form M_kappa.
MinkVec space_form_q(double kappa);

// Light-cone lift with <lift, Q> = -1.
MinkVec lift(const Quaternion& x, double kappa = 0.0);

struct Projection {
    bool at_infinity = false;
    Quaternion x;
    double scale = 0;  // s with <s X, Q> = -1
};

Projection project(const MinkVec& X, double kappa = 0.0, double tol = 1e-14);

// Conjugation X -> T X T^{-1}.
MinkVec conjugate_by(const QuatMat2& T, const MinkVec& X, double* residual = nullptr);

struct SphereGeometry {
    bool is_plane = false;
    Quaternion center;          // sphere: center in coordinates
    double coord_radius = 0;    // Euclidean radius in the coordinate space
    double radius = 0;          // radius for the metric 4|dx|^2 of M_0
    double H0 = 0;              // mean curvature for that metric
    Quaternion normal;          // plane: unit normal
    double offset = 0;          // plane: <y, normal> = offset
};

SphereGeometry sphere_geometry(const MinkVec& S, double tol = 1e-14);

// H_kappa of the sphere S, whose M_0 data is (H0, center) for the unit vector S.
double sphere_H_kappa(const MinkVec& S, double kappa);

// Principal intersection angle in [0, pi].
double sphere_angle(const MinkVec& S1, const MinkVec& S2);

// p -> p - 2 <p,S> S, S normalized internally.
MinkVec invert_through(const MinkVec& S, const MinkVec& p);

// Sphere vector of the coordinate sphere with given center and radius.
MinkVec sphere_from_center_radius(const Quaternion& center, double coord_radius);

// Antipodal map x -> kappa^{-1} x^{-1} as an element of the Moebius group.
QuatMat2 antipodal_element(double kappa);

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;  // (x1, x2, x3, x0)

// Hyperboloid x0^2 - |x|^2 = 1 to the Poincare ball.
Vec3 to_poincare(const Vec4& X, double tol = 1e-8);
Vec4 from_poincare(const Vec3& b);
Vec3 to_upper_half(const Vec3& b);
Vec3 from_upper_half(const Vec3& u);

using Cplx = std::complex<double>;

// Complex 2x2 matrix [[a,b],[c,d]].
struct CMat2 {
    Cplx a, b, c, d;
    static CMat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    Cplx det() const { return a * d - b * c; }
    CMat2 conj_transpose() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
    double max_abs() const;
};

inline CMat2 operator*(const CMat2& S, const CMat2& T) {
    return {S.a * T.a + S.b * T.c, S.a * T.b + S.b * T.d, S.c * T.a + S.d * T.c, S.c * T.b + S.d * T.d};
}
inline CMat2 operator+(const CMat2& S, const CMat2& T) { return {S.a + T.a, S.b + T.b, S.c + T.c, S.d + T.d}; }
inline CMat2 operator-(const CMat2& S, const CMat2& T) { return {S.a - T.a, S.b - T.b, S.c - T.c, S.d - T.d}; }
inline CMat2 operator*(Cplx s, const CMat2& T) { return {s * T.a, s * T.b, s * T.c, s * T.d}; }

// psi(x) = [[x0+x3, x1+i x2], [x1-i x2, x0-x3]]
CMat2 to_hermitian(const Vec4& X);
Vec4 from_hermitian(const CMat2& A);

}  // namespace isonet
