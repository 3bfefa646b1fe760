#pragma once

#include <cmath>
#include <ostream>

namespace isonet {

// w + x i + y j + z k
struct Quaternion {
    double w = 0, x = 0, y = 0, z = 0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
    constexpr Quaternion(double r) : w(r) {}  // NOLINT(google-explicit-constructor)

    static constexpr Quaternion imag(double x, double y, double z) { return {0, x, y, z}; }

    constexpr double re() const { return w; }
    constexpr Quaternion im() const { return {0, x, y, z}; }
    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    double im_norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool is_finite() const { return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Quaternion I_{0, 1, 0, 0};
constexpr Quaternion J_{0, 0, 1, 0};
constexpr Quaternion K_{0, 0, 0, 1};

constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) { return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(double s, const Quaternion& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }
constexpr Quaternion operator*(const Quaternion& a, double s) { return s * a; }
constexpr Quaternion operator/(const Quaternion& a, double s) { return {a.w / s, a.x / s, a.y / s, a.z / s}; }

// Hamilton product.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quaternion& operator+=(Quaternion& a, const Quaternion& b) { return a = a + b; }
inline Quaternion& operator-=(Quaternion& a, const Quaternion& b) { return a = a - b; }
inline Quaternion& operator*=(Quaternion& a, double s) { return a = a * s; }

inline Quaternion qmul(const Quaternion& p, const Quaternion& q) { return p * q; }

// Throws DomainError for q == 0.
Quaternion qinv(const Quaternion& q);

// Euclidean dot product of the imaginary parts.
constexpr double dot3(const Quaternion& a, const Quaternion& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double dist(const Quaternion& a, const Quaternion& b) { return (a - b).norm(); }

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

// [[a, b], [c, d]]
struct QuatMat2 {
    Quaternion a, b, c, d;

    static constexpr QuatMat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr QuatMat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
    double max_abs() const;
};

constexpr QuatMat2 operator*(const QuatMat2& S, const QuatMat2& T) {
    return {S.a * T.a + S.b * T.c, S.a * T.b + S.b * T.d, S.c * T.a + S.d * T.c, S.c * T.b + S.d * T.d};
}
constexpr QuatMat2 operator+(const QuatMat2& S, const QuatMat2& T) { return {S.a + T.a, S.b + T.b, S.c + T.c, S.d + T.d}; }
constexpr QuatMat2 operator-(const QuatMat2& S, const QuatMat2& T) { return {S.a - T.a, S.b - T.b, S.c - T.c, S.d - T.d}; }
constexpr QuatMat2 operator*(double s, const QuatMat2& T) { return {s * T.a, s * T.b, s * T.c, s * T.d}; }
constexpr QuatMat2 operator*(const QuatMat2& T, double s) { return s * T; }
inline QuatMat2& operator+=(QuatMat2& S, const QuatMat2& T) { return S = S + T; }

// Largest entry modulus of S - T.
double mat_dist(const QuatMat2& S, const QuatMat2& T);

// Residual of S against the best real multiple of T, relative to |S|.
double projective_dist(const QuatMat2& S, const QuatMat2& T);

// |a|^2|d|^2 + |b|^2|c|^2 - b conj(d) c conj(a) - a conj(c) d conj(b); always real.
double study_det(const QuatMat2& T);

// Closed-form inverse; throws SingularError if the Study determinant vanishes.
QuatMat2 qmat_inv(const QuatMat2& T);

struct MobiusResiduals {
    double bd = 0;  // |conj(b) d + conj(d) b|
    double ac = 0;  // |conj(a) c + conj(c) a|
    double im = 0;  // |Im(conj(a) d + conj(c) b)|
    double re = 0;  // Re(conj(a) d + conj(c) b)
};

MobiusResiduals mob3_residuals(const QuatMat2& T);

// Membership in the group of quaternionic matrices acting as Moebius transformations.
bool in_mob3(const QuatMat2& T, double tol);

struct MobResult {
    bool at_infinity = false;
    Quaternion value;
};

// (a x + b)(c x + d)^{-1}; tagged result when c x + d vanishes.
MobResult mob_apply(const QuatMat2& T, const Quaternion& x, double tol = 1e-14);

}  // namespace isonet
