#include "isonet/quat.hpp"

#include <algorithm>

#include "isonet/errors.hpp"

namespace isonet {

Quaternion qinv(const Quaternion& q) {
    const double n2 = q.norm2();
    if (n2 == 0.0 || !std::isfinite(n2)) throw DomainError("qinv: zero quaternion");
    return q.conj() / n2;
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << "(" << q.w << " + " << q.x << "i + " << q.y << "j + " << q.z << "k)";
}

static double qmax(const Quaternion& q) {
    return std::max({std::abs(q.w), std::abs(q.x), std::abs(q.y), std::abs(q.z)});
}

double QuatMat2::max_abs() const { return std::max({qmax(a), qmax(b), qmax(c), qmax(d)}); }

double mat_dist(const QuatMat2& S, const QuatMat2& T) { return (S - T).max_abs(); }

double projective_dist(const QuatMat2& S, const QuatMat2& T) {
    const Quaternion* s[4] = {&S.a, &S.b, &S.c, &S.d};
    const Quaternion* t[4] = {&T.a, &T.b, &T.c, &T.d};
    double st = 0, tt = 0, ss = 0;
    for (int e = 0; e < 4; ++e) {
        st += s[e]->w * t[e]->w + s[e]->x * t[e]->x + s[e]->y * t[e]->y + s[e]->z * t[e]->z;
        tt += t[e]->norm2();
        ss += s[e]->norm2();
    }
    if (ss == 0.0) return std::sqrt(tt);
    const double k = tt > 0 ? st / tt : 0.0;
    return (S - k * T).max_abs() / std::sqrt(ss);
}

double study_det(const QuatMat2& T) {
    const Quaternion cross = T.b * T.d.conj() * T.c * T.a.conj() + T.a * T.c.conj() * T.d * T.b.conj();
    return T.a.norm2() * T.d.norm2() + T.b.norm2() * T.c.norm2() - cross.w;
}

QuatMat2 qmat_inv(const QuatMat2& T) {
    const double det = study_det(T);
    const double scale = std::max(1.0, T.max_abs());
    if (std::abs(det) <= 1e-300 || std::abs(det) < 1e-14 * scale * scale * scale * scale)
        throw SingularError("qmat_inv: Study determinant vanishes");
    const Quaternion &a = T.a, &b = T.b, &c = T.c, &d = T.d;
    QuatMat2 R;
    R.a = d.norm2() * a.conj() - c.conj() * d * b.conj();
    R.b = b.norm2() * c.conj() - a.conj() * b * d.conj();
    R.c = c.norm2() * b.conj() - d.conj() * c * a.conj();
    R.d = a.norm2() * d.conj() - b.conj() * a * c.conj();
    return (1.0 / det) * R;
}

MobiusResiduals mob3_residuals(const QuatMat2& T) {
    MobiusResiduals r;
    r.bd = (T.b.conj() * T.d + T.d.conj() * T.b).norm();
    r.ac = (T.a.conj() * T.c + T.c.conj() * T.a).norm();
    const Quaternion s = T.a.conj() * T.d + T.c.conj() * T.b;
    r.im = s.im_norm();
    r.re = s.w;
    return r;
}

bool in_mob3(const QuatMat2& T, double tol) {
    const MobiusResiduals r = mob3_residuals(T);
    return r.bd < tol && r.ac < tol && r.im < tol && std::abs(r.re) > tol;
}

MobResult mob_apply(const QuatMat2& T, const Quaternion& x, double tol) {
    const Quaternion num = T.a * x + T.b;
    const Quaternion den = T.c * x + T.d;
    if (den.norm() <= tol * std::max(1.0, num.norm())) return {true, Quaternion{}};
    return {false, num * qinv(den)};
}

}  // namespace isonet
