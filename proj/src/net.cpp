#include "isonet/net.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "isonet/errors.hpp"
#include "isonet/linalg.hpp"

namespace isonet {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

QuadNet::QuadNet(int M_, int N_)
    : M(M_), N(N_), v(static_cast<size_t>(M_) * N_), mask(static_cast<size_t>(M_) * N_, 1),
      ah(static_cast<size_t>(M_) * N_, kNaN), av(static_cast<size_t>(M_) * N_, kNaN) {}

bool QuadNet::factorized() const {
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            if (has_hedge(m, n) && !std::isfinite(a_h(m, n))) return false;
            if (has_vedge(m, n) && !std::isfinite(a_v(m, n))) return false;
        }
    return true;
}

int QuadNet::vertex_count() const { return static_cast<int>(std::count(mask.begin(), mask.end(), 1)); }

std::vector<Edge> edges(const QuadNet& net) {
    std::vector<Edge> out;
    for (int m = 0; m < net.M; ++m)
        for (int n = 0; n < net.N; ++n) {
            if (net.has_hedge(m, n)) out.push_back({net.idx(m, n), net.idx(m + 1, n), net.a_h(m, n), true});
            if (net.has_vedge(m, n)) out.push_back({net.idx(m, n), net.idx(m, n + 1), net.a_v(m, n), false});
        }
    return out;
}

std::vector<Quad> quads(const QuadNet& net) {
    std::vector<Quad> out;
    for (int m = 0; m + 1 < net.M; ++m)
        for (int n = 0; n + 1 < net.N; ++n)
            if (net.has_quad(m, n))
                out.push_back({m, n, net.idx(m, n), net.idx(m + 1, n), net.idx(m + 1, n + 1), net.idx(m, n + 1)});
    return out;
}

double edge_factor(const QuadNet& net, int p, int q) {
    const int lo = std::min(p, q), hi = std::max(p, q);
    const int m = lo / net.N, n = lo % net.N;
    if (hi == lo + net.N) return net.a_h(m, n);
    if (hi == lo + 1 && n + 1 < net.N) return net.a_v(m, n);
    throw DomainError("edge_factor: vertices are not adjacent");
}

Traversal bfs(const QuadNet& net, int base) {
    Traversal t;
    const int total = net.M * net.N;
    t.parent.assign(total, -1);
    std::vector<char> seen(total, 0);
    if (base < 0 || base >= total || !net.mask[base]) throw DomainError("bfs: base vertex missing");
    std::deque<int> queue{base};
    seen[base] = 1;
    while (!queue.empty()) {
        const int p = queue.front();
        queue.pop_front();
        t.order.push_back(p);
        const int m = p / net.N, n = p % net.N;
        const int nb[4][2] = {{m + 1, n}, {m, n + 1}, {m - 1, n}, {m, n - 1}};
        for (const auto& c : nb) {
            if (!net.has(c[0], c[1])) continue;
            const int q = net.idx(c[0], c[1]);
            if (seen[q]) continue;
            seen[q] = 1;
            t.parent[q] = p;
            queue.push_back(q);
        }
    }
    return t;
}

Quaternion cross_ratio(const Quaternion& fp, const Quaternion& fq, const Quaternion& fr, const Quaternion& fs) {
    const Quaternion a = fq - fp, b = fr - fq, c = fs - fr, d = fp - fs;
    if (a.norm2() == 0 || b.norm2() == 0 || c.norm2() == 0 || d.norm2() == 0)
        throw DegenerateError("cross_ratio: repeated consecutive points");
    return a * qinv(b) * c * qinv(d);
}

std::complex<double> hat_cross_ratio(const Quaternion& fp, const Quaternion& fq, const Quaternion& fr, const Quaternion& fs) {
    const Quaternion q = cross_ratio(fp, fq, fr, fs);
    return {q.w, q.im_norm()};
}

Quaternion quad_cross_ratio(const QuadNet& net, int m, int n) {
    return cross_ratio(net.at(m, n), net.at(m + 1, n), net.at(m + 1, n + 1), net.at(m, n + 1));
}

double concircularity_defect(const Quaternion& q) { return q.im_norm() / (1.0 + q.norm()); }

GramCrossRatio cross_ratio_from_gram(const std::array<std::array<double, 4>, 4>& s) {
    const double den = 2.0 * s[0][3] * s[1][2];
    if (den == 0.0) throw DegenerateError("cross_ratio_from_gram: s14 s23 vanishes");
    const double num = s[0][1] * s[2][3] - s[0][2] * s[1][3] + s[0][3] * s[1][2];
    const double xz = 4.0 * s[0][1] * s[2][3] * s[0][3] * s[1][2];
    double diag = 0, off = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) (i == j ? diag : off) = std::max(i == j ? diag : off, std::abs(s[i][j]));
    GramCrossRatio out;
    double floor = 0;
    if (diag <= 1e-14 * off) {
        // Null lifts: E = num^2 - 4 s12 s34 s14 s23, zero below the rounding level of its two terms.
        out.E = num * num - xz;
        const double terms = std::abs(s[0][1] * s[2][3]) + std::abs(s[0][2] * s[1][3]) + std::abs(s[0][3] * s[1][2]);
        floor = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(num) * terms + std::abs(xz));
    } else {
        Eigen::Matrix4d G;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) G(i, j) = s[i][j];
        out.E = G.determinant();
        double hadamard = 1;
        for (int i = 0; i < 4; ++i) hadamard *= G.row(i).norm();
        floor = 64.0 * std::numeric_limits<double>::epsilon() * hadamard;
    }
    out.E_floor = floor;
    const double root = -out.E > floor ? std::sqrt(-out.E) : 0.0;
    out.value = {num / den, std::abs(root / den)};
    return out;
}

FactorizeReport factorize(QuadNet& net, double tol, double seed) {
    FactorizeReport rep;
    const auto qs = quads(net);
    if (qs.empty()) {
        rep.message = "net has no quads";
        return rep;
    }
    std::vector<double> qv(net.M * net.N, kNaN);
    for (const auto& Q : qs) {
        const Quaternion q = quad_cross_ratio(net, Q.m, Q.n);
        const double d = concircularity_defect(q);
        if (d > rep.max_concircularity) {
            rep.max_concircularity = d;
            if (d > tol) rep.worst_m = Q.m, rep.worst_n = Q.n;
        }
        qv[net.idx(Q.m, Q.n)] = q.w;
    }
    if (rep.max_concircularity > tol) {
        rep.message = "quad not concircular";
        return rep;
    }
    if (seed == 0.0) {
        const int n_base = qs.front().n;
        double logsum = 0;
        int count = 0;
        for (const auto& Q : qs)
            if (Q.n == n_base) logsum += std::log(std::abs(qv[net.idx(Q.m, Q.n)])), ++count;
        seed = std::exp(logsum / count);
    }
    std::vector<double> col(net.M, kNaN), row(net.N, kNaN);
    col[qs.front().m] = seed;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& Q : qs) {
            const double q = qv[net.idx(Q.m, Q.n)];
            if (std::isfinite(col[Q.m]) && !std::isfinite(row[Q.n])) row[Q.n] = col[Q.m] / q, changed = true;
            if (!std::isfinite(col[Q.m]) && std::isfinite(row[Q.n])) col[Q.m] = q * row[Q.n], changed = true;
        }
    }
    for (const auto& Q : qs) {
        const double q = qv[net.idx(Q.m, Q.n)];
        const double r = std::abs(q - col[Q.m] / row[Q.n]) / std::max(std::abs(q), 1e-300);
        if (!(r <= rep.max_toda)) {
            rep.max_toda = std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
            if (!(r <= tol)) rep.worst_m = Q.m, rep.worst_n = Q.n;
        }
    }
    if (!(rep.max_toda <= tol)) {
        rep.message = "cross ratios do not factorize (Toda relation violated)";
        return rep;
    }
    for (int m = 0; m < net.M; ++m)
        for (int n = 0; n < net.N; ++n) {
            net.a_h(m, n) = net.has_hedge(m, n) ? col[m] : kNaN;
            net.a_v(m, n) = net.has_vedge(m, n) ? row[n] : kNaN;
        }
    rep.ok = true;
    rep.worst_m = rep.worst_n = -1;
    return rep;
}

void factorize_or_throw(QuadNet& net, double tol, double seed) {
    const FactorizeReport r = factorize(net, tol, seed);
    if (!r.ok)
        throw NotIsothermicError("factorize: " + r.message + " at quad (" + std::to_string(r.worst_m + net.m0) + "," +
                                 std::to_string(r.worst_n + net.n0) + ")");
}

std::vector<MinkVec> standard_lifts(const QuadNet& net, double kappa) {
    std::vector<MinkVec> L(net.v.size());
    for (size_t i = 0; i < net.v.size(); ++i)
        if (net.mask[i]) L[i] = lift(net.v[i], kappa);
    return L;
}

MoutardLift moutard_lift(const QuadNet& net, double base_scale, int base, double tol) {
    if (!net.factorized()) throw NotIsothermicError("moutard_lift: net has no edge factors");
    const auto L = standard_lifts(net, 0.0);
    const Traversal t = bfs(net, base);
    std::vector<double> s(net.v.size(), 0.0);
    s[base] = base_scale;
    for (int q : t.order) {
        const int p = t.parent[q];
        if (p < 0) continue;
        const double a = edge_factor(net, p, q);
        s[q] = a / (4.0 * s[p] * (net.v[q] - net.v[p]).norm2());
    }
    MoutardLift F;
    F.base = base;
    F.base_scale = base_scale;
    F.F.resize(net.v.size());
    for (size_t i = 0; i < L.size(); ++i) F.F[i] = s[i] * L[i];
    const MoutardReport rep = check_moutard(net, F);
    if (rep.max_edge > tol || rep.max_parallel > tol)
        throw NotIsothermicError("moutard_lift: propagation inconsistent (edge " + std::to_string(rep.max_edge) +
                                 ", parallel " + std::to_string(rep.max_parallel) + ")");
    return F;
}

MoutardReport check_moutard(const QuadNet& net, const MoutardLift& F) {
    MoutardReport r;
    for (const Edge& e : edges(net)) {
        const QuatMat2 Fp = F.F[e.p].mat(), Fq = F.F[e.q].mat();
        const QuatMat2 S = Fp * Fq + Fq * Fp;
        const double sc = std::max(std::abs(e.a), F.F[e.p].max_abs() * F.F[e.q].max_abs());
        const double res = mat_dist(S, e.a * QuatMat2::identity()) / sc;
        r.max_edge = std::max(r.max_edge, res);
    }
    for (const Quad& Q : quads(net)) {
        const Vec5 u = to_vec5(F.F[Q.r] - F.F[Q.p]);
        const Vec5 w = to_vec5(F.F[Q.q] - F.F[Q.s]);
        const double un = u.norm(), wn = w.norm();
        if (un > 0 && wn > 0) {
            const Vec5 perp = u - (u.dot(w) / (wn * wn)) * w;
            r.max_parallel = std::max(r.max_parallel, perp.norm() / un);
        }
        const double apq = net.a_h(Q.m, Q.n), aps = net.a_v(Q.m, Q.n);
        const double cross = inner(F.F[Q.p], F.F[Q.q]) * aps - inner(F.F[Q.p], F.F[Q.s]) * apq;
        const double csc = F.F[Q.p].max_abs() * std::max(F.F[Q.q].max_abs() * std::abs(aps), F.F[Q.s].max_abs() * std::abs(apq));
        r.max_ratio = std::max(r.max_ratio, std::abs(cross) / csc);
        const Vec5 sum = to_vec5(F.F[Q.r] + F.F[Q.p]);
        const double o = inner(F.F[Q.r] + F.F[Q.p], F.F[Q.q] - F.F[Q.s]);
        const double sc = sum.norm() * wn;
        if (sc > 0) r.max_orthogonal = std::max(r.max_orthogonal, std::abs(o) / sc);
    }
    return r;
}

MoutardLift checkerboard_rescale(const QuadNet& net, const MoutardLift& F, double alpha, double beta) {
    MoutardLift G = F;
    for (int m = 0; m < net.M; ++m)
        for (int n = 0; n < net.N; ++n) {
            const int i = net.idx(m, n);
            G.F[i] = (((m + n) % 2 == 0) ? alpha : beta) * F.F[i];
        }
    G.base_scale *= ((F.base / net.N + F.base % net.N) % 2 == 0) ? alpha : beta;
    return G;
}

double spherical_measure(const std::vector<MinkVec>& lifts) {
    const Eigen::MatrixXd A = unit_columns(lifts);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto s = svd.singularValues();
    if (s.size() < 5) return 0.0;
    return s(4) / s(0);
}

double normalized_gram_det(const std::vector<MinkVec>& lifts) {
    const Eigen::MatrixXd A = unit_columns(lifts);
    const Eigen::MatrixXd G = A.transpose() * metric5() * A;
    return G.determinant();
}

StarSphere vertex_star_sphere(const QuadNet& net, int m, int n, double tol) {
    const int pts[5][2] = {{m, n}, {m + 1, n + 1}, {m - 1, n + 1}, {m - 1, n - 1}, {m + 1, n - 1}};
    std::vector<MinkVec> L;
    for (const auto& c : pts) {
        if (!net.has(c[0], c[1])) throw DomainError("vertex_star_sphere: vertex is not interior");
        L.push_back(lift(net.at(c[0], c[1]), 0.0));
    }
    StarSphere out;
    out.measure = spherical_measure(L);
    if (out.measure > tol) throw NotIsothermicError("vertex_star_sphere: diagonal star is not cospherical");
    Eigen::Matrix<double, 5, 5> A;
    for (int k = 0; k < 5; ++k) A.row(k) = (metric5() * to_vec5(L[k])).transpose() / to_vec5(L[k]).norm();
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 5>> svd(A, Eigen::ComputeFullV);
    Vec5 s = svd.matrixV().col(4);
    MinkVec S = from_vec5(s);
    const double n2 = norm2(S);
    if (n2 > 0) S = (1.0 / std::sqrt(n2)) * S;
    out.S = S;
    return out;
}

double edge_star_measure(const QuadNet& net, int m, int n) {
    const int pts[5][2] = {{m, n}, {m + 1, n}, {m, n + 1}, {m - 1, n}, {m, n - 1}};
    std::vector<MinkVec> L;
    for (const auto& c : pts) {
        if (!net.has(c[0], c[1])) throw DomainError("is_vertex_star_spherical: vertex is not interior");
        L.push_back(lift(net.at(c[0], c[1]), 0.0));
    }
    return spherical_measure(L);
}

bool is_vertex_star_spherical(const QuadNet& net, int m, int n, double tol) { return edge_star_measure(net, m, n) <= tol; }

Quaternion dual_edge(const Quaternion& fp, const Quaternion& fq, double a) { return a * qinv(fq - fp); }

double net_spherical_measure(const QuadNet& net) {
    std::vector<MinkVec> L;
    for (size_t i = 0; i < net.v.size(); ++i)
        if (net.mask[i]) L.push_back(lift(net.v[i], 0.0));
    return spherical_measure(L);
}

}  // namespace isonet
