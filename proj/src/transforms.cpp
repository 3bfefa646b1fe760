#include "isonet/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isonet/errors.hpp"

namespace isonet {

namespace {

std::string vertex_label(const QuadNet& net, int i) {
    return "(" + std::to_string(i / net.N + net.m0) + "," + std::to_string(i % net.N + net.n0) + ")";
}

double rel(double num, double scale) { return scale > 0 ? num / scale : num; }

// Parent in the row-major sweep: (m, n-1) if present, else (m-1, n).
std::vector<int> sweep_parents(const QuadNet& net, int base, std::vector<int>& order) {
    const Traversal t = bfs(net, base);
    std::vector<int> parent(net.v.size(), -1);
    order.clear();
    if (base != 0) {
        order = t.order;
        return t.parent;
    }
    std::vector<char> done(net.v.size(), 0);
    for (int n = 0; n < net.N; ++n)
        for (int m = 0; m < net.M; ++m) {
            if (!net.has(m, n)) continue;
            const int i = net.idx(m, n);
            if (i == base) {
                order.push_back(i), done[i] = 1;
                continue;
            }
            int p = -1;
            if (net.has(m, n - 1) && done[net.idx(m, n - 1)]) p = net.idx(m, n - 1);
            else if (net.has(m - 1, n) && done[net.idx(m - 1, n)]) p = net.idx(m - 1, n);
            if (p < 0) continue;
            parent[i] = p, done[i] = 1, order.push_back(i);
        }
    if (order.size() != t.order.size()) {
        order = t.order;
        return t.parent;
    }
    return parent;
}

}  // namespace

ChristoffelResult christoffel(const QuadNet& net, double tol, int base) {
    if (!net.factorized()) throw NotIsothermicError("christoffel: net has no edge factors");
    ChristoffelResult out;
    out.net = net;
    const Traversal t = bfs(net, base);
    out.net.v[base] = Quaternion();
    for (int q : t.order) {
        const int p = t.parent[q];
        if (p < 0) continue;
        out.net.v[q] = out.net.v[p] + dual_edge(net.v[p], net.v[q], edge_factor(net, p, q));
    }
    for (const Quad& Q : quads(net)) {
        const Quaternion d1 = dual_edge(net.v[Q.p], net.v[Q.q], net.a_h(Q.m, Q.n));
        const Quaternion d2 = dual_edge(net.v[Q.q], net.v[Q.r], net.a_v(Q.m + 1, Q.n));
        const Quaternion d3 = dual_edge(net.v[Q.p], net.v[Q.s], net.a_v(Q.m, Q.n));
        const Quaternion d4 = dual_edge(net.v[Q.s], net.v[Q.r], net.a_h(Q.m, Q.n + 1));
        const double scale = d1.norm() + d2.norm() + d3.norm() + d4.norm();
        const double r = rel((d1 + d2 - d3 - d4).norm(), scale);
        if (r > out.max_closure) out.max_closure = r, out.worst_m = Q.m, out.worst_n = Q.n;
    }
    if (out.max_closure > tol)
        throw NotIsothermicError("christoffel: dual increments do not close at quad (" +
                                 std::to_string(out.worst_m + net.m0) + "," + std::to_string(out.worst_n + net.n0) + ")");
    return out;
}

QuatMat2 edge_tau(const QuadNet& net, int p, int q) {
    const Quaternion fp = net.v[p], fq = net.v[q];
    const Quaternion ds = dual_edge(fp, fq, edge_factor(net, p, q));
    return {fp * ds, -(fp * ds * fq), ds, -(ds * fq)};
}

QuatMat2 edge_tau_lift(const MinkVec& Fp, const MinkVec& Fq, double a) {
    const double g = inner(Fp, Fq);
    if (g == 0.0) throw DegenerateError("edge_tau_lift: coincident vertices");
    return (a / (2.0 * g)) * (Fp.mat() * Fq.mat());
}

EdgeTau compute_tau(const QuadNet& net) {
    EdgeTau t;
    t.e = edges(net);
    for (const Edge& e : t.e) {
        t.fwd.push_back(edge_tau(net, e.p, e.q));
        t.bwd.push_back(edge_tau(net, e.q, e.p));
    }
    return t;
}

TauReport check_tau(const QuadNet& net) {
    TauReport r;
    const auto L = standard_lifts(net, 0.0);
    for (const Edge& e : edges(net)) {
        const QuatMat2 t = edge_tau(net, e.p, e.q), tb = edge_tau(net, e.q, e.p);
        const double cond = std::abs(e.a) * L[e.p].max_abs() * L[e.q].max_abs() / (4.0 * (net.v[e.q] - net.v[e.p]).norm2());
        const double sc = std::max({t.max_abs(), std::abs(e.a), cond});
        r.max_formula = std::max(r.max_formula, rel(mat_dist(t, edge_tau_lift(L[e.p], L[e.q], e.a)), sc));
        r.max_sum = std::max(r.max_sum, rel(mat_dist(t + tb, -e.a * QuatMat2::identity()), sc));
        const double kp = (L[e.p].mat() * t).max_abs() / (L[e.p].max_abs() * sc);
        const double kq = (t * L[e.q].mat()).max_abs() / (L[e.q].max_abs() * sc);
        r.max_kernel = std::max({r.max_kernel, kp, kq});
    }
    for (const Quad& Q : quads(net)) {
        const QuatMat2 tpq = edge_tau(net, Q.p, Q.q), tqr = edge_tau(net, Q.q, Q.r);
        const QuatMat2 tps = edge_tau(net, Q.p, Q.s), tsr = edge_tau(net, Q.s, Q.r);
        const double s1 = std::max({tpq.max_abs(), tqr.max_abs(), tps.max_abs(), tsr.max_abs()});
        r.max_quad_sum = std::max(r.max_quad_sum, rel(mat_dist(tpq + tqr, tps + tsr), s1));
        r.max_quad_prod = std::max(r.max_quad_prod, rel(mat_dist(tpq * tqr, tps * tsr), s1 * s1));
    }
    return r;
}

CalapsoResult calapso(const QuadNet& net, double lambda, const QuatMat2& T0, int base) {
    if (!net.factorized()) throw NotIsothermicError("calapso: net has no edge factors");
    for (const Edge& e : edges(net))
        if (std::abs(1.0 - lambda * e.a) < 1e-12)
            throw PoleError("calapso: lambda a = 1 on edge " + vertex_label(net, e.p) + "-" + vertex_label(net, e.q));
    CalapsoResult out;
    out.frame.lambda = lambda;
    out.frame.base = base;
    const Traversal t = bfs(net, base);
    out.frame.parent = t.parent;
    auto& T = out.frame.T;
    auto& Ti = out.frame.Tinv;
    T.assign(net.v.size(), QuatMat2::zero());
    Ti.assign(net.v.size(), QuatMat2::zero());
    T[base] = T0;
    Ti[base] = qmat_inv(T0);
    const QuatMat2 Id = QuatMat2::identity();
    for (int q : t.order) {
        const int p = t.parent[q];
        if (p < 0) continue;
        const double a = edge_factor(net, p, q);
        T[q] = T[p] * (Id + lambda * edge_tau(net, p, q));
        Ti[q] = (1.0 / (1.0 - lambda * a)) * ((Id + lambda * edge_tau(net, q, p)) * Ti[p]);
    }
    std::vector<int> depth(net.v.size(), 0);
    for (int q : t.order)
        if (t.parent[q] >= 0) depth[q] = depth[t.parent[q]] + 1;
    for (const Edge& e : edges(net)) {
        const int p = depth[e.p] < depth[e.q] ? e.p : e.q, q = p == e.p ? e.q : e.p;
        const QuatMat2 pred = T[p] * (Id + lambda * edge_tau(net, p, q));
        out.max_frame = std::max(out.max_frame, rel(mat_dist(T[q], pred), T[q].max_abs()));
    }
    for (const Quad& Q : quads(net)) {
        const QuatMat2 a = (Id + lambda * edge_tau(net, Q.p, Q.q)) * (Id + lambda * edge_tau(net, Q.q, Q.r));
        const QuatMat2 b = (Id + lambda * edge_tau(net, Q.p, Q.s)) * (Id + lambda * edge_tau(net, Q.s, Q.r));
        out.max_plaquette = std::max(out.max_plaquette, rel(mat_dist(a, b), std::max(a.max_abs(), 1.0)));
    }
    out.net = net;
    for (int i : t.order) {
        const double sc = T[i].max_abs();
        const MobiusResiduals g = mob3_residuals(T[i]);
        out.max_group = std::max({out.max_group, g.bd / (sc * sc), g.ac / (sc * sc), g.im / (sc * sc)});
        const MinkVec X = from_mat(T[i] * lift(net.v[i], 0.0).mat() * Ti[i]);
        const Projection pr = project(X, 0.0, 1e-13);
        if (pr.at_infinity) throw PoleError("calapso: vertex " + vertex_label(net, i) + " maps to infinity");
        out.net.v[i] = pr.x;
    }
    for (size_t i = 0; i < net.v.size(); ++i) {
        if (std::isfinite(net.ah[i])) out.net.ah[i] = net.ah[i] / (1.0 - lambda * net.ah[i]);
        if (std::isfinite(net.av[i])) out.net.av[i] = net.av[i] / (1.0 - lambda * net.av[i]);
    }
    return out;
}

Mat5 flat_connection(const QuadNet& net, double lambda, int p, int q) {
    const double a = edge_factor(net, p, q);
    if (std::abs(1.0 - lambda * a) < 1e-12) throw PoleError("flat_connection: lambda a = 1");
    const QuatMat2 Id = QuatMat2::identity();
    const QuatMat2 L = Id + lambda * edge_tau(net, p, q), R = Id + lambda * edge_tau(net, q, p);
    Mat5 G;
    for (int k = 0; k < 5; ++k) {
        std::array<double, 5> c{};
        c[k] = 1.0;
        const QuatMat2 Y = (1.0 / (1.0 - lambda * a)) * (L * MinkVec::from_coords(c).mat() * R);
        G.col(k) = to_vec5(from_mat(Y));
    }
    return G;
}

double flat_connection_plaquette(const QuadNet& net, double lambda) {
    double worst = 0;
    for (const Quad& Q : quads(net)) {
        const Mat5 a = flat_connection(net, lambda, Q.r, Q.q) * flat_connection(net, lambda, Q.q, Q.p);
        const Mat5 b = flat_connection(net, lambda, Q.r, Q.s) * flat_connection(net, lambda, Q.s, Q.p);
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff() / std::max(1.0, a.cwiseAbs().maxCoeff()));
    }
    return worst;
}

DarbouxResult darboux(const QuadNet& net, double mu, const Quaternion& fhat_base, double tol) {
    if (!net.factorized()) throw NotIsothermicError("darboux: net has no edge factors");
    std::vector<int> order;
    const std::vector<int> parent = sweep_parents(net, 0, order);
    std::vector<Quaternion> D(net.v.size());
    D[0] = fhat_base - net.v[0];
    if (D[0].norm2() == 0) throw DegenerateError("darboux: initial point lies on the net");
    auto step = [&](int p, int q, const Quaternion& Dp) {
        const Quaternion df = net.v[q] - net.v[p];
        const Quaternion ds = dual_edge(net.v[p], net.v[q], edge_factor(net, p, q));
        const Quaternion den = Quaternion(1.0) - mu * Dp * ds;
        if (den.norm() < 1e-14 * (1.0 + (mu * Dp * ds).norm()))
            throw PoleError("darboux: Riccati step singular at " + vertex_label(net, q));
        return qinv(den) * (Dp - df);
    };
    for (int q : order) {
        const int p = parent[q];
        if (p < 0) continue;
        D[q] = step(p, q, D[p]);
    }
    DarbouxResult out;
    out.net = net;
    for (int i : order) out.net.v[i] = (net.v[i] + D[i]).im();
    for (const Quad& Q : quads(net)) {
        const Quaternion via_q = step(Q.q, Q.r, step(Q.p, Q.q, D[Q.p]));
        const Quaternion via_s = step(Q.s, Q.r, step(Q.p, Q.s, D[Q.p]));
        const double r = rel((via_q - via_s).norm(), std::max(via_q.norm(), 1e-300));
        if (r > out.max_closure) out.max_closure = r, out.worst_m = Q.m, out.worst_n = Q.n;
        const Quaternion qh = quad_cross_ratio(out.net, Q.m, Q.n), q0 = quad_cross_ratio(net, Q.m, Q.n);
        out.max_cross_ratio = std::max(out.max_cross_ratio, (qh - q0).norm() / (1.0 + q0.norm()));
    }
    for (const Edge& e : edges(net)) {
        const Quaternion cr = cross_ratio(net.v[e.p], net.v[e.q], out.net.v[e.q], out.net.v[e.p]);
        out.max_concircular = std::max(out.max_concircular, concircularity_defect(cr));
    }
    if (out.max_closure > tol)
        throw NotIsothermicError("darboux: Riccati solution not path independent at quad (" +
                                 std::to_string(out.worst_m + net.m0) + "," + std::to_string(out.worst_n + net.n0) + ")");
    return out;
}

}  // namespace isonet
