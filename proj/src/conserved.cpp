#include "isonet/conserved.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "isonet/errors.hpp"

namespace isonet {

namespace {

double rel(double num, double scale) { return scale > 0 ? num / scale : num; }

double mnorm(const MinkVec& X) { return to_vec5(X).norm(); }

// Unit-normalized light-cone lifts with Gram entries taken from the exact identity
// <lift(x), lift(y)> = -2 |x - y|^2, which avoids cancellation for nearby vertices.
struct UnitLifts {
    const QuadNet* net = nullptr;
    std::vector<MinkVec> U;
    std::vector<double> scale;

    explicit UnitLifts(const QuadNet& n) : net(&n), U(n.v.size()), scale(n.v.size(), 0.0) {
        for (size_t i = 0; i < n.v.size(); ++i) {
            if (!n.mask[i]) continue;
            const MinkVec L = lift(n.v[i], 0.0);
            scale[i] = mnorm(L);
            U[i] = (1.0 / scale[i]) * L;
        }
    }
    double gram(int i, int j) const {
        if (i == j) return 0.0;
        return -2.0 * (net->v[i] - net->v[j]).norm2() / (scale[i] * scale[j]);
    }
};

MinkVec dZ(const MinkVec& Q, const MinkVec& Up, const MinkVec& Uq, double w) {
    return w * (inner(Q, Uq) * Up - inner(Q, Up) * Uq);
}

MinkVec mat_to_mink(const QuatMat2& M, double* worst) {
    double r = 0;
    const MinkVec X = from_mat(M, &r);
    if (worst) *worst = std::max(*worst, rel(r, M.max_abs()));
    return X;
}

std::vector<QuatMat2> coeff_mats(const ConservedQuantity& P, int vertex) {
    std::vector<QuatMat2> out;
    for (const auto& c : P.P) out.push_back(c[vertex].mat());
    return out;
}

double coeff_scale(const ConservedQuantity& P, int p, int q) {
    double s = 0;
    for (const auto& c : P.P) s = std::max({s, c[p].max_abs(), c[q].max_abs()});
    return s;
}

}  // namespace

MinkVec ConservedQuantity::eval(int vertex, double lambda) const {
    MinkVec out{};
    double pw = 1.0;
    for (const auto& c : P) {
        out += pw * c[vertex];
        pw *= lambda;
    }
    return out;
}

ConservedQuantity linear_cq(const std::vector<MinkVec>& Q, const std::vector<MinkVec>& Z) {
    if (Q.size() != Z.size()) throw DomainError("linear_cq: field sizes differ");
    ConservedQuantity P;
    P.P = {Q, Z};
    return P;
}

double CQReport::max() const { return std::max({max_coeff, max_sample, max_dQ, max_dZ, max_tauZ, max_ZF}); }

CQReport verify_cq(const QuadNet& net, const EdgeTau& tau, const ConservedQuantity& P) {
    if (P.P.empty()) throw DomainError("verify_cq: empty conserved quantity");
    CQReport r;
    const int n = P.order();
    r.edge_residual.assign(tau.e.size(), 0.0);
    for (size_t i = 0; i < tau.e.size(); ++i) {
        const Edge& e = tau.e[i];
        const QuatMat2& t = tau.fwd[i];
        const double ts = t.max_abs();
        const double S = coeff_scale(P, e.p, e.q);
        const auto Pp = coeff_mats(P, e.p), Pq = coeff_mats(P, e.q);
        for (int k = 0; k <= n + 1; ++k) {
            QuatMat2 C = QuatMat2::zero();
            if (k <= n) C = Pq[k] - Pp[k];
            if (k >= 1) C = C + t * Pq[k - 1] - Pp[k - 1] * t;
            const double res = rel(C.max_abs(), S * (1.0 + ts));
            r.edge_residual[i] = std::max(r.edge_residual[i], res);
            if (res > r.max_coeff) r.max_coeff = res, r.worst_edge = static_cast<int>(i), r.worst_coeff = k;
        }
        for (double lam : {-1.0, 1.0 / 3.0, 2.0}) {
            const QuatMat2 A = QuatMat2::identity() + lam * t;
            const QuatMat2 Xp = P.eval(e.p, lam).mat(), Xq = P.eval(e.q, lam).mat();
            const double sc = std::max(Xp.max_abs(), Xq.max_abs()) * (1.0 + std::abs(lam) * ts);
            r.max_sample = std::max(r.max_sample, rel(mat_dist(A * Xq, Xp * A), sc));
        }
        if (n == 1) {
            const QuatMat2 Qp = Pp[0], Qq = Pq[0], Zp = Pp[1], Zq = Pq[1];
            r.max_dQ = std::max(r.max_dQ, rel(mat_dist(Qq, Qp), S));
            r.max_dZ = std::max(r.max_dZ, rel(mat_dist(Zq - Zp, Qp * t - t * Qq), S * (1.0 + ts)));
            r.max_tauZ = std::max(r.max_tauZ, rel(mat_dist(t * Zq, Zp * t), S * std::max(ts, 1e-300)));
        }
    }
    if (n >= 1) {
        const UnitLifts L(net);
        for (size_t p = 0; p < net.v.size(); ++p) {
            if (!net.mask[p]) continue;
            const MinkVec& Z = P.Z()[p];
            const double zn = mnorm(Z);
            if (zn > 0) r.max_ZF = std::max(r.max_ZF, std::abs(inner(Z, L.U[p])) / zn);
        }
    }
    return r;
}

std::vector<MinkVec> propagate_Z(const QuadNet& net, const MinkVec& Q, const MinkVec& Z_base, int base) {
    const UnitLifts L(net);
    const Traversal t = bfs(net, base);
    std::vector<MinkVec> Z(net.v.size());
    Z[base] = Z_base;
    for (int q : t.order) {
        const int p = t.parent[q];
        if (p < 0) continue;
        const double w = edge_factor(net, p, q) / L.gram(p, q);
        Z[q] = Z[p] + dZ(Q, L.U[p], L.U[q], w);
    }
    return Z;
}

namespace {

std::vector<int> edge_star(const QuadNet& net, int m, int n) {
    const int dm[5] = {0, 1, 0, -1, 0}, dn[5] = {0, 0, 1, 0, -1};
    std::vector<int> s;
    for (int k = 0; k < 5; ++k) {
        if (!net.has(m + dm[k], n + dn[k]))
            throw DomainError("vertex star at (" + std::to_string(m + net.m0) + "," + std::to_string(n + net.n0) +
                              ") is not interior");
        s.push_back(net.idx(m + dm[k], n + dn[k]));
    }
    return s;
}

Eigen::Matrix<double, 5, 5> star_gram(const UnitLifts& L, const std::vector<int>& s) {
    Eigen::Matrix<double, 5, 5> A;
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k) A(i, k) = L.gram(s[k], s[i]);
    return A;
}

double star_measure(const UnitLifts& L, const std::vector<int>& s) {
    Eigen::MatrixXd U(5, 5);
    for (int k = 0; k < 5; ++k) U.col(k) = to_vec5(L.U[s[k]]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(U);
    return svd.singularValues()(4) / svd.singularValues()(0);
}

Vec5 combine(const UnitLifts& L, const std::vector<int>& s, const Vec5& c) {
    Vec5 out = Vec5::Zero();
    for (int k = 0; k < 5; ++k) out += c(k) * to_vec5(L.U[s[k]]);
    return out;
}

ConservedQuantity assemble(const QuadNet& net, const MinkVec& Q, const MinkVec& Z0, int center) {
    std::vector<MinkVec> Qv(net.v.size(), MinkVec{});
    for (size_t i = 0; i < net.v.size(); ++i)
        if (net.mask[i]) Qv[i] = Q;
    return linear_cq(Qv, propagate_Z(net, Q, Z0, center));
}

}  // namespace

ConservedQuantity solve_Z_given_Q(const QuadNet& net, const MinkVec& Q, int m, int n, double star_tol) {
    if (!net.factorized()) throw NotIsothermicError("solve_Z_given_Q: net has no edge factors");
    const UnitLifts L(net);
    const std::vector<int> s = edge_star(net, m, n);
    if (star_measure(L, s) < star_tol) throw SingularError("solve_Z_given_Q: center vertex star is spherical");
    const Eigen::Matrix<double, 5, 5> A = star_gram(L, s);
    // <F_i, Z_0> = -a_{0i} <Q, F_i>
    Vec5 b = Vec5::Zero();
    for (int i = 1; i < 5; ++i) b(i) = -edge_factor(net, s[0], s[i]) * inner(Q, L.U[s[i]]);
    const Vec5 c = A.partialPivLu().solve(b);
    return assemble(net, Q, from_vec5(combine(L, s, c)), s[0]);
}

ConservedQuantity solve_Z_given_Q_3x3(const QuadNet& net, const MinkVec& Q) {
    return solve_Z_given_Q(net, Q, net.M / 2, net.N / 2);
}

Lcq5x5Result solve_lcq_5x5(const QuadNet& net, double tol, int m, int n, double null_tol, double star_tol) {
    if (!net.factorized()) throw NotIsothermicError("solve_lcq_5x5: net has no edge factors");
    const UnitLifts L(net);
    const int dm[4] = {2, 0, -2, 0}, dn[4] = {0, 2, 0, -2};
    auto two_step = [&](int cm, int cn) {
        if (!net.has(cm, cn) || !net.has(cm + 1, cn) || !net.has(cm - 1, cn) || !net.has(cm, cn + 1) || !net.has(cm, cn - 1))
            return false;
        for (int j = 0; j < 4; ++j)
            if (!net.has(cm + dm[j], cn + dn[j])) return false;
        return true;
    };
    Lcq5x5Result out;
    if (m >= 0 && n >= 0) {
        if (!two_step(m, n)) throw DomainError("solve_lcq_5x5: two-step star leaves the net");
        out.star_measure = star_measure(L, edge_star(net, m, n));
        if (out.star_measure < star_tol) throw SingularError("solve_lcq_5x5: center vertex star is spherical");
    } else {
        // Nearest admissible center to the middle; symmetric nets often have spherical stars there.
        std::vector<std::pair<int, int>> centers;
        for (int cm = 0; cm < net.M; ++cm)
            for (int cn = 0; cn < net.N; ++cn)
                if (two_step(cm, cn)) centers.emplace_back(cm, cn);
        if (centers.empty()) throw DomainError("solve_lcq_5x5: no two-step star fits in the net");
        auto dist = [&](const std::pair<int, int>& c) {
            return std::abs(2 * c.first - net.M + 1) + std::abs(2 * c.second - net.N + 1);
        };
        std::stable_sort(centers.begin(), centers.end(), [&](const auto& a, const auto& b) { return dist(a) < dist(b); });
        bool ok = false;
        for (const auto& [cm, cn] : centers) {
            const double sm = star_measure(L, edge_star(net, cm, cn));
            if (sm >= star_tol) {
                m = cm, n = cn, out.star_measure = sm, ok = true;
                break;
            }
        }
        if (!ok) throw SingularError("solve_lcq_5x5: every admissible vertex star is spherical");
    }
    out.center_m = m, out.center_n = n;
    const std::vector<int> s = edge_star(net, m, n);
    std::vector<int> far;
    for (int j = 0; j < 4; ++j) far.push_back(net.idx(m + dm[j], n + dn[j]));

    const Eigen::Matrix<double, 5, 5> A = star_gram(L, s);
    Eigen::Matrix<double, 5, 5> B = Eigen::Matrix<double, 5, 5>::Zero();
    for (int i = 1; i < 5; ++i) B(i, i) = -edge_factor(net, s[0], s[i]);
    Eigen::Matrix<double, 4, 5> E, At, G;
    Eigen::Matrix<double, 4, 4> C = Eigen::Matrix<double, 4, 4>::Zero(), D = C, W1 = C, W2 = C;
    for (int j = 0; j < 4; ++j) {
        const int near = s[j + 1];
        for (int k = 0; k < 5; ++k) {
            E(j, k) = L.gram(s[k], far[j]);
            At(j, k) = L.gram(s[k], near);
            G(j, k) = L.gram(s[0], s[k]);
        }
        C(j, j) = L.gram(near, far[j]);
        D(j, j) = L.gram(s[0], far[j]);
        W1(j, j) = edge_factor(net, s[0], near) / L.gram(s[0], near);
        W2(j, j) = edge_factor(net, near, far[j]) / L.gram(near, far[j]);
    }
    const Eigen::PartialPivLU<Eigen::Matrix<double, 5, 5>> lu(A);
    Eigen::MatrixXd K = E * lu.solve(B * A) + W1 * D * At - W1 * C * G + W2 * C * E;
    for (int j = 0; j < 4; ++j) {
        const double rn = K.row(j).norm();
        if (rn > 0) K.row(j) /= rn;
    }
    const Eigen::MatrixXd V = nullspace(K, null_tol, &out.singular_values);
    if (V.cols() == 0) {
        out.message = "no null vector";
        return out;
    }
    for (int col = 0; col < V.cols(); ++col) {
        const Vec5 q = V.col(col);
        const Vec5 c = lu.solve(B * A * q);
        LcqCandidate cand;
        cand.cq = assemble(net, from_vec5(combine(L, s, q)), from_vec5(combine(L, s, c)), s[0]);
        cand.report = verify_cq(net, cand.cq);
        if (cand.report.max() < tol) out.found = true;
        out.candidates.push_back(std::move(cand));
    }
    out.message = out.found ? "linear conserved quantity found"
                            : "patch solution does not extend to the whole net";
    return out;
}

GlobalLcqResult solve_lcq_global(const QuadNet& net, double null_tol) {
    if (!net.factorized()) throw NotIsothermicError("solve_lcq_global: net has no edge factors");
    const UnitLifts L(net);
    const Mat5 g = metric5();
    int base = 0;
    while (base < static_cast<int>(net.v.size()) && !net.mask[base]) ++base;
    const Traversal t = bfs(net, base);
    std::vector<Mat5> M(net.v.size(), Mat5::Zero());
    for (int q : t.order) {
        const int p = t.parent[q];
        if (p < 0) continue;
        const double w = edge_factor(net, p, q) / L.gram(p, q);
        const Vec5 up = to_vec5(L.U[p]), uq = to_vec5(L.U[q]);
        M[q] = M[p] + w * (up * (g * uq).transpose() - uq * (g * up).transpose());
    }
    Eigen::MatrixXd R(t.order.size(), 10);
    for (size_t r = 0; r < t.order.size(); ++r) {
        const int p = t.order[r];
        const Eigen::RowVectorXd gu = (g * to_vec5(L.U[p])).transpose();
        R.row(static_cast<Eigen::Index>(r)) << gu * M[p], gu;
        const double rn = R.row(static_cast<Eigen::Index>(r)).norm();
        if (rn > 0) R.row(static_cast<Eigen::Index>(r)) /= rn;
    }
    GlobalLcqResult out;
    const Eigen::MatrixXd V = nullspace(R, null_tol, &out.singular_values);
    for (int col = 0; col < V.cols(); ++col) {
        const Vec5 q = V.col(col).head<5>(), z = V.col(col).tail<5>();
        out.basis.push_back(assemble(net, from_vec5(q), from_vec5(z), base));
    }
    return out;
}

MeanCurvature mean_curvature(const ConservedQuantity& P, double tol) {
    if (P.order() != 1) throw DomainError("mean_curvature: needs a linear conserved quantity");
    const MinkVec& Q0 = P.Q()[0];
    const MinkVec& Z0 = P.Z()[0];
    const double zz = norm2(Z0);
    const double zs = to_vec5(Z0).squaredNorm();
    if (!(zz > tol * zs)) throw DegenerateError("mean_curvature: ||Z||^2 vanishes");
    MeanCurvature h;
    h.norm_Z = std::sqrt(zz);
    h.H = -inner(Z0, Q0) / zz;
    h.abs_H = std::abs(h.H);
    h.orientation = h.H > 0 ? 1 : (h.H < 0 ? -1 : 0);
    h.kappa = -norm2(Q0) / zz;
    h.H_unit = std::abs(h.kappa) > tol ? h.H / std::sqrt(std::abs(h.kappa)) : h.H;
    const double qz0 = inner(Q0, Z0);
    for (size_t p = 0; p < P.Z().size(); ++p) {
        const double sc = to_vec5(P.Z()[p]).squaredNorm() + mnorm(P.Z()[p]) * mnorm(P.Q()[p]);
        if (sc == 0) continue;
        h.max_drift = std::max({h.max_drift, std::abs(norm2(P.Z()[p]) - zz) / sc,
                                std::abs(inner(P.Q()[p], P.Z()[p]) - qz0) / sc});
    }
    return h;
}

ConservedQuantity calapso_shift_cq(const ConservedQuantity& P, double mu, const CalapsoFrame& T) {
    const int n = P.order();
    const size_t V = P.Q().size();
    if (T.T.size() != V) throw DomainError("calapso_shift_cq: frame and quantity sizes differ");
    ConservedQuantity out;
    out.normalization = P.normalization;
    out.P.assign(n + 1, std::vector<MinkVec>(V));
    // binomial coefficients of (lambda + mu)^j
    std::vector<std::vector<double>> binom(n + 1, std::vector<double>(n + 1, 0.0));
    for (int j = 0; j <= n; ++j) {
        binom[j][0] = 1;
        for (int k = 1; k <= j; ++k) binom[j][k] = binom[j - 1][k - 1] + (k <= j - 1 ? binom[j - 1][k] : 0.0);
    }
    for (size_t p = 0; p < V; ++p) {
        for (int k = 0; k <= n; ++k) {
            MinkVec c{};
            for (int j = k; j <= n; ++j) c += binom[j][k] * std::pow(mu, j - k) * P.P[j][p];
            out.P[k][p] = mat_to_mink(T.T[p] * c.mat() * T.Tinv[p], nullptr);
        }
    }
    return out;
}

DarbouxCQ darboux_cq(const ConservedQuantity& P, const QuadNet& net, const QuadNet& fhat, double mu) {
    if (mu == 0) throw DomainError("darboux_cq: mu must be nonzero");
    if (fhat.v.size() != net.v.size()) throw DomainError("darboux_cq: nets differ in size");
    const int n = P.order();
    const size_t V = net.v.size();
    DarbouxCQ out;
    std::vector<std::vector<MinkVec>> C(n + 3, std::vector<MinkVec>(V));
    for (size_t p = 0; p < V; ++p) {
        if (!net.mask[p]) continue;
        const QuatMat2 F = lift(net.v[p], 0.0).mat(), Fh = lift(fhat.v[p], 0.0).mat();
        const double B = 4.0 * (net.v[p] - fhat.v[p]).norm2();  // F Fh + Fh F = B I
        if (B == 0) throw DegenerateError("darboux_cq: transform meets the net");
        const QuatMat2 L[2] = {(mu * mu) * QuatMat2::identity(), (-mu / B) * (Fh * F)};
        const QuatMat2 R[2] = {QuatMat2::identity(), (-1.0 / (mu * B)) * (F * Fh)};
        std::vector<QuatMat2> acc(n + 3, QuatMat2::zero());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j <= n; ++j)
                for (int l = 0; l < 2; ++l) acc[i + j + l] += L[i] * P.P[j][p].mat() * R[l];
        double sc = 0;
        for (int k = 0; k <= n + 1; ++k) sc = std::max(sc, acc[k].max_abs());
        out.max_top = std::max(out.max_top, rel(acc[n + 2].max_abs(), sc));
        for (int k = 0; k <= n + 2; ++k) {
            double r = 0;
            C[k][p] = from_mat(acc[k], &r);
            out.max_embed = std::max(out.max_embed, rel(r, sc));
        }
    }
    C.pop_back();
    out.cq.P = std::move(C);
    out.cq.normalization = "darboux";
    return out;
}

DPFormulaReport dP_edge_formula_check(const QuadNet& net, const ConservedQuantity& P, const std::vector<double>& lambdas) {
    const UnitLifts L(net);
    DPFormulaReport r;
    for (const Edge& e : edges(net)) {
        const double g = L.gram(e.p, e.q);
        const MinkVec &Up = L.U[e.p], &Uq = L.U[e.q];
        for (double lam : lambdas) {
            const MinkVec Pp = P.eval(e.p, lam), Pq = P.eval(e.q, lam);
            const MinkVec d = Pq - Pp;
            const double sc = std::max(mnorm(Pp), mnorm(Pq));
            const MinkVec f1 = (lam * e.a / g) * (inner(Pq, Uq) * Up - inner(Pp, Up) * Uq);
            r.max_first = std::max(r.max_first, rel(mnorm(d - f1), sc));
            const double den = 1.0 - lam * e.a;
            if (std::abs(den) < 1e-8) continue;
            const MinkVec f2 = (lam * e.a / (den * g)) * (inner(Pp, Uq) * Up - inner(Pq, Up) * Uq);
            r.max_second = std::max(r.max_second, rel(mnorm(d - f2), sc));
        }
    }
    return r;
}

namespace {

std::vector<double> norm_poly(const ConservedQuantity& P, int p) {
    const int n = P.order();
    std::vector<double> c(2 * n + 1, 0.0);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) c[i + j] += inner(P.P[i][p], P.P[j][p]);
    return c;
}

}  // namespace

BaecklundValues baecklund_values(const ConservedQuantity& P, double imag_tol) {
    if (P.order() < 1) throw DomainError("baecklund_values: order must be at least 1");
    BaecklundValues out;
    out.poly = norm_poly(P, 0);
    double cmax = 0;
    for (double c : out.poly) cmax = std::max(cmax, std::abs(c));
    for (size_t p = 1; p < P.Q().size(); ++p) {
        const auto c = norm_poly(P, static_cast<int>(p));
        for (size_t k = 0; k < c.size(); ++k)
            out.max_vertex_dependence = std::max(out.max_vertex_dependence, rel(std::abs(c[k] - out.poly[k]), cmax));
    }
    int deg = static_cast<int>(out.poly.size()) - 1;
    while (deg > 0 && std::abs(out.poly[deg]) <= 1e-12 * cmax) --deg;
    if (deg == 0) return out;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -out.poly[i] / out.poly[deg];
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(comp).eigenvalues();
    std::vector<std::complex<double>> z(ev.data(), ev.data() + ev.size());
    std::vector<char> used(z.size(), 0);
    for (size_t i = 0; i < z.size(); ++i) {
        if (used[i]) continue;
        // near-coincident pairs come from a double root split by rounding
        for (size_t j = i + 1; j < z.size(); ++j) {
            if (used[j] || std::abs(z[i] - z[j]) > 1e-6 * (1.0 + std::abs(z[i]))) continue;
            const std::complex<double> avg = 0.5 * (z[i] + z[j]);
            if (std::abs(avg.imag()) < imag_tol * (1.0 + std::abs(avg))) {
                used[i] = used[j] = 1;
                out.roots.push_back(avg.real());
                out.double_root = true;
            }
            break;
        }
        if (used[i]) continue;
        if (std::abs(z[i].imag()) < imag_tol * (1.0 + std::abs(z[i]))) {
            used[i] = 1;
            out.roots.push_back(z[i].real());
        }
    }
    std::sort(out.roots.begin(), out.roots.end());
    for (double mu : out.roots) {
        std::vector<MinkVec> F(P.Q().size());
        for (size_t p = 0; p < F.size(); ++p) F[p] = P.eval(static_cast<int>(p), mu);
        out.lifts.push_back(std::move(F));
    }
    return out;
}

BaecklundCheck is_baecklund(const ConservedQuantity& P, double mu, const QuadNet& fhat, double tol) {
    const UnitLifts L(fhat);
    BaecklundCheck r;
    for (size_t p = 0; p < fhat.v.size(); ++p) {
        if (!fhat.mask[p]) continue;
        const MinkVec X = P.eval(static_cast<int>(p), mu);
        r.max_residual = std::max(r.max_residual, rel(std::abs(inner(X, L.U[p])), mnorm(X)));
    }
    r.ok = r.max_residual < tol;
    return r;
}

EnvelopeReport envelope_check(const QuadNet& net, const std::vector<MinkVec>& Z) {
    const UnitLifts L(net);
    EnvelopeReport r;
    r.min_norm = INFINITY;
    for (size_t p = 0; p < net.v.size(); ++p) {
        if (!net.mask[p]) continue;
        const double zn = mnorm(Z[p]);
        r.max_incidence = std::max(r.max_incidence, rel(std::abs(inner(Z[p], L.U[p])), zn));
        if (zn > 0) r.min_norm = std::min(r.min_norm, norm2(Z[p]) / (zn * zn));
    }
    for (const Edge& e : edges(net)) {
        Eigen::Matrix<double, 5, 2> S;
        S << to_vec5(L.U[e.p]), to_vec5(L.U[e.q]);
        const Vec5 d = to_vec5(Z[e.p] - Z[e.q]);
        const Vec5 res = d - S * S.colPivHouseholderQr().solve(d);
        r.max_touching = std::max(r.max_touching, rel(res.norm(), std::max(mnorm(Z[e.p]), mnorm(Z[e.q]))));
    }
    return r;
}

double SixFactsReport::max() const {
    return std::max({norms_constant, dP_formula, Z_perp_F, std::max(0.0, -Z_norm), Z_null_parallel, sphere_two_sides,
                     QZ_constant, sphere_incidence});
}

SixFactsReport six_facts(const QuadNet& net, const ConservedQuantity& P) {
    if (P.order() < 1) throw DomainError("six_facts: order must be at least 1");
    const UnitLifts L(net);
    const int n = P.order();
    const auto& Q = P.Q();
    const auto& Z = P.Z();
    const auto& Pn1 = P.P[n - 1];
    SixFactsReport r;
    r.Z_norm = INFINITY;
    int first = 0;
    while (!net.mask[first]) ++first;
    const double zz0 = norm2(Z[first]), qq0 = norm2(Q[first]), qz0 = inner(Q[first], Z[first]);
    for (size_t p = 0; p < net.v.size(); ++p) {
        if (!net.mask[p]) continue;
        const double zn = mnorm(Z[p]), qn = mnorm(Q[p]);
        r.norms_constant = std::max({r.norms_constant, rel(std::abs(norm2(Z[p]) - zz0), zn * zn),
                                     rel(std::abs(norm2(Q[p]) - qq0), qn * qn)});
        r.Z_perp_F = std::max(r.Z_perp_F, rel(std::abs(inner(Z[p], L.U[p])), zn));
        if (zn > 0) {
            const double zr = norm2(Z[p]) / (zn * zn);
            r.Z_norm = std::min(r.Z_norm, zr);
            if (std::abs(zr) < 1e-9) {
                const Vec5 u = to_vec5(L.U[p]), z = to_vec5(Z[p]);
                r.Z_null_parallel = std::max(r.Z_null_parallel, (z - u * u.dot(z)).norm() / zn);
            }
        }
        if (n == 1) r.QZ_constant = std::max(r.QZ_constant, rel(std::abs(inner(Q[p], Z[p]) - qz0), zn * qn));
    }
    r.dP_formula = dP_edge_formula_check(net, P).max_first;
    for (const Edge& e : edges(net)) {
        const double g = L.gram(e.p, e.q);
        const MinkVec S1 = Z[e.p] + (e.a * inner(Pn1[e.q], L.U[e.q]) / g) * L.U[e.p];
        const MinkVec S2 = Z[e.q] + (e.a * inner(Pn1[e.p], L.U[e.p]) / g) * L.U[e.q];
        const double sc = std::max({mnorm(S1), mnorm(Z[e.p]), mnorm(Z[e.q])});
        r.sphere_two_sides = std::max(r.sphere_two_sides, rel(mnorm(S1 - S2), sc));
        if (zz0 > 1e-9 * mnorm(Z[first]) * mnorm(Z[first]))
            r.sphere_incidence = std::max({r.sphere_incidence, rel(std::abs(inner(S1, L.U[e.p])), mnorm(S1)),
                                           rel(std::abs(inner(S1, L.U[e.q])), mnorm(S1))});
    }
    return r;
}

}  // namespace isonet
