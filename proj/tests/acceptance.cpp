// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "isonet/commands.hpp"
#include "isonet/conserved.hpp"
#include "isonet/generators.hpp"
#include "isonet/netfile.hpp"
#include "isonet/transforms.hpp"

using namespace isonet;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    // Records value <= bound under a label.
    void check(const std::string& label, double value, double bound) {
        const bool ok = std::isfinite(value) && value <= bound;
        if (!ok) pass = false;
        detail << label << "=" << value << (ok ? "" : "(!)") << " ";
    }
    void require(const std::string& label, bool ok) {
        if (!ok) pass = false;
        detail << label << "=" << (ok ? "yes" : "no(!)") << " ";
    }
};

std::mt19937 rng(20261016);

Quaternion rand_q() {
    std::normal_distribution<double> d;
    return {d(rng), d(rng), d(rng), d(rng)};
}

Quaternion rand_im(double s = 1.0) {
    std::normal_distribution<double> d(0.0, s);
    return Quaternion::imag(d(rng), d(rng), d(rng));
}

double rel(const Quaternion& a, const Quaternion& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

QuatMat2 rand_mobius() {
    std::uniform_real_distribution<double> u(0.5, 2.0);
    QuatMat2 T = QuatMat2::identity();
    for (int k = 0; k < 3; ++k) {
        Quaternion r = rand_q();
        r = r / r.norm();
        const double s = u(rng);
        T = T * QuatMat2{1.0, rand_im(), 0.0, 1.0} * QuatMat2{r, 0.0, 0.0, r} * QuatMat2{s, 0.0, 0.0, 1.0 / s} *
            QuatMat2{0.0, 1.0, 1.0, 0.0};
    }
    return T;
}

DiscreteHolo catenoid_holo(int rows) {
    const double c2 = 2.0 * M_PI / 8.0;
    DiscreteHolo h = dhf_exp(solve_c1(c2), c2, rows, 9, -rows / 2, 0);
    factorize_holo(h);
    return h;
}

DiscreteHolo enneper_holo() {
    DiscreteHolo h = dhf_linear(Cplx(1.0, 0.0), 7, 7, -3, -3);
    factorize_holo(h);
    return h;
}

RevolutionNet revolution(double kappa, double Hk, int steps = 12) {
    RevolutionParams p;
    p.N = 8;
    p.kappa = kappa;
    p.alpha = revolution_alpha_for(Hk, 0.5, 0.0, -1.0, 0.0, kappa);
    return revolution_net(revolution_seed(0.5, 0.0, -1.0, 0.0, p), steps, p);
}

// ---- 1

void algebra(Outcome& o) {
    double assoc = 0, trace = 0;
    for (int t = 0; t < 10000; ++t) {
        const Quaternion a = rand_q(), b = rand_q(), c = rand_q(), d = rand_q();
        assoc = std::max(assoc, rel((a * b) * c, a * (b * c)) / (1 + a.norm() * b.norm() * c.norm()));
        const double r = (a * b * c * d).re(), s = 1 + a.norm() * b.norm() * c.norm() * d.norm();
        trace = std::max(trace, std::abs((d.conj() * c.conj() * b.conj() * a.conj()).re() - r) / s);
        trace = std::max(trace, std::abs((b.conj() * a.conj() * d.conj() * c.conj()).re() - r) / s);
        trace = std::max(trace, std::abs((b * c * d * a).re() - r) / s);
    }
    double study = 0;
    for (int t = 0; t < 1000; ++t) {
        const QuatMat2 A = rand_mobius(), B = rand_mobius(), AB = A * B;
        const double sc = AB.a.norm() * AB.d.norm() + AB.b.norm() * AB.c.norm();
        study = std::max(study, std::abs(study_det(AB) - study_det(A) * study_det(B)) / (sc * sc));
    }
    o.check("assoc", assoc, 1e-12);
    o.check("trace", trace, 1e-12);
    o.check("study", study, 1e-10);
}

// ---- 2

std::array<Quaternion, 4> rand_concircular() {
    const Quaternion c = rand_im();
    Quaternion e1 = rand_im();
    e1 = e1 / e1.norm();
    Quaternion e2 = rand_im();
    e2 = e2 - dot3(e2, e1) * e1;
    e2 = e2 / e2.norm();
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI), r(0.3, 2.0);
    const double rho = r(rng);
    std::array<double, 4> t{};
    for (int i = 0; i < 4; ++i)
        for (bool ok = false; !ok;) {
            t[i] = u(rng);
            ok = true;
            for (int k = 0; k < i; ++k)
                if (std::abs(std::remainder(t[i] - t[k], 2.0 * M_PI)) < 0.2) ok = false;
        }
    std::array<Quaternion, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = c + rho * (std::cos(t[i]) * e1 + std::sin(t[i]) * e2);
    return out;
}

std::array<std::array<double, 4>, 4> gram(const std::array<Quaternion, 4>& p) {
    const Quaternion c = 0.25 * (p[0] + p[1] + p[2] + p[3]);
    std::array<std::array<double, 4>, 4> s{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s[i][j] = inner(lift(p[i] - c), lift(p[j] - c));
    return s;
}

void cross_ratios(Outcome& o) {
    QuadNet net(6, 6);
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n) {
            const bool me = m % 2 == 0, ne = n % 2 == 0;
            net.at(m, n) = me && ne ? J_ : (!me && ne ? I_ + J_ : (!me && !ne ? Quaternion() : I_));
        }
    double half = 0;
    for (const Quad& q : quads(net)) half = std::max(half, (quad_cross_ratio(net, q.m, q.n) - Quaternion(0.5)).norm());
    o.check("one_half", half, 1e-14);

    // E <= 0 judged against the rounding bound of its computation.
    double agree = 0, Emax_cc = -INFINITY, Emax_gen = -INFINITY;
    for (int t = 0; t < 1000; ++t) {
        const auto p = rand_concircular();
        const GramCrossRatio g = cross_ratio_from_gram(gram(p));
        const auto h = hat_cross_ratio(p[0], p[1], p[2], p[3]);
        agree = std::max(agree, std::abs(g.value - h) / (1 + std::abs(h)));
        Emax_cc = std::max(Emax_cc, g.E - g.E_floor);
        const std::array<Quaternion, 4> r{rand_im(), rand_im(), rand_im(), rand_im()};
        const GramCrossRatio gr = cross_ratio_from_gram(gram(r));
        Emax_gen = std::max(Emax_gen, gr.E - gr.E_floor);
    }
    o.check("gram_vs_quat", agree, 1e-10);
    o.check("E_minus_floor_concircular", Emax_cc, 0.0);
    o.check("E_minus_floor_generic", Emax_gen, 0.0);
}

// ---- 3

void moutard(Outcome& o) {
    const QuadNet net = minimal_net(catenoid_holo(20)).net;
    const MoutardLift F = moutard_lift(net);
    const MoutardReport r = check_moutard(net, F);
    o.check("edge_identity", r.max_edge, 1e-10);
    o.check("parallel", r.max_parallel, 1e-10);
    double star = 0;
    for (int m = 1; m + 1 < net.M; ++m)
        for (int n = 1; n + 1 < net.N; ++n) {
            std::vector<MinkVec> L;
            for (auto [dm, dn] : {std::pair{0, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) L.push_back(lift(net.at(m + dm, n + dn)));
            star = std::max(star, std::abs(normalized_gram_det(L)));
        }
    o.check("diag_star_gram", star, 1e-9);
}

// ---- 4

void christoffel_crit(Outcome& o) {
    double cr = 0, sphere = 0;
    for (const DiscreteHolo& h : {catenoid_holo(20), enneper_holo()}) {
        const QuadNet net = minimal_net(h).net;
        const ChristoffelResult c = christoffel(net);
        for (const Quad& q : quads(net)) {
            const Quaternion a = quad_cross_ratio(net, q.m, q.n), b = quad_cross_ratio(c.net, q.m, q.n);
            cr = std::max(cr, (a - b).norm() / (1 + a.norm()));
        }
        sphere = std::max(sphere, net_spherical_measure(c.net));
    }
    o.check("cross_ratio_change", cr, 1e-10);
    o.check("dual_on_sphere", sphere, 1e-9);
}

// ---- 5

void calapso_crit(Outcome& o) {
    const QuadNet net = minimal_net(catenoid_holo(8)).net;
    const int base = net.idx(net.M / 2, net.N / 2);
    double factor = 0, plaq = 0, group = 0;
    for (auto [lambda, mu] : {std::pair{0.2, 0.1}, {-0.3, 0.15}}) {
        const CalapsoResult A = calapso(net, lambda, QuatMat2::identity(), base);
        for (size_t i = 0; i < net.ah.size(); ++i)
            for (auto [a, b] : {std::pair{net.ah[i], A.net.ah[i]}, {net.av[i], A.net.av[i]}})
                if (std::isfinite(a)) factor = std::max(factor, std::abs(b - a / (1 - lambda * a)) / std::max(1.0, std::abs(b)));
        plaq = std::max({plaq, A.max_plaquette, flat_connection_plaquette(net, lambda)});
        const CalapsoResult B = calapso(A.net, mu, QuatMat2::identity(), base);
        const CalapsoResult C = calapso(net, lambda + mu, QuatMat2::identity(), base);
        for (size_t i = 0; i < net.v.size(); ++i) group = std::max(group, projective_dist(C.frame.T[i], B.frame.T[i] * A.frame.T[i]));
    }
    o.check("factor_law", factor, 1e-10);
    o.check("plaquette", plaq, 1e-10);
    o.check("group", group, 1e-9);
}

// ---- 6

void darboux_crit(Outcome& o) {
    double closure = 0, conc = 0, cr = 0, top = 0;
    bool order_ok = true;
    const RevolutionNet cyl = cylinder_net(0.5, 8, 6);
    const QuadNet cat = minimal_net(catenoid_holo(8)).net;
    const ConservedQuantity Pc = linear_cq(cyl.Q, cyl.Z);
    const ConservedQuantity Pk = solve_lcq_5x5(cat).candidates.at(0).cq;
    for (auto [net, P] : {std::pair{&cyl.net, &Pc}, {&cat, &Pk}})
        for (double mu : {0.3, -0.5}) {
            const DarbouxResult d = darboux(*net, mu, net->v[0] + Quaternion::imag(0.2, 0.1, 0.05));
            closure = std::max(closure, d.max_closure);
            conc = std::max(conc, d.max_concircular);
            cr = std::max(cr, d.max_cross_ratio);
            const DarbouxCQ dc = darboux_cq(*P, *net, d.net, mu);
            top = std::max(top, dc.max_top);
            order_ok = order_ok && dc.cq.order() <= P->order() + 1 && verify_cq(d.net, dc.cq).max() < 1e-8;
        }
    o.check("riccati_closure", closure, 1e-10);
    o.check("mixed_concircular", conc, 1e-10);
    o.check("cross_ratio", cr, 1e-10);
    o.check("top_coeff", top, 1e-9);
    o.require("order_n_plus_1_verified", order_ok);
}

// ---- 7

void conserved_crit(Outcome& o) {
    const RevolutionNet cyl = cylinder_net(0.5, 8, 6);
    const ConservedQuantity P = linear_cq(cyl.Q, cyl.Z);
    o.check("cylinder_lcq", verify_cq(cyl.net, P).max(), 1e-10);
    o.check("cylinder_absH_minus_half", std::abs(mean_curvature(P).abs_H - 0.5), 1e-10);

    std::vector<std::pair<std::string, QuadNet>> nets;
    for (auto [kappa, Hk] : {std::pair{-1.0, 1.2}, {0.0, 0.8}, {1.0, 1.0}})
        nets.emplace_back("rev" + std::to_string(static_cast<int>(kappa)), revolution(kappa, Hk).net);
    nets.emplace_back("catenoid", minimal_net(catenoid_holo(20)).net);
    nets.emplace_back("enneper", minimal_net(enneper_holo()).net);
    nets.emplace_back("bryant_cat", bryant_net(catenoid_holo(8), 0.3).net);
    nets.emplace_back("bryant_enn", bryant_net(enneper_holo(), 0.3).net);
    double worst = 0;
    bool all = true;
    for (const auto& [name, net] : nets) {
        const Lcq5x5Result l = solve_lcq_5x5(net);
        all = all && l.found;
        if (l.found) worst = std::max(worst, l.candidates[0].report.max());
    }
    o.require("found_all_7", all);
    o.check("worst_lcq", worst, 1e-8);

    QuadNet bad = revolution(0.0, 0.8).net;
    for (int n = 0; n < bad.N; ++n) {
        const Quaternion f = bad.at(10, n);
        bad.at(10, n) = Quaternion::imag(1.01 * f.x, 1.01 * f.y, f.z);
    }
    o.require("fault_still_isothermic", factorize(bad).ok);
    o.require("fault_none", !solve_lcq_5x5(bad).found);
}

// ---- 8

void revolution_crit(Outcome& o) {
    for (auto [kappa, Hk] : {std::pair{-1.0, 1.2}, {0.0, 0.8}, {1.0, 1.0}}) {
        const RevolutionNet rn = revolution(kappa, Hk, 12);
        double eq = 0;
        for (const RevolutionResiduals& r : rn.residuals) eq = std::max(eq, r.max());
        const std::string k = "k" + std::to_string(static_cast<int>(kappa));
        o.require(k + "_steps>=12", rn.residuals.size() >= 12);
        o.check(k + "_eq", eq, 1e-10);
        o.check(k + "_drift", rn.max_Hk_drift, 1e-10);
        o.check(k + "_lcq", verify_cq(rn.net, linear_cq(rn.Q, rn.Z)).max(), 1e-8);
    }
}

// ---- 9

void bryant_crit(Outcome& o) {
    double det_imag = 0, herm = 0, det_one = 0, min_trace = INFINITY, conc = 0;
    for (const DiscreteHolo& h : {catenoid_holo(8), enneper_holo()}) {
        const BryantNetResult b = bryant_net(h, 0.3);
        det_imag = std::max(det_imag, b.max_det_imag);
        for (const Quad& q : quads(b.net)) conc = std::max(conc, concircularity_defect(quad_cross_ratio(b.net, q.m, q.n)));
        // Membership of the exported ball coordinates.
        std::istringstream in(to_obj(b.net, true));
        for (std::string line; std::getline(in, line);) {
            std::istringstream ls(line);
            std::string tag;
            Vec3 x;
            if (!(ls >> tag) || tag != "v" || !(ls >> x[0] >> x[1] >> x[2])) continue;
            const CMat2 A = to_hermitian(from_poincare(x));
            herm = std::max(herm, (A - A.conj_transpose()).max_abs() / A.max_abs());
            const double terms = std::abs(A.a) * std::abs(A.d) + std::abs(A.b) * std::abs(A.c);
            det_one = std::max(det_one, std::abs(A.det() - 1.0) / terms);
            min_trace = std::min(min_trace, (A.a + A.d).real());
        }
    }
    o.check("det_imag", det_imag, 1e-10);
    o.check("hermitian", herm, 1e-9);
    o.check("det_one", det_one, 1e-9);
    o.require("trace_positive", min_trace > 0);
    o.check("concircular", conc, 1e-9);
}

// ---- 10

void kobayashi_crit(Outcome& o) {
    const int M = 9, N = 24;
    const KobayashiSample s = kobayashi_sample([](Cplx z) { return z; }, [](Cplx z) { return 1.0 / (z * z); },
                                               annulus_grid(0.5, 1.5, M, N), M, N, true);
    o.check("loop_closure", s.max_loop_closure, 1e-8);
    int wrong = 0, on = 0;
    for (size_t i = 0; i < s.z.size(); ++i) {
        const bool circle = std::abs(std::abs(s.z[i]) - 1.0) < 1e-12;
        on += circle;
        wrong += (s.singular[i] != 0) != circle;
    }
    o.require("unit_circle_sampled", on == N);
    o.require("flags_exact", wrong == 0);
}

// ---- 11

void r21_crit(Outcome& o) {
    auto circ = [](double t) { return Vec3{std::cos(t), std::sin(t), 0.0}; };
    double inv = 0;
    for (int t = 0; t < 10; ++t) {
        std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
        std::array<double, 4> th{u(rng), u(rng), u(rng), u(rng)};
        std::sort(th.begin(), th.end());
        const Vec3 a = circ(th[0]), b = circ(th[1]), c = circ(th[2]), d = circ(th[3]);
        double base;
        try {
            base = r21_cross_ratio(a, b, c, d);
        } catch (const Error&) {
            continue;
        }
        for (unsigned seed = 0; seed < 100; ++seed) {
            const Lorentz L = random_lorentz(seed + 100 * t);
            const double q = r21_cross_ratio(L.apply(a), L.apply(b), L.apply(c), L.apply(d));
            inv = std::max(inv, std::abs(q - base) / (1 + std::abs(base)));
        }
    }
    o.check("lorentz_invariance", inv, 1e-10);
    o.check("cylinder_cmc", r21_cmc_verify(r21_cylinder(1.0, 0.2, 0.2, 8, 8)).max(), 1e-9);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> all = {
        {"algebraic kernel", algebra},
        {"cross ratio", cross_ratios},
        {"Moutard lift", moutard},
        {"Christoffel transform", christoffel_crit},
        {"Calapso transform", calapso_crit},
        {"Darboux transform", darboux_crit},
        {"conserved quantities", conserved_crit},
        {"revolution generator", revolution_crit},
        {"Bryant nets", bryant_crit},
        {"Kobayashi sampler", kobayashi_crit},
        {"Lorentz 3-space", r21_crit},
    };
    int failed = 0;
    for (size_t i = 0; i < all.size(); ++i) {
        Outcome o;
        o.detail.precision(3);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            all[i].run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= 10.0) {
            o.pass = false;
            o.detail << "too slow ";
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %-22s %.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, secs, o.detail.str().c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
