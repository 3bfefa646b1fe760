#include "isonet/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "isonet/generators.hpp"
#include "isonet/linalg.hpp"
#include "isonet/transforms.hpp"

namespace isonet {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string label(const char* what, int m, int n) {
    return std::string(what) + " (" + std::to_string(m) + "," + std::to_string(n) + ")";
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

json params_json(const Params& p) {
    json j{{"n", p.n}, {"rows", p.rows}, {"kappa", p.kappa}, {"H", p.H}, {"r", p.r},
           {"lambda", p.lambda}, {"mu", p.mu}, {"tol", p.tol}, {"root", p.root}};
    if (p.fhat) j["fhat"] = *p.fhat;
    return j;
}

DiscreteHolo catenoid_holo(const Params& p) {
    if (p.n < 3) throw Error("catenoid needs n >= 3");
    const double c2 = 2.0 * kPi / p.n;
    DiscreteHolo h = dhf_exp(solve_c1(c2), c2, p.rows, p.n + 1, -p.rows / 2, 0);
    const HoloReport rep = factorize_holo(h, p.tol);
    if (!rep.ok) throw NotIsothermicError("discrete exp is not factorizable: " + rep.message);
    return h;
}

DiscreteHolo enneper_holo(const Params& p) {
    DiscreteHolo h = dhf_linear(Cplx(1.0, 0.0), p.rows, p.n, -p.rows / 2, -p.n / 2);
    const HoloReport rep = factorize_holo(h, p.tol);
    if (!rep.ok) throw NotIsothermicError("discrete z is not factorizable: " + rep.message);
    return h;
}

NetFile generate(const std::string& kind, const Params& p, json& info) {
    NetFile f;
    if (p.n < 2 || p.rows < 2) throw Error("lattice needs n >= 2 and rows >= 2");
    if (kind == "planar-grid") {
        f.net = planar_grid(p.rows, p.n);
    } else if (kind == "minimal-enneper" || kind == "minimal-catenoid") {
        const DiscreteHolo h = kind == "minimal-enneper" ? enneper_holo(p) : catenoid_holo(p);
        const MinimalNetResult r = minimal_net(h, p.tol);
        f.net = r.net;
        info["max_closure"] = r.max_closure;
    } else if (kind == "bryant-enneper-cousin" || kind == "bryant-catenoid-cousin") {
        const DiscreteHolo h = kind == "bryant-enneper-cousin" ? enneper_holo(p) : catenoid_holo(p);
        const BryantNetResult r = bryant_net(h, p.lambda, CMat2::identity(), p.tol);
        f.net = r.net;
        info["max_det_imag"] = r.max_det_imag;
        info["max_herm"] = r.max_herm;
        info["max_det_one"] = r.max_det_one;
        info["min_trace"] = r.min_trace;
    } else if (kind == "revolution") {
        RevolutionParams rp;
        rp.N = p.n;
        rp.kappa = p.kappa;
        rp.alpha = revolution_alpha_for(p.H, p.r, 0.0, -1.0, 0.0, p.kappa);
        if (!(std::abs(rp.alpha) > 1e-12))
            throw DegenerateError("seed radius and H describe a round sphere (edge factor 0); change --r or --H");
        const RevolutionState seed = revolution_seed(p.r, 0.0, -1.0, 0.0, rp);
        const RevolutionNet r = revolution_net(seed, p.rows - 1, rp);
        f.net = r.net;
        ConservedQuantity cq = linear_cq(r.Q, r.Z);
        cq.normalization = "assembled";
        f.cq = std::move(cq);
        double worst = 0;
        for (const auto& e : r.residuals) worst = std::max(worst, e.max());
        info["alpha"] = rp.alpha;
        info["H_kappa"] = r.Hk;
        info["max_equation_residual"] = worst;
        info["max_H_drift"] = r.max_Hk_drift;
    } else if (kind == "maximal-sample") {
        // Catenoid data g = z, eta = z^-2 dz on an annulus around the singular circle |z| = 1.
        const auto grid = annulus_grid(0.5, 1.5, p.rows, p.n);
        const KobayashiSample s = kobayashi_sample([](Cplx z) { return z; }, [](Cplx z) { return 1.0 / (z * z); },
                                                   grid, p.rows, p.n, true);
        f.ambient = "R21";
        f.net = QuadNet(p.rows, p.n);
        for (size_t i = 0; i < s.f.size(); ++i) f.net.v[i] = Quaternion::imag(s.f[i][0], s.f[i][1], s.f[i][2]);
        int singular = 0;
        for (auto b : s.singular) singular += b ? 1 : 0;
        info["max_loop_closure"] = s.max_loop_closure;
        info["max_cell_closure"] = s.max_cell_closure;
        info["singular_samples"] = singular;
    } else {
        throw Error("unknown generator kind '" + kind + "'");
    }
    return f;
}

// Sphere S with <S, F_p> = 0 for every vertex, when the vertices are cospherical.
std::optional<MinkVec> common_sphere(const QuadNet& net, double tol) {
    std::vector<MinkVec> L;
    for (size_t i = 0; i < net.v.size(); ++i)
        if (net.mask[i]) L.push_back(lift(net.v[i], 0.0));
    if (L.size() < 5) return std::nullopt;
    const Eigen::MatrixXd A = unit_columns(L).transpose() * metric5();
    const Eigen::MatrixXd K = nullspace(A, tol);
    if (K.cols() != 1) return std::nullopt;
    return from_vec5(K.col(0));
}

CheckResult make(const std::string& name, double value, double tol, std::string worst = {}, std::string note = {}) {
    return {name, value, tol, std::isfinite(value) && value <= tol, std::move(worst), std::move(note)};
}

void check_conformal(const NetFile& f, double tol, VerifyReport& rep) {
    QuadNet net = f.net;

    double worst_cc = 0, worst_fac = 0;
    int cm = -1, cn = -1, fm = -1, fn = -1;
    const bool factored = net.factorized();
    for (const Quad& q : quads(net)) {
        const Quaternion cr = quad_cross_ratio(net, q.m, q.n);
        const double d = concircularity_defect(cr);
        if (!(d <= worst_cc)) worst_cc = d, cm = q.m, cn = q.n;
        if (factored) {
            const double target = net.a_h(q.m, q.n) / net.a_v(q.m, q.n);
            const double e = (cr - Quaternion(target)).norm() / std::max(1.0, std::abs(target));
            if (!(e <= worst_fac)) worst_fac = e, fm = q.m, fn = q.n;
        }
    }
    rep.checks.push_back(make("concircular", worst_cc, tol, cm >= 0 ? label("quad", cm, cn) : ""));
    if (factored) {
        rep.checks.push_back(make("isothermic", worst_fac, tol, fm >= 0 ? label("quad", fm, fn) : ""));
    } else {
        const FactorizeReport fr = factorize(net, tol);
        rep.checks.push_back(make("isothermic", fr.ok ? fr.max_toda : kInf, tol,
                                  fr.worst_m >= 0 ? label("quad", fr.worst_m, fr.worst_n) : "",
                                  "no stored edge factors; " + (fr.ok ? std::string("factorization found") : fr.message)));
        if (!fr.ok) return;
    }

    double worst_lab = 0;
    int lm = -1, ln = -1;
    for (int m = 0; m < net.M; ++m)
        for (int n = 0; n < net.N; ++n) {
            if (net.has_quad(m, n)) {
                const double eh = std::abs(net.a_h(m, n) - net.a_h(m, n + 1)) / std::max(1.0, std::abs(net.a_h(m, n)));
                const double ev = std::abs(net.a_v(m, n) - net.a_v(m + 1, n)) / std::max(1.0, std::abs(net.a_v(m, n)));
                if (!(std::max(eh, ev) <= worst_lab)) worst_lab = std::max(eh, ev), lm = m, ln = n;
            }
        }
    rep.checks.push_back(make("edge_labels", worst_lab, tol, lm >= 0 ? label("quad", lm, ln) : ""));

    try {
        const MoutardLift F = moutard_lift(net, 0.5, 0, kInf);
        const MoutardReport mr = check_moutard(net, F);
        rep.checks.push_back(make("moutard", std::max(mr.max_edge, mr.max_parallel), tol));
    } catch (const Error& e) {
        rep.checks.push_back(make("moutard", kInf, tol, "", e.what()));
    }
    try {
        const ChristoffelResult cr = christoffel(net, kInf);
        rep.checks.push_back(make("christoffel_closure", cr.max_closure, tol,
                                  cr.worst_m >= 0 ? label("quad", cr.worst_m, cr.worst_n) : ""));
    } catch (const Error& e) {
        rep.checks.push_back(make("christoffel_closure", kInf, tol, "", e.what()));
    }
    try {
        const TauReport tr = check_tau(net);
        rep.checks.push_back(make("tau", std::max({tr.max_sum, tr.max_kernel, tr.max_quad_prod, tr.max_quad_sum}), tol));
    } catch (const Error& e) {
        rep.checks.push_back(make("tau", kInf, tol, "", e.what()));
    }

    if (net.kappa < 0) {
        double worst = -kInf;
        int wi = -1;
        for (size_t i = 0; i < net.v.size(); ++i)
            if (net.mask[i]) {
                const double g = -net.kappa * net.v[i].norm2() - 1.0;  // < 0 inside the ball
                if (g > worst) worst = g, wi = static_cast<int>(i);
            }
        CheckResult c = make("space_form", std::max(0.0, worst), 0.0,
                             wi >= 0 ? label("vertex", wi / net.N, wi % net.N) : "", "vertices inside the ball model");
        c.pass = worst < 0;
        rep.checks.push_back(c);
    }

    // Conserved quantity: stored, order 0 on a sphere, or linear from the 5x5 solve.
    std::optional<ConservedQuantity> P = f.cq;
    std::string source = "stored";
    if (!P) {
        if (auto S = common_sphere(net, tol)) {
            ConservedQuantity c;
            c.P.push_back(std::vector<MinkVec>(net.v.size(), *S));
            c.normalization = "sphere";
            P = std::move(c);
            source = "sphere";
        } else {
            try {
                const Lcq5x5Result r = solve_lcq_5x5(net, tol);
                rep.info["lcq_candidates"] = r.candidates.size();
                if (r.found)
                    for (const auto& c : r.candidates)
                        if (c.report.max() <= tol) {
                            P = c.cq;
                            break;
                        }
                source = "5x5";
                if (!P) rep.info["lcq_message"] = r.message.empty() ? "no linear conserved quantity" : r.message;
            } catch (const Error& e) {
                rep.info["lcq_message"] = e.what();
            }
        }
    }
    if (!P) return;
    const CQReport cr = verify_cq(net, *P);
    rep.checks.push_back(make("conserved_quantity", cr.max(), tol,
                              cr.worst_edge >= 0 ? "edge " + std::to_string(cr.worst_edge) : "",
                              source + ", order " + std::to_string(P->order())));
    rep.info["cq_source"] = source;
    rep.info["cq_order"] = P->order();
    if (P->order() >= 1) {
        try {
            const MeanCurvature h = mean_curvature(*P);
            rep.info["H"] = h.H;
            rep.info["abs_H"] = h.abs_H;
            rep.info["orientation"] = h.orientation;
            rep.info["kappa_normalized"] = h.kappa;
            rep.info["H_unit"] = h.H_unit;
        } catch (const Error& e) {
            rep.info["H_message"] = e.what();
        }
    }
}

void push_history(NetFile& out, const NetFile& in, const std::string& op, const json& params) {
    out.provenance = in.provenance;
    if (!out.provenance.is_object()) out.provenance = json::object();
    json& h = out.provenance["history"];
    if (!h.is_array()) h = json::array();
    h.push_back({{"transform", op}, {"params", params}});
}

ConservedQuantity find_cq(const NetFile& f, double tol) {
    if (f.cq) return *f.cq;
    const Lcq5x5Result r = solve_lcq_5x5(f.net, tol);
    for (const auto& c : r.candidates)
        if (c.report.max() <= tol) return c.cq;
    throw Error("no conserved quantity stored or found");
}

}  // namespace

double default_tolerance(double fallback) {
    if (const char* s = std::getenv("ISONET_TOL")) {
        char* end = nullptr;
        const double t = std::strtod(s, &end);
        if (end != s && *end == '\0' && t > 0) return t;
        throw Error(std::string("ISONET_TOL is not a positive number: ") + s);
    }
    return fallback;
}

const std::vector<std::string>& generator_kinds() {
    static const std::vector<std::string> k{"minimal-enneper", "minimal-catenoid", "bryant-enneper-cousin",
                                            "bryant-catenoid-cousin", "revolution", "maximal-sample", "planar-grid"};
    return k;
}

NetFile cmd_generate(const std::string& kind, const Params& p) {
    if (std::find(generator_kinds().begin(), generator_kinds().end(), kind) == generator_kinds().end())
        throw Error("unknown generator kind '" + kind + "'");
    json info = json::object();
    NetFile f;
    try {
        f = generate(kind, p, info);
    } catch (const Error& e) {
        throw StepError("generate " + kind + ": " + e.what());
    }
    f.provenance = {{"generator", kind}, {"parameters", params_json(p)}, {"tolerance", p.tol}, {"diagnostics", info}};
    return f;
}

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* VerifyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string VerifyReport::text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << "  max " << fmt(c.value) << "  tol " << fmt(c.tol);
        if (!c.worst.empty()) out << "  worst " << c.worst;
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << '\n';
    }
    for (auto it = info.begin(); it != info.end(); ++it) out << "  " << it.key() << " = " << it.value().dump() << '\n';
    out << (all_pass() ? "all checks passed" : "some checks failed") << '\n';
    return out.str();
}

json VerifyReport::to_json() const {
    json j;
    j["checks"] = json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name}, {"max_residual", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                               {"tol", c.tol}, {"pass", c.pass}, {"worst", c.worst}, {"note", c.note}});
    j["info"] = info;
    j["pass"] = all_pass();
    return j;
}

VerifyReport cmd_verify(const NetFile& f, double tol) {
    VerifyReport rep;
    bool finite = true;
    for (size_t i = 0; i < f.net.v.size(); ++i)
        if (f.net.mask[i] && !f.net.v[i].is_finite()) finite = false;
    rep.checks.push_back(make("finite", finite ? 0.0 : kInf, 0.0));
    if (f.ambient == "R21") {
        rep.info["note"] = "Lorentz 3-space sample; conformal checks do not apply";
        return rep;
    }
    if (!finite) return rep;
    check_conformal(f, tol, rep);
    return rep;
}

NetFile cmd_transform(const NetFile& f, const std::string& which, const Params& p) {
    if (f.ambient != "conformal") throw Error("transform needs a conformal net");
    NetFile out;
    out.ambient = f.ambient;
    json params;
    if (which == "christoffel") {
        out.net = christoffel(f.net, p.tol).net;
        params = json::object();
    } else if (which == "calapso") {
        const CalapsoResult r = calapso(f.net, p.lambda);
        out.net = r.net;
        if (f.cq) out.cq = calapso_shift_cq(*f.cq, p.lambda, r.frame);
        params = {{"lambda", p.lambda}};
    } else if (which == "darboux") {
        double mu = p.mu;
        Quaternion start;
        if (p.root >= 0) {
            const ConservedQuantity P = find_cq(f, p.tol);
            const BaecklundValues bv = baecklund_values(P);
            if (p.root >= static_cast<int>(bv.roots.size()))
                throw Error("root index " + std::to_string(p.root) + " but ||P||^2 has " + std::to_string(bv.roots.size()) +
                            " real roots");
            mu = bv.roots[p.root];
            const Projection pr = project(bv.lifts[p.root][0], 0.0);
            if (pr.at_infinity) throw Error("complementary point at the base vertex is at infinity");
            start = pr.x;
            out.cq = std::nullopt;
        } else if (p.fhat) {
            start = Quaternion::imag((*p.fhat)[0], (*p.fhat)[1], (*p.fhat)[2]);
        } else {
            throw Error("darboux needs --fhat x,y,z or --root k");
        }
        const DarbouxResult r = darboux(f.net, mu, start, p.tol);
        out.net = r.net;
        if (f.cq) {
            const DarbouxCQ d = darboux_cq(*f.cq, f.net, r.net, mu);
            out.cq = d.cq;
        }
        params = {{"mu", mu}, {"fhat_base", {start.x, start.y, start.z}}};
        if (p.root >= 0) params["root"] = p.root;
    } else {
        throw Error("unknown transform '" + which + "'");
    }
    push_history(out, f, which, params);
    return out;
}

std::string cmd_export(const NetFile& f, const std::string& format, bool poincare) {
    if (format == "obj") return to_obj(f.net, poincare);
    if (format == "json") return dump_netfile(f);
    throw Error("unknown export format '" + format + "'");
}

}  // namespace isonet
