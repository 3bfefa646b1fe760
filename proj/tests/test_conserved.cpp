#include <gtest/gtest.h>

#include <cmath>

#include "isonet/conserved.hpp"
#include "isonet/errors.hpp"
#include "isonet/generators.hpp"
#include "isonet/transforms.hpp"

using namespace isonet;

namespace {

DiscreteHolo catenoid_holo(int rows = 8) {
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

RevolutionNet revolution(double kappa, double Hk) {
    RevolutionParams p;
    p.N = 8;
    p.kappa = kappa;
    p.alpha = revolution_alpha_for(Hk, 0.5, 0.0, -1.0, 0.0, kappa);
    return revolution_net(revolution_seed(0.5, 0.0, -1.0, 0.0, p), 12, p);
}

// Scales the radius of row m by s; the net stays circular and isothermic but loses its lcq.
QuadNet bulge_row(QuadNet net, int m, double s) {
    for (int n = 0; n < net.N; ++n) {
        const Quaternion f = net.at(m, n);
        net.at(m, n) = Quaternion::imag(s * f.x, s * f.y, f.z);
    }
    return net;
}

}  // namespace

TEST(Cylinder, HandAssembledLcq) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    const ConservedQuantity P = linear_cq(c.Q, c.Z);
    EXPECT_EQ(P.order(), 1);
    const CQReport r = verify_cq(c.net, P);
    EXPECT_LT(r.max(), 1e-10);
    EXPECT_LT(r.max_dQ, 1e-12);
    const MeanCurvature H = mean_curvature(P);
    EXPECT_NEAR(H.abs_H, 0.5, 1e-12);
    EXPECT_NEAR(H.kappa, 0.0, 1e-12);
    EXPECT_LT(H.max_drift, 1e-12);
    EXPECT_LT(six_facts(c.net, P).max(), 1e-10);
    const DPFormulaReport dp = dP_edge_formula_check(c.net, P);
    EXPECT_LT(dp.max_first, 1e-10);
    EXPECT_LT(dp.max_second, 1e-10);
    const EnvelopeReport env = envelope_check(c.net, P.Z());
    EXPECT_LT(env.max_incidence, 1e-12);
    EXPECT_LT(env.max_touching, 1e-12);
    EXPECT_GT(env.min_norm, 0.0);
}

TEST(Cylinder, OrientationFlipsWithZ) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    std::vector<MinkVec> mZ;
    for (const MinkVec& z : c.Z) mZ.push_back(-1.0 * z);
    const MeanCurvature a = mean_curvature(linear_cq(c.Q, c.Z)), b = mean_curvature(linear_cq(c.Q, mZ));
    EXPECT_EQ(a.orientation, -b.orientation);
    EXPECT_NEAR(a.H, -b.H, 1e-14);
}

TEST(Solvers, ThreeByThreeFiveByFiveAndGlobal) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    const ConservedQuantity P3 = solve_Z_given_Q(c.net, space_form_q(0.0), 2, 3);
    EXPECT_LT(verify_cq(c.net, P3).max(), 1e-10);
    EXPECT_NEAR(mean_curvature(P3).abs_H, 0.5, 1e-12);

    const Lcq5x5Result l = solve_lcq_5x5(c.net);
    ASSERT_TRUE(l.found) << l.message;
    ASSERT_EQ(l.candidates.size(), 1u);
    EXPECT_LT(l.candidates[0].report.max(), 1e-8);
    EXPECT_NEAR(mean_curvature(l.candidates[0].cq).abs_H, 0.5, 1e-10);

    EXPECT_EQ(solve_lcq_global(c.net).basis.size(), 1u);
}

TEST(Solvers, RecoverLcqOnGeneratedCmcNets) {
    struct Case {
        QuadNet net;
        double abs_H, kappa;
    };
    std::vector<Case> cases;
    for (auto [kappa, Hk] : {std::pair{-1.0, 1.2}, {0.0, 0.8}, {1.0, 1.0}}) cases.push_back({revolution(kappa, Hk).net, Hk, kappa});
    cases.push_back({minimal_net(catenoid_holo()).net, 0.0, 0.0});
    cases.push_back({minimal_net(enneper_holo()).net, 0.0, 0.0});
    for (const Case& c : cases) {
        const Lcq5x5Result l = solve_lcq_5x5(c.net);
        ASSERT_TRUE(l.found) << l.message;
        EXPECT_LT(l.candidates[0].report.max(), 1e-8);
        const MeanCurvature H = mean_curvature(l.candidates[0].cq);
        EXPECT_NEAR(H.abs_H / std::sqrt(std::max(1.0, std::abs(H.kappa))), c.abs_H, 1e-8);
        EXPECT_EQ(solve_lcq_global(c.net).basis.size(), 1u);
    }
}

TEST(Solvers, BryantNetsAreCmcOneInHyperbolicSpace) {
    for (const DiscreteHolo& h : {catenoid_holo(), enneper_holo()}) {
        const BryantNetResult b = bryant_net(h, 0.3);
        const Lcq5x5Result l = solve_lcq_5x5(b.net);
        ASSERT_TRUE(l.found) << l.message;
        EXPECT_LT(l.candidates[0].report.max(), 1e-8);
        const MeanCurvature H = mean_curvature(l.candidates[0].cq);
        EXPECT_NEAR(H.kappa, -0.09, 1e-8);
        EXPECT_NEAR(std::abs(H.H_unit), 1.0, 1e-8);
    }
}

TEST(Solvers, FaultInjectedNetHasNoLcq) {
    const QuadNet bad = bulge_row(revolution(0.0, 0.8).net, 10, 1.01);
    QuadNet copy = bad;
    ASSERT_TRUE(factorize(copy).ok);
    const Lcq5x5Result l = solve_lcq_5x5(bad);
    EXPECT_FALSE(l.found);
    EXPECT_EQ(solve_lcq_global(bad).basis.size(), 0u);
}

TEST(Solvers, SphericalEdgeStarIsSingular) {
    QuadNet grid = planar_grid(5, 5);
    EXPECT_THROW(solve_Z_given_Q(grid, space_form_q(0.0), 2, 2), NotIsothermicError);
    ASSERT_TRUE(factorize(grid).ok);
    EXPECT_THROW(solve_Z_given_Q(grid, space_form_q(0.0), 2, 2), SingularError);
}

TEST(MeanCurvature, NonSpacelikeZIsDegenerate) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    std::vector<MinkVec> Z;
    for (size_t i = 0; i < c.net.v.size(); ++i) Z.push_back(lift(c.net.v[i]));
    EXPECT_THROW(mean_curvature(linear_cq(c.Q, Z)), DegenerateError);
}

TEST(Calapso, ShiftedConservedQuantity) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    const ConservedQuantity P = linear_cq(c.Q, c.Z);
    const double H0 = mean_curvature(P).H;
    for (double mu : {0.1, -0.3}) {
        const CalapsoResult r = calapso(c.net, mu);
        const ConservedQuantity Pm = calapso_shift_cq(P, mu, r.frame);
        EXPECT_LT(verify_cq(r.net, Pm).max(), 1e-10);
        EXPECT_NEAR(mean_curvature(Pm).H, H0 - mu, 1e-12);
    }
}

TEST(Darboux, ConservedQuantityRaisesOrderByOne) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    const ConservedQuantity P = linear_cq(c.Q, c.Z);
    const double mu = 0.3;
    const DarbouxResult d = darboux(c.net, mu, Quaternion::imag(0.2, 0.1, 0.05));
    const DarbouxCQ dc = darboux_cq(P, c.net, d.net, mu);
    EXPECT_EQ(dc.cq.order(), 2);
    EXPECT_LT(dc.max_top, 1e-9);
    EXPECT_LT(dc.max_embed, 1e-12);
    EXPECT_LT(verify_cq(d.net, dc.cq).max(), 1e-10);
    // A wrong parameter does not give a conserved quantity.
    EXPECT_GT(verify_cq(d.net, darboux_cq(P, c.net, d.net, -mu).cq).max(), 1e-3);
}

TEST(Darboux, DarbouxOfMinimalNetHasQuadraticConservedQuantity) {
    const QuadNet net = minimal_net(catenoid_holo()).net;
    const Lcq5x5Result l = solve_lcq_5x5(net);
    ASSERT_TRUE(l.found);
    const double mu = 0.4;
    const DarbouxResult d = darboux(net, mu, net.v[0] + Quaternion::imag(0.1, -0.2, 0.15));
    const DarbouxCQ dc = darboux_cq(l.candidates[0].cq, net, d.net, mu);
    EXPECT_LE(dc.cq.order(), 2);
    EXPECT_LT(dc.max_top, 1e-9);
    EXPECT_LT(verify_cq(d.net, dc.cq).max(), 1e-8);
}

TEST(Baecklund, ComplementarySurfaceOfCylinder) {
    const RevolutionNet c = cylinder_net(0.5, 8, 6);
    const ConservedQuantity P = linear_cq(c.Q, c.Z);
    const BaecklundValues bv = baecklund_values(P);
    ASSERT_EQ(bv.roots.size(), 2u);
    EXPECT_NEAR(bv.roots[0], 0.0, 1e-12);
    EXPECT_NEAR(bv.roots[1], 1.0, 1e-12);  // 2H
    EXPECT_FALSE(bv.double_root);
    EXPECT_LT(bv.max_vertex_dependence, 1e-12);
    // Root 0 gives the point at infinity; root 1 gives the complementary cylinder.
    EXPECT_TRUE(project(bv.lifts[0][0]).at_infinity);
    QuadNet comp = c.net;
    for (size_t p = 0; p < comp.v.size(); ++p) comp.v[p] = project(bv.lifts[1][p]).x;
    const DarbouxResult d = darboux(c.net, 1.0, comp.v[0]);
    for (size_t p = 0; p < comp.v.size(); ++p) EXPECT_LT((d.net.v[p] - comp.v[p]).norm(), 1e-12);
    const BaecklundCheck bk = is_baecklund(P, 1.0, comp);
    EXPECT_TRUE(bk.ok);
    EXPECT_LT(bk.max_residual, 1e-12);
    const DarbouxCQ dc = darboux_cq(P, c.net, comp, 1.0);
    EXPECT_LT(dc.max_top, 1e-9);
    EXPECT_LT(verify_cq(comp, dc.cq).max(), 1e-10);
}

TEST(OrderZero, SphericalNetHasConstantSphere) {
    const QuadNet net = christoffel(minimal_net(catenoid_holo()).net).net;
    EXPECT_LT(net_spherical_measure(net), 1e-9);
    const StarSphere s = vertex_star_sphere(net, 2, 2);
    ConservedQuantity P;
    P.P = {std::vector<MinkVec>(net.v.size(), s.S)};
    EXPECT_EQ(P.order(), 0);
    EXPECT_LT(verify_cq(net, P).max(), 1e-9);
}
