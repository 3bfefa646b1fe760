#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "isonet/errors.hpp"
#include "isonet/generators.hpp"
#include "isonet/net.hpp"

using namespace isonet;

namespace {

Quaternion rand_im(std::mt19937& g, double s = 1.0) {
    std::normal_distribution<double> d(0.0, s);
    return Quaternion::imag(d(g), d(g), d(g));
}

std::array<Quaternion, 4> rand_concircular(std::mt19937& g) {
    const Quaternion c = rand_im(g);
    Quaternion e1 = rand_im(g);
    e1 = e1 / e1.norm();
    Quaternion e2 = rand_im(g);
    e2 = e2 - dot3(e2, e1) * e1;
    e2 = e2 / e2.norm();
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI), r(0.3, 2.0);
    const double rho = r(g);
    // Pairwise angular gaps of at least 0.2; nearly coincident points make any cross ratio ill-conditioned.
    std::array<double, 4> t{};
    for (int i = 0; i < 4; ++i) {
        bool ok = false;
        while (!ok) {
            t[i] = u(g);
            ok = true;
            for (int k = 0; k < i; ++k) {
                const double d = std::abs(std::remainder(t[i] - t[k], 2.0 * M_PI));
                if (d < 0.2) ok = false;
            }
        }
    }
    std::array<Quaternion, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = c + rho * (std::cos(t[i]) * e1 + std::sin(t[i]) * e2);
    return out;
}

// Lifts taken relative to the centroid; the cross ratio is translation invariant and the entries stay accurate.
std::array<std::array<double, 4>, 4> gram(const std::array<Quaternion, 4>& p) {
    const Quaternion c = 0.25 * (p[0] + p[1] + p[2] + p[3]);
    std::array<std::array<double, 4>, 4> s{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s[i][j] = inner(lift(p[i] - c), lift(p[j] - c));
    return s;
}

// f = j, i + j, 0, i on the residues of (m, n) mod 2.
QuadNet parity_net(int M, int N) {
    QuadNet net(M, N);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            const bool me = m % 2 == 0, ne = n % 2 == 0;
            net.at(m, n) = me && ne ? J_ : (!me && ne ? I_ + J_ : (!me && !ne ? Quaternion() : I_));
        }
    return net;
}

QuadNet catenoid(int rows = 8) {
    const double c2 = 2.0 * M_PI / 8.0;
    DiscreteHolo h = dhf_exp(solve_c1(c2), c2, rows, 9, -rows / 2, 0);
    factorize_holo(h);
    return minimal_net(h).net;
}

}  // namespace

TEST(Lattice, EdgesAndQuadsCounts) {
    const QuadNet net = planar_grid(3, 4);
    EXPECT_EQ(edges(net).size(), static_cast<size_t>(2 * 4 + 3 * 3));
    EXPECT_EQ(quads(net).size(), static_cast<size_t>(2 * 3));
    QuadNet masked = net;
    masked.mask[masked.idx(1, 1)] = 0;
    EXPECT_EQ(quads(masked).size(), static_cast<size_t>(2));
    EXPECT_EQ(masked.vertex_count(), 11);
}

TEST(CrossRatio, ParityNetHasCrossRatioOneHalf) {
    const QuadNet net = parity_net(4, 4);
    for (const Quad& q : quads(net)) {
        const Quaternion cr = quad_cross_ratio(net, q.m, q.n);
        EXPECT_NEAR(cr.w, 0.5, 1e-14);
        EXPECT_NEAR(cr.im_norm(), 0.0, 1e-14);
    }
}

TEST(CrossRatio, SquareHasMinusOne) {
    const Quaternion cr = cross_ratio(Quaternion(), I_, I_ + J_, J_);
    EXPECT_NEAR(cr.w, -1.0, 1e-15);
    EXPECT_NEAR(cr.im_norm(), 0.0, 1e-15);
    EXPECT_THROW(cross_ratio(I_, I_, J_, K_), DegenerateError);
}

TEST(CrossRatio, GramFormulaMatchesQuaternionFormula) {
    std::mt19937 g(1);
    for (int t = 0; t < 1000; ++t) {
        const auto p = rand_concircular(g);
        const GramCrossRatio gc = cross_ratio_from_gram(gram(p));
        const std::complex<double> hc = hat_cross_ratio(p[0], p[1], p[2], p[3]);
        EXPECT_LT(std::abs(gc.value - hc), 1e-10 * (1 + std::abs(hc)));
        EXPECT_LT(concircularity_defect(cross_ratio(p[0], p[1], p[2], p[3])), 1e-10);
        EXPECT_LE(gc.E, gc.E_floor);
    }
}

TEST(CrossRatio, GramDeterminantNonpositive) {
    std::mt19937 g(2);
    for (int t = 0; t < 1000; ++t) {
        const std::array<Quaternion, 4> p{rand_im(g), rand_im(g), rand_im(g), rand_im(g)};
        const auto s = gram(p);
        double scale = 0;
        for (auto& r : s)
            for (double v : r) scale = std::max(scale, std::abs(v));
        const GramCrossRatio gc = cross_ratio_from_gram(s);
        EXPECT_LE(gc.E, gc.E_floor);
        EXPECT_LE(gc.E_floor, 1e-12 * std::pow(scale, 4));
        const std::complex<double> hc = hat_cross_ratio(p[0], p[1], p[2], p[3]);
        EXPECT_LT(std::abs(gc.value - hc), 1e-8 * (1 + std::abs(hc)));
    }
}

TEST(CrossRatio, MobiusInvariance) {
    std::mt19937 g(3);
    const QuatMat2 T = QuatMat2{1.0, rand_im(g), 0.0, 1.0} * QuatMat2{0.0, 1.0, 1.0, 0.0} * QuatMat2{1.0, rand_im(g), 0.0, 1.0};
    for (int t = 0; t < 100; ++t) {
        const std::array<Quaternion, 4> p{rand_im(g), rand_im(g), rand_im(g), rand_im(g)};
        std::array<Quaternion, 4> q;
        for (int i = 0; i < 4; ++i) q[i] = mob_apply(T, p[i]).value;
        const auto a = hat_cross_ratio(p[0], p[1], p[2], p[3]), b = hat_cross_ratio(q[0], q[1], q[2], q[3]);
        EXPECT_LT(std::abs(a - b), 1e-8 * (1 + std::abs(a)));
    }
}

TEST(Factorize, GridAndCatenoid) {
    QuadNet grid = planar_grid(4, 5);
    const FactorizeReport r = factorize(grid);
    ASSERT_TRUE(r.ok) << r.message;
    EXPECT_TRUE(grid.factorized());
    for (const Quad& q : quads(grid)) EXPECT_NEAR(quad_cross_ratio(grid, q.m, q.n).w, grid.a_h(q.m, q.n) / grid.a_v(q.m, q.n), 1e-14);

    QuadNet cat = catenoid();
    cat.ah.assign(cat.ah.size(), NAN);
    cat.av.assign(cat.av.size(), NAN);
    ASSERT_TRUE(factorize(cat).ok);
    for (const Quad& q : quads(cat)) EXPECT_NEAR(quad_cross_ratio(cat, q.m, q.n).w, cat.a_h(q.m, q.n) / cat.a_v(q.m, q.n), 1e-10);
}

TEST(Factorize, RejectsNonConcircularQuad) {
    QuadNet net = planar_grid(4, 4);
    net.at(2, 2) = net.at(2, 2) + 0.1 * K_;
    const FactorizeReport r = factorize(net);
    EXPECT_FALSE(r.ok);
    EXPECT_GE(r.worst_m, 1);
    EXPECT_THROW(factorize_or_throw(net), NotIsothermicError);
}

TEST(Moutard, CatenoidEdgeIdentityAndParallelDiagonals) {
    const QuadNet net = catenoid();
    const MoutardLift F = moutard_lift(net);
    const MoutardReport r = check_moutard(net, F);
    EXPECT_LT(r.max_edge, 1e-10);
    EXPECT_LT(r.max_parallel, 1e-10);
    EXPECT_LT(r.max_ratio, 1e-10);
    EXPECT_LT(r.max_orthogonal, 1e-10);
    for (const Edge& e : edges(net)) {
        const QuatMat2 S = F.F[e.p].mat() * F.F[e.q].mat() + F.F[e.q].mat() * F.F[e.p].mat();
        EXPECT_LT(mat_dist(S, e.a * QuatMat2::identity()), 1e-10 * std::max(1.0, std::abs(e.a)));
    }
}

TEST(Moutard, CheckerboardRescaleNeedsUnitProduct) {
    const QuadNet net = catenoid();
    const MoutardLift F = moutard_lift(net);
    const MoutardReport good = check_moutard(net, checkerboard_rescale(net, F, 2.0, 0.5));
    EXPECT_LT(good.max_edge, 1e-10);
    const MoutardReport bad = check_moutard(net, checkerboard_rescale(net, F, 2.0, 2.0));
    EXPECT_GT(bad.max_edge, 1e-3);
}

TEST(Moutard, UnfactorizedNetThrows) {
    EXPECT_THROW(moutard_lift(planar_grid(3, 3)), NotIsothermicError);
}

TEST(VertexStar, DiagonalStarsAreSpherical) {
    const QuadNet net = catenoid();
    for (int m = 1; m + 1 < net.M; ++m)
        for (int n = 1; n + 1 < net.N; ++n) {
            const StarSphere s = vertex_star_sphere(net, m, n);
            EXPECT_LT(s.measure, 1e-9);
            std::vector<MinkVec> L;
            for (auto [dm, dn] : {std::pair{0, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
                const MinkVec F = lift(net.at(m + dm, n + dn));
                L.push_back(F);
                EXPECT_LT(std::abs(inner(s.S, F)) / std::sqrt(std::abs(norm2(s.S))) / F.max_abs(), 1e-9);
            }
            EXPECT_LT(std::abs(normalized_gram_det(L)), 1e-9);
        }
}

TEST(VertexStar, GenericEdgeStarIsNotSpherical) {
    const QuadNet net = catenoid();
    EXPECT_FALSE(is_vertex_star_spherical(net, 3, 3));
    EXPECT_GT(edge_star_measure(net, 3, 3), 1e-6);
    EXPECT_LT(net_spherical_measure(planar_grid(3, 3)), 1e-12);
}

TEST(DualEdge, ProductWithEdgeIsFactor) {
    const Quaternion p = Quaternion::imag(0.1, 0.2, 0.3), q = Quaternion::imag(-0.4, 0.5, 0.1);
    const Quaternion d = dual_edge(p, q, 1.7);
    const Quaternion prod = d * (q - p);
    EXPECT_NEAR(prod.w, 1.7, 1e-14);
    EXPECT_NEAR(prod.im_norm(), 0.0, 1e-14);
}
