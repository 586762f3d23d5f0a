#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsflow/params.hpp"
#include "bsflow/surface_calculus.hpp"

#include <cmath>
#include <random>

using namespace bsflow;

namespace {

InterfacePolygon random_polygon(std::mt19937& rng, int K) {
    std::uniform_real_distribution<double> rad(0.5, 1.5);
    std::vector<Vec2> q(K);
    for (int k = 0; k < K; ++k) {
        const double phi = 2.0 * M_PI * k / K;
        q[k] = rad(rng) * Vec2(std::cos(phi), std::sin(phi));
    }
    return InterfacePolygon(std::move(q));
}

Mat2 random_rotation(std::mt19937& rng) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    const double a = ang(rng);
    Mat2 r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

} // namespace

TEST_CASE("surface gradient of P1 scalars") {
    SegmentFrame s(Vec2(0, 0), Vec2(1, 0));
    CHECK((surface_gradient(s, 0.0, 1.0) - Vec2(1, 0)).norm() < 1e-15);
    CHECK(surface_gradient(s, 3.7, 3.7).norm() == 0.0);

    SUBCASE("norm invariant under rotation, always tangential") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> val(-2, 2);
        for (int i = 0; i < 100; ++i) {
            const Vec2 a(val(rng), val(rng));
            Vec2 b = a + Vec2(0.1 + std::abs(val(rng)), 0);
            const double f1 = val(rng), f2 = val(rng);
            const SegmentFrame s0(a, b);
            const Vec2 g0 = surface_gradient(s0, f1, f2);
            const Mat2 R = random_rotation(rng);
            const SegmentFrame s1(R * a, R * b);
            const Vec2 g1 = surface_gradient(s1, f1, f2);
            CHECK(g0.norm() == doctest::Approx(g1.norm()).epsilon(1e-13));
            CHECK(std::abs(s1.nu.dot(g1)) < 1e-13 * std::max(1.0, g1.norm()));
        }
    }
}

TEST_CASE("rate of deformation") {
    SUBCASE("stretching along e1") {
        SegmentFrame s(Vec2(0, 0), Vec2(1, 0));
        const auto r = rate_of_deformation(s, Vec2(0, 0), Vec2(1, 0));
        Mat2 expect;
        expect << 1, 0, 0, 0;
        CHECK((r.Ds - expect).norm() < 1e-14);
        CHECK(r.div_s == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.Ds_dev.norm() < 1e-14);
    }
    SUBCASE("rigid translation gives zero") {
        SegmentFrame s(Vec2(0.3, 1.0), Vec2(-0.4, 0.2));
        const Vec2 c(0.7, -1.1);
        const auto r = rate_of_deformation(s, c, c);
        CHECK(r.Ds.norm() < 1e-15);
        CHECK(r.div_s == 0.0);
        CHECK(r.Ds_dev.norm() < 1e-15);
    }
    SUBCASE("deviatoric part vanishes identically in the plane") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> val(-3, 3);
        for (int i = 0; i < 500; ++i) {
            const Vec2 a(val(rng), val(rng));
            Vec2 b(val(rng), val(rng));
            if ((b - a).norm() < 1e-3) b += Vec2(1, 0);
            const auto r = rate_of_deformation(SegmentFrame(a, b), Vec2(val(rng), val(rng)),
                                               Vec2(val(rng), val(rng)));
            CHECK(r.Ds_dev.norm() <= 1e-14 * std::max(1.0, r.Ds.norm()));
        }
    }
}

TEST_CASE("segment frame invariants") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> val(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const Vec2 a(val(rng), val(rng));
        Vec2 b(val(rng), val(rng));
        if ((b - a).norm() < 1e-3) b += Vec2(0, 1);
        const SegmentFrame s(a, b);
        CHECK((s.projection * s.projection - s.projection).norm() < 1e-14);
        CHECK((s.projection - s.projection.transpose()).norm() < 1e-15);
        CHECK(std::abs(s.projection.trace() - 1.0) < 1e-14); // rank 1
        CHECK(std::abs(s.map.determinant()) > 1e-12);
        CHECK(std::abs(s.map.col(0).dot(s.map.col(1))) < 1e-13 * s.length);
    }
}

TEST_CASE("xi matrix") {
    SUBCASE("hand example on a segment along e1") {
        const double h = 0.35;
        SegmentFrame s(Vec2(0, 0), Vec2(h, 0));
        const Mat2 xi = xi_matrix(s, 1.0, 3.0);
        const Vec2 lhs = xi * surface_gradient(s, 1.0, 3.0);
        CHECK((lhs - Vec2(4.0 / h, 0)).norm() < 1e-12);
    }
    SUBCASE("constant field gives zero") {
        SegmentFrame s(Vec2(0.1, 0.7), Vec2(-0.9, 0.4));
        const Mat2 xi = xi_matrix(s, 2.5, 2.5);
        CHECK((xi * surface_gradient(s, 2.5, 2.5)).norm() == 0.0);
    }
    SUBCASE("defining identity on random rotated segments") {
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> val(-2, 2);
        for (int i = 0; i < 1000; ++i) {
            const Vec2 a(val(rng), val(rng));
            Vec2 b(val(rng), val(rng));
            if ((b - a).norm() < 1e-2) b += Vec2(0.5, 0.1);
            const SegmentFrame s(a, b);
            const double z1 = val(rng), z2 = val(rng);
            const Vec2 lhs = xi_matrix(s, z1, z2) * surface_gradient(s, z1, z2);
            const Vec2 rhs = surface_gradient(s, 0.5 * z1 * z1, 0.5 * z2 * z2);
            CHECK((lhs - rhs).norm() <= 1e-13 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST_CASE("rho_star") {
    const auto poly = make_circle(Vec2::Zero(), 1.0, 6);
    auto rho = make_surface_field(poly, SurfaceRole::Density, 0.0);
    SUBCASE("segment mean of the endpoint values") {
        rho[0] = 1.0;
        rho[1] = 3.0;
        CHECK(rho_star(poly, rho)[0] == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("negative minimum forces zero") {
        rho[0] = -0.1;
        rho[1] = 3.0;
        CHECK(rho_star(poly, rho)[0] == 0.0);
    }
    SUBCASE("constant nonnegative density is reproduced") {
        for (int k = 0; k < rho.size(); ++k) rho[k] = 0.8;
        const auto rs = rho_star(poly, rho);
        for (int j = 0; j < rs.size(); ++j) CHECK(rs[j] == doctest::Approx(0.8).epsilon(1e-15));
    }
}

TEST_CASE("surface viscous split identity (d=2)") {
    // 2 mu <Ds(eta),Ds(eta)> + lambda <div eta, div eta>
    //   = 2 mu <Dhat,Dhat> + (lambda + 2 mu) <div, div>, with Dhat = 0 in the plane
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> val(-2, 2);
    for (int rep = 0; rep < 50; ++rep) {
        const auto poly = random_polygon(rng, 6 + rep % 13);
        const int K = poly.num_vertices();
        std::vector<Vec2> eta(K);
        Eigen::VectorXd muv(K), lav(K);
        for (int k = 0; k < K; ++k) {
            eta[k] = Vec2(val(rng), val(rng));
            muv[k] = 0.5 + std::abs(val(rng));
            lav[k] = val(rng);
        }
        double lhs = 0.0, rhs = 0.0;
        for (int j = 0; j < poly.num_segments(); ++j) {
            const auto s = segment_frame(poly, j);
            const int k1 = poly.seg_vertex(j, 0), k2 = poly.seg_vertex(j, 1);
            const auto r = rate_of_deformation(s, eta[k1], eta[k2]);
            const double mu_lump = 0.5 * (muv[k1] + muv[k2]);
            const double la_lump = 0.5 * (lav[k1] + lav[k2]);
            lhs += s.length * (2.0 * mu_lump * (r.Ds.array() * r.Ds.array()).sum() +
                               la_lump * r.div_s * r.div_s);
            rhs += s.length * (2.0 * mu_lump * (r.Ds_dev.array() * r.Ds_dev.array()).sum() +
                               (la_lump + 2.0 * mu_lump) * r.div_s * r.div_s);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("summation by parts on closed polygons (d=2)") {
    // <zeta, div_s eta> + <grad_s zeta, eta> = <grad_s id, grad_s pi(zeta eta)>
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> val(-2, 2);
    for (int rep = 0; rep < 50; ++rep) {
        const auto poly = random_polygon(rng, 5 + rep % 17);
        const int K = poly.num_vertices();
        Eigen::VectorXd zeta(K);
        std::vector<Vec2> eta(K);
        for (int k = 0; k < K; ++k) {
            zeta[k] = val(rng);
            eta[k] = Vec2(val(rng), val(rng));
        }
        double lhs = 0.0, rhs = 0.0;
        for (int j = 0; j < poly.num_segments(); ++j) {
            const auto s = segment_frame(poly, j);
            const int k1 = poly.seg_vertex(j, 0), k2 = poly.seg_vertex(j, 1);
            const Mat2 ge = surface_gradient(s, eta[k1], eta[k2]);
            const Vec2 gz = surface_gradient(s, zeta[k1], zeta[k2]);
            // exact products: P1*P0 integrands integrate by the trapezoid rule
            lhs += s.length * (0.5 * (zeta[k1] + zeta[k2]) * ge.trace() +
                               gz.dot(0.5 * (eta[k1] + eta[k2])));
            const Mat2 gid = s.t * s.t.transpose();
            const Mat2 gze = surface_gradient(s, (zeta[k1] * eta[k1]).eval(),
                                              (zeta[k2] * eta[k2]).eval());
            rhs += s.length * (gid.array() * gze.array()).sum();
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("psi_star summation by parts on closed polygons") {
    // <psi* eta, grad pi F'(Psi)>^h + <eta, grad pi gamma(Psi)> = 0
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> val(-2, 2);
    std::uniform_real_distribution<double> pos(0.05, 3.0);
    const double eps = 1e-8;
    const EquationOfState lin{EosKind::Linear, 0.7, 0.9};
    const EquationOfState lang{EosKind::Langmuir, 1.1, 0.5, 5.0};
    for (const auto& eos : {lin, lang}) {
        for (int rep = 0; rep < 40; ++rep) {
            const auto poly = random_polygon(rng, 5 + rep % 11);
            const int K = poly.num_vertices();
            Eigen::VectorXd psi(K);
            std::vector<Vec2> eta(K);
            for (int k = 0; k < K; ++k) {
                psi[k] = pos(rng);
                eta[k] = Vec2(val(rng), val(rng));
            }
            double lhs = 0.0, scale = 0.0;
            for (int j = 0; j < poly.num_segments(); ++j) {
                const auto s = segment_frame(poly, j);
                const int k1 = poly.seg_vertex(j, 0), k2 = poly.seg_vertex(j, 1);
                const double star = psi_star_eps(eos, eps, psi[k1], psi[k2]);
                const Vec2 gF = surface_gradient(s, eos.fprime_eps(eps, psi[k1]),
                                                 eos.fprime_eps(eps, psi[k2]));
                const Vec2 gG = surface_gradient(s, eos.gamma_eps(eps, psi[k1]),
                                                 eos.gamma_eps(eps, psi[k2]));
                const Vec2 eta_mid = 0.5 * (eta[k1] + eta[k2]);
                lhs += s.length * (star * eta_mid.dot(gF) + eta_mid.dot(gG));
                scale += s.length * (std::abs(star * eta_mid.dot(gF)) + std::abs(eta_mid.dot(gG)));
            }
            CHECK(std::abs(lhs) <= 1e-12 * std::max(1.0, scale));
        }
    }
}
