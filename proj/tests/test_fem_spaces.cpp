#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsflow/errors.hpp"
#include "bsflow/fem_spaces.hpp"

#include <cmath>
#include <random>

using namespace bsflow;

namespace {

Domain unit_square() {
    Domain d;
    d.lo = Vec2(0, 0);
    d.hi = Vec2(1, 1);
    return d;
}

Domain centered_square() {
    Domain d;
    d.lo = Vec2(-1, -1);
    d.hi = Vec2(1, 1);
    return d;
}

} // namespace

TEST_CASE("locate examples") {
    const auto mesh = build_uniform_mesh(unit_square(), 1);
    // the split square has a right triangle with legs along the axes; the
    // interior point at a quarter of each leg has barycentric (1/2,1/4,1/4)
    const auto loc = mesh.locate(Vec2(0.5, 0.25));
    std::array<double, 3> sorted{loc.lambda[0], loc.lambda[1], loc.lambda[2]};
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[0] == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(sorted[1] == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(sorted[2] == doctest::Approx(0.5).epsilon(1e-13));

    SUBCASE("mesh vertex locates with a unit barycentric vector") {
        const auto lv = mesh.locate(Vec2(0, 0));
        CHECK(lv.lambda.maxCoeff() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(lv.lambda.minCoeff() == doctest::Approx(0.0).epsilon(1e-13));
    }
    SUBCASE("1000 random points land in containing triangles (brute-force oracle)") {
        const auto m4 = build_uniform_mesh(unit_square(), 4);
        std::mt19937 rng(91);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            const Vec2 p(u(rng), u(rng));
            const auto loc2 = m4.locate(p);
            CHECK(m4.contains(loc2.tri, p));
            // lowest-id tie break matches a brute-force scan
            for (int t = 0; t < loc2.tri; ++t) CHECK_FALSE(m4.contains(t, p));
        }
    }
}

TEST_CASE("P2 evaluation") {
    const auto mesh = build_uniform_mesh(unit_square(), 3);
    const P2Space space(mesh);

    SUBCASE("interpolant of x^2 evaluates exactly") {
        const auto coef =
            space.interpolate([](const Vec2& z) { return Vec2(z.x() * z.x(), 0.0); });
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0.02, 0.98);
        for (int i = 0; i < 200; ++i) {
            const Vec2 p(u(rng), u(rng));
            CHECK(space.evaluate(coef, p).x() == doctest::Approx(p.x() * p.x()).epsilon(1e-13));
        }
    }
    SUBCASE("linear fields are reproduced") {
        const auto coef = space.interpolate(
            [](const Vec2& z) { return Vec2(2.0 * z.x() - z.y() + 0.3, z.y() - 1.0); });
        const Vec2 p(0.37, 0.64);
        const Vec2 v = space.evaluate(coef, p);
        CHECK(v.x() == doctest::Approx(2.0 * p.x() - p.y() + 0.3).epsilon(1e-13));
        CHECK(v.y() == doctest::Approx(p.y() - 1.0).epsilon(1e-13));
    }
    SUBCASE("hat property of the nodal basis") {
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(space.num_dofs());
        const int n = space.tri_nodes(0)[3]; // an edge midpoint node
        coef[2 * n] = 1.0;
        CHECK(space.evaluate(coef, space.node(n)).x() == doctest::Approx(1.0).epsilon(1e-13));
        for (int m = 0; m < space.num_nodes(); ++m) {
            if (m == n) continue;
            CHECK(std::abs(space.evaluate(coef, space.node(m)).x()) < 1e-13);
        }
    }
    SUBCASE("random quadratic against a monomial oracle") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> c(-1, 1);
        const double a0 = c(rng), a1 = c(rng), a2 = c(rng), a3 = c(rng), a4 = c(rng),
                     a5 = c(rng);
        auto f = [&](const Vec2& z) {
            return a0 + a1 * z.x() + a2 * z.y() + a3 * z.x() * z.x() + a4 * z.x() * z.y() +
                   a5 * z.y() * z.y();
        };
        const auto coef = space.interpolate([&](const Vec2& z) { return Vec2(f(z), 0.0); });
        std::uniform_real_distribution<double> u(0.01, 0.99);
        for (int i = 0; i < 300; ++i) {
            const Vec2 p(u(rng), u(rng));
            CHECK(space.evaluate(coef, p).x() == doctest::Approx(f(p)).epsilon(1e-12));
        }
    }
    SUBCASE("gradient of the interpolant of a quadratic is exact") {
        const auto coef = space.interpolate(
            [](const Vec2& z) { return Vec2(z.x() * z.y(), z.y() * z.y()); });
        const Vec2 p(0.31, 0.57);
        const auto loc = mesh.locate(p);
        const Mat2 g = space.evaluate_gradient(coef, loc.tri, loc.lambda);
        CHECK(g(0, 0) == doctest::Approx(p.y()).epsilon(1e-12));
        CHECK(g(0, 1) == doctest::Approx(p.x()).epsilon(1e-12));
        CHECK(g(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(g(1, 1) == doctest::Approx(2.0 * p.y()).epsilon(1e-12));
    }
}

TEST_CASE("boundary constraint masks") {
    Domain d;
    d.lo = Vec2(0, 0);
    d.hi = Vec2(1, 2);
    d.sides_free_slip = true;
    const auto mesh = build_uniform_mesh(d, 2);
    const P2Space space(mesh);
    for (int n = 0; n < space.num_nodes(); ++n) {
        const Vec2 p = space.node(n);
        const bool on_side = std::abs(p.x()) < 1e-12 || std::abs(p.x() - 1.0) < 1e-12;
        const bool on_cap = std::abs(p.y()) < 1e-12 || std::abs(p.y() - 2.0) < 1e-12;
        if (on_cap) {
            CHECK(space.node_bc(n) == 3);
        } else if (on_side) {
            CHECK(space.node_bc(n) == 1); // normal = x component only
        } else {
            CHECK(space.node_bc(n) == 0);
        }
    }
}

TEST_CASE("interface clipping and inner-phase volume") {
    const auto mesh = build_uniform_mesh(centered_square(), 6);
    const auto gamma = make_circle(Vec2::Zero(), 0.5, 128);
    const auto cls = classify_elements(mesh, gamma);
    const double vol = inner_phase_volume(mesh, cls, gamma.vertices());
    CHECK(vol == doctest::Approx(gamma.enclosed_area()).epsilon(1e-12));
}

TEST_CASE("segment tracing covers each segment exactly once") {
    const auto mesh = build_uniform_mesh(centered_square(), 5);
    const auto gamma = make_circle(Vec2(0.05, -0.02), 0.6, 37);
    for (int j = 0; j < gamma.num_segments(); ++j) {
        const Vec2 a = gamma.vertex(gamma.seg_vertex(j, 0));
        const Vec2 b = gamma.vertex(gamma.seg_vertex(j, 1));
        const auto pieces = trace_segment(mesh, a, b);
        double covered = 0.0;
        for (const auto& p : pieces) {
            CHECK(p.t1 > p.t0);
            covered += p.t1 - p.t0;
            // the midpoint of each piece lies in the claimed triangle
            const Vec2 mid = a + 0.5 * (p.t0 + p.t1) * (b - a);
            CHECK(mesh.contains(p.tri, mid, 1e-10));
        }
        CHECK(covered == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("xfem volume column") {
    const auto mesh = build_uniform_mesh(centered_square(), 6);
    const auto gamma = make_circle(Vec2(0.03, 0.01), 0.5, 64);
    const auto cls = classify_elements(mesh, gamma);
    const P2Space space(mesh);
    const auto col = xfem_volume_column(space, cls, gamma, XfemRoute::Clipping);
    const auto col_flux = xfem_volume_column(space, cls, gamma, XfemRoute::BoundaryFlux);

    SUBCASE("clipping and divergence-theorem routes agree") {
        CHECK((col - col_flux).cwiseAbs().maxCoeff() < 1e-11);
    }
    SUBCASE("constant velocity field gives zero (closed boundary)") {
        const auto c = space.interpolate([](const Vec2&) { return Vec2(0.7, -0.4); });
        CHECK(std::abs(col.dot(c)) < 1e-11);
    }
    SUBCASE("uniform expansion u = z integrates to twice the inner area") {
        const auto c = space.interpolate([](const Vec2& z) { return z; });
        CHECK(col.dot(c) == doctest::Approx(2.0 * gamma.enclosed_area()).epsilon(1e-10));
    }
    SUBCASE("divergence-free field tangent to the polygon gives zero") {
        // rigid rotation about the polygon center is tangent to a circle;
        // use the flux route oracle on an exactly polygon-tangent field by
        // checking div-theorem consistency instead: div-free quadratic field
        const auto c = space.interpolate([](const Vec2& z) { return Vec2(z.y(), 0.0); });
        // flux of (y,0) over the closed polygon equals integral of div = 0
        CHECK(std::abs(col_flux.dot(c)) < 1e-11);
    }
}

TEST_CASE("pressure space dofs and weights") {
    const auto mesh = build_uniform_mesh(centered_square(), 4);
    const auto gamma = make_circle(Vec2::Zero(), 0.5, 32);
    const auto cls = classify_elements(mesh, gamma);

    SUBCASE("P1 mass weights sum to the domain area") {
        PressureSpace p1(mesh, PressureKind::P1, false, nullptr, nullptr);
        CHECK(p1.mass_weights().sum() == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(p1.nullspace().size() == 1);
    }
    SUBCASE("XFEM adds one dof weighted by the inner volume") {
        PressureSpace px(mesh, PressureKind::P1, true, &cls, &gamma);
        CHECK(px.num_dofs() == mesh.num_vertices() + 1);
        CHECK(px.mass_weights()[px.xfem_dof()] ==
              doctest::Approx(gamma.enclosed_area()).epsilon(1e-10));
    }
    SUBCASE("P1P0 has two constant directions") {
        PressureSpace pp(mesh, PressureKind::P1P0, false, nullptr, nullptr);
        CHECK(pp.num_dofs() == mesh.num_vertices() + mesh.num_triangles());
        CHECK(pp.nullspace().size() == 2);
    }
}
