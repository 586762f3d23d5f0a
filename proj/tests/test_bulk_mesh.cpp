#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsflow/bulk_mesh.hpp"
#include "bsflow/errors.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace bsflow;

namespace {

Domain unit_square() {
    Domain d;
    d.lo = Vec2(0, 0);
    d.hi = Vec2(1, 1);
    return d;
}

Domain annulus_domain() {
    Domain d;
    d.lo = Vec2(-1, -1);
    d.hi = Vec2(1, 1);
    d.has_hole = true;
    d.hole_lo = Vec2(-1.0 / 3.0, -1.0 / 3.0);
    d.hole_hi = Vec2(1.0 / 3.0, 1.0 / 3.0);
    return d;
}

double total_area(const BulkMesh& m) {
    double a = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) a += m.tri_area(t);
    return a;
}

} // namespace

TEST_CASE("uniform mesh on the unit square") {
    const auto mesh = build_uniform_mesh(unit_square(), 2);
    CHECK(mesh.num_triangles() == 8);
    for (int t = 0; t < 8; ++t) CHECK(mesh.tri_area(t) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform mesh resolves the rectangular hole") {
    const auto mesh = build_uniform_mesh(annulus_domain(), 3);
    CHECK(total_area(mesh) == doctest::Approx(annulus_domain().area()).epsilon(1e-12));
    // hole corners are mesh vertices
    for (const Vec2 corner : {Vec2(-1.0 / 3, -1.0 / 3), Vec2(1.0 / 3, -1.0 / 3),
                              Vec2(1.0 / 3, 1.0 / 3), Vec2(-1.0 / 3, 1.0 / 3)}) {
        bool found = false;
        for (int i = 0; i < mesh.num_vertices() && !found; ++i)
            found = (mesh.vertex(i) - corner).norm() < 1e-12;
        CHECK(found);
    }
    // no triangle center inside the hole
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec2 c = mesh.barycenter(t);
        CHECK_FALSE((std::abs(c.x()) < 1.0 / 3 && std::abs(c.y()) < 1.0 / 3));
    }
}

TEST_CASE("area partition under adaptive refinement") {
    const auto base = build_uniform_mesh(unit_square(), 2);
    const auto gamma = make_circle(Vec2(0.5, 0.5), 0.25, 32);
    const auto fine = adapt_mesh(base, gamma, 16, 2);
    CHECK(total_area(fine) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fine.generation() == base.generation() + 1);

    SUBCASE("band triangles reach the fine size") {
        const double h_f = 1.0 / 16.0;
        const auto cls = classify_elements(fine, gamma);
        for (int t = 0; t < fine.num_triangles(); ++t)
            if (cls.label[t] == ElementLabel::Interfacial)
                CHECK(fine.tri_diameter(t) <= h_f + 1e-12);
    }
    SUBCASE("region far from the interface stays coarse") {
        const auto far = fine.locate(Vec2(0.97, 0.97));
        CHECK(fine.tri_diameter(far.tri) >= 4.0 / 16.0); // well above h_f
    }
    SUBCASE("re-adapting with the same interface is idempotent") {
        const auto again = adapt_mesh(fine, gamma, 16, 2);
        CHECK(again.num_triangles() == fine.num_triangles());
        CHECK(again.num_vertices() == fine.num_vertices());
        double diff = 0.0;
        for (int i = 0; i < again.num_vertices(); ++i)
            diff = std::max(diff, (again.vertex(i) - fine.vertex(i)).norm());
        CHECK(diff == 0.0);
    }
}

TEST_CASE("conformity: every interior edge is shared by exactly two triangles") {
    const auto base = build_uniform_mesh(unit_square(), 2);
    const auto gamma = make_circle(Vec2(0.5, 0.5), 0.3, 24);
    const auto mesh = adapt_mesh(base, gamma, 8, 2);
    std::map<std::pair<int, int>, int> count;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int e = 0; e < 3; ++e) {
            int a = mesh.tri(t)[e], b = mesh.tri(t)[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            count[{a, b}]++;
        }
    for (const auto& [edge, c] : count) CHECK(c <= 2);
    // boundary edges exactly cover the boundary: their total length = perimeter
    double blen = 0.0;
    for (const auto& be : mesh.boundary_edges())
        blen += (mesh.vertex(be.a) - mesh.vertex(be.b)).norm();
    CHECK(blen == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("element classification") {
    Domain d;
    d.lo = Vec2(-1, -1);
    d.hi = Vec2(1, 1);
    const auto mesh = build_uniform_mesh(d, 10);
    const auto gamma = make_circle(Vec2::Zero(), 0.5, 64);
    const auto cls = classify_elements(mesh, gamma);

    SUBCASE("far corner is exterior, center is interior") {
        const auto far = mesh.locate(Vec2(0.9, 0.9));
        CHECK(cls.label[far.tri] == ElementLabel::Exterior);
        const auto mid = mesh.locate(Vec2(0.01, 0.02));
        CHECK(cls.label[mid.tri] == ElementLabel::Interior);
    }
    SUBCASE("labels are consistent with the barycenter position") {
        int n_cut = 0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const bool inside = point_in_polygon(mesh.barycenter(t), gamma.vertices());
            if (cls.label[t] == ElementLabel::Interior) CHECK(inside);
            if (cls.label[t] == ElementLabel::Exterior) CHECK_FALSE(inside);
            if (cls.label[t] == ElementLabel::Interfacial) ++n_cut;
        }
        CHECK(n_cut > 0);
    }
    SUBCASE("triangles crossed by a segment are interfacial (oracle)") {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            bool crossed = false;
            for (int j = 0; j < gamma.num_segments() && !crossed; ++j) {
                const Vec2 a = gamma.vertex(gamma.seg_vertex(j, 0));
                const Vec2 b = gamma.vertex(gamma.seg_vertex(j, 1));
                if (mesh.contains(t, a, 0.0) || mesh.contains(t, b, 0.0)) crossed = true;
                for (int e = 0; e < 3 && !crossed; ++e)
                    crossed = segments_intersect(mesh.tri_vertex(t, e),
                                                 mesh.tri_vertex(t, (e + 1) % 3), a, b);
            }
            CHECK((cls.label[t] == ElementLabel::Interfacial) == crossed);
        }
    }
    SUBCASE("self-intersecting interface raises a geometric failure") {
        std::vector<Vec2> bowtie{{-0.5, -0.5}, {0.5, 0.5}, {0.5, -0.5}, {-0.5, 0.5}};
        CHECK_THROWS_AS(classify_elements(mesh, InterfacePolygon(bowtie)), GeometricError);
    }
}

TEST_CASE("piecewise coefficients") {
    Domain d;
    d.lo = Vec2(-1, -1);
    d.hi = Vec2(1, 1);
    const auto mesh = build_uniform_mesh(d, 8);
    const auto gamma = make_circle(Vec2::Zero(), 0.5, 48);
    const auto cls = classify_elements(mesh, gamma);
    PhysicalParams p;
    p.rho_plus = 1000.0;
    p.rho_minus = 100.0;
    p.mu_plus = 10.0;
    p.mu_minus = 1.0;
    Eigen::VectorXd rho, mu;
    piecewise_coefficients(mesh, cls, p, rho, mu);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (cls.label[t] == ElementLabel::Interfacial) {
            CHECK(rho[t] == doctest::Approx(550.0));
            CHECK(mu[t] == doctest::Approx(5.5));
        } else if (cls.label[t] == ElementLabel::Interior) {
            CHECK(rho[t] == doctest::Approx(100.0));
            CHECK(mu[t] == doctest::Approx(1.0));
        } else {
            CHECK(rho[t] == doctest::Approx(1000.0));
            CHECK(mu[t] == doctest::Approx(10.0));
        }
    }
    SUBCASE("equal phases give a constant field") {
        p.rho_minus = 1000.0;
        piecewise_coefficients(mesh, cls, p, rho, mu);
        CHECK(rho.minCoeff() == rho.maxCoeff());
    }
}

TEST_CASE("boundary tags") {
    Domain d;
    d.lo = Vec2(0, 0);
    d.hi = Vec2(1, 2);
    d.sides_free_slip = true;
    const auto mesh = build_uniform_mesh(d, 4);
    int n_slip = 0, n_dir = 0;
    for (const auto& be : mesh.boundary_edges()) {
        const Vec2 mid = 0.5 * (mesh.vertex(be.a) + mesh.vertex(be.b));
        if (be.tag == BoundaryTag::FreeSlip) {
            ++n_slip;
            CHECK((std::abs(mid.x()) < 1e-12 || std::abs(mid.x() - 1.0) < 1e-12));
        } else {
            ++n_dir;
            CHECK((std::abs(mid.y()) < 1e-12 || std::abs(mid.y() - 2.0) < 1e-12));
        }
    }
    CHECK(n_slip == 16);
    CHECK(n_dir == 8);
}

TEST_CASE("p0 projection between meshes") {
    const auto coarse = build_uniform_mesh(unit_square(), 2);
    const auto gamma = make_circle(Vec2(0.5, 0.5), 0.25, 16);
    const auto fine = adapt_mesh(coarse, gamma, 8, 2);
    SUBCASE("constant fields project exactly") {
        const Eigen::VectorXd c = Eigen::VectorXd::Constant(coarse.num_triangles(), 3.25);
        const Eigen::VectorXd p = project_p0(coarse, c, fine);
        CHECK((p.array() - 3.25).abs().maxCoeff() < 1e-14);
    }
    SUBCASE("projection onto the same mesh is the identity") {
        Eigen::VectorXd v(fine.num_triangles());
        for (int t = 0; t < fine.num_triangles(); ++t) v[t] = std::sin(t * 0.1);
        const Eigen::VectorXd p = project_p0(fine, v, fine);
        CHECK((p - v).norm() < 1e-14);
    }
}

TEST_CASE("point location") {
    const auto mesh = build_uniform_mesh(unit_square(), 4);
    SUBCASE("outside point throws") {
        CHECK_THROWS_AS(mesh.locate(Vec2(1.5, 0.5)), GeometricError);
    }
    SUBCASE("walk and scan agree on interior points") {
        std::mt19937 rng(71);
        std::uniform_real_distribution<double> u(0.01, 0.99);
        int hint = 0;
        for (int i = 0; i < 500; ++i) {
            const Vec2 p(u(rng), u(rng));
            const auto a = mesh.locate(p);
            const auto b = mesh.locate(p, hint);
            hint = b.tri;
            CHECK(a.tri == b.tri);
            CHECK(mesh.contains(a.tri, p));
            CHECK(a.lambda.sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}
