#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsflow/errors.hpp"
#include "bsflow/interface_mesh.hpp"

#include <cmath>
#include <random>

using namespace bsflow;

namespace {

/// Random star-shaped (hence simple) closed polygon around the origin.
InterfacePolygon random_polygon(std::mt19937& rng, int K) {
    std::uniform_real_distribution<double> rad(0.5, 1.5);
    std::vector<Vec2> q(K);
    for (int k = 0; k < K; ++k) {
        const double phi = 2.0 * M_PI * k / K;
        const double r = rad(rng);
        q[k] = r * Vec2(std::cos(phi), std::sin(phi));
    }
    return InterfacePolygon(std::move(q));
}

} // namespace

TEST_CASE("make_circle geometry") {
    SUBCASE("K=4 gives a square of side sqrt(2)/2") {
        const auto poly = make_circle(Vec2::Zero(), 0.5, 4);
        CHECK(poly.seg_length(0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
        CHECK(poly.total_length() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("enclosed area matches the regular polygon formula") {
        for (int K : {4, 7, 32, 129}) {
            const double R = 0.8;
            const auto poly = make_circle(Vec2(0.2, -0.1), R, K);
            const double expect = 0.5 * K * R * R * std::sin(2.0 * M_PI / K);
            CHECK(poly.enclosed_area() == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    SUBCASE("equidistributed edges") {
        const auto poly = make_circle(Vec2::Zero(), 1.3, 17);
        CHECK(poly.edge_ratio() == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j < poly.num_segments(); ++j)
            CHECK(std::abs(poly.seg_length(j) - poly.seg_length(0)) < 1e-14);
    }
}

TEST_CASE("segment normals point outward") {
    const auto poly = make_circle(Vec2::Zero(), 1.0, 64);
    CHECK(poly.enclosed_area() > 0.0);
    for (int j = 0; j < poly.num_segments(); ++j) {
        const Vec2 mid = 0.5 * (poly.vertex(poly.seg_vertex(j, 0)) +
                                poly.vertex(poly.seg_vertex(j, 1)));
        CHECK(poly.seg_normal(j).dot(mid) > 0.0); // radial for a circle
    }
}

TEST_CASE("vertex normals") {
    SUBCASE("regular polygon: omega_k is radial") {
        const auto poly = make_circle(Vec2::Zero(), 1.0, 12);
        for (int k = 0; k < poly.num_vertices(); ++k) {
            const Vec2 radial = poly.vertex(k).normalized();
            const Vec2 w = poly.vertex_normal(k).normalized();
            CHECK((w - radial).norm() < 1e-13);
        }
    }
    SUBCASE("collinear adjacent segments share the normal") {
        std::vector<Vec2> q{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {0, 1}};
        InterfacePolygon poly(q);
        // vertex 1 joins two collinear segments along e1
        CHECK((poly.vertex_normal(1) - Vec2(0, -1)).norm() < 1e-14);
    }
    SUBCASE("lumped identity <v, w nu>^h = <v, w omega>^h on random polygons") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> val(-2.0, 2.0);
        for (int rep = 0; rep < 40; ++rep) {
            const auto poly = random_polygon(rng, 5 + rep % 23);
            const int K = poly.num_vertices();
            std::vector<Vec2> v(K);
            Eigen::VectorXd w(K);
            for (int k = 0; k < K; ++k) {
                v[k] = Vec2(val(rng), val(rng));
                w[k] = val(rng);
            }
            const double lhs = lumped_inner_product(poly, [&](int j, int a) {
                const int k = poly.seg_vertex(j, a);
                return v[k].dot(poly.seg_normal(j)) * w[k];
            });
            const double rhs = lumped_inner_product(poly, [&](int j, int a) {
                const int k = poly.seg_vertex(j, a);
                return v[k].dot(poly.vertex_normal(k)) * w[k];
            });
            CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, std::abs(lhs)));
        }
    }
    SUBCASE("vertex normal span is full for a healthy polygon") {
        CHECK(make_circle(Vec2::Zero(), 1.0, 8).vertex_normals_span_full());
    }
}

TEST_CASE("lumped inner product") {
    SUBCASE("constants give the perimeter") {
        const auto poly = make_circle(Vec2::Zero(), 0.7, 19);
        const double v = lumped_inner_product(poly, [](int, int) { return 1.0; });
        CHECK(v == doctest::Approx(poly.total_length()).epsilon(1e-14));
    }
    SUBCASE("hand sum on one segment contribution") {
        // P1 endpoint values (0,2) against 1 on a segment of length L: (1/2) L (0+2) = L
        std::vector<Vec2> q{{0, 0}, {1, 0}, {0.5, 1.0}};
        InterfacePolygon poly(q);
        const double L = poly.seg_length(0);
        const double contrib = 0.5 * L * (0.0 + 2.0);
        CHECK(contrib == doctest::Approx(L).epsilon(1e-15));
    }
    SUBCASE("symmetry in the arguments") {
        std::mt19937 rng(3);
        const auto poly = random_polygon(rng, 9);
        Eigen::VectorXd a(9), b(9);
        for (int k = 0; k < 9; ++k) {
            a[k] = std::sin(k * 0.7);
            b[k] = std::cos(k * 1.3);
        }
        CHECK(lumped_inner_product(poly, a, b) ==
              doctest::Approx(lumped_inner_product(poly, b, a)).epsilon(1e-15));
    }
}

TEST_CASE("enclosed area") {
    SUBCASE("unit square") {
        std::vector<Vec2> q{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        CHECK(InterfacePolygon(q).enclosed_area() == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("clockwise orientation is rejected") {
        std::vector<Vec2> q{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
        CHECK_THROWS_AS(InterfacePolygon(q).require_valid(), GeometricError);
    }
    SUBCASE("polygon area bounded by the circumscribed disc") {
        std::mt19937 rng(11);
        for (int rep = 0; rep < 10; ++rep) {
            const auto poly = random_polygon(rng, 16);
            double rmax = 0.0;
            for (const auto& v : poly.vertices()) rmax = std::max(rmax, v.norm());
            CHECK(poly.enclosed_area() <= M_PI * rmax * rmax + 1e-12);
        }
    }
}

TEST_CASE("self-intersection detection") {
    std::vector<Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(InterfacePolygon(bowtie).require_valid(), GeometricError);
}

TEST_CASE("mesh quality") {
    std::vector<Vec2> q{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
    InterfacePolygon poly(q);
    CHECK(poly.edge_ratio() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(poly.h_gamma() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("re-indexing across time levels is the identity on coefficients") {
    // connectivity is inherited, so pushforward then pullback is a no-op
    const auto poly0 = make_circle(Vec2::Zero(), 1.0, 10);
    auto f = make_surface_field(poly0, SurfaceRole::Surfactant, 0.0);
    for (int k = 0; k < f.size(); ++k) f[k] = std::sin(0.3 * k);
    const Eigen::VectorXd pushed_then_pulled = f.values; // index-identity maps
    CHECK((pushed_then_pulled - f.values).norm() == 0.0);
}
