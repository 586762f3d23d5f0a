#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsflow/errors.hpp"
#include "bsflow/params.hpp"

#include <cmath>
#include <random>

using namespace bsflow;

TEST_CASE("surface tension values") {
    EquationOfState lin{EosKind::Linear, 0.2, 0.5};
    CHECK(lin.gamma(1.0) == doctest::Approx(0.1).epsilon(1e-14));

    EquationOfState cst{EosKind::Constant, 0.7, 0.0};
    CHECK(cst.gamma(0.0) == 0.7);
    CHECK(cst.gamma(3.2) == 0.7);

    EquationOfState lang{EosKind::Langmuir, 1.5, 0.3, 2.0};
    CHECK(lang.gamma(0.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK_THROWS_AS((void)lang.gamma(2.0), std::domain_error);
    CHECK_THROWS_AS((void)lang.F(2.5), std::domain_error);
}

TEST_CASE("gamma monotone nonincreasing and F convex by sampling") {
    for (EquationOfState eos : {EquationOfState{EosKind::Linear, 1.0, 0.8},
                                EquationOfState{EosKind::Langmuir, 1.0, 0.8, 3.0}}) {
        double prev_g = eos.gamma(1e-4);
        double prev_fp = eos.Fprime(1e-4);
        for (double r = 0.01; r < 2.5; r += 0.01) {
            CHECK(eos.gamma(r) <= prev_g + 1e-13);
            CHECK(eos.Fprime(r) >= prev_fp - 1e-13); // F' nondecreasing <=> F convex
            CHECK(eos.Fsecond(r) >= 0.0);
            prev_g = eos.gamma(r);
            prev_fp = eos.Fprime(r);
        }
    }
}

TEST_CASE("regularized family") {
    const double eps = 1e-3;
    EquationOfState lin{EosKind::Linear, 1.3, 0.6};

    SUBCASE("agrees with the plain values above eps") {
        for (double r : {eps, 2 * eps, 0.5, 1.7}) {
            CHECK(lin.f_eps(eps, r) == doctest::Approx(lin.F(r)).epsilon(1e-15));
            CHECK(lin.gamma_eps(eps, r) == doctest::Approx(lin.gamma(r)).epsilon(1e-15));
            CHECK(lin.fprime_eps(eps, r) == doctest::Approx(lin.Fprime(r)).epsilon(1e-15));
        }
    }

    SUBCASE("quadratic lower bound for nonpositive arguments") {
        // F_eps(r) >= (1/2) eps^-1 gbar beta r^2 for r <= 0
        for (double r : {-1.0, -0.25, -1e-3, 0.0})
            CHECK(lin.f_eps(eps, r) >= 0.5 / eps * 1.3 * 0.6 * r * r - 1e-12);
    }

    SUBCASE("gamma_eps = F_eps - r F'_eps identically") {
        EquationOfState lang{EosKind::Langmuir, 0.9, 0.4, 2.5};
        for (const auto& eos : {lin, lang}) {
            for (double r = -0.5; r < 2.2; r += 0.013) {
                const double lhs = eos.gamma_eps(eps, r);
                const double rhs = eos.f_eps(eps, r) - r * eos.fprime_eps(eps, r);
                CHECK(std::abs(lhs - rhs) < 1e-14 * std::max(1.0, std::abs(lhs)));
            }
        }
    }

    SUBCASE("identity at the stitching points") {
        for (double r : {0.5 * eps, eps, 2.0 * eps}) {
            const double lhs = lin.gamma_eps(eps, r);
            const double rhs = lin.f_eps(eps, r) - r * lin.fprime_eps(eps, r);
            CHECK(std::abs(lhs - rhs) < 1e-14);
        }
    }
}

TEST_CASE("surfactant-dependent surface viscosities") {
    PhysicalParams p;
    p.mu_gamma_bar = 0.1;
    p.lambda_gamma_bar = 0.1;
    p.b_mu = 100.0;
    p.b_lambda = 100.0;
    CHECK(p.mu_gamma_of(1.0) == doctest::Approx(10.1).epsilon(1e-14));
    CHECK(p.mu_gamma_of(-1.0) == doctest::Approx(0.1).epsilon(1e-14)); // [r]_+ = 0
    p.b_mu = 0.0;
    CHECK(p.mu_gamma_of(7.0) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("psi_star_eps") {
    const double eps = 1e-8;
    EquationOfState lin{EosKind::Linear, 1.0, 1.0};

    SUBCASE("logarithmic mean for the linear equation of state") {
        const double v = psi_star_eps(lin, eps, 1.0, std::exp(1.0));
        CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(0.05, 4.0);
        for (int i = 0; i < 200; ++i) {
            const double a = dist(rng), b = dist(rng);
            const double v2 = psi_star_eps(lin, eps, a, b);
            CHECK(v2 >= std::min(a, b) - 1e-12);
            CHECK(v2 <= std::max(a, b) + 1e-12);
        }
    }

    SUBCASE("equal arguments give the midpoint branch") {
        CHECK(psi_star_eps(lin, eps, 0.37, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
    }

    SUBCASE("constant equation of state gives the midpoint") {
        EquationOfState cst{EosKind::Constant, 0.5, 0.0};
        CHECK(psi_star_eps(cst, eps, 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("parameter validation") {
    PhysicalParams p;
    CHECK_NOTHROW(p.validate());
    p.mu_plus = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.mu_plus = 1.0;
    p.lambda_gamma_bar = -3.0;
    p.mu_gamma_bar = 1.0; // lambda + 2 mu = -1 < 0
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.lambda_gamma_bar = -2.0; // exactly on the boundary
    CHECK_NOTHROW(p.validate());
    p.epsilon_reg = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
