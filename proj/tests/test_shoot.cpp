#include <doctest.h>

#include <qlap/functionals.hpp>
#include <qlap/shoot.hpp>

#include <cmath>

using namespace qlap;

TEST_CASE("ode rhs") {
    const ProblemParams pp{3, 3.0, 4.0, 2.0, 1.0};

    // v = 0, lambda = 0: u'' = -alpha |u|^{p-2} u
    CHECK(ode_rhs(1.0, 0.5, 0.0, pp, 0.0) ==
          doctest::Approx(-2.0 * std::pow(0.5, 3.0)).epsilon(1e-14));

    // N = 1: no 1/r term
    const ProblemParams p1{1, 3.0, 4.0, 2.0, 1.0};
    const double u = 0.7, v = 0.3, lam = 1.5;
    const double want = (lam * u - 2.0 * std::pow(u, 3.0)) / (1.0 + 2.0 * std::fabs(v));
    CHECK(ode_rhs(0.123, u, v, p1, lam) == doctest::Approx(want).epsilon(1e-14));

    // large |v| asymptote: u'' -> -((N-1)/((q-1) r)) v
    const double vbig = 1e6;
    const double asym = -((pp.N - 1.0) / ((pp.q - 1.0) * 2.0)) * vbig;
    CHECK(ode_rhs(2.0, 1.0, vbig, pp, 1.0) == doctest::Approx(asym).epsilon(1e-4));
}

TEST_CASE("classification dichotomy for lambda > 0") {
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    ShootConfig cfg;
    cfg.lambda = 1.0;
    cfg.r_max = 60.0;
    cfg.tol_step = 1e-10;

    // tiny amplitude: the linear term wins, no crossing
    cfg.u0 = 1e-6;
    const ShootResult small = shoot(cfg, pp);
    CHECK(small.classification != TrajectoryClass::Crossing);

    // huge amplitude: the nonlinearity overshoots
    cfg.u0 = 1e3;
    const ShootResult big = shoot(cfg, pp);
    CHECK(big.classification == TrajectoryClass::Crossing);
    CHECK(big.event_r > 0.0);
}

TEST_CASE("first integral: conserved for N = 1, monotone for N >= 2") {
    {
        const ProblemParams pp{1, 3.0, 4.5, 1.0, 1.0};
        ShootConfig cfg;
        cfg.lambda = 1.0;
        cfg.u0 = 2.0; // F(0) > 0 on the crossing side
        cfg.r_max = 25.0;
        cfg.tol_step = 1e-12;
        const ShootResult res = shoot(cfg, pp);
        REQUIRE(res.F0 > 0.0);
        CHECK(res.F_dev / res.F0 < 1e-8);
    }
    {
        const ProblemParams pp{5, 4.0, 4.0, 1.0, 1.0};
        ShootConfig cfg;
        cfg.lambda = 0.0;
        cfg.u0 = 1.0;
        cfg.r_max = 50.0;
        cfg.tol_step = 1e-12;
        const ShootResult res = shoot(cfg, pp);
        REQUIRE(res.F0 > 0.0);
        CHECK(res.F_drift < 1e-8 * res.F0);
    }
}

TEST_CASE("integrator order: halving the fixed step gains >= 8x") {
    // horizon short enough that u' stays one-signed: |v|^{q-2} is smooth
    // along the whole trajectory and the full fourth order is visible
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    auto terminal_u = [&](double h, double tol) {
        ShootConfig cfg;
        cfg.lambda = 1.0;
        cfg.u0 = 0.8;
        cfg.r_max = 1.0;
        cfg.h0 = h;
        cfg.tol_step = tol;
        cfg.store_profile = true;
        const ShootResult res = shoot(cfg, pp);
        return res.profile.back().u;
    };
    const double ref = terminal_u(1e-4, 1e-14); // tight adaptive reference
    const double e1 = std::fabs(terminal_u(0.02, 0.0) - ref);
    const double e2 = std::fabs(terminal_u(0.01, 0.0) - ref);
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("classification stable under 10% tolerance perturbation") {
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    ShootConfig cfg;
    cfg.lambda = 1.0;
    cfg.r_max = 60.0;
    cfg.tol_step = 1e-10;
    for (double u0 : {1e-3, 1e3}) {
        cfg.u0 = u0;
        const auto base = shoot(cfg, pp).classification;
        for (double f : {0.9, 1.1}) {
            ShootConfig pert = cfg;
            pert.tol_step = cfg.tol_step * f;
            CHECK(shoot(pert, pp).classification == base);
        }
    }
}

TEST_CASE("ground state for N = 1 matches the conserved-quantity amplitude") {
    // the decaying solution starts exactly where F(0) = 0:
    // (alpha/p) u0^p = (lambda/2) u0^2, so u0* = (p lambda / (2 alpha))^{1/(p-2)}
    const ProblemParams pp{1, 3.0, 4.5, 1.0, 1.0};
    const double lambda = 1.0;
    const ShootResult res = find_ground_state(pp, lambda);
    const double u0_star = std::pow(pp.p * lambda / (2.0 * pp.alpha), 1.0 / (pp.p - 2.0));
    CHECK(res.u0 == doctest::Approx(u0_star).epsilon(1e-8));
    CHECK(res.classification == TrajectoryClass::Decaying);
    CHECK(res.lambda_residual < 0.01);
    CHECK(res.pohozaev_residual < 1e-3);
    CHECK(res.l2_mass > 0.0);
}

TEST_CASE("zero-mass shooting at N = 5") {
    const ProblemParams pp{5, 4.0, 4.0, 1.0, 1.0};
    const ShootResult res = find_ground_state(pp, 0.0);
    CHECK(res.classification == TrajectoryClass::Decaying);
    REQUIRE(res.fit_valid);
    CHECK(res.decay_slope > -3.3);
    CHECK(res.decay_slope < -2.7);
    CHECK_FALSE(res.super_polynomial);
    CHECK(res.l2_finite);
    CHECK(res.pohozaev_residual < 1e-3);
    CHECK(res.flux_residual < 1e-6);
}

TEST_CASE("no zero-mass ground state in the certified regime") {
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    CHECK(liouville_certificate(pp.N, pp.p, pp.q).outcome !=
          LiouvilleOutcome::NotCertified);
    CHECK_THROWS_WITH_AS(find_ground_state(pp, 0.0),
                         doctest::Contains("no ground state located"), std::runtime_error);
}

TEST_CASE("decay fit on synthetic tails") {
    const ProblemParams pp{5, 4.0, 4.0, 1.0, 1.0};
    (void)pp;
    auto make_tail = [](auto f) {
        ShootResult res;
        res.u0 = 1.0;
        for (int i = 0; i < 4000; ++i) {
            const double r = 0.1 * std::pow(1e4, i / 3999.0);
            res.profile.push_back({r, f(r), 0.0, 0.0});
        }
        return res;
    };

    const auto power = make_tail([](double r) { return std::pow(r + 1e-9, -3.0); });
    const DecayFit pf = decay_fit(power);
    CHECK(pf.slope == doctest::Approx(-3.0).epsilon(1e-3));
    CHECK_FALSE(pf.super_polynomial);

    const auto expo = make_tail([](double r) { return std::exp(-r); });
    const DecayFit ef = decay_fit(expo);
    CHECK(ef.super_polynomial);

    ShootResult empty;
    empty.u0 = 1.0;
    CHECK_THROWS_AS(decay_fit(empty), std::runtime_error);
}

TEST_CASE("integral identity along the trajectory") {
    // integrating the conservative form between two radii ties the flux
    // difference to the nonlinear integrals; find_ground_state records it
    const ProblemParams pp{5, 4.0, 4.0, 1.0, 1.0};
    const ShootResult res = find_ground_state(pp, 0.0);
    CHECK(res.flux_residual < 1e-6);
}

TEST_CASE("zero-mass eligibility precondition") {
    // lambda = 0 with N <= 2 has no decaying-solution machinery at all
    const ProblemParams pp{2, 3.0, 4.0, 1.0, 1.0};
    CHECK_THROWS_AS(find_ground_state(pp, 0.0), std::invalid_argument);
    const ProblemParams pn{3, 3.0, 4.0, 1.0, 1.0};
    CHECK_THROWS_AS(find_ground_state(pn, -1.0), std::invalid_argument);
}
