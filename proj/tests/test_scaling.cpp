#include <doctest.h>

#include <qlap/minimize.hpp>
#include <qlap/sampling.hpp>
#include <qlap/scaling.hpp>

#include <cmath>

using namespace qlap;

TEST_CASE("theta scale identity and laws") {
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    const auto g = make_grid(3, 12.0, 4097);
    RadialFn u = project_sphere(gaussian_profile(g, 1.0), 1.0);

    // theta = 1 reproduces the nodes up to interpolation idempotence
    RadialFn id = theta_scale(u, 1.0);
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::fabs(id[i] - u[i]));
    CHECK(worst < 1e-12);

    const auto t = gn_exponents(pp);
    const FiberNorms n0 = fiber_norms(u, pp);
    for (double theta : {0.5, 1.5, 3.0}) {
        RadialFn v = theta_scale(u, theta);
        const FiberNorms n1 = fiber_norms(v, pp);
        CHECK(n1.mass == doctest::Approx(n0.mass).epsilon(1e-4));
        CHECK(n1.grad2 == doctest::Approx(theta * theta * n0.grad2).epsilon(1e-4));
        CHECK(n1.gradq ==
              doctest::Approx(std::pow(theta, t.q_one_plus_delta_q) * n0.gradq).epsilon(1e-4));
        CHECK(n1.lp == doctest::Approx(std::pow(theta, t.p_delta_p) * n0.lp).epsilon(1e-4));
    }

    // mass drift reporting
    double drift = 1.0;
    theta_scale(u, 1.5, &drift);
    CHECK(drift < 1e-4);

    // support collapse
    CHECK_THROWS_WITH_AS(theta_scale(u, 1e5), doctest::Contains("under-resolved"),
                         std::runtime_error);
}

TEST_CASE("sigma star group law") {
    const auto g = make_grid(2, 12.0, 8193);
    RadialFn u = gaussian_profile(g, 1.5);

    RadialFn a = sigma_star(u, 0.0);
    for (int i = 0; i < u.size(); ++i)
        CHECK(a[i] == doctest::Approx(u[i]).epsilon(1e-13));

    RadialFn two_step = sigma_star(sigma_star(u, 0.1), 0.15);
    RadialFn one_step = sigma_star(u, 0.25);
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::fabs(two_step[i] - one_step[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("fiber psi") {
    const ProblemParams pp{3, 3.0, 4.0, 2.0, 1.0};
    const auto g = make_grid(3, 12.0, 2049);
    RadialFn u = project_sphere(gaussian_profile(g, 1.0), 1.0);
    const FiberNorms norms = fiber_norms(u, pp);

    // psi(1)·1 = E exactly (same summands)
    const FiberPoint at1 = fiber_psi(norms, pp, 1.0);
    CHECK(at1.energy_at_theta == doctest::Approx(energy(u, pp)).epsilon(1e-13));
    CHECK(at1.energy_at_theta == at1.theta * at1.theta * at1.value);

    // theta -> 0: the constant grad2 term survives
    const FiberPoint small = fiber_psi(norms, pp, 1e-9);
    CHECK(small.value == doctest::Approx(0.5 * norms.grad2).epsilon(1e-8));

    // psi against the physical rescale, interpolation-limited
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double theta = 0.25 * std::pow(16.0, k / 199.0);
        const double algebra = fiber_psi(norms, pp, theta).value;
        const double physical = energy(theta_scale(u, theta), pp) / (theta * theta);
        worst = std::max(worst, std::fabs(algebra - physical) /
                                    std::max(std::fabs(algebra), 0.5 * norms.grad2));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("fiber argmin closed form vs brute force") {
    Rng rng(31);
    int done = 0;
    for (int rep = 0; rep < 200 && done < 10; ++rep) {
        const int N = 1 + static_cast<int>(rng.next_u64() % 4);
        const double q = 2.2 + rng.uniform(0.0, 2.0);
        auto [p2, pq] = mass_critical_exponents(N, q);
        const double p = p2 + rng.uniform(0.2, 0.8) * (pq - p2);
        const ProblemParams pp{N, q, p, rng.log_uniform(0.2, 5.0), 1.0};

        FiberNorms norms;
        norms.grad2 = rng.log_uniform(0.1, 10.0);
        norms.gradq = rng.log_uniform(0.1, 10.0);
        norms.lp = rng.log_uniform(0.1, 10.0);
        norms.mass = 1.0;

        const FiberMin fm = fiber_argmin(norms, pp);
        if (fm.theta_bar < 2e-3 || fm.theta_bar > 5e2)
            continue; // keep the minimum well inside the scan window
        ++done;

        double best_theta = 0.0, best_val = 1e300;
        for (int k = 0; k < 100000; ++k) {
            const double theta = 1e-4 * std::pow(1e8, k / 99999.0);
            const double v = fiber_psi(norms, pp, theta).value;
            if (v < best_val) {
                best_val = v;
                best_theta = theta;
            }
        }
        CHECK(fm.theta_bar == doctest::Approx(best_theta).epsilon(1e-4));
        CHECK(fm.psi_min ==
              doctest::Approx(fiber_psi(norms, pp, fm.theta_bar).value).epsilon(1e-10));

        // psi' changes sign exactly once over the scan
        int sign_changes = 0;
        double prev = fiber_psi(norms, pp, 1e-4).value;
        double prev_diff = 0.0;
        for (int k = 1; k < 2000; ++k) {
            const double theta = 1e-4 * std::pow(1e8, k / 1999.0);
            const double cur = fiber_psi(norms, pp, theta).value;
            const double diff = cur - prev;
            if (k > 1 && diff > 0 && prev_diff < 0)
                ++sign_changes;
            if (k > 1 && diff < 0 && prev_diff > 0)
                ++sign_changes;
            prev = cur;
            prev_diff = diff;
        }
        CHECK(sign_changes == 1);
    }
    CHECK(done == 10);

    const ProblemParams pp{3, 3.0, 4.0, 0.0, 1.0};
    FiberNorms norms{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fiber_argmin(norms, pp), std::domain_error);
}

TEST_CASE("fiber min sign flips at a finite alpha") {
    const ProblemParams base{3, 3.0, 4.0, 1.0, 1.0};
    const auto g = make_grid(3, 12.0, 1025);
    RadialFn u = project_sphere(gaussian_profile(g, 1.0), 1.0);
    const FiberNorms norms = fiber_norms(u, base);

    auto psi_min_at = [&](double alpha) {
        ProblemParams pp = base;
        pp.alpha = alpha;
        return fiber_argmin(norms, pp).psi_min;
    };
    double lo = 1e-4, hi = 1e4;
    REQUIRE(psi_min_at(lo) > 0.0);
    REQUIRE(psi_min_at(hi) < 0.0);
    for (int it = 0; it < 100; ++it) {
        const double mid = std::sqrt(lo * hi);
        (psi_min_at(mid) > 0.0 ? lo : hi) = mid;
    }
    // the u-dependent threshold from the closed form: psi_min = 0 at
    // alpha0_from_d evaluated on J(u)
    const double J = quotient_J(u, base);
    const double alpha_star = alpha0_from_d(J, base);
    CHECK(0.5 * (lo + hi) == doctest::Approx(alpha_star).epsilon(1e-6));
}

TEST_CASE("alpha0 closed form") {
    const ProblemParams pp{2, 3.0, 4.5, 1.0, 1.0};
    const double a1 = alpha0_from_d(0.7, pp);
    const double a2 = alpha0_from_d(1.4, pp);
    CHECK(a1 > 0.0);
    CHECK(a2 > a1); // strictly increasing in d

    // mass law of alpha0 matches the explicit power
    const double d1 = 0.9;
    for (double m : {2.0, 4.0}) {
        ProblemParams pm = pp;
        pm.m = m;
        const double dm = std::pow(m, d_mass_exponent(pp)) * d1;
        const double direct = alpha0_from_d(dm, pm);
        const double via_power = alpha0_from_d(d1, pp) * std::pow(m, alpha0_mass_exponent(pp));
        CHECK(direct == doctest::Approx(via_power).epsilon(1e-10));
    }

    CHECK_THROWS_AS(alpha0_from_d(-1.0, pp), std::domain_error);
}

TEST_CASE("energy vanishes down the fiber") {
    // E(sigma * u) -> 0 as sigma -> -infinity; algebraic route
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    const auto g = make_grid(3, 12.0, 1025);
    RadialFn u = project_sphere(gaussian_profile(g, 1.0), 1.0);
    const FiberNorms norms = fiber_norms(u, pp);
    const double E = fiber_psi(norms, pp, std::exp(-20.0)).energy_at_theta;
    CHECK(std::fabs(E) < 1e-6);
}

TEST_CASE("sigma functional matches the energy of the dilated function") {
    // term-by-term check of E(sigma * u) against the exponential form
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    const auto g = make_grid(3, 12.0, 4097);
    RadialFn u = project_sphere(gaussian_profile(g, 1.0), 1.0);
    const FiberNorms n0 = fiber_norms(u, pp);
    const auto t = gn_exponents(pp);
    for (double sigma : {-0.4, 0.2, 0.5}) {
        RadialFn v = sigma_star(u, sigma);
        const FiberNorms n1 = fiber_norms(v, pp);
        CHECK(n1.grad2 == doctest::Approx(std::exp(2.0 * sigma) * n0.grad2).epsilon(1e-5));
        CHECK(n1.gradq ==
              doctest::Approx(std::exp(sigma * t.q_one_plus_delta_q) * n0.gradq).epsilon(1e-5));
        CHECK(n1.lp == doctest::Approx(std::exp(sigma * t.p_delta_p) * n0.lp).epsilon(1e-5));
        const double J_sigma = 0.5 * std::exp(2.0 * sigma) * n0.grad2 +
                               std::exp(sigma * t.q_one_plus_delta_q) / pp.q * n0.gradq -
                               pp.alpha / pp.p * std::exp(sigma * t.p_delta_p) * n0.lp;
        CHECK(energy(v, pp) == doctest::Approx(J_sigma).epsilon(1e-5));
    }
}
