#include <doctest.h>

#include <qlap/functionals.hpp>
#include <qlap/sampling.hpp>
#include <qlap/scaling.hpp>

#include <nlohmann/json.hpp>

#include <cmath>

using namespace qlap;

namespace {

RadialFn lincomb(const RadialFn& a, double s, const RadialFn& b) {
    std::vector<double> v(a.size());
    for (int i = 0; i < a.size(); ++i)
        v[i] = a[i] + s * b[i];
    return RadialFn(a.grid_ptr(), std::move(v));
}

} // namespace

TEST_CASE("energy") {
    const ProblemParams pp{1, 3.0, 4.0, 1.0, 1.0};
    const auto g = make_grid(1, 10.0, 32769);

    RadialFn zero(g, [](double) { return 0.0; });
    CHECK(energy(zero, pp) == 0.0);

    // closed-form Gaussian oracle: sqrt(pi/2)/2 + 8/27 - sqrt(pi)/8
    RadialFn gauss(g, [](double r) { return std::exp(-r * r); });
    const double oracle = std::sqrt(M_PI / 2.0) / 2.0 + 8.0 / 27.0 - std::sqrt(M_PI) / 8.0;
    CHECK(energy(gauss, pp) == doctest::Approx(oracle).epsilon(1e-6));

    ProblemParams free = pp;
    free.alpha = 0.0;
    Rng rng(2);
    RadialFn u = random_bump_mixture(g, rng);
    CHECK(energy(u, free) > 0.0);
}

TEST_CASE("q functional") {
    const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
    const auto g = make_grid(3, 10.0, 513);
    RadialFn zero(g, [](double) { return 0.0; });
    CHECK(q_functional(zero, pp) == 0.0);

    ProblemParams free = pp;
    free.alpha = 0.0;
    Rng rng(4);
    RadialFn u = random_bump_mixture(g, rng);
    CHECK(q_functional(u, free) > 0.0);
}

TEST_CASE("pohozaev identity is an exact rearrangement") {
    const auto g = make_grid(3, 10.0, 513);
    Rng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const ProblemParams pp{3, 2.0 + rng.uniform(0.1, 4.0), 2.0 + rng.uniform(0.1, 4.0),
                               rng.uniform(0.0, 3.0), 1.0};
        RadialFn u = random_bump_mixture(g, rng);
        if (u.max_abs() == 0.0)
            continue;
        const EnergyReport rep_ = energy_report(u, pp);
        const double P_alg = pp.N * rep_.E - rep_.K + pp.N * rep_.lambda / 2.0 * rep_.mass;
        CHECK(rep_.pohozaev ==
              doctest::Approx(P_alg).epsilon(1e-12).scale(std::fabs(rep_.K) + 1.0));
        CHECK(rep_.K == rep_.grad2 + rep_.gradq);
        CHECK(rep_.E == 0.5 * rep_.grad2 + rep_.gradq / pp.q - pp.alpha / pp.p * rep_.lp);
        // P with the inferred multiplier equals -Q identically
        CHECK(rep_.pohozaev ==
              doctest::Approx(-rep_.Q).epsilon(1e-11).scale(std::fabs(rep_.K) + 1.0));
        CHECK(pohozaev(u, pp, rep_.lambda) ==
              doctest::Approx(rep_.pohozaev).epsilon(1e-12).scale(std::fabs(rep_.K) + 1.0));
    }
}

TEST_CASE("first variation is the exact discrete gradient") {
    for (int n : {257, 1025, 4097}) {
        const ProblemParams pp{3, 3.0, 4.0, 1.5, 1.0};
        const auto g = make_grid(3, 10.0, n);
        Rng rng(100 + n);
        RadialFn u = random_bump_mixture(g, rng);
        const RadialFn grad = first_variation(u, pp);
        for (int rep = 0; rep < (n == 1025 ? 20 : 5); ++rep) {
            RadialFn v = random_bump_mixture(g, rng);
            const double eps = 1e-5;
            const double fd =
                (energy(lincomb(u, eps, v), pp) - energy(lincomb(u, -eps, v), pp)) /
                (2.0 * eps);
            const double an = inner(grad, v);
            CHECK(an == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    const ProblemParams pp{3, 3.0, 4.0, 1.5, 1.0};
    const auto g = make_grid(3, 10.0, 257);
    RadialFn zero(g, [](double) { return 0.0; });
    const RadialFn gz = first_variation(zero, pp);
    for (int i = 0; i < gz.size(); ++i)
        CHECK(gz[i] == 0.0);
}

TEST_CASE("first variation homogeneity of each term") {
    // alpha = 0: <g(cu), cu> = c^2 grad2 + c^q gradq
    const ProblemParams pp{2, 3.0, 4.0, 0.0, 1.0};
    const auto g = make_grid(2, 8.0, 513);
    Rng rng(8);
    RadialFn u = random_bump_mixture(g, rng);
    const double g2 = grad_norm_pow(u, 2.0);
    const double gq = grad_norm_pow(u, pp.q);
    for (double c : {0.5, 2.0, 3.7}) {
        RadialFn cu = lincomb(u, c - 1.0, u);
        const double got = inner(first_variation(cu, pp), cu);
        const double want = c * c * g2 + std::pow(c, pp.q) * gq;
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("lagrange multiplier") {
    const auto g = make_grid(2, 8.0, 513);
    Rng rng(10);
    RadialFn u = random_bump_mixture(g, rng);

    ProblemParams free{2, 3.0, 4.0, 0.0, 1.0};
    CHECK(lagrange_multiplier(u, free) < 0.0);

    RadialFn zero(g, [](double) { return 0.0; });
    CHECK_THROWS_AS(lagrange_multiplier(zero, free), std::domain_error);
}

TEST_CASE("quotient J scaling laws") {
    const ProblemParams pp{2, 3.0, 4.5, 1.0, 1.0};
    const auto t = gn_exponents(pp);
    const double b = t.q_one_plus_delta_q - 2.0;
    const double c = t.p_delta_p - 2.0;
    const auto g = make_grid(2, 10.0, 1025);
    Rng rng(12);
    RadialFn u = random_bump_mixture(g, rng);
    const double J = quotient_J(u, pp);

    // amplitude law J(tau u) = tau^{-p(q-2)/(b-c)} J(u)
    for (double tau : {0.5, 2.0}) {
        RadialFn tu = lincomb(u, tau - 1.0, u);
        const double want = std::pow(tau, -pp.p * (pp.q - 2.0) / (b - c)) * J;
        CHECK(quotient_J(tu, pp) == doctest::Approx(want).epsilon(1e-10));
    }

    // dilation invariance, exact in the fiber algebra
    const FiberNorms norms = fiber_norms(u, pp);
    for (double theta : {0.3, 1.7, 4.0}) {
        const auto s = scale_norms(norms, pp, theta);
        const double Js = s.grad2 * std::pow(s.gradq, c / (b - c)) /
                          std::pow(s.lp, b / (b - c));
        CHECK(Js == doctest::Approx(J).epsilon(1e-12));
    }

    // physically rescaled copy agrees within interpolation error
    {
        RadialFn smooth = gaussian_profile(g, 1.5);
        const double Js = quotient_J(smooth, pp);
        RadialFn u_theta = theta_scale(smooth, 1.3);
        CHECK(quotient_J(u_theta, pp) == doctest::Approx(Js).epsilon(1e-3));
    }

    const auto gz = make_grid(2, 10.0, 64);
    RadialFn zero(gz, [](double) { return 0.0; });
    CHECK_THROWS_AS(quotient_J(zero, pp), std::domain_error);
}

TEST_CASE("energy decreases in alpha at fixed u") {
    // dE/dalpha = -|u|_p^p / p < 0 pointwise in alpha
    const auto g = make_grid(2, 8.0, 257);
    RadialFn u = gaussian_profile(g, 1.0);
    ProblemParams a{2, 3.0, 4.5, 1.0, 1.0};
    ProblemParams b = a;
    b.alpha = 2.5;
    const double lp = lp_norm_pow(u, a.p);
    CHECK(energy(u, b) - energy(u, a) ==
          doctest::Approx(-(b.alpha - a.alpha) / a.p * lp).epsilon(1e-13));
    CHECK(energy(u, b) < energy(u, a));
}

TEST_CASE("coercivity along dilations") {
    // K -> infinity along the fiber forces E -> +infinity in the
    // intermediate regime
    const ProblemParams pp{2, 3.0, 4.5, 5.0, 1.0};
    const auto g = make_grid(2, 10.0, 513);
    RadialFn u = gaussian_profile(g, 1.0);
    const FiberNorms norms = fiber_norms(u, pp);
    double prevE = -1e300;
    for (double theta : {1e2, 1e3, 1e4, 1e5}) {
        const auto s = scale_norms(norms, pp, theta);
        const double E = energy_of(s, pp);
        CHECK(E > prevE);
        prevE = E;
    }
    CHECK(prevE > 1e6);
}

TEST_CASE("energy report json") {
    const ProblemParams pp{2, 3.0, 4.5, 1.0, 1.0};
    const auto g = make_grid(2, 8.0, 257);
    RadialFn u = gaussian_profile(g, 1.0);
    const auto j = to_json(energy_report(u, pp));
    for (const char* key :
         {"E", "K", "Q", "grad2", "gradq", "mass", "lp", "lambda", "pohozaev", "params"})
        CHECK(j.contains(key));
    CHECK(j["params"]["N"] == 2);
}
