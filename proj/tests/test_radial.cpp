#include <doctest.h>

#include <qlap/radial.hpp>
#include <qlap/sampling.hpp>

#include <cmath>
#include <sstream>

using namespace qlap;

namespace {

// measure of the superlevel set {|u| > t} in the node-cell quadrature
double superlevel_measure(const RadialFn& u, double t) {
    const auto& w = u.grid().weights();
    double m = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (std::fabs(u[i]) > t)
            m += w[i];
    return u.grid().omega() * m;
}

double max_cell_measure(const RadialGrid& g) {
    double m = 0.0;
    for (double w : g.weights())
        m = std::max(m, w);
    return g.omega() * m;
}

} // namespace

TEST_CASE("grid construction and weights") {
    for (int N : {1, 2, 3, 5}) {
        for (auto spacing : {Spacing::Uniform, Spacing::Geometric}) {
            const double ratio = spacing == Spacing::Geometric ? 1.02 : 1.0;
            const auto g = make_grid(N, 7.5, 301, spacing, ratio);
            const auto& r = g->nodes();
            CHECK(r.front() == 0.0);
            CHECK(r.back() == doctest::Approx(7.5).epsilon(1e-14));
            for (int i = 0; i + 1 < g->size(); ++i)
                CHECK(r[i] < r[i + 1]);
            double wsum = 0.0;
            for (double w : g->weights()) {
                CHECK(w >= 0.0);
                wsum += w;
            }
            const double moment = std::pow(7.5, N) / N;
            CHECK(wsum == doctest::Approx(moment).epsilon(1e-10));
        }
    }
    CHECK_THROWS(make_grid(3, 1.0, 8)); // too few nodes
}

TEST_CASE("integrate") {
    const auto g = make_grid(3, 2.0, 1025);
    RadialFn one(g, [](double) { return 1.0; });
    CHECK(integrate(one) == doctest::Approx(4.0 * M_PI / 3.0 * 8.0).epsilon(1e-8));

    RadialFn zero(g, [](double) { return 0.0; });
    CHECK(integrate(zero) == 0.0);

    const auto g1 = make_grid(1, 10.0, 131073);
    RadialFn gauss(g1, [](double r) { return std::exp(-r * r); });
    CHECK(integrate(gauss) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));

    RadialFn bad(g, [](double) { return 1.0; });
    bad[5] = std::nan("");
    CHECK_THROWS_WITH_AS(integrate(bad), doctest::Contains("node 5"), std::domain_error);

    // linearity to near machine precision
    Rng rng(21);
    RadialFn a = random_bump_mixture(g, rng);
    RadialFn b = random_bump_mixture(g, rng);
    RadialFn comb(g, std::vector<double>(g->size()));
    for (int i = 0; i < comb.size(); ++i)
        comb[i] = 1.75 * a[i] - 0.4 * b[i];
    CHECK(integrate(comb) ==
          doctest::Approx(1.75 * integrate(a) - 0.4 * integrate(b)).epsilon(1e-12));
}

TEST_CASE("lp norms") {
    const auto g = make_grid(3, 12.0, 16385);
    RadialFn zero(g, [](double) { return 0.0; });
    CHECK(lp_norm_pow(zero, 2.0) == 0.0);

    // hat of height 1: |u|^s <= 1 bounds the norm by the support measure
    RadialFn hat(g, [](double r) { return r < 1.0 ? 1.0 - r : 0.0; });
    const double ball = 4.0 * M_PI / 3.0;
    CHECK(lp_norm_pow(hat, 3.0) <= ball);

    RadialFn gauss(g, [](double r) { return std::exp(-r * r); });
    CHECK(lp_norm_pow(gauss, 2.0) ==
          doctest::Approx(std::pow(M_PI / 2.0, 1.5)).epsilon(1e-6));
}

TEST_CASE("gradient norms") {
    {
        const auto g = make_grid(3, 12.0, 4097);
        RadialFn c(g, [](double) { return 3.7; });
        CHECK(grad_norm_pow(c, 2.0) == 0.0);

        RadialFn gauss(g, [](double r) { return std::exp(-r * r); });
        CHECK(grad_norm_pow(gauss, 2.0) ==
              doctest::Approx(3.0 * std::pow(M_PI / 2.0, 1.5)).epsilon(1e-4));
    }
    {
        const auto g = make_grid(1, 1.0, 65);
        RadialFn lin(g, [](double r) { return r; });
        CHECK(grad_norm_pow(lin, 2.0) == doctest::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("refinement order") {
    // doubling n: each norm converges at second order on smooth data
    auto norms_at = [](int n) {
        const auto g = make_grid(3, 12.0, n);
        RadialFn gauss(g, [](double r) { return std::exp(-r * r); });
        return std::pair{lp_norm_pow(gauss, 3.0), grad_norm_pow(gauss, 2.0)};
    };
    const auto [l1, g1] = norms_at(513);
    const auto [l2, g2] = norms_at(1025);
    const auto [l4, g4] = norms_at(2049);
    const double order_l = std::log2(std::fabs(l1 - l2) / std::fabs(l2 - l4));
    const double order_g = std::log2(std::fabs(g1 - g2) / std::fabs(g2 - g4));
    CHECK(order_l >= 1.9);
    CHECK(order_g >= 1.9);
}

TEST_CASE("rearrangement") {
    const auto g = make_grid(3, 10.0, 513);

    // fixed point on nonnegative nonincreasing input
    RadialFn mono(g, [](double r) { return std::exp(-0.5 * r); });
    const RadialFn mono_r = rearrange_decreasing(mono);
    for (int i = 0; i < mono.size(); ++i)
        CHECK(mono_r[i] == doctest::Approx(mono[i]).epsilon(1e-14));

    RadialFn c(g, [](double) { return 0.8; });
    const RadialFn c_r = rearrange_decreasing(c);
    for (int i = 0; i < c.size(); ++i)
        CHECK(c_r[i] == doctest::Approx(0.8).epsilon(1e-14));

    // interior bump: monotone output, equimeasurable within one cell
    RadialFn bump(g, [](double r) { return std::exp(-(r - 3.0) * (r - 3.0)); });
    const RadialFn bump_r = rearrange_decreasing(bump);
    for (int i = 0; i + 1 < bump_r.size(); ++i)
        CHECK(bump_r[i] >= bump_r[i + 1] - 1e-14);
    CHECK(bump_r[0] == doctest::Approx(bump.max_abs()).epsilon(1e-14));

    const double tol = max_cell_measure(*g);
    for (double t : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9}) {
        CHECK(std::fabs(superlevel_measure(bump, t) - superlevel_measure(bump_r, t)) <=
              tol + 1e-12);
    }

    // norm preservation within the one-cell tolerance, s in {2, p}
    for (double s : {2.0, 3.4}) {
        const double a = lp_norm_pow(bump, s);
        const double b = lp_norm_pow(bump_r, s);
        CHECK(std::fabs(a - b) <= tol * std::pow(bump.max_abs(), s) + 1e-12);
    }
}

TEST_CASE("discrete polya-szego shrinks under refinement") {
    auto violation = [](int n) {
        const auto g = make_grid(3, 10.0, n);
        RadialFn bump(g, [](double r) {
            return std::exp(-(r - 2.0) * (r - 2.0)) + 0.4 * std::exp(-(r - 5.0) * (r - 5.0));
        });
        const RadialFn re = rearrange_decreasing(bump);
        return std::max(0.0, grad_norm_pow(re, 2.0) - grad_norm_pow(bump, 2.0));
    };
    const double coarse = violation(257);
    const double fine = violation(1025);
    CHECK(fine <= coarse + 1e-12);
    const auto g = make_grid(3, 10.0, 1025);
    RadialFn bump(g, [](double r) {
        return std::exp(-(r - 2.0) * (r - 2.0)) + 0.4 * std::exp(-(r - 5.0) * (r - 5.0));
    });
    // the rearranged profile loses no more than a grid-scale amount of energy
    CHECK(grad_norm_pow(rearrange_decreasing(bump), 2.0) <=
          grad_norm_pow(bump, 2.0) * (1.0 + 0.05));
}

TEST_CASE("csv round trip") {
    const auto g = make_grid(2, 6.0, 129);
    Rng rng(5);
    RadialFn u = random_bump_mixture(g, rng);
    std::stringstream ss;
    write_csv(u, ss);
    const std::string first_line = ss.str().substr(0, ss.str().find('\n'));
    CHECK(first_line == "# N=2 r_max=6 n=129 spacing=uniform");
    ss.seekg(0);
    const RadialFn v = read_csv(ss);
    REQUIRE(v.size() == u.size());
    CHECK(v.grid().dim() == 2);
    for (int i = 0; i < u.size(); ++i)
        CHECK(v[i] == u[i]); // shortest round-trip formatting is lossless
}
