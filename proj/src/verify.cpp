#include <qlap/verify.hpp>

#include <qlap/functionals.hpp>
#include <qlap/minimize.hpp>
#include <qlap/params.hpp>
#include <qlap/radial.hpp>
#include <qlap/sampling.hpp>
#include <qlap/scaling.hpp>
#include <qlap/shoot.hpp>

#include <cmath>
#include <sstream>

namespace qlap {

namespace {

struct Suite {
    std::vector<CheckResult> results;

    void check(const std::string& name, bool pass, const std::string& detail = "") {
        results.push_back({name, pass, detail});
    }

    void check_close(const std::string& name, double got, double want, double rel) {
        const double err = std::fabs(got - want) / std::max(1e-300, std::fabs(want));
        std::ostringstream os;
        os << "got " << got << ", want " << want << " (rel err " << err << ")";
        results.push_back({name, err <= rel, os.str()});
    }
};

} // namespace

std::vector<CheckResult> run_verification(bool quick) {
    Suite s;

    // exponent algebra
    {
        auto [p2, pq] = mass_critical_exponents(2, 3.0);
        s.check("mass-critical exponents (N=2,q=3)", p2 == 4.0 && pq == 6.0);
        s.check_close("nu_{4,2} at N=3", nu_exponent(3, 4.0, 2.0), 0.75, 1e-14);
        const ProblemParams pp{3, 3.0, 4.0, 1.0, 1.0};
        s.check("regime (N=3,q=3,p=4) intermediate",
                classify_regime(pp).kind == RegimeKind::Intermediate);
        s.check("liouville (N=3,p=4,q=5) pohozaev",
                liouville_certificate(3, 4.0, 5.0).outcome ==
                    LiouvilleOutcome::CertifiedPohozaev);
        const auto trace = decay_iteration(5, 3.5);
        s.check("decay iteration trace", trace.iterations == 3 && trace.a.size() == 4 &&
                                             trace.a[3] == 3.9375);
    }

    // quadrature
    {
        const auto g3 = make_grid(3, 2.0, quick ? 1024 : 4096);
        RadialFn one(g3, [](double) { return 1.0; });
        s.check_close("ball volume N=3 r=2", integrate(one), 4.0 * M_PI / 3.0 * 8.0, 1e-12);

        double wsum = 0.0;
        for (double w : g3->weights())
            wsum += w;
        s.check_close("weight sum = moment", wsum, 8.0 / 3.0, 1e-13);

        const auto g1 = make_grid(1, 10.0, quick ? 32769 : 131073);
        RadialFn gauss(g1, [](double r) { return std::exp(-r * r); });
        s.check_close("gaussian integral N=1", integrate(gauss), std::sqrt(M_PI), 1e-7);

        Rng rng(7);
        RadialFn a = random_bump_mixture(g3, rng);
        RadialFn b = random_bump_mixture(g3, rng);
        RadialFn comb(g3, std::vector<double>(g3->size()));
        for (int i = 0; i < comb.size(); ++i)
            comb[i] = 2.5 * a[i] - 0.75 * b[i];
        s.check_close("integrate linearity", integrate(comb),
                      2.5 * integrate(a) - 0.75 * integrate(b), 1e-12);
    }

    // scaling laws and fiber closed form
    {
        const ProblemParams pp{3, 3.0, 4.0, 2.0, 1.0};
        const auto g = make_grid(3, 12.0, quick ? 2049 : 4097);
        RadialFn u = project_sphere(gaussian_profile(g, 1.0), 1.0);
        const FiberNorms n0 = fiber_norms(u, pp);
        double drift = 0.0;
        RadialFn u2 = theta_scale(u, 1.5, &drift);
        const FiberNorms n2 = fiber_norms(u2, pp);
        s.check_close("theta-scaling mass", n2.mass, n0.mass, 1e-4);
        s.check_close("theta-scaling grad2", n2.grad2, 1.5 * 1.5 * n0.grad2, 1e-3);

        const auto fm = fiber_argmin(n0, pp);
        double best_theta = 1e-4, best_val = 1e300;
        for (int k = 0; k <= 20000; ++k) {
            const double th = 1e-4 * std::pow(1e8, k / 20000.0);
            const double v = fiber_psi(n0, pp, th).value;
            if (v < best_val) {
                best_val = v;
                best_theta = th;
            }
        }
        s.check_close("fiber argmin closed form", fm.theta_bar, best_theta, 2e-3);
        s.check_close("fiber min closed form", fm.psi_min,
                      fiber_psi(n0, pp, fm.theta_bar).value, 1e-10);
    }

    // gradient exactness
    {
        const ProblemParams pp{1, 3.0, 4.0, 1.0, 1.0};
        const auto g = make_grid(1, 10.0, 257);
        Rng rng(11);
        RadialFn u = random_bump_mixture(g, rng);
        const RadialFn grad = first_variation(u, pp);
        double worst = 0.0;
        for (int dir = 0; dir < (quick ? 3 : 8); ++dir) {
            RadialFn v = random_bump_mixture(g, rng);
            const double eps = 1e-5;
            RadialFn up(g, std::vector<double>(g->size()));
            RadialFn dn(g, std::vector<double>(g->size()));
            for (int i = 0; i < u.size(); ++i) {
                up[i] = u[i] + eps * v[i];
                dn[i] = u[i] - eps * v[i];
            }
            const double fd = (energy(up, pp) - energy(dn, pp)) / (2.0 * eps);
            const double an = inner(grad, v);
            worst = std::max(worst, std::fabs(fd - an) / std::max(1.0, std::fabs(fd)));
        }
        std::ostringstream os;
        os << "worst relative error " << worst;
        s.check("first variation vs finite differences", worst < 1e-6, os.str());

        const EnergyReport rep = energy_report(u, pp);
        const double P_alg = pp.N * rep.E - rep.K + pp.N * rep.lambda / 2.0 * rep.mass;
        s.check_close("pohozaev same-summand identity", rep.pohozaev, P_alg, 1e-12);
    }

    // descent sanity
    {
        const ProblemParams pp{2, 3.0, 4.5, 30.0, 1.0};
        const auto g = make_grid(2, 12.0, 257);
        MinimizeOptions opts;
        opts.max_iter = quick ? 300 : 1500;
        opts.restarts = 3;
        opts.tol_grad = 1e-6;
        const MinimizeResult res = global_minimize(pp, g, opts);
        s.check("descent reaches negative energy", res.energy < 0.0,
                "E = " + std::to_string(res.energy));
        s.check_close("mass conservation", res.mass, 1.0, 1e-10);
        s.check("positive multiplier", res.lambda > 0.0);
    }

    // first integral
    {
        const ProblemParams pp{1, 3.0, 4.5, 1.0, 1.0};
        ShootConfig cfg;
        cfg.lambda = 1.0;
        cfg.u0 = 2.0;
        cfg.r_max = 20.0;
        cfg.tol_step = quick ? 1e-10 : 1e-12;
        const ShootResult res = shoot(cfg, pp);
        const double rel = res.F_dev / std::max(std::fabs(res.F0), 1e-300);
        std::ostringstream os;
        os << "relative deviation " << rel;
        s.check("N=1 first integral conserved", rel < 1e-8, os.str());
    }

    // rearrangement fixed point
    {
        const auto g = make_grid(3, 10.0, 257);
        RadialFn mono(g, [](double r) { return std::exp(-0.5 * r); });
        const RadialFn re = rearrange_decreasing(mono);
        double worst = 0.0;
        for (int i = 0; i < mono.size(); ++i)
            worst = std::max(worst, std::fabs(re[i] - mono[i]));
        s.check("rearrangement fixes decreasing profiles", worst < 1e-13);
    }

    // shooting corridor: the N=1 amplitude where the first integral vanishes
    if (!quick) {
        const ProblemParams pp{1, 3.0, 4.5, 1.0, 1.0};
        const ShootResult res = find_ground_state(pp, 1.0);
        const double u0_star = std::pow(pp.p / (2.0 * pp.alpha), 1.0 / (pp.p - 2.0));
        s.check_close("N=1 corridor amplitude vs conserved-quantity root", res.u0, u0_star,
                      1e-7);
    }

    return s.results;
}

} // namespace qlap
