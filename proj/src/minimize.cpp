#include <qlap/minimize.hpp>
#include <qlap/sampling.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace qlap {

namespace {

bool is_intermediate(const ProblemParams& params) {
    return classify_regime(params).kind == RegimeKind::Intermediate;
}

void require_intermediate(const ProblemParams& params, const char* op) {
    const auto reg = classify_regime(params);
    if (reg.kind != RegimeKind::Intermediate)
        throw std::invalid_argument(std::string(op) +
                                    ": requires the intermediate regime p2 < p < pq, got " +
                                    to_string(reg.kind));
}

void require_coercive(const ProblemParams& params, const char* op) {
    const auto [p2, pq] = mass_critical_exponents(params.N, params.q);
    (void)p2;
    if (!(params.p < pq))
        throw std::invalid_argument(std::string(op) +
                                    ": E is not coercive on the mass sphere for p >= pq");
    const auto t = gn_exponents(params);
    if (!(params.p < t.q_star))
        throw std::invalid_argument(std::string(op) + ": requires p < q*");
}

RadialFn axpy(const RadialFn& x, double a, const RadialFn& y) {
    std::vector<double> v(x.size());
    for (int i = 0; i < x.size(); ++i)
        v[i] = x[i] + a * y[i];
    return RadialFn(x.grid_ptr(), std::move(v));
}

double ball_volume(const RadialGrid& g) {
    return g.omega() * std::pow(g.r_max(), g.dim()) / g.dim();
}

/// Energy of the mass-m constant function on the truncated ball; the scale
/// of the spurious negative energy a spreading iterate can reach.
double flat_state_energy_scale(const ProblemParams& params, const RadialGrid& g) {
    const double vol = ball_volume(g);
    return params.alpha / params.p * std::pow(params.m, params.p / 2.0) *
           std::pow(vol, 1.0 - params.p / 2.0);
}

/// K-scale below which an iterate counts as collapsed when no ρ̂ is known:
/// the widest profile the domain can represent.
double fallback_k_scale(const ProblemParams& params, const RadialGrid& g) {
    return params.m * std::pow(M_PI / g.r_max(), 2);
}

struct DescentOut {
    RadialFn u;
    double energy = 0;
    double gnorm = 0;
    int iterations = 0;
    bool converged = false;
    bool boundary_collapse = false;
};

/// Projected gradient descent on the mass sphere. min_K > 0 adds the local
/// constraint K(u) > min_K enforced by step rejection, preserving the exact
/// descent certificate E(u_{k+1}) <= E(u_k).
/// Algebraic scan of the energy along the iterate's own dilation fiber;
/// jumps there when the physically rescaled copy is representable and lower
/// in energy. This accelerates the dilation direction, which plain gradient
/// steps traverse very slowly.
bool try_fiber_jump(RadialFn& u, double& E, const ProblemParams& params, double min_K) {
    const FiberNorms norms = fiber_norms(u, params);
    if (!(norms.gradq > 0.0) || !(norms.lp > 0.0))
        return false;
    double best_theta = 1.0;
    double best_E = E;
    for (int k = 0; k <= 120; ++k) {
        const double theta = 0.05 * std::pow(400.0, k / 120.0);
        const auto s = scale_norms(norms, params, theta);
        if (min_K > 0.0 && k_of(s) <= min_K)
            continue;
        const double Es = energy_of(s, params);
        if (Es < best_E) {
            best_E = Es;
            best_theta = theta;
        }
    }
    if (best_E >= E - 1e-3 * std::fabs(E) - 1e-12)
        return false;
    try {
        double drift = 0.0;
        RadialFn cand = project_sphere(theta_scale(u, best_theta, &drift), params.m);
        if (drift > 1e-3)
            return false;
        if (min_K > 0.0) {
            const double Kc = grad_norm_pow(cand, 2.0) + grad_norm_pow(cand, params.q);
            if (Kc <= min_K)
                return false;
        }
        const double Ec = energy(cand, params);
        if (Ec < E) {
            u = std::move(cand);
            E = Ec;
            return true;
        }
    } catch (const std::runtime_error&) {
    }
    return false;
}

/// H¹ preconditioner: solves (M + L) z = M g where M is the weighted node
/// mass and z^T L z reproduces the discrete ‖z'‖₂² form. Smoothing the
/// Riesz gradient this way removes the h^{-2} stiffness of the Dirichlet
/// term, so descent converges at a grid-independent rate.
class H1Solver {
  public:
    explicit H1Solver(const RadialGrid& g) {
        const int n = g.size();
        const auto& r = g.nodes();
        const auto& w = g.weights();
        const auto& cell = g.cell_mass();
        const double omega = g.omega();
        diag_.assign(n, 0.0);
        lower_.assign(n - 1, 0.0);
        for (int i = 0; i < n; ++i)
            diag_[i] = omega * w[i];
        for (int i = 0; i + 1 < n; ++i) {
            const double h = r[i + 1] - r[i];
            const double k = omega * cell[i] / (h * h);
            diag_[i] += k;
            diag_[i + 1] += k;
            lower_[i] = -k;
        }
        scratch_c_.resize(n - 1);
        scratch_d_.resize(n);
    }

    /// Solves (M + L) z = M g (Thomas algorithm).
    RadialFn apply(const RadialFn& g) const {
        const int n = g.size();
        const auto& w = g.grid().weights();
        const double omega = g.grid().omega();
        std::vector<double> z(n);
        auto& c = scratch_c_;
        auto& d = scratch_d_;
        c[0] = lower_[0] / diag_[0];
        d[0] = omega * w[0] * g[0] / diag_[0];
        for (int i = 1; i < n; ++i) {
            const double m = diag_[i] - lower_[i - 1] * (i - 1 < n - 1 ? c[i - 1] : 0.0);
            if (i < n - 1)
                c[i] = lower_[i] / m;
            d[i] = (omega * w[i] * g[i] - lower_[i - 1] * d[i - 1]) / m;
        }
        z[n - 1] = d[n - 1];
        for (int i = n - 2; i >= 0; --i)
            z[i] = d[i] - c[i] * z[i + 1];
        return RadialFn(g.grid_ptr(), std::move(z));
    }

  private:
    std::vector<double> diag_, lower_;
    mutable std::vector<double> scratch_c_, scratch_d_;
};

DescentOut descend(const RadialFn& start, const ProblemParams& params,
                   const MinimizeOptions& opts, double min_K) {
    const double m = params.m;
    RadialFn u = project_sphere(start, m);
    double E = energy(u, params);
    double tau = opts.step;
    const H1Solver precond(u.grid());

    DescentOut out{u, E, 0.0, 0, false, false};
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (iter % 25 == 24)
            try_fiber_jump(u, E, params, min_K);
        const RadialFn g = first_variation(u, params);
        const double lam = -inner(g, u) / m;
        const RadialFn gt = axpy(g, lam, u);
        const double gn = std::sqrt(inner(gt, gt));
        out.gnorm = gn;
        out.iterations = iter;
        if (gn <= opts.tol_grad) {
            out.converged = true;
            break;
        }

        RadialFn z = precond.apply(gt);
        z = axpy(z, -inner(z, u) / m, u); // back to the sphere tangent
        const double dec = inner(gt, z);  // descent rate along -z
        if (!(dec > 0.0))
            break;

        bool accepted = false;
        while (tau > 1e-18) {
            RadialFn cand = project_sphere(axpy(u, -tau, z), m);
            if (min_K > 0.0) {
                const double Kc = grad_norm_pow(cand, 2.0) + grad_norm_pow(cand, params.q);
                if (Kc <= min_K) {
                    tau *= opts.step_shrink;
                    continue;
                }
            }
            const double Ec = energy(cand, params);
            const double slack = 4e-16 * (std::fabs(E) + 1.0);
            if (Ec <= E && Ec <= E - 1e-4 * tau * dec + slack) {
                u = std::move(cand);
                E = Ec;
                accepted = true;
                break;
            }
            tau *= opts.step_shrink;
        }
        if (!accepted)
            break;
        tau = std::min(tau * 1.8, opts.step * 1e6);
    }
    out.u = u;
    out.energy = E;
    if (min_K > 0.0) {
        const double Ku = grad_norm_pow(u, 2.0) + grad_norm_pow(u, params.q);
        out.boundary_collapse = Ku <= 1.25 * min_K;
    }
    return out;
}

/// Interior local minima of E along the dilation fiber of the given shape,
/// restricted to K(u_theta) > k_floor. Returns the dilations at the dips,
/// lowest energy first; empty when the fiber has no interior dip there.
std::vector<double> fiber_dips(const FiberNorms& norms, const ProblemParams& params,
                               double k_floor) {
    constexpr int kScan = 600;
    std::vector<double> thetas(kScan + 1), energies(kScan + 1);
    std::vector<bool> admissible(kScan + 1);
    for (int k = 0; k <= kScan; ++k) {
        const double theta = 1e-3 * std::pow(1e6, static_cast<double>(k) / kScan);
        const auto s = scale_norms(norms, params, theta);
        thetas[k] = theta;
        energies[k] = energy_of(s, params);
        admissible[k] = k_of(s) > k_floor;
    }
    std::vector<std::pair<double, double>> dips; // (energy, theta)
    for (int k = 1; k < kScan; ++k) {
        if (!admissible[k])
            continue;
        if (energies[k] <= energies[k - 1] && energies[k] < energies[k + 1])
            dips.emplace_back(energies[k], thetas[k]);
    }
    std::sort(dips.begin(), dips.end());
    std::vector<double> out;
    for (const auto& [e, th] : dips) {
        (void)e;
        out.push_back(th);
    }
    return out;
}

/// Best dilation of a seed: scans E along the fiber algebraically, with the
/// closed-form ψ-minimum as an extra candidate in the intermediate regime.
double best_fiber_theta(const FiberNorms& norms, const ProblemParams& params) {
    double best_theta = 1.0;
    double best_E = energy_of(norms, params);
    for (int k = 0; k <= 160; ++k) {
        const double theta = 1e-2 * std::pow(1e4, k / 160.0);
        const double E = fiber_psi(norms, params, theta).energy_at_theta;
        if (E < best_E) {
            best_E = E;
            best_theta = theta;
        }
    }
    if (params.alpha > 0.0 && is_intermediate(params) && norms.lp > 0.0 && norms.gradq > 0.0) {
        const auto fm = fiber_argmin(norms, params);
        const double E = fiber_psi(norms, params, fm.theta_bar).energy_at_theta;
        if (E < best_E)
            best_theta = fm.theta_bar;
    }
    return best_theta;
}

RadialFn fiber_preoptimize(const RadialFn& seed, const ProblemParams& params) {
    const FiberNorms norms = fiber_norms(seed, params);
    double theta = best_fiber_theta(norms, params);
    // back off toward 1 until the physical rescale stays resolved
    for (int tries = 0; tries < 8; ++tries) {
        try {
            double drift = 0.0;
            RadialFn scaled = theta_scale(seed, theta, &drift);
            if (drift > 1e-2)
                throw std::runtime_error("rescale left the domain");
            return project_sphere(scaled, params.m);
        } catch (const std::runtime_error&) {
            theta = std::sqrt(theta);
            if (std::fabs(theta - 1.0) < 1e-3)
                break;
        }
    }
    return seed;
}

std::vector<double> seed_widths(int count) {
    std::vector<double> w(count);
    if (count == 1) {
        w[0] = 1.0;
        return w;
    }
    for (int j = 0; j < count; ++j)
        w[j] = 0.25 * std::pow(8.0 / 0.25, static_cast<double>(j) / (count - 1));
    return w;
}

/// Solves K(u_theta) = target along the fiber (K is strictly increasing in θ).
double theta_for_K(const FiberNorms& norms, const ProblemParams& params, double target) {
    double lo = 1e-8, hi = 1e8;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (k_of(scale_norms(norms, params, mid)) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

} // namespace

void MinimizeOptions::validate() const {
    if (max_iter <= 0 || restarts <= 0)
        throw std::invalid_argument("MinimizeOptions: max_iter and restarts must be positive");
    if (!(step > 0.0) || !(tol_grad > 0.0))
        throw std::invalid_argument("MinimizeOptions: step and tol_grad must be positive");
    if (!(step_shrink > 0.0) || !(step_shrink < 1.0))
        throw std::invalid_argument("MinimizeOptions: step_shrink must lie in (0,1)");
}

RadialFn project_sphere(const RadialFn& u, double m) {
    if (!(m > 0.0))
        throw std::invalid_argument("project_sphere: m must be positive");
    const double mass = lp_norm_pow(u, 2.0);
    if (mass <= 0.0)
        throw std::domain_error("project_sphere: cannot project the zero function");
    const double f = std::sqrt(m / mass);
    std::vector<double> v(u.size());
    for (int i = 0; i < u.size(); ++i)
        v[i] = f * u[i];
    return RadialFn(u.grid_ptr(), std::move(v));
}

MinimizeResult global_minimize(const ProblemParams& params, const GridPtr& grid,
                               const MinimizeOptions& opts) {
    params.validate();
    opts.validate();
    require_coercive(params, "global_minimize");
    if (!(params.alpha > 0.0))
        throw std::invalid_argument("global_minimize: requires alpha > 0");

    double k_ref = opts.rho_hat;
    if (k_ref <= 0.0) {
        k_ref = is_intermediate(params) ? estimate_rho_hat(params, grid, opts, 64)
                                        : fallback_k_scale(params, *grid);
    }

    struct Candidate {
        DescentOut run;
        double K;
        bool degenerate; // spread past the resolvable scale
        int index;
    };
    std::vector<Candidate> cands;
    const auto widths = seed_widths(opts.restarts);
    for (int j = 0; j < opts.restarts; ++j) {
        RadialFn seed = project_sphere(gaussian_profile(grid, widths[j]), params.m);
        seed = fiber_preoptimize(seed, params);
        DescentOut run = descend(seed, params, opts, 0.0);
        const double K = grad_norm_pow(run.u, 2.0) + grad_norm_pow(run.u, params.q);
        const bool touches_boundary =
            std::fabs(run.u[run.u.size() - 1]) >= 1e-6 * run.u.max_abs();
        const bool degenerate = K < 1e-3 * k_ref || touches_boundary;
        cands.push_back(Candidate{std::move(run), K, degenerate, j});
    }

    // A localized negative-energy state is the faithful minimizer even when a
    // spread (degenerate) iterate reaches a slightly lower energy on the
    // truncated domain; the spread state's continuum energy is 0.
    auto by_energy = [&](const Candidate* a, const Candidate* b) {
        if (!a)
            return false;
        if (!b)
            return true;
        const double scale = 1e-10 * std::max(1.0, std::fabs(b->run.energy));
        if (a->run.energy < b->run.energy - scale)
            return true;
        if (a->run.energy > b->run.energy + scale)
            return false;
        return a->K < b->K;
    };
    const Candidate* best_localized = nullptr;
    const Candidate* best_any = nullptr;
    for (const auto& c : cands) {
        if (!c.degenerate && by_energy(&c, best_localized))
            best_localized = &c;
        if (by_energy(&c, best_any))
            best_any = &c;
    }
    const double tol_neg = 10.0 * opts.tol_grad * params.m;
    const Candidate* pick =
        (best_localized && best_localized->run.energy < -tol_neg) ? best_localized : best_any;

    MinimizeResult res{pick->run.u, pick->run.energy, 0, pick->run.gnorm,
                       pick->run.iterations, pick->run.converged, false, false,
                       ConstraintKind::Global, 0.0, 0.0, 0.0, pick->index};
    res.lambda = lagrange_multiplier(res.u, params);
    res.K = pick->K;
    res.mass = lp_norm_pow(res.u, 2.0);
    res.domain_flag = std::fabs(res.u[res.u.size() - 1]) >= 1e-6 * res.u.max_abs();

    // Vanishing regime: the best iterate is an unlocalized state whose
    // energy hugs zero; the infimum is approached by spreading and never
    // attained at this discretization.
    const double flat_scale = flat_state_energy_scale(params, *grid);
    const double e_small = std::max(3.0 * flat_scale, 10.0 * opts.tol_grad * params.m);
    res.vanishing = res.energy > -e_small && (res.K < k_ref || res.domain_flag);
    return res;
}

MinimizeResult local_minimize(const ProblemParams& params, const GridPtr& grid, double rho,
                              const MinimizeOptions& opts, const RadialFn* seed_hint) {
    params.validate();
    opts.validate();
    require_intermediate(params, "local_minimize");
    if (!(rho > 0.0))
        throw std::invalid_argument("local_minimize: rho must be positive");
    if (!(params.alpha > 0.0))
        throw std::invalid_argument("local_minimize: requires alpha > 0");

    // Candidate shapes whose dilation fibers are searched for interior dips.
    // The basin of the local minimizer is narrow around the quotient-optimal
    // shape, so that one is tried first; Gaussians cover the rest.
    std::vector<RadialFn> shapes;
    if (seed_hint && seed_hint->grid_ptr() == grid)
        shapes.push_back(project_sphere(*seed_hint, params.m));
    else if (!seed_hint) {
        MinimizeOptions lite = opts;
        lite.max_iter = std::min(opts.max_iter, 1200);
        lite.restarts = std::min(opts.restarts, 3);
        try {
            shapes.push_back(
                project_sphere(estimate_d_profile(params, grid, lite, params.m).profile,
                               params.m));
        } catch (const std::exception&) {
            // fall through to Gaussian shapes
        }
    }
    for (double w : seed_widths(opts.restarts))
        shapes.push_back(project_sphere(gaussian_profile(grid, w), params.m));

    std::optional<DescentOut> best;
    int best_j = 0;
    int collapsed = 0, attempted = 0;
    for (int j = 0; j < static_cast<int>(shapes.size()); ++j) {
        const FiberNorms norms = fiber_norms(shapes[j], params);
        if (!(norms.gradq > 0.0))
            continue;
        const auto dips = fiber_dips(norms, params, rho);
        if (dips.empty())
            continue;
        RadialFn placed = shapes[j];
        try {
            double drift = 0.0;
            placed = project_sphere(theta_scale(shapes[j], dips.front(), &drift), params.m);
            if (drift > 1e-3)
                continue; // dip not representable on this grid
        } catch (const std::runtime_error&) {
            continue;
        }
        const double Kp = grad_norm_pow(placed, 2.0) + grad_norm_pow(placed, params.q);
        if (Kp <= rho / 2.0)
            continue;
        ++attempted;
        DescentOut run = descend(placed, params, opts, rho / 2.0);
        if (run.boundary_collapse) {
            ++collapsed;
            continue;
        }
        if (!best || run.energy < best->energy) {
            best = std::move(run);
            best_j = j;
        }
    }
    if (!best) {
        if (attempted > 0 && collapsed == attempted)
            throw std::runtime_error("local_minimize: no local minimizer found at this rho "
                                     "(all seeds collapsed to the K boundary)");
        throw std::runtime_error(
            "local_minimize: no admissible seed at this rho (no interior fiber dip)");
    }

    MinimizeResult res{best->u, best->energy, 0, best->gnorm, best->iterations,
                       best->converged, false, false, ConstraintKind::LocalAboveRho, rho, 0.0,
                       0.0, best_j};
    res.lambda = lagrange_multiplier(res.u, params);
    res.K = grad_norm_pow(res.u, 2.0) + grad_norm_pow(res.u, params.q);
    res.mass = lp_norm_pow(res.u, 2.0);
    res.domain_flag = std::fabs(res.u[res.u.size() - 1]) >= 1e-6 * res.u.max_abs();
    return res;
}

double estimate_rho_hat(const ProblemParams& params, const GridPtr& grid,
                        const MinimizeOptions& opts, int samples) {
    params.validate();
    require_intermediate(params, "estimate_rho_hat");
    Rng rng(opts.seed ^ 0xa02bdbf7bb3c0a7ULL);

    // The binding profiles are the quotient-optimal shapes: their fibers
    // violate the small-K inequalities at the lowest K. Random bumps alone
    // overestimate the admissible range badly.
    std::vector<RadialFn> shapes;
    try {
        MinimizeOptions lite = opts;
        lite.max_iter = std::min(opts.max_iter, 1500);
        lite.restarts = std::min(opts.restarts, 3);
        shapes.push_back(estimate_d_profile(params, grid, lite, params.m).profile);
    } catch (const std::exception&) {
    }
    for (double w : seed_widths(6))
        shapes.push_back(gaussian_profile(grid, w));
    while (static_cast<int>(shapes.size()) < samples)
        shapes.push_back(random_bump_mixture(grid, rng));

    double rho_min = std::numeric_limits<double>::infinity();
    for (const auto& shape : shapes) {
        if (shape.max_abs() == 0.0)
            continue;
        for (double mass_frac : {1.0, 0.6, 0.3}) {
            const RadialFn u = project_sphere(shape, params.m * mass_frac);
            const FiberNorms norms = fiber_norms(u, params);
            if (!(norms.gradq > 0.0))
                continue;

            // walk the fiber upward while both small-K inequalities hold
            double last_pass_K = 0.0;
            for (int k = 0; k <= 600; ++k) {
                const double theta = 1e-4 * std::pow(1e5, k / 600.0);
                const auto sc = scale_norms(norms, params, theta);
                const double K = k_of(sc);
                const double E = energy_of(sc, params);
                const double Q = q_of(sc, params);
                if (E >= K / (2.0 * params.q) && Q >= K / 2.0)
                    last_pass_K = K;
                else
                    break;
            }
            if (last_pass_K > 0.0)
                rho_min = std::min(rho_min, last_pass_K);
        }
    }
    if (!std::isfinite(rho_min) || rho_min <= 0.0)
        throw std::runtime_error("estimate_rho_hat: search found no admissible K range");
    return 0.5 * rho_min;
}

/// Node index of the quarter-mass radius; a resolution proxy for how many
/// cells carry the core of the profile.
int quartile_index(const RadialFn& u) {
    const auto& w = u.grid().weights();
    double total = 0.0;
    for (int i = 0; i < u.size(); ++i)
        total += w[i] * u[i] * u[i];
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        acc += w[i] * u[i] * u[i];
        if (acc >= 0.25 * total)
            return i;
    }
    return u.size() - 1;
}

/// The iterate stays honest only while the grid resolves it: the core must
/// span a dozen cells and the tail must vanish before the boundary.
/// Under-resolved spikes have artificially small discrete quotients and the
/// dilation-flat descent would chase them.
bool resolved_on_grid(const RadialFn& u) {
    if (quartile_index(u) < 12)
        return false;
    return std::fabs(u[u.size() - 1]) < 1e-5 * u.max_abs();
}

QuotientMin estimate_d_profile(const ProblemParams& params, const GridPtr& grid,
                               const MinimizeOptions& opts, double mass) {
    params.validate();
    opts.validate();
    require_intermediate(params, "estimate_d");
    if (!(mass > 0.0))
        throw std::invalid_argument("estimate_d: mass must be positive");

    const auto t = gn_exponents(params);
    const double b = t.q_one_plus_delta_q - 2.0;
    const double c = t.p_delta_p - 2.0;
    const double eB = c / (b - c);
    const double eP = b / (b - c);

    double best = std::numeric_limits<double>::infinity();
    std::optional<RadialFn> best_u;
    const auto record_best = [&](const RadialFn& u, double J) {
        if (J < best && resolved_on_grid(u)) {
            best = J;
            best_u = u;
        }
    };

    // Gaussian widths plus slower-decaying profiles: the optimal shape often
    // carries a fat tail that Gaussians cannot reach by local descent.
    std::vector<RadialFn> seeds;
    for (double w : seed_widths(std::max(opts.restarts, 4)))
        seeds.push_back(gaussian_profile(grid, w));
    for (double w : {1.0, 2.5}) {
        for (double s : {0.5, 1.5}) {
            seeds.emplace_back(grid, [w, s](double r) {
                return std::pow(1.0 / std::cosh(r / w), s);
            });
        }
    }
    for (const RadialFn& seed : seeds) {
        RadialFn u = project_sphere(seed, mass);
        if (!resolved_on_grid(u))
            continue;
        const H1Solver precond(u.grid());
        double J = quotient_J(u, params);
        double tau = 0.25;
        int stale = 0;
        for (int iter = 0; iter < opts.max_iter; ++iter) {
            const double G2 = grad_norm_pow(u, 2.0);
            const double Gq = grad_norm_pow(u, params.q);
            const double Pp = lp_norm_pow(u, params.p);
            const RadialFn dG2 = grad_dirichlet_pow(u, 2.0);
            const RadialFn dGq = grad_dirichlet_pow(u, params.q);
            const RadialFn dPp = grad_lp_pow(u, params.p);
            std::vector<double> gl(u.size());
            for (int i = 0; i < u.size(); ++i)
                gl[i] = dG2[i] / G2 + eB * dGq[i] / Gq - eP * dPp[i] / Pp;
            RadialFn glog(u.grid_ptr(), std::move(gl));
            RadialFn gt = axpy(glog, -inner(glog, u) / mass, u);
            {
                // remove the dilation-fiber component: J is flat there and
                // discretization noise would otherwise drive a slow drift
                const auto& r = u.grid().nodes();
                std::vector<double> fib(u.size());
                for (int i = 0; i < u.size(); ++i) {
                    const int il = std::max(0, i - 1), ih = std::min(u.size() - 1, i + 1);
                    const double du = (u[ih] - u[il]) / (r[ih] - r[il]);
                    fib[i] = 0.5 * params.N * u[i] + r[i] * du;
                }
                RadialFn v(u.grid_ptr(), std::move(fib));
                v = axpy(v, -inner(v, u) / mass, u);
                const double vv = inner(v, v);
                if (vv > 0.0)
                    gt = axpy(gt, -inner(gt, v) / vv, v);
            }
            if (!(inner(gt, gt) > 0.0))
                break;
            RadialFn z = precond.apply(gt);
            z = axpy(z, -inner(z, u) / mass, u);
            const double dec = inner(gt, z);
            if (!(dec > 0.0))
                break;

            bool accepted = false;
            while (tau > 1e-16) {
                RadialFn cand = project_sphere(axpy(u, -tau, z), mass);
                if (!resolved_on_grid(cand)) {
                    tau *= opts.step_shrink;
                    continue;
                }
                double Jc;
                try {
                    Jc = quotient_J(cand, params);
                } catch (const std::domain_error&) {
                    tau *= opts.step_shrink;
                    continue;
                }
                if (std::log(Jc) <= std::log(J) - 1e-4 * tau * dec) {
                    u = std::move(cand);
                    J = Jc;
                    accepted = true;
                    break;
                }
                tau *= opts.step_shrink;
            }
            if (!accepted)
                break;
            tau = std::min(tau * 1.6, 1e4);
            record_best(u, J);

            if (iter % 40 == 39) {
                RadialFn v = project_sphere(rearrange_decreasing(u), mass);
                if (resolved_on_grid(v)) {
                    const double Jv = quotient_J(v, params);
                    if (Jv < J) {
                        u = std::move(v);
                        J = Jv;
                        record_best(u, J);
                    }
                }
            }
            if (iter > 0 && std::fabs(J - best) < 1e-12 * J)
                ++stale;
            else
                stale = 0;
            if (stale > 60)
                break;
        }
        record_best(u, J);
    }
    if (!(best > 0.0) || !std::isfinite(best) || !best_u)
        throw std::runtime_error("estimate_d: nonpositive or divergent quotient estimate");
    return {best, *best_u};
}

double estimate_d(const ProblemParams& params, const GridPtr& grid,
                  const MinimizeOptions& opts, double mass) {
    return estimate_d_profile(params, grid, opts, mass).value;
}

double estimate_d1(const ProblemParams& params, const GridPtr& grid,
                   const MinimizeOptions& opts) {
    return estimate_d(params, grid, opts, 1.0);
}

double alpha0_bisect(const ProblemParams& params, const GridPtr& grid,
                     const MinimizeOptions& opts) {
    params.validate();
    require_intermediate(params, "alpha0_bisect");

    MinimizeOptions inner_opts = opts;
    if (inner_opts.rho_hat <= 0.0)
        inner_opts.rho_hat = estimate_rho_hat(params, grid, opts, 96);
    const double tol_neg = 10.0 * opts.tol_grad * params.m;

    // genuinely negative = a localized state beats -tol_neg; spread states
    // (boundary-contaminated or below the admissible K scale) carry spurious
    // truncation energy and do not count
    auto negative = [&](double alpha) {
        ProblemParams p = params;
        p.alpha = alpha;
        const MinimizeResult res = global_minimize(p, grid, inner_opts);
        return res.energy < -tol_neg && !res.domain_flag && res.K >= inner_opts.rho_hat;
    };

    double hi = 1.0;
    int guard = 0;
    while (!negative(hi)) {
        hi *= 4.0;
        if (++guard > 16)
            throw std::runtime_error("alpha0_bisect: no negative-energy alpha found up to 4^16");
    }
    double lo = hi / 4.0;
    guard = 0;
    while (negative(lo)) {
        hi = lo;
        lo /= 4.0;
        if (++guard > 16)
            throw std::runtime_error("alpha0_bisect: energy negative down to alpha ~ 0; "
                                     "no positive threshold bracketed");
    }
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (hi + lo);
        if (negative(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (hi + lo);
}

double estimate_gn_constant(const ProblemParams& params, double r, const GridPtr& grid,
                            const MinimizeOptions& opts) {
    params.validate();
    opts.validate();
    const double nu = nu_exponent(params.N, params.p, r);
    {
        // p must lie strictly inside (2, r*)
        const CriticalExponent r_star = (r >= params.N)
                                            ? CriticalExponent::unbounded()
                                            : CriticalExponent::finite(params.N * r /
                                                                       (params.N - r));
        if (!(params.p < r_star))
            throw std::invalid_argument("estimate_gn_constant: requires p < r*");
    }

    auto ratio_of = [&](const RadialFn& u) {
        const double lp = std::pow(lp_norm_pow(u, params.p), 1.0 / params.p);
        const double gr = std::pow(grad_norm_pow(u, r), 1.0 / r);
        const double m2 = std::sqrt(lp_norm_pow(u, 2.0));
        if (!(gr > 0.0) || !(m2 > 0.0))
            return 0.0;
        return lp / (std::pow(gr, nu) * std::pow(m2, 1.0 - nu));
    };

    Rng rng(opts.seed ^ 0x51cbd2f7c51dd1abULL);
    double best = 0.0;
    std::vector<RadialFn> seeds;
    for (double w : seed_widths(4))
        seeds.push_back(gaussian_profile(grid, w));
    for (int k = 0; k < 4; ++k)
        seeds.push_back(random_decreasing_profile(grid, rng));

    for (RadialFn u : seeds) {
        if (u.max_abs() == 0.0)
            continue;
        double R = ratio_of(u);
        double tau = 0.1;
        for (int iter = 0; iter < std::min(opts.max_iter, 400); ++iter) {
            const double Pp = lp_norm_pow(u, params.p);
            const double Gr = grad_norm_pow(u, r);
            const double M2 = lp_norm_pow(u, 2.0);
            const RadialFn dPp = grad_lp_pow(u, params.p);
            const RadialFn dGr = grad_dirichlet_pow(u, r);
            std::vector<double> gl(u.size());
            for (int i = 0; i < u.size(); ++i)
                gl[i] = dPp[i] / (params.p * Pp) - nu * dGr[i] / (r * Gr) -
                        (1.0 - nu) * u[i] / M2;
            const RadialFn g(u.grid_ptr(), std::move(gl));
            const double gn2 = inner(g, g);
            if (gn2 <= 1e-26)
                break;
            bool accepted = false;
            while (tau > 1e-14) {
                RadialFn cand = axpy(u, tau, g); // ascent
                // the ratio is over functions on R^N: reject iterates whose
                // tail leans on the truncation (near-constants would make
                // the truncated-domain ratio diverge)
                if (std::fabs(cand[cand.size() - 1]) >= 1e-5 * cand.max_abs()) {
                    tau *= 0.5;
                    continue;
                }
                const double Rc = ratio_of(cand);
                if (Rc > R * (1.0 + 1e-12)) {
                    u = std::move(cand);
                    R = Rc;
                    accepted = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!accepted)
                break;
            tau = std::min(tau * 1.5, 1e3);
        }
        best = std::max(best, R);
    }
    return best;
}

MountainPassEstimate mountain_pass_estimate(const ProblemParams& params, const RadialFn& u_low,
                                            const RadialFn& u_high, double rho_hat,
                                            const MinimizeOptions& opts) {
    params.validate();
    require_intermediate(params, "mountain_pass_estimate");
    if (!(rho_hat > 0.0))
        throw std::invalid_argument("mountain_pass_estimate: rho_hat must be positive");

    const double K_low = grad_norm_pow(u_low, 2.0) + grad_norm_pow(u_low, params.q);
    const double K_high = grad_norm_pow(u_high, 2.0) + grad_norm_pow(u_high, params.q);
    const double E_low = energy(u_low, params);
    const double E_high = energy(u_high, params);
    if (!(K_low < K_high))
        throw std::runtime_error("mountain_pass_estimate: not a mountain-pass configuration");

    // Empirical barrier: sampled min energy on {K = ρ} ∩ S_m, swept over
    // separating levels ρ between the endpoints; the best barrier wins.
    // Levels at or below ρ̂ carry only the small-K bound ~ ρ/(2q), so the
    // sweep starts there and moves up.
    Rng rng(opts.seed ^ 0x7c0de5a1f00dULL);
    std::vector<FiberNorms> sampled;
    for (int s = 0; s < 80; ++s) {
        RadialFn u = (s < 6) ? gaussian_profile(u_low.grid_ptr(), seed_widths(6)[s])
                             : random_decreasing_profile(u_low.grid_ptr(), rng);
        if (u.max_abs() == 0.0)
            continue;
        u = project_sphere(u, params.m);
        const FiberNorms norms = fiber_norms(u, params);
        if (norms.gradq > 0.0)
            sampled.push_back(norms);
    }
    {
        const FiberNorms nh = fiber_norms(u_high, params);
        if (nh.gradq > 0.0)
            sampled.push_back(nh); // the high endpoint's own fiber
    }
    if (sampled.empty())
        throw std::runtime_error("mountain_pass_estimate: barrier estimation failed");

    auto barrier_at = [&](double rho) {
        double d0 = std::numeric_limits<double>::infinity();
        for (const auto& norms : sampled) {
            const double theta = theta_for_K(norms, params, rho);
            d0 = std::min(d0, energy_of(scale_norms(norms, params, theta), params));
        }
        return d0;
    };

    const double lvl_lo = std::max(rho_hat / 4.0, 1.05 * K_low);
    const double lvl_hi = 0.95 * K_high;
    double delta0 = -std::numeric_limits<double>::infinity();
    double rho_sep = 0.0;
    for (int k = 0; k <= 24; ++k) {
        const double rho = lvl_lo * std::pow(lvl_hi / lvl_lo, k / 24.0);
        const double d0 = barrier_at(rho);
        if (d0 > delta0) {
            delta0 = d0;
            rho_sep = rho;
        }
    }
    if (!std::isfinite(delta0) || !(E_low < delta0 / 2.0) || !(E_high < delta0 / 2.0))
        throw std::runtime_error("mountain_pass_estimate: not a mountain-pass configuration");

    // Each candidate path runs u_low --(dilation)--> σ_a∗u_low --(projected
    // interpolation)--> σ_b∗u_high --(dilation)--> u_high. The dilation legs
    // are exact fiber algebra; only the middle leg needs grid evaluations.
    const FiberNorms n_low = fiber_norms(u_low, params);
    const FiberNorms n_high = fiber_norms(u_high, params);
    auto fiber_leg_max = [&](const FiberNorms& norms, double sigma) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 16; ++j) {
            const double s = sigma * j / 16.0;
            mx = std::max(mx, energy_of(scale_norms(norms, params, std::exp(s)), params));
        }
        return mx;
    };

    constexpr int kT = 33;
    MountainPassEstimate bestmp;
    bestmp.value = std::numeric_limits<double>::infinity();
    bestmp.delta0 = delta0;
    bestmp.rho_sep = rho_sep;
    for (int ia = 0; ia < 7; ++ia) {
        for (int ib = 0; ib < 7; ++ib) {
            const double sa = -0.75 + 0.25 * ia;
            const double sb = -0.75 + 0.25 * ib;
            RadialFn A = u_low, B = u_high;
            try {
                double drift_a = 0.0, drift_b = 0.0;
                A = project_sphere(sigma_star(u_low, sa, &drift_a), params.m);
                B = project_sphere(sigma_star(u_high, sb, &drift_b), params.m);
                if (drift_a > 1e-3 || drift_b > 1e-3)
                    continue;
            } catch (const std::runtime_error&) {
                continue;
            }
            double path_max = std::max(fiber_leg_max(n_low, sa), fiber_leg_max(n_high, sb));
            double t_at = 0.0;
            bool valid = true;
            for (int j = 0; j < kT; ++j) {
                const double t = static_cast<double>(j) / (kT - 1);
                RadialFn mix = A;
                for (int i = 0; i < mix.size(); ++i)
                    mix[i] = (1.0 - t) * A[i] + t * B[i];
                double E;
                try {
                    E = energy(project_sphere(mix, params.m), params);
                } catch (const std::domain_error&) {
                    valid = false;
                    break;
                }
                if (E > path_max) {
                    path_max = E;
                    t_at = t;
                }
            }
            if (valid && path_max < bestmp.value) {
                bestmp.value = path_max;
                bestmp.t_at_max = t_at;
                bestmp.sigma_a = sa;
                bestmp.sigma_b = sb;
            }
        }
    }
    if (!std::isfinite(bestmp.value))
        throw std::runtime_error("mountain_pass_estimate: no admissible path evaluated");
    return bestmp;
}

nlohmann::json to_json(const MinimizeResult& res) {
    return nlohmann::json{
        {"energy", res.energy},
        {"lambda", res.lambda},
        {"grad_tangent_norm", res.grad_tangent_norm},
        {"iterations", res.iterations},
        {"converged", res.converged},
        {"vanishing", res.vanishing},
        {"domain_flag", res.domain_flag},
        {"constraint",
         res.constraint == ConstraintKind::Global ? "global" : "local-above-rho"},
        {"rho", res.rho},
        {"K", res.K},
        {"mass", res.mass},
        {"best_restart", res.best_restart},
    };
}

} // namespace qlap
