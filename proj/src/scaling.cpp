#include <qlap/scaling.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlap {

namespace {

// Local cubic (4-point Lagrange) evaluation of the nodal function at x,
// zero beyond r_max. Exact at the nodes.
double eval_cubic(const RadialFn& u, double x) {
    const auto& r = u.grid().nodes();
    const int n = u.size();
    if (x > r[n - 1])
        return 0.0;
    if (x <= 0.0)
        return u[0];
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    int cell = static_cast<int>(it - r.begin()) - 1;
    cell = std::clamp(cell, 0, n - 2);
    int lo = std::clamp(cell - 1, 0, n - 4);
    double acc = 0.0;
    for (int j = lo; j < lo + 4; ++j) {
        double basis = 1.0;
        for (int k = lo; k < lo + 4; ++k) {
            if (k == j)
                continue;
            basis *= (x - r[k]) / (r[j] - r[k]);
        }
        acc += basis * u[j];
    }
    return acc;
}

struct FiberExponents {
    double b; ///< q(1+δ_q) - 2
    double c; ///< pδ_p - 2
};

FiberExponents fiber_exponents(const ProblemParams& params) {
    const auto t = gn_exponents(params);
    return {t.q_one_plus_delta_q - 2.0, t.p_delta_p - 2.0};
}

} // namespace

FiberNorms fiber_norms(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    FiberNorms n;
    n.grad2 = grad_norm_pow(u, 2.0);
    n.gradq = grad_norm_pow(u, params.q);
    n.lp = lp_norm_pow(u, params.p);
    n.mass = lp_norm_pow(u, 2.0);
    return n;
}

RadialFn theta_scale(const RadialFn& u, double theta, double* mass_drift) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("theta_scale: theta must be positive and finite");
    const auto& g = u.grid();
    const auto& r = g.nodes();
    const int n = u.size();

    // support radius of u; the scaled copy must keep at least 4 cells of it
    const double cutoff = 1e-12 * u.max_abs();
    double supp = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        if (std::fabs(u[i]) > cutoff) {
            supp = r[i];
            break;
        }
    }
    if (supp > 0.0 && supp / theta < r[std::min(4, n - 1)])
        throw std::runtime_error("theta_scale: under-resolved (scaled support below 4 cells)");

    const double amp = std::pow(theta, g.dim() / 2.0);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = amp * eval_cubic(u, theta * r[i]);
    RadialFn scaled(u.grid_ptr(), std::move(out));

    if (mass_drift) {
        const double m0 = lp_norm_pow(u, 2.0);
        const double m1 = lp_norm_pow(scaled, 2.0);
        *mass_drift = (m0 > 0.0) ? std::fabs(m1 - m0) / m0 : 0.0;
    }
    return scaled;
}

RadialFn sigma_star(const RadialFn& u, double sigma, double* mass_drift) {
    return theta_scale(u, std::exp(sigma), mass_drift);
}

FiberNorms scale_norms(const FiberNorms& norms, const ProblemParams& params, double theta) {
    const auto t = gn_exponents(params);
    FiberNorms s;
    s.grad2 = norms.grad2 * theta * theta;
    s.gradq = norms.gradq * std::pow(theta, t.q_one_plus_delta_q);
    s.lp = norms.lp * std::pow(theta, t.p_delta_p);
    s.mass = norms.mass;
    return s;
}

double energy_of(const FiberNorms& n, const ProblemParams& params) {
    return 0.5 * n.grad2 + n.gradq / params.q - params.alpha / params.p * n.lp;
}

double k_of(const FiberNorms& n) { return n.grad2 + n.gradq; }

double q_of(const FiberNorms& n, const ProblemParams& params) {
    const auto t = gn_exponents(params);
    return n.grad2 + t.q_one_plus_delta_q / params.q * n.gradq -
           params.alpha * t.delta_p * n.lp;
}

FiberPoint fiber_psi(const FiberNorms& norms, const ProblemParams& params, double theta) {
    if (!(theta > 0.0))
        throw std::invalid_argument("fiber_psi: theta must be positive");
    const auto [b, c] = fiber_exponents(params);
    FiberPoint pt;
    pt.theta = theta;
    pt.value = 0.5 * norms.grad2 + std::pow(theta, b) / params.q * norms.gradq -
               params.alpha / params.p * std::pow(theta, c) * norms.lp;
    pt.energy_at_theta = theta * theta * pt.value;
    return pt;
}

FiberPoint fiber_psi(const RadialFn& u, const ProblemParams& params, double theta) {
    return fiber_psi(fiber_norms(u, params), params, theta);
}

FiberMin fiber_argmin(const FiberNorms& norms, const ProblemParams& params) {
    params.validate();
    if (params.alpha == 0.0)
        throw std::domain_error("fiber_argmin: no interior minimum at alpha = 0");
    if (!(norms.lp > 0.0) || !(norms.gradq > 0.0))
        throw std::domain_error("fiber_argmin: requires ‖u‖_p > 0 and ‖∇u‖_q > 0");
    const auto [b, c] = fiber_exponents(params);
    if (!(c > 0.0))
        throw std::domain_error(
            "fiber_argmin: requires p > 2 + 4/N (the fiber has no interior minimum below "
            "the lower mass-critical exponent)");

    const double ratio =
        params.q * params.alpha * c * norms.lp / (params.p * b * norms.gradq);
    FiberMin fm;
    fm.theta_bar = std::pow(ratio, 1.0 / (b - c));
    // ψ(θ̄) = grad2/2 - α^{b/(b-c)} [qc/(pb)]^{c/(b-c)} (b-c)/(pb)
    //         · lp^{b/(b-c)} gradq^{-c/(b-c)}
    const double apow = std::pow(params.alpha, b / (b - c));
    const double kpow = std::pow(params.q * c / (params.p * b), c / (b - c));
    fm.psi_min = 0.5 * norms.grad2 -
                 apow * kpow * (b - c) / (params.p * b) *
                     std::pow(norms.lp, b / (b - c)) * std::pow(norms.gradq, -c / (b - c));
    return fm;
}

FiberMin fiber_argmin(const RadialFn& u, const ProblemParams& params) {
    return fiber_argmin(fiber_norms(u, params), params);
}

double alpha0_from_d(double d_m, const ProblemParams& params) {
    params.validate();
    if (!(d_m > 0.0))
        throw std::domain_error("alpha0_from_d: requires d_m > 0");
    const auto [b, c] = fiber_exponents(params);
    if (!(c > 0.0) || !(b > c))
        throw std::domain_error("alpha0_from_d: requires the intermediate regime");
    const double base = std::pow(params.q * c / (params.p * b), -c / (b - c)) *
                        (params.p * b / (b - c)) * 0.5 * d_m;
    return std::pow(base, (b - c) / b);
}

double d_mass_exponent(const ProblemParams& params) {
    const auto [b, c] = fiber_exponents(params);
    return -params.p * (params.q - 2.0) / (2.0 * (b - c));
}

double alpha0_mass_exponent(const ProblemParams& params) {
    const auto [b, c] = fiber_exponents(params);
    return -params.p * (params.q - 2.0) / (2.0 * b);
}

double fiber_dip_alpha_fraction(const ProblemParams& params) {
    const auto [b, c] = fiber_exponents(params);
    if (!(c > 0.0))
        throw std::domain_error("fiber_dip_alpha_fraction: requires the intermediate regime");
    const double inner = 2.0 * std::pow(b + 2.0, c / (b - c)) / std::pow(c + 2.0, b / (b - c));
    return std::pow(inner, (b - c) / b);
}

nlohmann::json to_json(const ThresholdReport& rep) {
    const double gap = (rep.alpha0_formula != 0.0)
                           ? std::fabs(rep.alpha0_bisect - rep.alpha0_formula) /
                                 std::fabs(rep.alpha0_formula)
                           : 0.0;
    return nlohmann::json{
        {"d1", rep.d1},
        {"dm", rep.dm},
        {"alpha0_formula", rep.alpha0_formula},
        {"alpha0_bisect", rep.alpha0_bisect},
        {"relative_gap", gap},
        {"mass", rep.mass},
    };
}

} // namespace qlap
