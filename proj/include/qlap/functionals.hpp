#ifndef QLAP_FUNCTIONALS_HPP
#define QLAP_FUNCTIONALS_HPP

#include <qlap/params.hpp>
#include <qlap/radial.hpp>

#include <nlohmann/json_fwd.hpp>

namespace qlap {

/// One function evaluated against every functional of the problem.
/// K = grad2 + gradq and E = grad2/2 + gradq/q - α lp/p are assembled from
/// the same four power sums, so those identities hold exactly.
struct EnergyReport {
    double E = 0;
    double K = 0;
    double Q = 0;
    double grad2 = 0;
    double gradq = 0;
    double mass = 0;
    double lp = 0;
    double lambda = 0;
    double pohozaev = 0;
    ProblemParams params;
};

/// E_α(u) = (1/2)‖∇u‖₂² + (1/q)‖∇u‖_q^q - (α/p)‖u‖_p^p.
double energy(const RadialFn& u, const ProblemParams& params);

/// Q_α(u) = ‖∇u‖₂² + (1/q)((N+2)q/2 - N)‖∇u‖_q^q - (αN/p)(p/2 - 1)‖u‖_p^p,
/// the derivative of E along the mass-preserving dilation; vanishes at
/// critical points.
double q_functional(const RadialFn& u, const ProblemParams& params);

/// P_{α,λ}(u) = ((N-2)/2)‖∇u‖₂² + ((N-q)/q)‖∇u‖_q^q + (Nλ/2)‖u‖₂²
///              - (Nα/p)‖u‖_p^p.
double pohozaev(const RadialFn& u, const ProblemParams& params, double lambda);

/// Riesz representative g of the first variation in the weighted node inner
/// product: ⟨g, v⟩_w = d/dε E_α(u + εv)|₀ exactly for every grid function v.
RadialFn first_variation(const RadialFn& u, const ProblemParams& params);

/// λ = (α‖u‖_p^p - ‖∇u‖₂² - ‖∇u‖_q^q)/‖u‖₂². Throws on zero mass.
double lagrange_multiplier(const RadialFn& u, const ProblemParams& params);

/// J(u) = ‖∇u‖₂² ‖∇u‖_q^{q c/(b-c)} / ‖u‖_p^{p b/(b-c)} with
/// b = q(1+δ_q) - 2, c = pδ_p - 2. Throws "J undefined" when a factor
/// vanishes.
double quotient_J(const RadialFn& u, const ProblemParams& params);

EnergyReport energy_report(const RadialFn& u, const ProblemParams& params);

nlohmann::json to_json(const EnergyReport& rep);

/// Riesz gradient of u ↦ ‖∇u‖_s^s (staggered adjoint against the weights).
RadialFn grad_dirichlet_pow(const RadialFn& u, double s);

/// Riesz gradient of u ↦ ‖u‖_s^s, i.e. s|u|^{s-2}u nodewise.
RadialFn grad_lp_pow(const RadialFn& u, double s);

/// Weighted inner product ω Σ w_i a_i b_i (the pairing used by
/// first_variation). Grids must match.
double inner(const RadialFn& a, const RadialFn& b);

} // namespace qlap

#endif
