#ifndef QLAP_SCALING_HPP
#define QLAP_SCALING_HPP

#include <qlap/functionals.hpp>
#include <qlap/params.hpp>
#include <qlap/radial.hpp>

#include <nlohmann/json_fwd.hpp>

namespace qlap {

/// One point of the scaling fiber θ ↦ ψ_{α,u}(θ) = E_α(u_θ)/θ².
struct FiberPoint {
    double theta = 1.0;
    double value = 0.0;           ///< ψ_{α,u}(θ)
    double energy_at_theta = 0.0; ///< θ²·ψ_{α,u}(θ) = E_α(u_θ)
};

/// The three norms entering the fiber algebra, evaluated once on the
/// unscaled function. ψ, θ̄ and all dilation identities are computed from
/// these scalars; the grid function is only rescaled when a new iterate is
/// physically needed.
struct FiberNorms {
    double grad2 = 0; ///< ‖∇u‖₂²
    double gradq = 0; ///< ‖∇u‖_q^q
    double lp = 0;    ///< ‖u‖_p^p
    double mass = 0;  ///< ‖u‖₂²
};

FiberNorms fiber_norms(const RadialFn& u, const ProblemParams& params);

/// Mass-preserving dilation (u_θ)(r) = θ^{N/2} u(θr) resampled onto the
/// original grid with local cubic interpolation and zero extension beyond
/// r_max. Throws "under-resolved" when the scaled support drops below 4
/// cells. Writes the relative mass drift to *mass_drift when given.
RadialFn theta_scale(const RadialFn& u, double theta, double* mass_drift = nullptr);

/// (σ∗u)(r) = e^{σN/2} u(e^σ r) = theta_scale(u, e^σ).
RadialFn sigma_star(const RadialFn& u, double sigma, double* mass_drift = nullptr);

FiberPoint fiber_psi(const FiberNorms& norms, const ProblemParams& params, double theta);
FiberPoint fiber_psi(const RadialFn& u, const ProblemParams& params, double theta);

/// Scaled norms along the fiber: grad2 θ², gradq θ^{q(1+δ_q)}, lp θ^{pδ_p};
/// mass unchanged.
FiberNorms scale_norms(const FiberNorms& norms, const ProblemParams& params, double theta);

double energy_of(const FiberNorms& n, const ProblemParams& params);
double k_of(const FiberNorms& n);
double q_of(const FiberNorms& n, const ProblemParams& params);

struct FiberMin {
    double theta_bar = 0;
    double psi_min = 0;
};

/// Closed-form fiber minimum:
///   θ̄ = [qα(pδ_p-2)‖u‖_p^p / (p(q(1+δ_q)-2)‖∇u‖_q^q)]^{1/(q(1+δ_q)-pδ_p)}
/// together with the closed-form value ψ(θ̄). Requires the intermediate
/// regime (pδ_p > 2) and α > 0, ‖u‖_p > 0, ‖∇u‖_q > 0.
FiberMin fiber_argmin(const FiberNorms& norms, const ProblemParams& params);
FiberMin fiber_argmin(const RadialFn& u, const ProblemParams& params);

/// α₀(m) from the quotient infimum d(m); Eq.-level closed form, strictly
/// increasing in d_m. Requires the intermediate regime and d_m > 0.
double alpha0_from_d(double d_m, const ProblemParams& params);

/// Mass-scaling exponent of d: d(m) = m^{dm_exponent} d(1).
double d_mass_exponent(const ProblemParams& params);
/// Mass-scaling exponent of α₀: α₀(m) = α₀(1-normalized) m^{alpha0_exponent}.
double alpha0_mass_exponent(const ProblemParams& params);

/// The dilation fiber of a shape u develops an interior energy dip exactly
/// for α > κ·α₀(J(u)) where κ < 1 depends only on the exponents:
///   κ = [2 (b+2)^{c/(b-c)} / (c+2)^{b/(b-c)}]^{(b-c)/b},
/// b = q(1+δ_q)-2, c = pδ_p-2. Every local minimizer sits at the dip of its
/// own fiber, so κ·α₀(m) lower-bounds the onset of local minimizers.
double fiber_dip_alpha_fraction(const ProblemParams& params);

struct ThresholdReport {
    double d1 = 0;             ///< estimated d(1)
    double dm = 0;             ///< d(m) via the exact mass law applied to d1
    double alpha0_formula = 0; ///< α₀(m) from the closed form on dm
    double alpha0_bisect = 0;  ///< α₀(m) from energy-sign bisection
    double mass = 1;
};

nlohmann::json to_json(const ThresholdReport& rep);

} // namespace qlap

#endif
