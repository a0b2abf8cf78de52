#ifndef QLAP_SHOOT_HPP
#define QLAP_SHOOT_HPP

#include <qlap/params.hpp>
#include <qlap/radial.hpp>

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <vector>

namespace qlap {

struct ShootConfig {
    double lambda = 0.0;
    double u0 = 1.0;              ///< initial amplitude u(0) > 0; u'(0) = 0 always
    double r_max = 100.0;         ///< integration horizon
    double h0 = 1e-4;             ///< initial step
    double tol_step = 1e-12;      ///< local error tolerance; <= 0 runs fixed-step h0
    double blowup_factor = 1e6;   ///< diverging when |u| > blowup_factor·u0
    double decay_threshold = 1e-8; ///< decaying when max(|u|,|u'|) < threshold·u0
    bool store_profile = true;

    void validate() const;
};

enum class TrajectoryClass { Crossing, Diverging, Decaying };

std::string to_string(TrajectoryClass c);

struct TrajPoint {
    double r, u, v, F;
};

struct ShootResult {
    std::vector<TrajPoint> profile; ///< accepted steps (empty unless stored)
    TrajectoryClass classification = TrajectoryClass::Diverging;
    double event_r = 0;  ///< crossing/blow-up radius, or end of integration
    double u0 = 0;       ///< config echo
    double lambda = 0;   ///< config echo

    double F0 = 0;       ///< F at the series start
    double F_drift = 0;  ///< max increase of F along the trajectory (raw)
    double F_dev = 0;    ///< max |F - F0| along the trajectory (raw)
    double F_scale = 0;  ///< max magnitude of the individual F terms

    double l2_mass = 0;      ///< ∫_{B_r} u² accumulated to the end of integration
    bool l2_finite = false;  ///< tail certified convergent (see l2_tail_rate)
    /// trailing mass accumulation rate at the end of integration,
    /// ω r^{N-1} u(r)² per unit radius relative to the accumulated mass
    double l2_tail_rate = 0;

    double pohozaev_residual = 0; ///< |P|/(K + |λ|mass) on the grid-mapped profile
    double lambda_residual = 0;   ///< |λ - λ_inferred|/λ for λ > 0
    double flux_residual = 0;     ///< integral-form identity mismatch

    double decay_slope = 0; ///< fitted log|u| vs log r slope (when fit succeeded)
    bool fit_valid = false;
    bool super_polynomial = false;
    double fit_r_lo = 0, fit_r_hi = 0;

    double bracket_lo = 0, bracket_hi = 0; ///< shooting corridor (find_ground_state)

    /// Amplitude intervals above the corridor where the number of sign
    /// changes increments: candidate corridors of sign-changing solutions.
    /// Reported, never certified.
    std::vector<std::pair<double, double>> higher_brackets;
};

/// u'' from the radial equation
///   -(1+(q-1)|u'|^{q-2}) u'' - ((N-1)/r)(1+|u'|^{q-2}) u' + λu = α|u|^{p-2}u;
/// the denominator 1 + (q-1)|v|^{q-2} is bounded below by 1.
double ode_rhs(double r, double u, double v, const ProblemParams& params, double lambda);

/// Adaptive RK4 (step doubling with Richardson extrapolation) from the
/// series start u(ε) = u0 + c ε²/2, u'(ε) = c ε, c = (λu0 - α|u0|^{p-2}u0)/N.
/// Integrates until crossing, blow-up, decay, or r_max; monitors
/// F = ½u'² + ((q-1)/q)|u'|^q + (α/p)|u|^p - (λ/2)u² at every accepted step.
ShootResult shoot(const ShootConfig& cfg, const ProblemParams& params);

/// Bisection on u(0) between crossing and non-crossing trajectories until
/// the corridor has relative width 1e-10; returns the mid-corridor
/// trajectory with post-hoc certificates (Pohozaev residual, multiplier
/// identity for λ > 0, decay fit, L² tail). Orientation of the dichotomy is
/// detected from the probe scan. Throws "no ground state located" when no
/// bracket exists in [1e-8, 1e8].
ShootResult find_ground_state(const ProblemParams& params, double lambda);
ShootResult find_ground_state(const ProblemParams& params, double lambda,
                              const ShootConfig& base);

struct DecayFit {
    double slope = 0;
    double intercept = 0;
    double r_lo = 0, r_hi = 0;
    bool super_polynomial = false;
};

/// Least-squares slope of log|u| vs log r over the last resolved decade of
/// the stored tail (|u| > 1e-12·u0). Flags super-polynomial decay when the
/// local slope keeps steepening across the window. Throws on insufficient
/// tail data.
DecayFit decay_fit(const ShootResult& result);

/// Resamples the trajectory onto a radial grid by cubic Hermite
/// interpolation (u and u' are both known at the accepted steps).
RadialFn profile_to_grid(const ShootResult& result, const GridPtr& grid);

/// CSV dump: "r,u,du,F" rows at accepted steps.
void write_trajectory_csv(const ShootResult& result, std::ostream& os);

nlohmann::json to_json(const ShootResult& result);

} // namespace qlap

#endif
