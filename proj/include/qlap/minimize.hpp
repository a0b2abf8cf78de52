#ifndef QLAP_MINIMIZE_HPP
#define QLAP_MINIMIZE_HPP

#include <qlap/functionals.hpp>
#include <qlap/params.hpp>
#include <qlap/radial.hpp>
#include <qlap/scaling.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstdint>

namespace qlap {

struct MinimizeOptions {
    int max_iter = 2000;
    double step = 1.0;          ///< initial step size for backtracking
    double step_shrink = 0.5;   ///< backtracking factor in (0,1)
    double tol_grad = 3e-6;     ///< tangent-gradient stopping threshold
    int restarts = 6;           ///< multistart seed count
    std::uint64_t seed = 1;     ///< PRNG seed
    double rho_hat = 0.0;       ///< small-K scale for vanishing detection; 0 = auto

    void validate() const;
};

enum class ConstraintKind { Global, LocalAboveRho };

struct MinimizeResult {
    RadialFn u;
    double energy = 0;
    double lambda = 0;
    double grad_tangent_norm = 0;
    int iterations = 0;
    bool converged = false;
    /// Infimum chased by K → 0 with E → 0: the never-attained regime, or a
    /// profile too wide for the domain. Informative, not a failure.
    bool vanishing = false;
    /// |u(r_max)| ≥ 1e-6 max|u|: the truncation radius is too small.
    bool domain_flag = false;
    ConstraintKind constraint = ConstraintKind::Global;
    double rho = 0; ///< active K-floor·2 for the local problem, 0 otherwise
    double K = 0;
    double mass = 0;
    int best_restart = 0;
};

nlohmann::json to_json(const MinimizeResult& res);

/// √(m)/‖u‖₂ · u. Throws on u ≡ 0.
RadialFn project_sphere(const RadialFn& u, double m);

/// Projected gradient descent on S_m with Armijo backtracking, multistart
/// over fiber-preoptimized Gaussian seeds. Valid whenever E_α is coercive
/// on S_m (p < p_q); not restricted to the intermediate regime.
MinimizeResult global_minimize(const ProblemParams& params, const GridPtr& grid,
                               const MinimizeOptions& opts);

/// Same descent restricted to {K(u) > rho/2} by step rejection; seeds are
/// placed at interior dips of the dilation fiber of near-optimal shapes
/// (the basin of the local minimizer is narrow). Intermediate regime only.
/// Throws when every seed collapses to the K-boundary. seed_hint, when
/// given, supplies the shape whose fiber is searched first (callers that
/// already ran estimate_d_profile pass its profile to avoid recomputing).
MinimizeResult local_minimize(const ProblemParams& params, const GridPtr& grid, double rho,
                              const MinimizeOptions& opts,
                              const RadialFn* seed_hint = nullptr);

/// Empirical ρ̂ > 0 such that sampled u with ‖u‖₂² ≤ m and K(u) ≤ ρ̂ satisfy
/// E ≥ K/(2q) and Q ≥ K/2; found by a fiber search over random profiles
/// with a 1/2 safety factor. Intermediate regime only.
double estimate_rho_hat(const ProblemParams& params, const GridPtr& grid,
                        const MinimizeOptions& opts, int samples = 200);

struct QuotientMin {
    double value = 0; ///< estimated inf of J at this mass
    RadialFn profile; ///< minimizing profile (the shape attaining the value)
};

/// Minimizes the quotient J over the sphere of the given mass by projected
/// descent on log J with decreasing seeds and rearrangement polish.
/// Intermediate regime only; throws if the estimate fails to be positive.
QuotientMin estimate_d_profile(const ProblemParams& params, const GridPtr& grid,
                               const MinimizeOptions& opts, double mass);

double estimate_d(const ProblemParams& params, const GridPtr& grid,
                  const MinimizeOptions& opts, double mass);

/// d(1) estimate (estimate_d at unit mass).
double estimate_d1(const ProblemParams& params, const GridPtr& grid,
                   const MinimizeOptions& opts);

/// Bisection on α of the sign of the global minimum energy; returns the
/// midpoint once the bracket width drops below 1e-3·α_hi. Intermediate
/// regime only.
double alpha0_bisect(const ProblemParams& params, const GridPtr& grid,
                     const MinimizeOptions& opts);

/// Empirical Gagliardo–Nirenberg constant for ‖u‖_p ≤ C ‖∇u‖_r^ν ‖u‖₂^{1-ν}:
/// the maximum of the ratio over optimized profiles (a lower bound on the
/// sharp constant).
double estimate_gn_constant(const ProblemParams& params, double r, const GridPtr& grid,
                            const MinimizeOptions& opts);

struct MountainPassEstimate {
    double value = 0;     ///< best max-along-path energy (upper bound on c_mp)
    double t_at_max = 0;  ///< path parameter of the maximum
    double sigma_a = 0;   ///< dilation applied to the low-K endpoint
    double sigma_b = 0;   ///< dilation applied to the high-K endpoint
    double delta0 = 0;    ///< empirical barrier level at the separating sphere
    double rho_sep = 0;   ///< K-level of the separating sphere actually used
};

/// Upper bound on the mountain-pass level: minimizes over a two-parameter
/// family of dilated interpolation paths on S_m the maximum of E along the
/// path. Requires K(u_low) < ρ̂ < K(u_high) and endpoint energies below half
/// the empirical barrier; throws "not a mountain-pass configuration"
/// otherwise.
MountainPassEstimate mountain_pass_estimate(const ProblemParams& params, const RadialFn& u_low,
                                            const RadialFn& u_high, double rho_hat,
                                            const MinimizeOptions& opts);

} // namespace qlap

#endif
