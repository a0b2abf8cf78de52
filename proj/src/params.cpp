#include <qlap/params.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlap {

void ProblemParams::validate() const {
    if (N < 1)
        throw std::invalid_argument("N must be a positive integer, got " + std::to_string(N));
    if (!(q > 2.0))
        throw std::invalid_argument("q must exceed 2, got " + std::to_string(q));
    if (!(p > 2.0))
        throw std::invalid_argument("p must exceed 2, got " + std::to_string(p));
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be finite and nonnegative");
    if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("m must be finite and positive");
    if (!std::isfinite(q) || !std::isfinite(p))
        throw std::invalid_argument("exponents must be finite");
}

double CriticalExponent::value() const {
    if (unbounded_)
        throw std::logic_error("unbounded critical exponent has no finite value");
    return value_;
}

std::string CriticalExponent::str() const {
    if (unbounded_)
        return "unbounded";
    std::ostringstream os;
    os << value_;
    return os.str();
}

double delta_exponent(int N, double s) {
    return static_cast<double>(N) * (s - 2.0) / (2.0 * s);
}

double nu_exponent(int N, double p, double r) {
    const double lower = 2.0 * N / (N + 2.0);
    if (!(r > lower))
        throw std::invalid_argument("nu_{p,r} undefined: r must exceed 2N/(N+2)");
    return (N * r / (r * (N + 2.0) - 2.0 * N)) * (p - 2.0) / p;
}

std::pair<double, double> mass_critical_exponents(int N, double q) {
    if (N < 1)
        throw std::invalid_argument("N must be a positive integer");
    if (!(q > 2.0))
        throw std::invalid_argument("q must exceed 2");
    return {2.0 + 4.0 / N, q * (1.0 + 2.0 / N)};
}

ExponentTable gn_exponents(const ProblemParams& params) {
    params.validate();
    const int N = params.N;
    const double p = params.p, q = params.q;

    ExponentTable t;
    auto [p2, pq] = mass_critical_exponents(N, q);
    t.p2 = p2;
    t.pq = pq;
    t.two_star = (N <= 2) ? CriticalExponent::unbounded()
                          : CriticalExponent::finite(2.0 * N / (N - 2.0));
    t.q_star = (q >= N) ? CriticalExponent::unbounded()
                        : CriticalExponent::finite(N * q / (N - q));
    t.delta_p = delta_exponent(N, p);
    t.delta_q = delta_exponent(N, q);
    t.p_delta_p = N * (p - 2.0) / 2.0;
    t.q_one_plus_delta_q = q * (N + 2.0) / 2.0 - N;
    if (p < t.two_star)
        t.nu_p2 = nu_exponent(N, p, 2.0);
    if (p < t.q_star)
        t.nu_pq = nu_exponent(N, p, q);
    return t;
}

Regime classify_regime(const ProblemParams& params) {
    params.validate();
    auto [p2, pq] = mass_critical_exponents(params.N, params.q);
    RegimeKind kind;
    if (params.p < p2)
        kind = RegimeKind::Subcritical;
    else if (params.p == p2)
        kind = RegimeKind::MassCriticalLower;
    else if (params.p < pq)
        kind = RegimeKind::Intermediate;
    else if (params.p == pq)
        kind = RegimeKind::MassCriticalUpper;
    else
        kind = RegimeKind::Supercritical;

    bool zero_mass = false;
    if (params.N >= 3) {
        const double two_star = 2.0 * params.N / (params.N - 2.0);
        const bool below_qstar =
            (params.q >= params.N) || (params.p < params.N * params.q / (params.N - params.q));
        zero_mass = params.p > two_star && below_qstar;
    }
    return {kind, zero_mass};
}

std::string to_string(RegimeKind k) {
    switch (k) {
    case RegimeKind::Subcritical: return "subcritical";
    case RegimeKind::MassCriticalLower: return "mass-critical-lower";
    case RegimeKind::Intermediate: return "intermediate";
    case RegimeKind::MassCriticalUpper: return "mass-critical-upper";
    case RegimeKind::Supercritical: return "supercritical";
    }
    return "?";
}

std::string to_string(LiouvilleOutcome o) {
    switch (o) {
    case LiouvilleOutcome::CertifiedPohozaev: return "certified-pohozaev";
    case LiouvilleOutcome::CertifiedRadialComparison: return "certified-radial-comparison";
    case LiouvilleOutcome::NotCertified: return "not-certified";
    }
    return "?";
}

CertificateOutcome liouville_certificate(int N, double p, double q) {
    if (N < 1 || !(p > 2.0) || !(q > 2.0))
        throw std::invalid_argument("liouville_certificate requires N >= 1, p > 2, q > 2");

    // Testing a zero-mass solution against the Pohozaev identity leaves
    //   (1/2* - 1/p) ‖∇u‖₂² + (1/q - 1/N - 1/p) ‖∇u‖_q^q = 0,
    // so the (≤0, <0) sign pattern forces ‖∇u‖_q = 0 and u ≡ 0.
    const double inv_two_star = (N <= 2) ? 0.0 : (N - 2.0) / (2.0 * N);
    CertificateOutcome out;
    out.coeff_grad2 = inv_two_star - 1.0 / p;
    out.coeff_gradq = 1.0 / q - 1.0 / N - 1.0 / p;

    if (out.coeff_grad2 <= 0.0 && out.coeff_gradq < 0.0) {
        out.outcome = LiouvilleOutcome::CertifiedPohozaev;
        out.reason = (N <= 2) ? "N <= 2 with p, q > 2" : "p <= 2N/(N-2)";
        return out;
    }
    if (N <= 4) {
        out.outcome = LiouvilleOutcome::CertifiedRadialComparison;
        out.reason = "1 <= N <= 4: radial comparison with a slowly decaying barrier";
        return out;
    }
    out.outcome = LiouvilleOutcome::NotCertified;
    out.reason = "N >= 5 with p > 2*: decaying radial zero-mass solutions may exist";
    return out;
}

IterationTrace decay_iteration(int N, double p) {
    if (N < 3)
        throw std::invalid_argument("decay_iteration requires N >= 3 (2* must be finite)");
    const double two_star = 2.0 * N / (N - 2.0);
    if (p == two_star)
        throw std::invalid_argument(
            "decay_iteration rejected: p = 2* makes a0 = 2/(p-2) the fixed point of the "
            "affine map (degenerate boundary)");
    if (p < two_star)
        throw std::invalid_argument("decay_iteration requires p > 2* = " + std::to_string(two_star));

    constexpr int kMaxSteps = 10000;
    IterationTrace trace;
    trace.a.push_back((N - 2.0) / 2.0);
    // a_{n+1} >= N-2  <=>  (p-1)a_n >= N, so the post-update check covers the
    // branch condition of the continuous argument exactly.
    while (trace.a.back() < N - 2.0) {
        if (trace.iterations >= kMaxSteps)
            throw std::runtime_error("decay_iteration failed to terminate within 10000 steps");
        trace.a.push_back((p - 1.0) * trace.a.back() - 2.0);
        ++trace.iterations;
    }
    return trace;
}

} // namespace qlap
