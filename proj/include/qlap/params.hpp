#ifndef QLAP_PARAMS_HPP
#define QLAP_PARAMS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qlap {

/// Problem data for  -Δu - Δ_q u + λu = α|u|^{p-2}u  with ‖u‖₂² = m.
struct ProblemParams {
    int N = 3;          ///< space dimension, N ≥ 1
    double q = 3.0;     ///< gradient exponent, q > 2
    double p = 4.0;     ///< nonlinearity exponent, p > 2
    double alpha = 1.0; ///< nonlinearity strength, α ≥ 0
    double m = 1.0;     ///< prescribed mass ‖u‖₂²

    /// Throws std::invalid_argument on a malformed parameter set.
    void validate() const;
};

/// A Sobolev-type upper exponent that is unbounded when the dimension
/// condition degenerates (N ≤ 2 for 2*, q ≥ N for q*). Every finite number
/// compares strictly below the unbounded value.
class CriticalExponent {
  public:
    static CriticalExponent finite(double v) { return CriticalExponent(v, false); }
    static CriticalExponent unbounded() { return CriticalExponent(0.0, true); }

    bool is_unbounded() const { return unbounded_; }
    /// Finite value; throws std::logic_error when unbounded.
    double value() const;
    /// 1/exponent, with 1/∞ = 0.
    double reciprocal() const { return unbounded_ ? 0.0 : 1.0 / value_; }
    std::string str() const;

    friend bool operator<(double x, const CriticalExponent& e) {
        return e.unbounded_ || x < e.value_;
    }
    friend bool operator<=(double x, const CriticalExponent& e) {
        return e.unbounded_ || x <= e.value_;
    }
    friend bool operator<(const CriticalExponent& e, double x) {
        return !e.unbounded_ && e.value_ < x;
    }
    friend bool operator<=(const CriticalExponent& e, double x) {
        return !e.unbounded_ && e.value_ <= x;
    }

  private:
    CriticalExponent(double v, bool u) : value_(v), unbounded_(u) {}
    double value_;
    bool unbounded_;
};

/// Derived exponents of the problem. δ_s = N(s-2)/(2s), so sδ_s = N(s-2)/2;
/// q(1+δ_q) = q(N+2)/2 - N is the dilation exponent of the q-gradient term.
struct ExponentTable {
    double p2 = 0;  ///< 2 + 4/N
    double pq = 0;  ///< q(1 + 2/N)
    CriticalExponent two_star = CriticalExponent::unbounded(); ///< 2N/(N-2)₊
    CriticalExponent q_star = CriticalExponent::unbounded();   ///< Nq/(N-q)₊
    double delta_p = 0;
    double delta_q = 0;
    std::optional<double> nu_p2; ///< ν_{p,2} when p ∈ (2, 2*)
    std::optional<double> nu_pq; ///< ν_{p,q} when p ∈ (2, q*)

    double p_delta_p = 0;        ///< N(p-2)/2
    double q_one_plus_delta_q = 0; ///< q(N+2)/2 - N
};

/// δ_s for dimension N.
double delta_exponent(int N, double s);

/// ν_{p,r} = [Nr/(r(N+2) - 2N)] (p-2)/p. Throws when r ≤ 2N/(N+2).
double nu_exponent(int N, double p, double r);

/// (p₂, p_q) = (2 + 4/N, q(1 + 2/N)); p₂ < p_q always since q > 2.
std::pair<double, double> mass_critical_exponents(int N, double q);

ExponentTable gn_exponents(const ProblemParams& params);

enum class RegimeKind {
    Subcritical,       ///< p < p₂
    MassCriticalLower, ///< p = p₂
    Intermediate,      ///< p₂ < p < p_q
    MassCriticalUpper, ///< p = p_q
    Supercritical      ///< p > p_q
};

struct Regime {
    RegimeKind kind;
    bool zero_mass_eligible; ///< N ≥ 3 and 2* < p < q*
};

Regime classify_regime(const ProblemParams& params);

std::string to_string(RegimeKind k);

enum class LiouvilleOutcome {
    CertifiedPohozaev,         ///< sign argument on the Pohozaev combination
    CertifiedRadialComparison, ///< radial comparison barrier, 1 ≤ N ≤ 4
    NotCertified               ///< nontrivial zero-mass solutions may exist
};

struct CertificateOutcome {
    LiouvilleOutcome outcome;
    double coeff_grad2; ///< 1/2* - 1/p  (with 1/2* = 0 when 2* is unbounded)
    double coeff_gradq; ///< 1/q - 1/N - 1/p
    std::string reason;
};

/// Decides whether u ≡ 0 is the only radial zero-mass (λ = 0) solution.
CertificateOutcome liouville_certificate(int N, double p, double q);

std::string to_string(LiouvilleOutcome o);

/// Trace of a_{n+1} = (p-1)a_n - 2 from a₀ = (N-2)/2.
struct IterationTrace {
    std::vector<double> a; ///< a₀ .. a_final
    int iterations = 0;    ///< number of affine updates applied
};

/// Runs the decay-exponent iteration until the newest term reaches N-2
/// (equivalently, until (p-1)a_n ≥ N held before the final update).
/// Requires N ≥ 3 and p > 2* strictly; p = 2* makes a₀ the fixed point of the
/// affine map and is rejected as a degenerate boundary.
IterationTrace decay_iteration(int N, double p);

} // namespace qlap

#endif
