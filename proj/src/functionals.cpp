#include <qlap/functionals.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlap {

namespace {

// |x|^{e-1} x with the continuous extension 0 at x = 0
double signed_pow(double x, double e) {
    if (x == 0.0)
        return 0.0;
    return std::copysign(std::pow(std::fabs(x), e), x);
}

void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        std::ostringstream os;
        os << what << ": produced a non-finite value";
        throw std::domain_error(os.str());
    }
}

} // namespace

double inner(const RadialFn& a, const RadialFn& b) {
    if (a.grid_ptr() != b.grid_ptr())
        throw std::invalid_argument("inner: functions live on different grids");
    const auto& w = a.grid().weights();
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        s += w[i] * a[i] * b[i];
    return a.grid().omega() * s;
}

double energy(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    const double g2 = grad_norm_pow(u, 2.0);
    const double gq = grad_norm_pow(u, params.q);
    const double lp = lp_norm_pow(u, params.p);
    const double e = 0.5 * g2 + gq / params.q - params.alpha / params.p * lp;
    check_finite(e, "energy");
    return e;
}

double q_functional(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    const auto t = gn_exponents(params);
    const double g2 = grad_norm_pow(u, 2.0);
    const double gq = grad_norm_pow(u, params.q);
    const double lp = lp_norm_pow(u, params.p);
    const double v = g2 + t.q_one_plus_delta_q / params.q * gq - params.alpha * t.delta_p * lp;
    check_finite(v, "q_functional");
    return v;
}

double pohozaev(const RadialFn& u, const ProblemParams& params, double lambda) {
    params.validate();
    const int N = params.N;
    const double g2 = grad_norm_pow(u, 2.0);
    const double gq = grad_norm_pow(u, params.q);
    const double lp = lp_norm_pow(u, params.p);
    const double m2 = lp_norm_pow(u, 2.0);
    const double v = (N - 2.0) / 2.0 * g2 + (N - params.q) / params.q * gq +
                     N * lambda / 2.0 * m2 - N * params.alpha / params.p * lp;
    check_finite(v, "pohozaev");
    return v;
}

RadialFn grad_dirichlet_pow(const RadialFn& u, double s) {
    const auto& g = u.grid();
    const auto& r = g.nodes();
    const auto& cell = g.cell_mass();
    const auto& w = g.weights();
    const int n = g.size();

    // flux f_i = M_i |d_i|^{s-2} d_i / h_i per cell; gradient of the power sum
    // is s (f_{i-1} - f_i) / w_i after Riesz rescaling
    std::vector<double> flux(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        const double h = r[i + 1] - r[i];
        const double d = (u[i + 1] - u[i]) / h;
        flux[i] = cell[i] * signed_pow(d, s - 1.0) / h;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const double up = (i > 0) ? flux[i - 1] : 0.0;
        const double down = (i + 1 < n) ? flux[i] : 0.0;
        out[i] = s * (up - down) / w[i];
        check_finite(out[i], "grad_dirichlet_pow");
    }
    return RadialFn(u.grid_ptr(), std::move(out));
}

RadialFn grad_lp_pow(const RadialFn& u, double s) {
    std::vector<double> out(u.size());
    for (int i = 0; i < u.size(); ++i) {
        out[i] = s * signed_pow(u[i], s - 1.0);
        check_finite(out[i], "grad_lp_pow");
    }
    return RadialFn(u.grid_ptr(), std::move(out));
}

RadialFn first_variation(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    const RadialFn g2 = grad_dirichlet_pow(u, 2.0);
    const RadialFn gq = grad_dirichlet_pow(u, params.q);
    const RadialFn lp = grad_lp_pow(u, params.p);
    std::vector<double> out(u.size());
    for (int i = 0; i < u.size(); ++i)
        out[i] = 0.5 * g2[i] + gq[i] / params.q - params.alpha / params.p * lp[i];
    return RadialFn(u.grid_ptr(), std::move(out));
}

double lagrange_multiplier(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    const double mass = lp_norm_pow(u, 2.0);
    if (mass <= 0.0)
        throw std::domain_error("lagrange_multiplier: zero mass");
    const double g2 = grad_norm_pow(u, 2.0);
    const double gq = grad_norm_pow(u, params.q);
    const double lp = lp_norm_pow(u, params.p);
    return (params.alpha * lp - g2 - gq) / mass;
}

double quotient_J(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    const auto t = gn_exponents(params);
    const double b = t.q_one_plus_delta_q - 2.0;
    const double c = t.p_delta_p - 2.0;
    const double g2 = grad_norm_pow(u, 2.0);
    const double gq = grad_norm_pow(u, params.q);
    const double lp = lp_norm_pow(u, params.p);
    if (lp <= 0.0 || gq <= 0.0)
        throw std::domain_error("J undefined: vanishing ‖u‖_p or ‖∇u‖_q");
    const double v = g2 * std::pow(gq, c / (b - c)) / std::pow(lp, b / (b - c));
    check_finite(v, "quotient_J");
    return v;
}

EnergyReport energy_report(const RadialFn& u, const ProblemParams& params) {
    params.validate();
    EnergyReport rep;
    rep.params = params;
    rep.grad2 = grad_norm_pow(u, 2.0);
    rep.gradq = grad_norm_pow(u, params.q);
    rep.mass = lp_norm_pow(u, 2.0);
    rep.lp = lp_norm_pow(u, params.p);
    rep.K = rep.grad2 + rep.gradq;
    rep.E = 0.5 * rep.grad2 + rep.gradq / params.q - params.alpha / params.p * rep.lp;
    const auto t = gn_exponents(params);
    rep.Q = rep.grad2 + t.q_one_plus_delta_q / params.q * rep.gradq -
            params.alpha * t.delta_p * rep.lp;
    rep.lambda = (rep.mass > 0.0)
                     ? (params.alpha * rep.lp - rep.grad2 - rep.gradq) / rep.mass
                     : 0.0;
    rep.pohozaev = (params.N - 2.0) / 2.0 * rep.grad2 +
                   (params.N - params.q) / params.q * rep.gradq +
                   params.N * rep.lambda / 2.0 * rep.mass -
                   params.N * params.alpha / params.p * rep.lp;
    return rep;
}

nlohmann::json to_json(const EnergyReport& rep) {
    return nlohmann::json{
        {"E", rep.E},
        {"K", rep.K},
        {"Q", rep.Q},
        {"grad2", rep.grad2},
        {"gradq", rep.gradq},
        {"mass", rep.mass},
        {"lp", rep.lp},
        {"lambda", rep.lambda},
        {"pohozaev", rep.pohozaev},
        {"params",
         {{"N", rep.params.N},
          {"q", rep.params.q},
          {"p", rep.params.p},
          {"alpha", rep.params.alpha},
          {"m", rep.params.m}}},
    };
}

} // namespace qlap
