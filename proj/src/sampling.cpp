#include <qlap/sampling.hpp>

#include <cmath>

namespace qlap {

double Rng::log_uniform(double a, double b) {
    return a * std::exp(uniform() * std::log(b / a));
}

RadialFn gaussian_profile(const GridPtr& grid, double width) {
    return RadialFn(grid, [width](double r) { return std::exp(-(r / width) * (r / width)); });
}

RadialFn random_bump_mixture(const GridPtr& grid, Rng& rng) {
    const int k = 2 + static_cast<int>(rng.next_u64() % 3);
    const double half = grid->r_max() / 2.0;
    std::vector<double> c(k), mu(k), w(k);
    for (int j = 0; j < k; ++j) {
        c[j] = rng.uniform(-1.0, 1.0);
        mu[j] = rng.uniform(0.0, half);
        w[j] = rng.log_uniform(0.3, half / 2.0);
    }
    return RadialFn(grid, [&](double r) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            const double t = (r - mu[j]) / w[j];
            s += c[j] * std::exp(-t * t);
        }
        return s;
    });
}

RadialFn random_decreasing_profile(const GridPtr& grid, Rng& rng) {
    return rearrange_decreasing(random_bump_mixture(grid, rng));
}

} // namespace qlap
