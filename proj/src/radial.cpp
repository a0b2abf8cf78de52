#include <qlap/radial.hpp>
#include <qlap/io.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qlap {

std::string to_string(Spacing s) {
    return s == Spacing::Uniform ? "uniform" : "geometric";
}

namespace {

// ∫_a^b r^{N-1} dr
double cell_moment0(int N, double a, double b) {
    return (std::pow(b, N) - std::pow(a, N)) / N;
}

// ∫_a^b r^N dr
double cell_moment1(int N, double a, double b) {
    return (std::pow(b, N + 1) - std::pow(a, N + 1)) / (N + 1.0);
}

} // namespace

RadialGrid::RadialGrid(int N, double r_max, int n, Spacing spacing, double ratio)
    : N_(N), r_max_(r_max), spacing_(spacing), ratio_(ratio) {
    if (N < 1)
        throw std::invalid_argument("RadialGrid: N must be >= 1");
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw std::invalid_argument("RadialGrid: r_max must be positive and finite");
    if (n < 16)
        throw std::invalid_argument("RadialGrid: need at least 16 nodes");
    if (spacing == Spacing::Geometric && !(ratio > 0.0))
        throw std::invalid_argument("RadialGrid: geometric ratio must be positive");

    omega_ = 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);

    r_.resize(n);
    if (spacing == Spacing::Uniform || ratio == 1.0) {
        for (int i = 0; i < n; ++i)
            r_[i] = r_max * static_cast<double>(i) / (n - 1);
    } else {
        // cell widths h_i = h0 * ratio^i, scaled so the nodes end at r_max
        const double g = ratio;
        const double h0 = r_max * (g - 1.0) / (std::pow(g, n - 1) - 1.0);
        r_[0] = 0.0;
        double h = h0;
        for (int i = 1; i < n; ++i) {
            r_[i] = r_[i - 1] + h;
            h *= g;
        }
        r_[n - 1] = r_max;
    }

    cell_.resize(n - 1);
    w_.assign(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double a = r_[i], b = r_[i + 1], h = b - a;
        const double m0 = cell_moment0(N_, a, b);
        const double m1 = cell_moment1(N_, a, b);
        cell_[i] = m0;
        // hat-function moments: exact ∫ φ r^{N-1} dr over the cell
        const double w_hi = (m1 - a * m0) / h;
        const double w_lo = (b * m0 - m1) / h;
        w_[i] += w_lo;
        w_[i + 1] += w_hi;
    }
}

GridPtr make_grid(int N, double r_max, int n, Spacing spacing, double ratio) {
    return std::make_shared<const RadialGrid>(N, r_max, n, spacing, ratio);
}

RadialFn::RadialFn(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (!grid_)
        throw std::invalid_argument("RadialFn: null grid");
    if (static_cast<int>(v_.size()) != grid_->size())
        throw std::invalid_argument("RadialFn: value count does not match grid");
}

RadialFn::RadialFn(GridPtr grid, const std::function<double(double)>& f)
    : grid_(std::move(grid)) {
    if (!grid_)
        throw std::invalid_argument("RadialFn: null grid");
    v_.resize(grid_->size());
    const auto& r = grid_->nodes();
    for (int i = 0; i < grid_->size(); ++i)
        v_[i] = f(r[i]);
}

double RadialFn::max_abs() const {
    double m = 0.0;
    for (double x : v_)
        m = std::max(m, std::fabs(x));
    return m;
}

double integrate(const RadialFn& f) {
    const auto& g = f.grid();
    const auto& w = g.weights();
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i])) {
            std::ostringstream os;
            os << "integrate: non-finite integrand at node " << i << " (r = " << g.nodes()[i]
               << ")";
            throw std::domain_error(os.str());
        }
        s += w[i] * f[i];
    }
    return g.omega() * s;
}

double lp_norm_pow(const RadialFn& u, double s) {
    if (!(s >= 1.0))
        throw std::invalid_argument("lp_norm_pow: exponent must be >= 1");
    const auto& g = u.grid();
    const auto& w = g.weights();
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i])) {
            std::ostringstream os;
            os << "lp_norm_pow: non-finite value at node " << i;
            throw std::domain_error(os.str());
        }
        acc += w[i] * std::pow(std::fabs(u[i]), s);
    }
    return g.omega() * acc;
}

double grad_norm_pow(const RadialFn& u, double s) {
    if (!(s >= 1.0))
        throw std::invalid_argument("grad_norm_pow: exponent must be >= 1");
    const auto& g = u.grid();
    if (g.size() < 3)
        throw std::invalid_argument("grad_norm_pow: need at least 3 nodes");
    const auto& r = g.nodes();
    const auto& cell = g.cell_mass();
    double acc = 0.0;
    for (int i = 0; i + 1 < g.size(); ++i) {
        const double d = (u[i + 1] - u[i]) / (r[i + 1] - r[i]);
        if (!std::isfinite(d)) {
            std::ostringstream os;
            os << "grad_norm_pow: non-finite derivative in cell " << i;
            throw std::domain_error(os.str());
        }
        acc += cell[i] * std::pow(std::fabs(d), s);
    }
    return g.omega() * acc;
}

RadialFn rearrange_decreasing(const RadialFn& u) {
    const auto& g = u.grid();
    const int n = u.size();
    const auto& w = g.weights();

    for (int i = 0; i < n; ++i)
        if (!std::isfinite(u[i]))
            throw std::domain_error("rearrange_decreasing: non-finite value");

    // sort node cells by |value| descending; stable so constant regions keep
    // their original order (node-wise fixed point for monotone input)
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::fabs(u[a]) > std::fabs(u[b]);
    });

    std::vector<double> out(n, 0.0);
    int k = 0;
    double rem = w[idx[0]];
    for (int j = 0; j < n; ++j) {
        out[j] = std::fabs(u[idx[k]]);
        double need = w[j];
        while (need > 0.0 && k < n) {
            const double take = std::min(need, rem);
            need -= take;
            rem -= take;
            if (rem <= 0.0 && k + 1 < n) {
                ++k;
                rem = w[idx[k]];
            } else if (rem <= 0.0) {
                break;
            }
        }
    }
    return RadialFn(u.grid_ptr(), std::move(out));
}

void write_csv(const RadialFn& u, std::ostream& os) {
    const auto& g = u.grid();
    os << "# N=" << g.dim() << " r_max=" << format_double(g.r_max()) << " n=" << g.size()
       << " spacing=" << to_string(g.spacing()) << "\n";
    const auto& r = g.nodes();
    for (int i = 0; i < u.size(); ++i)
        os << format_double(r[i]) << "," << format_double(u[i]) << "\n";
}

RadialFn read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# ", 0) != 0)
        throw std::runtime_error("read_csv: missing '# ...' header line");

    auto field = [&](const std::string& key) {
        const auto pos = header.find(key + "=");
        if (pos == std::string::npos)
            throw std::runtime_error("read_csv: header missing field " + key);
        const auto start = pos + key.size() + 1;
        auto end = header.find(' ', start);
        if (end == std::string::npos)
            end = header.size();
        return header.substr(start, end - start);
    };

    const int N = std::stoi(field("N"));
    const double r_max = std::stod(field("r_max"));
    const int n = std::stoi(field("n"));
    const std::string tag = field("spacing");

    std::vector<double> rs, vs;
    rs.reserve(n);
    vs.reserve(n);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_csv: malformed row: " + line);
        rs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (static_cast<int>(vs.size()) != n)
        throw std::runtime_error("read_csv: row count does not match header n");

    Spacing spacing = tag == "geometric" ? Spacing::Geometric : Spacing::Uniform;
    double ratio = 1.0;
    if (spacing == Spacing::Geometric && n >= 3) {
        const double h0 = rs[1] - rs[0], h1 = rs[2] - rs[1];
        ratio = h1 / h0;
    }
    return RadialFn(make_grid(N, r_max, n, spacing, ratio), std::move(vs));
}

} // namespace qlap
