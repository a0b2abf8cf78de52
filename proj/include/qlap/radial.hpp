#ifndef QLAP_RADIAL_HPP
#define QLAP_RADIAL_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace qlap {

enum class Spacing { Uniform, Geometric };

std::string to_string(Spacing s);

/// Radial discretization of [0, r_max] carrying quadrature for
/// ∫_{R^N} f(|x|) dx = ω_{N-1} ∫₀^{r_max} f(r) r^{N-1} dr.
///
/// Node weights integrate the P1 hat functions against r^{N-1} dr in closed
/// form, so Σ w_i = ∫₀^{r_max} r^{N-1} dr holds to machine precision and all
/// weights are nonnegative. Derivatives live on cell midpoints (staggered),
/// which makes the discrete energy gradient the exact adjoint of the
/// difference operator.
class RadialGrid {
  public:
    RadialGrid(int N, double r_max, int n, Spacing spacing = Spacing::Uniform,
               double ratio = 1.0);

    int dim() const { return N_; }
    double r_max() const { return r_max_; }
    int size() const { return static_cast<int>(r_.size()); }
    Spacing spacing() const { return spacing_; }
    double ratio() const { return ratio_; }
    /// Surface measure of S^{N-1}; equals 2 for N = 1.
    double omega() const { return omega_; }

    const std::vector<double>& nodes() const { return r_; }
    /// Node quadrature weights against r^{N-1} dr (ω not included).
    const std::vector<double>& weights() const { return w_; }
    /// Cell masses ∫_{r_i}^{r_{i+1}} r^{N-1} dr, one per cell.
    const std::vector<double>& cell_mass() const { return cell_; }

  private:
    int N_;
    double r_max_;
    Spacing spacing_;
    double ratio_;
    double omega_;
    std::vector<double> r_;
    std::vector<double> w_;
    std::vector<double> cell_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int N, double r_max, int n, Spacing spacing = Spacing::Uniform,
                  double ratio = 1.0);

/// A nodal function on a RadialGrid. Immutable grid, value semantics.
class RadialFn {
  public:
    RadialFn(GridPtr grid, std::vector<double> values);
    RadialFn(GridPtr grid, const std::function<double(double)>& f);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    double& operator[](int i) { return v_[i]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double max_abs() const;

  private:
    GridPtr grid_;
    std::vector<double> v_;
};

/// ω Σ w_i f(r_i). Throws std::domain_error naming the first non-finite node.
double integrate(const RadialFn& f);

/// ∫ |u|^s dx. Requires s ≥ 1.
double lp_norm_pow(const RadialFn& u, double s);

/// ∫ |u'|^s dx with the staggered midpoint derivative. Requires s ≥ 1 and
/// at least 3 nodes; zero exactly when u is constant.
double grad_norm_pow(const RadialFn& u, double s);

/// Discrete symmetric decreasing rearrangement: sorts (value, cell-measure)
/// pairs by |value| and refills node cells from r = 0 outward without
/// sub-cell splitting. Equimeasurable with |u| up to one cell's measure.
RadialFn rearrange_decreasing(const RadialFn& u);

/// CSV serialization: header "# N=<int> r_max=<float> n=<int> spacing=<tag>"
/// followed by "r,value" rows. Floats use shortest round-trip formatting.
void write_csv(const RadialFn& u, std::ostream& os);
RadialFn read_csv(std::istream& is);

} // namespace qlap

#endif
