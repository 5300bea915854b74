#ifndef VORTEXLAB_FIELDS_HPP
#define VORTEXLAB_FIELDS_HPP

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vortexlab/fourier.hpp"
#include "vortexlab/geometry.hpp"

namespace vortexlab::fields {

using fourier::cplx;
using fourier::cvec;
using geometry::Point;

/// Graded wall-normal nodes z_j = zmax (e^{sigma j/n} - 1)/(e^sigma - 1),
/// j = 0..n_z, clustered at z = 0. sigma = 0 degenerates to uniform spacing.
std::vector<double> graded_nodes(double zmax, int n_z, double sigma);

/// Smallest grading exponent that puts at least `nodes_in_layer` nodes inside
/// [0, layer]. Used to resolve the sqrt(nu) boundary layer.
double grading_for_layer(double zmax, int n_z, double layer, int nodes_in_layer = 8);

/// Scalar field as Fourier modes in thetatilde over a wall-normal ztilde grid.
/// Mode storage is FFT order along alpha; rows are z-nodes.
class ModeField {
  public:
    ModeField(std::shared_ptr<const geometry::ScaledChart> chart,
              std::vector<double> zgrid, int n_theta);

    /// DFT along theta of a physical sample table phys[j * n_theta + k],
    /// k on the uniform theta-grid. Hermitian symmetry enforced.
    static ModeField from_physical(std::shared_ptr<const geometry::ScaledChart> chart,
                                   std::vector<double> zgrid, int n_theta,
                                   std::span<const double> phys);

    const geometry::ScaledChart& chart() const { return *chart_; }
    std::shared_ptr<const geometry::ScaledChart> chart_ptr() const { return chart_; }
    int n_theta() const { return n_theta_; }
    int n_z() const { return static_cast<int>(zgrid_.size()); }
    const std::vector<double>& zgrid() const { return zgrid_; }
    double zmax() const { return zgrid_.back(); }

    /// Element access by signed wavenumber alpha and z-node index j.
    cplx& at(int alpha, int j);
    cplx at(int alpha, int j) const;
    /// Contiguous z-column of signed wavenumber alpha.
    std::span<cplx> column(int alpha);
    std::span<const cplx> column(int alpha) const;

    std::vector<double> to_physical() const;
    /// mode(-alpha) := conj(mode(alpha)); Nyquist forced real.
    void enforce_hermitian();
    /// Max |mode(-a,j) - conj(mode(a,j))| over all (a, j).
    double hermitian_defect() const;

    /// Cubic interpolation in z of one mode column.
    cplx eval_mode(int alpha, double z) const;
    /// Physical value at (z, theta) in scaled chart coordinates:
    /// cubic in z, trigonometric in theta.
    double eval(double z, double theta) const;

    ModeField& operator+=(const ModeField& o);
    ModeField& operator*=(double s);

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

  private:
    std::shared_ptr<const geometry::ScaledChart> chart_;
    std::vector<double> zgrid_;
    int n_theta_;
    std::vector<cplx> data_; // [j * n_theta + m], m in FFT storage order
};

/// Real scalar field on a Cartesian grid restricted to points at physical
/// distance >= d_min from the boundary (inside the domain).
class InteriorField {
  public:
    /// Sample f on every grid point of an h-spaced grid over the curve's
    /// bounding box whose signed distance to the boundary is >= d_min.
    static InteriorField covering(const geometry::BoundaryCurve& curve, double h,
                                  double d_min,
                                  const std::function<double(double, double)>& f);

    double spacing() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double x_of(int i) const { return x0_ + i * h_; }
    double y_of(int k) const { return y0_ + k * h_; }
    bool mask(int i, int k) const { return mask_[idx(i, k)]; }
    double& value(int i, int k) { return values_[idx(i, k)]; }
    double value(int i, int k) const { return values_[idx(i, k)]; }
    double d_min() const { return d_min_; }

    /// True when a full bicubic stencil around (x, y) lies in the mask.
    bool contains(double x, double y) const;
    /// Bicubic (4x4 Lagrange) interpolation; throws std::domain_error when the
    /// stencil leaves the mask.
    double eval(double x, double y) const;

    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

  private:
    size_t idx(int i, int k) const { return static_cast<size_t>(k) * nx_ + i; }
    double h_ = 0, x0_ = 0, y0_ = 0, d_min_ = 0;
    int nx_ = 0, ny_ = 0;
    std::vector<double> values_;
    std::vector<char> mask_;
};

/// Velocity in both representations: chart components (u.tau, u.n) as mode
/// fields near the wall, Cartesian components in the interior.
struct VelocityField {
    ModeField u_tau;
    ModeField u_n;
    InteriorField u1;
    InteriorField u2;
};

/// Global sampler for omega = omega^b + omega^i. `cutoff` maps the scaled
/// distance lambda*d(x) to phi^b and delimits where each representation is
/// valid: the near strip ends at chart.strip_depth(), the far grid starts at
/// far.d_min(). Throws std::domain_error outside the closed domain.
std::function<double(double, double)> blend(const ModeField& near,
                                            const InteriorField& far,
                                            const std::function<double(double)>& cutoff);

} // namespace vortexlab::fields

#endif
