#ifndef VORTEXLAB_GEOMETRY_HPP
#define VORTEXLAB_GEOMETRY_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexlab/fourier.hpp"

namespace vortexlab::geometry {

struct ReparameterizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CurveKind { FlatStrip, Circle, FourierPerturbedCircle };

using Point = std::array<double, 2>;

/// Analytic boundary curve, resampled to unit speed on a uniform grid of the
/// arc-length parameter theta. Sign conventions (fixed here once): theta runs
/// counterclockwise, the normal n = (-x2', x1') points into the domain, so a
/// disk of radius R has gamma = -1/R.
class BoundaryCurve {
  public:
    static BoundaryCurve flat_strip(double period, int n_samples = 256);
    static BoundaryCurve circle(double radius, int n_samples = 256);
    /// r(phi) = radius * (1 + sum_m cos_coeffs[m-1] cos(m phi) + sin_coeffs[m-1] sin(m phi))
    static BoundaryCurve fourier_perturbed_circle(double radius,
                                                  const std::vector<double>& cos_coeffs,
                                                  const std::vector<double>& sin_coeffs,
                                                  int n_samples = 256);

    CurveKind kind() const { return kind_; }
    double period() const { return length_; }
    int sample_count() const { return n_; }

    Point position(double theta) const;
    Point tangent(double theta) const;
    Point normal(double theta) const;
    double curvature(double theta) const;
    double curvature_derivative(double theta) const;
    double max_abs_curvature() const;

    /// Max deviation of |x'(theta)| from 1 over the sample grid.
    double unit_speed_defect() const;

    /// Closest boundary point of x: returns (theta_foot, signed distance along n).
    /// Positive distance is inside the domain.
    std::array<double, 2> project(const Point& x) const;

  private:
    BoundaryCurve() = default;
    void finalize_from_samples(const std::vector<double>& x1,
                               const std::vector<double>& x2);

    CurveKind kind_ = CurveKind::Circle;
    double length_ = 0.0;
    double radius_ = 0.0; // circle kinds only
    int n_ = 0;
    // Fourier coefficients (in theta) of the arc-length parameterization
    fourier::cvec cx1_, cx2_;   // position
    fourier::cvec cg_, cgp_;    // curvature and its derivative
    double max_gamma_ = 0.0;
};

/// Tubular-neighborhood chart X(z, theta) = x(theta) + z n(theta),
/// J(z, theta) = 1 + z gamma(theta).
class GeodesicChart {
  public:
    /// delta <= 0 selects the automatic rule min(0.5/max|gamma|, injectivity
    /// radius by bisection), capped at period/4 for flat boundaries.
    explicit GeodesicChart(BoundaryCurve curve, double delta = 0.0);

    const BoundaryCurve& curve() const { return curve_; }
    double delta() const { return delta_; }

    Point map(double z, double theta) const;
    double jacobian(double z, double theta) const;

  private:
    double injectivity_radius() const;
    BoundaryCurve curve_;
    double delta_ = 0.0;
};

/// Coefficients of the curvature-remainder operator in scaled coordinates:
/// R = m d^2/dtheta^2 + cz d/dz + ct d/dtheta.
struct RemainderCoefficients {
    double m;
    double cz;
    double ct;
};

/// Scaled chart (ztilde, thetatilde) = (lambda z, lambda theta) with
/// gamma = lambda^3 gammatilde.
class ScaledChart {
  public:
    /// delta0 <= 0 and rho0 <= 0 select defaults 0.45 * lambda * delta and
    /// 0.225 * lambda * delta. Requires delta0 + 2 rho0 < lambda * delta and
    /// rho0 < 1/10.
    ScaledChart(GeodesicChart base, double lambda, double delta0 = 0.0,
                double rho0 = 0.0);

    const GeodesicChart& base() const { return base_; }
    const BoundaryCurve& curve() const { return base_.curve(); }
    double lambda() const { return lambda_; }
    double delta0() const { return delta0_; }
    double rho0() const { return rho0_; }
    /// Outer edge of the near-boundary strip in the scaled variable.
    double strip_depth() const { return delta0_ + 2.0 * rho0_; }
    /// Scaled period of thetatilde.
    double scaled_period() const { return lambda_ * curve().period(); }

    double tilde_gamma(double theta_tilde) const;
    double tilde_gamma_derivative(double theta_tilde) const;
    /// True when gammatilde is independent of theta (flat strip or circle);
    /// per-mode operators then decouple.
    bool constant_curvature() const;

    /// Physical wavenumber of integer mode alpha in the scaled chart.
    double mode_wavenumber(int alpha) const;

    RemainderCoefficients remainder_coefficients(double z_tilde,
                                                 double theta_tilde) const;

  private:
    GeodesicChart base_;
    double lambda_, delta0_, rho0_;
};

/// Validation diagnostic: max over an interior sample grid of the difference
/// between the Cartesian Laplacian of psi (centered differences, step h_fd)
/// and the chart-coordinate Laplacian (Lap_{z,theta} + remainder).
double full_laplacian_check(const GeodesicChart& chart,
                            const std::function<double(double, double)>& psi,
                            int n_z = 32, int n_theta = 64, double h_fd = 1e-4);

} // namespace vortexlab::geometry

#endif
