#ifndef VORTEXLAB_ELLIPTIC_HPP
#define VORTEXLAB_ELLIPTIC_HPP

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "vortexlab/fields.hpp"
#include "vortexlab/geometry.hpp"

namespace vortexlab::elliptic {

using fourier::cplx;
using fourier::cvec;

struct LambdaTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One per-mode half-strip problem (d^2/dz^2 - k^2) phi = rhs on the grid,
/// phi(0) = bc, decay at the far end (Robin d/dz + |k| closure; k = 0 uses a
/// prescribed far-end flux).
struct ModeEllipticProblem {
    double k = 0.0;
    cvec rhs;
    cplx bc{0.0, 0.0};
    cplx far_flux{0.0, 0.0}; // d phi/dz at z_max, k = 0 only
};

/// Production banded finite-difference solve.
cvec solve_mode(const std::vector<double>& zgrid, const ModeEllipticProblem& p);
/// Dense LU oracle of the same discretization (Eigen).
cvec solve_mode_dense(const std::vector<double>& zgrid, const ModeEllipticProblem& p);
/// Green-kernel quadrature oracle, K(y,z) = -(1/2k)(e^{-k|z-y|} - e^{-k(y+z)}),
/// valid for k != 0 on a half-line (the grid must extend past the rhs support).
cvec solve_mode_kernel(const std::vector<double>& zgrid, const ModeEllipticProblem& p);
double kernel_K(double k, double y, double z);

/// Per-mode solve of the curved chart operator
///   d^2/dz^2 - kappa^2 + lambda^2 (-m kappa^2 + c_z d/dz + i kappa c_theta)
/// on the scaled grid, Dirichlet at both ends. Requires theta-independent
/// curvature (flat strip or circle). When `fixed_point` is set the curvature
/// terms are applied iteratively as sources (the lambda^2 R contraction);
/// reports the observed contraction ratio.
cvec solve_mode_curved(const geometry::ScaledChart& chart, int alpha,
                       const std::vector<double>& zgrid, const cvec& rhs, cplx bc0,
                       cplx bc_outer, bool fixed_point = false,
                       int* iterations = nullptr, double* contraction = nullptr);

/// Scalar field as angular Fourier modes over a uniform radius grid on a disk
/// sector 0 <= r <= rgrid.back(). Same storage conventions as ModeField.
struct RadialField {
    std::vector<double> rgrid;
    int n_theta = 0;
    std::vector<cplx> data; // [i * n_theta + m], m in FFT storage order

    RadialField() = default;
    RadialField(std::vector<double> rg, int nt);
    static RadialField from_physical(std::vector<double> rg, int nt,
                                     std::span<const double> phys);
    cplx& at(int alpha, int i);
    cplx at(int alpha, int i) const;
    int n_r() const { return static_cast<int>(rgrid.size()); }
    cplx eval_mode(int alpha, double r) const; // cubic in r, 0 past the edge
    double eval(double r, double theta) const; // theta in [0, 2 pi)
    std::vector<double> to_physical() const;
    void enforce_hermitian();
};

/// Per-mode interior Poisson solve on the disk:
/// phi'' + phi'/r - n^2 phi / r^2 = rhs, phi(r_out) = bc, regular at r = 0.
cvec solve_radial_poisson(int n, const std::vector<double>& rgrid, const cvec& rhs,
                          cplx bc_outer);

struct SchwarzReport {
    int iterations = 0;
    double last_update = 0.0;
};

/// Stream function of the Dirichlet Poisson problem Delta phi = omega on the
/// unit disk, with omega given as near-strip chart modes (omega^b) plus
/// interior polar modes (omega^i). Overlapping Schwarz between the curved
/// chart solve and the radial interior solve. phi_near holds physical phi
/// values on the scaled grid; phi_far on the interior radius grid.
struct DiskStream {
    fields::ModeField phi_near;
    RadialField phi_far;
    SchwarzReport schwarz;
};
DiskStream disk_poisson(const fields::ModeField& omega_b, const RadialField& omega_i,
                        double tol = 1e-11, int cap = 100);

/// Velocity recovered from the disk stream function: chart components
/// (u.tau = d_z phi, u.n = -(1/J) d_theta phi) near the wall, polar components
/// (u_r = d_theta phi / r, u_theta = -d_r phi) in the interior. All physical.
struct DiskVelocity {
    fields::ModeField u_tau;
    fields::ModeField u_n;
    RadialField u_r;
    RadialField u_t;
    DiskStream stream;
};
DiskVelocity disk_biot_savart(const fields::ModeField& omega_b,
                              const RadialField& omega_i);

/// Flat-strip Biot-Savart: single chart solve with decay closure; returns the
/// stream function and chart velocity components.
struct StripVelocity {
    fields::ModeField phi;
    fields::ModeField u_tau;
    fields::ModeField u_n;
};
StripVelocity strip_biot_savart(const fields::ModeField& omega_b);

/// Spec-level velocity assembly: near-wall mode components plus Cartesian
/// interior sampling at spacing h (disk charts only for the far part).
fields::VelocityField biot_savart(const fields::ModeField& omega_b,
                                  const RadialField& omega_i, double interior_h);

/// (1/z) d_theta phi as a ModeField; the z = 0 row takes the limit
/// i kappa_alpha d_z phi(0). Requires phi(alpha, 0) = 0.
fields::ModeField weighted_stream_ratio(const fields::ModeField& phi);

/// One-sided second-order derivative weights at x0 from nodes (x0, x1, x2).
std::array<double, 3> onesided_d1(double x0, double x1, double x2);

} // namespace vortexlab::elliptic

#endif
