#ifndef VORTEXLAB_SOLVER_HPP
#define VORTEXLAB_SOLVER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "vortexlab/elliptic.hpp"
#include "vortexlab/stokes.hpp"

namespace vortexlab::solver {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

struct StepRejectedError : std::runtime_error {
    double suggested_dt;
    StepRejectedError(const std::string& what, double dt)
        : std::runtime_error(what), suggested_dt(dt) {}
};
struct DesyncError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompatibleDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quintic smoothstep cutoff of the scaled wall distance: 1 on
/// sd <= delta0 + rho0, 0 on sd >= delta0 + 2 rho0, C^2 in between.
class CutoffFunction {
  public:
    CutoffFunction(double delta0, double rho0);
    double operator()(double sd) const;
    double derivative(double sd) const;
    double second_derivative(double sd) const;
    double delta0() const { return delta0_; }
    double rho0() const { return rho0_; }

  private:
    double delta0_, rho0_;
};

/// Near-boundary chart vorticity plus interior polar vorticity on the disk.
struct SolverState {
    double t = 0.0;
    double nu = 0.0;
    fields::ModeField omega_b;
    elliptic::RadialField omega_i;
    double trace_decay = 0.0;   ///< fitted wall-trace mode decay rate
    bool decay_warning = false; ///< decay below the analyticity rate eps0
};

/// Dealiased (3/2-rule) pointwise product of two mode rows of equal length.
cvec dealias_product(const cvec& a, const cvec& b);

/// Advection in scaled chart coordinates, lambda^{-2} u . grad omega,
/// computed pseudo-spectrally with dealiasing. J = 1 + lambda^2 z gammatilde.
fields::ModeField nonlinear_term(const fields::ModeField& u_tau,
                                 const fields::ModeField& u_n,
                                 const fields::ModeField& omega);

/// Full Navier-Stokes march on the unit disk: near-boundary Duhamel step with
/// the vorticity boundary row, interior advection-diffusion in polar modes,
/// blend-and-resplit synchronization every step.
class DiskSolver {
  public:
    DiskSolver(std::shared_ptr<const geometry::ScaledChart> chart,
               std::vector<double> zgrid, std::vector<double> rgrid, int n_theta,
               double nu, double dt);

    const CutoffFunction& cutoff() const { return cut_; }
    double dt() const { return dt_; }
    double nu() const { return nu_; }
    const std::shared_ptr<const geometry::ScaledChart>& chart() const { return chart_; }
    const std::vector<double>& rgrid() const { return rgrid_; }
    const std::vector<double>& zgrid() const { return zgrid_; }
    int n_theta() const { return n_theta_; }

    /// Split a global vorticity into the two representations, fit the trace
    /// decay rate, and verify the no-slip compatibility moments
    /// int omega_alpha(r) r^{|alpha|+1} dr = 0 by fine quadrature.
    SolverState split_initial(const std::function<double(double, double)>& omega0,
                              double compat_tol = 1e-8) const;

    elliptic::DiskVelocity velocity(const SolverState& s) const;

    /// u . grad omega^i on the polar grid (pseudo-spectral, dealiased).
    elliptic::RadialField nonlinear_interior(const elliptic::DiskVelocity& v,
                                             const elliptic::RadialField& w) const;

    /// g_alpha = d/dz of the Dirichlet solve of Delta Phi = u . grad omega at
    /// the wall (scaled derivative), per storage mode.
    cvec boundary_forcing(const elliptic::DiskVelocity& v, const SolverState& s) const;

    /// One Heun/Crank-Nicolson step; throws StepRejectedError on CFL
    /// violation and DesyncError when the overlap representations disagree.
    SolverState step(const SolverState& s) const;

    /// Diagnostics. Energies integrate the near representation outside
    /// r_split and the polar one inside.
    double kinetic_energy(const elliptic::DiskVelocity& v) const;
    double enstrophy(const SolverState& s) const;
    double circulation(const SolverState& s) const;
    double wall_slip(const elliptic::DiskVelocity& v) const;
    double blend_defect(const SolverState& s) const;

    /// Cartesian sample of the blended vorticity for interior diagnostics.
    fields::InteriorField sample_interior(const SolverState& s, double h,
                                          double d_min) const;

  private:
    void resync(SolverState& s) const;
    elliptic::RadialField interior_step(const elliptic::RadialField& w,
                                        const elliptic::RadialField& src) const;
    void sources(const SolverState& s, const elliptic::DiskVelocity& v,
                 fields::ModeField& f, elliptic::RadialField& adv, cvec& g) const;
    double cfl_number(const elliptic::DiskVelocity& v) const;
    std::shared_ptr<const geometry::ScaledChart> chart_;
    std::vector<double> zgrid_, rgrid_;
    int n_theta_;
    double nu_, dt_;
    CutoffFunction cut_;
    std::unique_ptr<stokes::SemigroupStepper> near_;
    std::vector<banded::BandedLU> interior_lu_; // CN radial diffusion per mode
};

/// Navier-Stokes on the flat periodic half-plane strip (single representation,
/// whole domain near-boundary). Used for self-convergence studies.
class StripSolver {
  public:
    StripSolver(std::shared_ptr<const geometry::ScaledChart> chart,
                std::vector<double> zgrid, int n_theta, double nu, double dt);
    fields::ModeField step(const fields::ModeField& w) const;
    double dt() const { return dt_; }

  private:
    std::shared_ptr<const geometry::ScaledChart> chart_;
    std::vector<double> zgrid_;
    int n_theta_;
    double nu_, dt_;
    std::unique_ptr<stokes::SemigroupStepper> near_;
};

/// Incompressible Euler on the full disk in polar modes (impermeability only),
/// RK4 advection with velocity from the Dirichlet stream solve.
struct PolarVelocity {
    elliptic::RadialField u_r;
    elliptic::RadialField u_t;
};
PolarVelocity polar_velocity(const elliptic::RadialField& omega);

struct EulerHistory {
    std::vector<double> times;
    std::vector<elliptic::RadialField> omega;
    std::vector<double> grad_u_inf; ///< max |grad u| estimate per snapshot
};
EulerHistory euler_reference(const elliptic::RadialField& omega0, double T, int steps,
                             int snapshots = 8);

/// Zero-moment preset initial vorticity (1 - 2 r^2) + amp q(r) cos(2 theta)
/// with q = r^2 (1 - r^2)^2 (1 - 2 r^2); compatible with u0 = 0 on the wall.
double preset_vorticity(double x, double y, double amp);

} // namespace vortexlab::solver

#endif
