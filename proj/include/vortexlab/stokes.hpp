#ifndef VORTEXLAB_STOKES_HPP
#define VORTEXLAB_STOKES_HPP

#include <memory>
#include <vector>

#include "vortexlab/banded.hpp"
#include "vortexlab/dn.hpp"
#include "vortexlab/fields.hpp"

namespace vortexlab::stokes {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

struct InviscidNotSupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-mode kernel parameters for the validation bounds.
struct StokesKernelParams {
    double nu = 0.0;
    double kappa = 0.0;    ///< scaled wavenumber of the mode
    double theta0 = 0.25;  ///< kernel decay constant, fitted in (0, 1/4]
    double mu_f() const { return std::abs(kappa) + 1.0 / std::sqrt(nu); }
};

/// Normalized half-line heat kernel with an even image charge:
/// H(t,y;z) = (4 pi nu t)^{-1/2} (e^{-(y-z)^2/4nut} + e^{-(y+z)^2/4nut}) e^{-kappa^2 nu t}.
double heat_kernel(double nu, double kappa, double t, double y, double z);

/// Crank-Nicolson stepper for the per-mode Stokes problem on the scaled strip:
/// (d/dt - nu L_kappa) w = 0 with the vorticity boundary row
/// nu (d/dz + |kappa|) w(0) = g. The zero mode gets a Neumann far end (mass
/// conservation); other modes a homogeneous Dirichlet far end. With
/// curved = true the operator includes the lambda^2 curvature remainder
/// (constant-curvature charts only).
class SemigroupStepper {
  public:
    SemigroupStepper(std::shared_ptr<const geometry::ScaledChart> chart,
                     std::vector<double> zgrid, int n_theta, double nu, double dt,
                     bool curved = false);

    double dt() const { return dt_; }
    double nu() const { return nu_; }
    const std::vector<double>& zgrid() const { return zgrid_; }
    int n_theta() const { return n_theta_; }
    const std::shared_ptr<const geometry::ScaledChart>& chart() const { return chart_; }

    /// One step; g holds per-storage-mode boundary data and src an interior
    /// source added to the right-hand side (nullptr = zero).
    fields::ModeField step(const fields::ModeField& w, const cvec* g = nullptr,
                           const fields::ModeField* src = nullptr) const;

    /// One curved step with the DN correction applied as a lagged boundary
    /// row: nu (d/dz + |kappa|) w(0) = -nu (B w_old)_alpha.
    fields::ModeField step_curved(const fields::ModeField& w,
                                  const dn::DNDecomposition& d) const;

    /// Evolve zero data under constant boundary forcing g up to time t.
    fields::ModeField boundary_trace_inject(const cvec& g, double t) const;

    /// Discrete boundary-row residual max_alpha |nu(d/dz + |kappa|)w(0) - g|.
    double boundary_row_residual(const fields::ModeField& w, const cvec* g = nullptr) const;

  private:
    void apply_explicit(int m, const fields::ModeField& w, cvec& rhs) const;

    std::shared_ptr<const geometry::ScaledChart> chart_;
    std::vector<double> zgrid_;
    int n_theta_ = 0;
    double nu_ = 0.0, dt_ = 0.0;
    bool curved_ = false;
    std::vector<double> kappa_;                  // per storage slot
    std::vector<banded::BandedLU> lu_;           // prefactored implicit operators
    std::array<double, 3> brow_{};               // one-sided d/dz at z = 0
    std::array<double, 3> frow_{};               // one-sided d/dz at z = zmax
};

/// Fitted constant of the Green-column bound
/// |G(t,y;z)| <= C [H + mu_f e^{-theta0 mu_f (y+z)} + (nu t)^{-1/2} e^{-theta0 (y+z)^2/nu t}]
/// for the discrete response to a point source at y; theta0 scanned in (0, 1/4].
struct KernelFitResult {
    double C = 0.0;
    double theta0 = 0.0;
};
KernelFitResult fit_green_bound(const SemigroupStepper& s, int alpha, double t, double y);

} // namespace vortexlab::stokes

#endif
