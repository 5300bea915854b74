#ifndef VORTEXLAB_EXPERIMENTS_HPP
#define VORTEXLAB_EXPERIMENTS_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vortexlab/norms.hpp"
#include "vortexlab/solver.hpp"

namespace vortexlab::experiments {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// A viscosity sweep on the unit disk against a shared Euler reference.
struct SweepPlan {
    std::vector<double> nus = {1e-2, 3e-3, 1e-3, 3e-4}; ///< descending
    double T = 0.5;
    double lambda = 0.1;
    int n_theta = 128;
    int n_z = 256;      ///< near-chart wall-normal nodes
    int n_records = 25; ///< output rows per run after t = 0
    double dt = 0.0;    ///< <= 0 derives it from the accuracy limits
    std::string ic = "preset"; ///< "preset" | "radial" | "zero"
    double ic_amp = 0.05;
    std::vector<std::pair<int, double>> ic_modes; ///< extra (alpha, amplitude)
    std::string output; ///< report directory; empty writes nothing
    int threads = -1;   ///< -1 reads VORTEXLAB_THREADS; 0/1 sequential
    norms::AnalyticNormConfig norms; ///< weights for the norm columns
    int checkpoint_every = 0; ///< records between state snapshots; 0 disables
    bool plots = true;        ///< emit SVG plots with the report
};

/// Throws std::invalid_argument on any violated plan invariant.
void validate_plan(const SweepPlan& plan);

/// One output row. Norm columns are evaluated on the near-chart field.
struct ExperimentRecord {
    double nu = 0.0;
    double t = 0.0;
    double l2_diff = 0.0;        ///< ||u_nu(t) - u_E(t)||_{L2}
    double bdry_vort = 0.0;      ///< sqrt(nu) sup_{[0,t] x wall} |omega_nu|
    double kato_integrand = 0.0; ///< -nu oint omega_nu (u_E . tau) dsigma
    double kato_integral = 0.0;  ///< trapezoidal running integral of the above
    double gronwall_rhs = 0.0;   ///< e^{2 t G} ||u_nu(0) - u_E(0)||^2
    double energy_lhs = 0.0;     ///< ||u_nu(t)||^2 + 2 nu int ||omega_nu||^2
    double energy_rhs = 0.0;     ///< ||u_nu(0)||^2
    double euler_diss = 0.0;     ///< nu int_0^t ||grad u_E||^2
    double grad_bound = 0.0;     ///< G = sup_t ||grad u_E||_inf
    double l1_rho = 0.0;
    double w11 = 0.0;
    double w21 = 0.0;
    double h4_interior = 0.0;
    double a_beta = 0.0;
};

/// -int_0^T oint nu omega_nu (u_E . tau) dsigma dt on the unit circle,
/// trapezoidal in time, spectral in the angle. The traces are per-time
/// angular mode rows in FFT storage order; grids must match in length.
double kato_integral(const std::vector<double>& times,
                     const std::vector<cvec>& wall_vorticity,
                     const std::vector<cvec>& euler_slip, double nu);

/// Per-record margin of the Gronwall stability chain
/// l2_diff^2 <= e^{2tG} (||d0||^2 + |kato| + nu int ||grad u_E||^2).
struct StabilityPoint {
    bool ok = true;
    double margin = 0.0;
};
std::vector<StabilityPoint> stability_check(std::span<const ExperimentRecord> records);

/// Least-squares slope of log(metric) against log(nu).
struct RateFit {
    double exponent = 0.0;
    double confidence = 0.0; ///< 1 - normalized residual; 1 is a perfect fit
    int used = 0;            ///< points with positive metric
};
RateFit fit_rate(std::vector<std::pair<double, double>> pairs);

/// Radial profile r^|a| (1-r^2)^2 (1 - (|a|+4)/(|a|+1) r^2): analytic, zero
/// wall trace, and zero harmonic moment, so single-mode data built from it is
/// no-slip compatible.
double mode_profile(int alpha, double r);

/// Per-viscosity run diagnostics that are tracked every step, not only at
/// record times.
struct RunSummary {
    double nu = 0.0;
    double dt = 0.0;
    int steps = 0;
    double max_energy_slack = 0.0; ///< max over steps of relative energy excess
    double spectral_tail = 0.0;    ///< final-time tail fraction of enstrophy
    bool completed = true;
    std::string note;
};

struct SweepResult {
    std::vector<ExperimentRecord> records; ///< grouped by nu in plan order
    std::vector<RunSummary> runs;
    RateFit rate; ///< fit of sup_t l2_diff against nu
};

/// Runs the sweep against a shared Euler reference and, when plan.output is
/// set, writes records.csv, summary.json and the SVG plots there.
SweepResult run_sweep(const SweepPlan& plan);

} // namespace vortexlab::experiments

#endif
