#ifndef VORTEXLAB_NORMS_HPP
#define VORTEXLAB_NORMS_HPP

#include <span>

#include "vortexlab/fields.hpp"

namespace vortexlab::norms {

/// Parameters of the analytic norm family. The weight on mode alpha at height
/// z is e^{eps0 (delta0 + rho - z) |alpha|} for z <= delta0 + rho and 1 beyond.
struct AnalyticNormConfig {
    double eps0 = 0.25;   ///< analyticity rate, in (0, 1/2]
    double delta0 = 0.0;  ///< depth; <= 0 takes the field chart's delta0
    double rho = 0.045;   ///< margin, in (0, rho0)
    double rho0 = 0.09;   ///< max margin, < 1/10
    double zeta = 0.5;    ///< time-weight exponent, in (0, 1)
    double beta = 1.0;    ///< iterative-norm rate
};

/// L1-type analytic norm: sum_alpha int_0^{delta0+rho} weight |f_alpha| dz.
double l1_rho(const fields::ModeField& f, const AnalyticNormConfig& cfg);
/// Linf counterpart: sum_alpha sup_z weight |f_alpha| (so the algebra
/// inequality |fg|_1 <= |f|_inf |g|_1 holds with constant one).
double linf_rho(const fields::ModeField& f, const AnalyticNormConfig& cfg);

/// Spectral d/dthetatilde (multiplier i kappa_alpha, Nyquist zeroed).
fields::ModeField theta_derivative(const fields::ModeField& f);
/// z d/dz by centered differences (one-sided at the ends).
fields::ModeField scaled_z_derivative(const fields::ModeField& f);

/// W^{k,p} norms: sum over i+j <= k of the (theta^i, (z d/dz)^j) derivative
/// in the L1/Linf analytic norm. k <= 4.
double w_k1(const fields::ModeField& f, int k, const AnalyticNormConfig& cfg);
double w_kinf(const fields::ModeField& f, int k, const AnalyticNormConfig& cfg);

/// Discrete H^k norm over the field's own mask (centered differences where
/// the stencil stays masked). k <= 4.
double interior_sobolev(const fields::InteriorField& f, int k);

/// One time slice entering the iterative norm.
struct NormRecord {
    double t = 0.0;
    fields::ModeField w;
    double h4_interior = 0.0;
};

/// A(beta): sup over records with lambda^2 beta t < rho0 and a 16-point
/// rho-grid of w_11 + w_21 (rho0 - rho - lambda^2 beta t)^zeta + H4-interior.
double iterative_norm_A(std::span<const NormRecord> history,
                        const AnalyticNormConfig& cfg);

} // namespace vortexlab::norms

#endif
