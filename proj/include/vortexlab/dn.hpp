#ifndef VORTEXLAB_DN_HPP
#define VORTEXLAB_DN_HPP

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "vortexlab/fields.hpp"

namespace vortexlab::dn {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Harmonic extension of a boundary trace into the near-boundary strip.
/// trace is per-mode in FFT storage order; n_theta = trace.size().
/// Flat strips use the exact half-plane extension e^{-|k| z}; closed curves a
/// harmonic-polynomial collocation about the curve centroid (spectrally exact
/// for analytic boundaries).
fields::ModeField harmonic_extend(
    const std::shared_ptr<const geometry::ScaledChart>& chart,
    const std::vector<double>& zgrid, const cvec& trace);

/// Physical Dirichlet-Neumann map per mode: DN w = -d/dn of the harmonic
/// extension with n the inward normal, so a disk trace e^{i n theta} maps to
/// |n| e^{i n theta}. The zero mode extends to a constant and maps to 0.
cvec apply_dn(const geometry::ScaledChart& chart, const cvec& trace);

/// Scaled-coordinate decomposition DN/lambda = |d/dthetatilde| + B: the
/// principal per-mode multiplier |kappa_alpha| plus a bounded correction B,
/// materialized as a dense matrix on traces at fixed resolution.
struct DNDecomposition {
    std::vector<double> principal;  ///< |kappa_alpha| per storage slot
    Eigen::MatrixXcd correction;    ///< B acting on storage-order traces
    double correction_norm = 0.0;   ///< spectral norm of the cached matrix

    /// Scaled DN action: principal * trace + correction * trace.
    cvec apply(const cvec& trace) const;

    static DNDecomposition build(const geometry::ScaledChart& chart, int n_theta);
};

} // namespace vortexlab::dn

#endif
