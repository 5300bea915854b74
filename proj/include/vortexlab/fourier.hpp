#ifndef VORTEXLAB_FOURIER_HPP
#define VORTEXLAB_FOURIER_HPP

#include <complex>
#include <span>
#include <vector>

namespace vortexlab::fourier {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Forward DFT with 1/N normalization: modes[m] = (1/N) sum_j x_j e^{-2pi i m j / N}.
/// Storage is standard FFT order: signed wavenumber alpha = m for m <= N/2,
/// alpha = m - N otherwise.
cvec forward(std::span<const cplx> physical);
cvec forward_real(std::span<const double> physical);

/// Inverse of forward(): x_j = sum_m modes[m] e^{+2pi i m j / N}.
cvec inverse(std::span<const cplx> modes);
std::vector<double> inverse_real(std::span<const cplx> modes);

/// Signed wavenumber of storage slot m for length-N transform.
int signed_wavenumber(int m, int N);
/// Storage slot of signed wavenumber alpha (alpha in [-N/2, N/2)).
int storage_index(int alpha, int N);

/// Evaluate the trigonometric interpolant at fraction t in [0,1) of the period.
/// The Nyquist mode (even N) is treated as a cosine.
cplx eval_trig(std::span<const cplx> modes, double t);
double eval_trig_real(std::span<const cplx> modes, double t);

/// Spectral derivative: multiply mode alpha by (2 pi i alpha / period).
/// The Nyquist mode is zeroed.
cvec derivative(std::span<const cplx> modes, double period, int order = 1);

/// Convenience: spectral derivative of a real periodic sample vector.
std::vector<double> derivative_real(std::span<const double> physical, double period,
                                    int order = 1);

} // namespace vortexlab::fourier

#endif
