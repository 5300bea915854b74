#include "vortexlab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace vortexlab::fourier {

namespace {

// FFTW plan creation isn't thread-safe; executing a cached plan on fresh
// buffers is (new-array execute).
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    cvec buf(static_cast<size_t>(n));
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, pp).first->second;
}

void execute(bool forward_dir, cplx* data, int n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    PlanPair& pp = plans_for(n);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(forward_dir ? pp.fwd : pp.bwd, p, p);
}

} // namespace

cvec forward(std::span<const cplx> physical) {
    const int n = static_cast<int>(physical.size());
    if (n == 0) throw std::invalid_argument("fourier::forward: empty input");
    cvec out(physical.begin(), physical.end());
    execute(true, out.data(), n);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

cvec forward_real(std::span<const double> physical) {
    cvec tmp(physical.size());
    for (size_t i = 0; i < physical.size(); ++i) tmp[i] = physical[i];
    return forward(tmp);
}

cvec inverse(std::span<const cplx> modes) {
    const int n = static_cast<int>(modes.size());
    if (n == 0) throw std::invalid_argument("fourier::inverse: empty input");
    cvec out(modes.begin(), modes.end());
    execute(false, out.data(), n);
    return out;
}

std::vector<double> inverse_real(std::span<const cplx> modes) {
    cvec full = inverse(modes);
    std::vector<double> out(full.size());
    for (size_t i = 0; i < full.size(); ++i) out[i] = full[i].real();
    return out;
}

int signed_wavenumber(int m, int N) {
    return (m <= N / 2) ? m : m - N;
}

int storage_index(int alpha, int N) {
    if (alpha < -N / 2 || alpha > N / 2)
        throw std::out_of_range("fourier::storage_index: wavenumber out of range");
    return (alpha >= 0) ? alpha : alpha + N;
}

cplx eval_trig(std::span<const cplx> modes, double t) {
    const int N = static_cast<int>(modes.size());
    cplx acc{0.0, 0.0};
    for (int m = 0; m < N; ++m) {
        const int a = signed_wavenumber(m, N);
        const double phase = 2.0 * std::numbers::pi * a * t;
        cplx e{std::cos(phase), std::sin(phase)};
        if (N % 2 == 0 && m == N / 2) {
            // interpret the Nyquist slot as cos to keep real inputs real
            e = cplx{std::cos(phase), 0.0};
        }
        acc += modes[m] * e;
    }
    return acc;
}

double eval_trig_real(std::span<const cplx> modes, double t) {
    return eval_trig(modes, t).real();
}

cvec derivative(std::span<const cplx> modes, double period, int order) {
    const int N = static_cast<int>(modes.size());
    cvec out(modes.begin(), modes.end());
    for (int m = 0; m < N; ++m) {
        const int a = signed_wavenumber(m, N);
        if (N % 2 == 0 && m == N / 2) {
            out[m] = 0.0;
            continue;
        }
        const cplx ik{0.0, 2.0 * std::numbers::pi * a / period};
        cplx factor{1.0, 0.0};
        for (int q = 0; q < order; ++q) factor *= ik;
        out[m] *= factor;
    }
    return out;
}

std::vector<double> derivative_real(std::span<const double> physical, double period,
                                    int order) {
    cvec modes = forward_real(physical);
    cvec d = derivative(modes, period, order);
    return inverse_real(d);
}

} // namespace vortexlab::fourier
