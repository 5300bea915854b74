#include "vortexlab/stokes.hpp"

#include <cmath>

#include "vortexlab/elliptic.hpp"

namespace vortexlab::stokes {

using elliptic::onesided_d1;
using fields::ModeField;

double heat_kernel(double nu, double kappa, double t, double y, double z) {
    const double s = 4.0 * nu * t;
    return (std::exp(-(y - z) * (y - z) / s) + std::exp(-(y + z) * (y + z) / s)) *
           std::exp(-kappa * kappa * nu * t) / std::sqrt(M_PI * s);
}

namespace {
struct CenteredW {
    double d2m, d2c, d2p, d1m, d1c, d1p;
};
CenteredW centered(double hm, double hp) {
    CenteredW w;
    w.d2m = 2.0 / (hm * (hm + hp));
    w.d2p = 2.0 / (hp * (hm + hp));
    w.d2c = -(w.d2m + w.d2p);
    w.d1m = -hp / (hm * (hm + hp));
    w.d1p = hm / (hp * (hm + hp));
    w.d1c = -(w.d1m + w.d1p);
    return w;
}
} // namespace

SemigroupStepper::SemigroupStepper(std::shared_ptr<const geometry::ScaledChart> chart,
                                   std::vector<double> zgrid, int n_theta, double nu,
                                   double dt, bool curved)
    : chart_(std::move(chart)), zgrid_(std::move(zgrid)), n_theta_(n_theta), nu_(nu),
      dt_(dt), curved_(curved) {
    if (nu <= 0.0)
        throw InviscidNotSupportedError("SemigroupStepper: nu must be positive");
    if (dt <= 0.0) throw std::invalid_argument("SemigroupStepper: dt must be positive");
    if (curved_ && !chart_->constant_curvature())
        throw std::invalid_argument(
            "SemigroupStepper: curved stepping requires constant curvature");
    const int n = static_cast<int>(zgrid_.size());
    const int N = n - 1;
    brow_ = onesided_d1(zgrid_[0], zgrid_[1], zgrid_[2]);
    frow_ = onesided_d1(zgrid_[N], zgrid_[N - 1], zgrid_[N - 2]);
    kappa_.resize(n_theta_);
    const double lam2 = chart_->lambda() * chart_->lambda();
    for (int m = 0; m < n_theta_; ++m) {
        kappa_[m] = chart_->mode_wavenumber(fourier::signed_wavenumber(m, n_theta_));
        banded::BandedLU A(n, 2, 2);
        const double kap = kappa_[m];
        // boundary row: nu (d/dz + |kappa|) w(0) = g, one-sided second order
        A.at(0, 0) = nu_ * (brow_[0] + std::abs(kap));
        A.at(0, 1) = nu_ * brow_[1];
        A.at(0, 2) = nu_ * brow_[2];
        for (int j = 1; j < N; ++j) {
            const auto w = centered(zgrid_[j] - zgrid_[j - 1], zgrid_[j + 1] - zgrid_[j]);
            cplx lm = w.d2m, lc = w.d2c - kap * kap, lp = w.d2p;
            if (curved_) {
                const auto rc = chart_->remainder_coefficients(zgrid_[j], 0.0);
                lm += lam2 * rc.cz * w.d1m;
                lc += lam2 * (-rc.m * kap * kap + rc.cz * w.d1c) +
                      cplx{0.0, lam2 * rc.ct * kap};
                lp += lam2 * rc.cz * w.d1p;
            }
            const double r = 1.0 / dt_;
            A.at(j, j - 1) = -0.5 * nu_ * lm;
            A.at(j, j) = r - 0.5 * nu_ * lc;
            A.at(j, j + 1) = -0.5 * nu_ * lp;
        }
        if (kap == 0.0) {
            A.at(N, N) = frow_[0];
            A.at(N, N - 1) = frow_[1];
            A.at(N, N - 2) = frow_[2];
        } else {
            A.at(N, N) = 1.0;
        }
        A.factor();
        lu_.push_back(std::move(A));
    }
}

void SemigroupStepper::apply_explicit(int m, const ModeField& w, cvec& rhs) const {
    const int n = static_cast<int>(zgrid_.size());
    const int N = n - 1;
    const double kap = kappa_[m];
    const double lam2 = chart_->lambda() * chart_->lambda();
    const int a = fourier::signed_wavenumber(m, n_theta_);
    rhs.assign(n, cplx{0, 0});
    for (int j = 1; j < N; ++j) {
        const auto c = centered(zgrid_[j] - zgrid_[j - 1], zgrid_[j + 1] - zgrid_[j]);
        cplx Lw = c.d2m * w.at(a, j - 1) + (c.d2c - kap * kap) * w.at(a, j) +
                  c.d2p * w.at(a, j + 1);
        if (curved_) {
            const auto rc = chart_->remainder_coefficients(zgrid_[j], 0.0);
            const cplx d1 =
                c.d1m * w.at(a, j - 1) + c.d1c * w.at(a, j) + c.d1p * w.at(a, j + 1);
            Lw += lam2 * (-rc.m * kap * kap * w.at(a, j) + rc.cz * d1 +
                          cplx{0.0, rc.ct * kap} * w.at(a, j));
        }
        rhs[j] = w.at(a, j) / dt_ + 0.5 * nu_ * Lw;
    }
}

ModeField SemigroupStepper::step(const ModeField& w, const cvec* g,
                                 const ModeField* src) const {
    ModeField out(chart_, zgrid_, n_theta_);
    const int N = static_cast<int>(zgrid_.size()) - 1;
    cvec rhs;
    for (int m = 0; m < n_theta_; ++m) {
        apply_explicit(m, w, rhs);
        if (src) {
            const int a = fourier::signed_wavenumber(m, n_theta_);
            for (int j = 1; j < N; ++j) rhs[j] += src->at(a, j);
        }
        rhs[0] = g ? (*g)[m] : cplx{0, 0};
        lu_[m].solve(rhs);
        const int a = fourier::signed_wavenumber(m, n_theta_);
        for (size_t j = 0; j < zgrid_.size(); ++j) out.at(a, j) = rhs[j];
    }
    return out;
}

ModeField SemigroupStepper::step_curved(const ModeField& w,
                                        const dn::DNDecomposition& d) const {
    cvec trace(n_theta_);
    for (int m = 0; m < n_theta_; ++m)
        trace[m] = w.at(fourier::signed_wavenumber(m, n_theta_), 0);
    // lagged correction: only the B part goes to the right-hand side, the
    // principal |kappa| part sits in the implicit boundary row already
    Eigen::VectorXcd t(n_theta_);
    for (int m = 0; m < n_theta_; ++m) t(m) = trace[m];
    Eigen::VectorXcd b = d.correction * t;
    cvec g(n_theta_);
    for (int m = 0; m < n_theta_; ++m) g[m] = -nu_ * b(m);
    return step(w, &g);
}

ModeField SemigroupStepper::boundary_trace_inject(const cvec& g, double t) const {
    if (t <= 0.0)
        throw std::invalid_argument("boundary_trace_inject: t must be positive");
    ModeField w(chart_, zgrid_, n_theta_);
    const int steps = std::max(1, static_cast<int>(std::llround(t / dt_)));
    for (int s = 0; s < steps; ++s) w = step(w, &g);
    return w;
}

double SemigroupStepper::boundary_row_residual(const ModeField& w, const cvec* g) const {
    double worst = 0.0;
    for (int m = 0; m < n_theta_; ++m) {
        const int a = fourier::signed_wavenumber(m, n_theta_);
        const cplx lhs = nu_ * (brow_[0] * w.at(a, 0) + brow_[1] * w.at(a, 1) +
                                brow_[2] * w.at(a, 2) + std::abs(kappa_[m]) * w.at(a, 0));
        worst = std::max(worst, std::abs(lhs - (g ? (*g)[m] : cplx{0, 0})));
    }
    return worst;
}

KernelFitResult fit_green_bound(const SemigroupStepper& s, int alpha, double t,
                                double y) {
    const auto& zg = s.zgrid();
    const int n = static_cast<int>(zg.size());
    // discrete point source at the node nearest y, unit mass under trapezoid
    int j0 = 0;
    for (int j = 1; j < n; ++j)
        if (std::abs(zg[j] - y) < std::abs(zg[j0] - y)) j0 = j;
    const double wj = 0.5 * ((j0 + 1 < n ? zg[j0 + 1] : zg[j0]) -
                             (j0 > 0 ? zg[j0 - 1] : zg[j0]));
    ModeField w(s.chart(), zg, s.n_theta());
    w.at(alpha, j0) = 1.0 / wj;
    const int steps = std::max(1, static_cast<int>(std::llround(t / s.dt())));
    for (int q = 0; q < steps; ++q) w = s.step(w);

    const double nu = s.nu();
    const double kap = s.chart()->mode_wavenumber(alpha);
    KernelFitResult best{1e300, 0.0};
    for (double theta0 : {0.25, 0.2, 0.15, 0.1, 0.05}) {
        StokesKernelParams p{nu, kap, theta0};
        const double mu = p.mu_f();
        double C = 0.0;
        for (int j = 0; j < n; ++j) {
            const double z = zg[j];
            const double bound = heat_kernel(nu, kap, t, zg[j0], z) +
                                 mu * std::exp(-theta0 * mu * (zg[j0] + z)) +
                                 std::exp(-theta0 * (zg[j0] + z) * (zg[j0] + z) /
                                          (nu * t)) /
                                     std::sqrt(nu * t);
            C = std::max(C, std::abs(w.at(alpha, j)) / bound);
        }
        if (C < best.C) best = {C, theta0};
    }
    return best;
}

} // namespace vortexlab::stokes
