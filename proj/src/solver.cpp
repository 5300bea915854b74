#include "vortexlab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "vortexlab/banded.hpp"

namespace vortexlab::solver {

using elliptic::onesided_d1;
using elliptic::RadialField;
using fields::ModeField;
using fourier::signed_wavenumber;
using fourier::storage_index;

// ---------------------------------------------------------------------------
// cutoff

CutoffFunction::CutoffFunction(double delta0, double rho0)
    : delta0_(delta0), rho0_(rho0) {
    if (delta0 < 0.0 || rho0 <= 0.0)
        throw std::invalid_argument("CutoffFunction: need delta0 >= 0, rho0 > 0");
}

namespace {
// quintic smoothstep on [0,1]
double smooth5(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
double smooth5_d(double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); }
double smooth5_dd(double x) { return 60.0 * x * (1.0 + x * (-3.0 + 2.0 * x)); }
} // namespace

double CutoffFunction::operator()(double sd) const {
    if (sd <= delta0_ + rho0_) return 1.0;
    if (sd >= delta0_ + 2.0 * rho0_) return 0.0;
    return 1.0 - smooth5((sd - delta0_ - rho0_) / rho0_);
}

double CutoffFunction::derivative(double sd) const {
    if (sd <= delta0_ + rho0_ || sd >= delta0_ + 2.0 * rho0_) return 0.0;
    return -smooth5_d((sd - delta0_ - rho0_) / rho0_) / rho0_;
}

double CutoffFunction::second_derivative(double sd) const {
    if (sd <= delta0_ + rho0_ || sd >= delta0_ + 2.0 * rho0_) return 0.0;
    return -smooth5_dd((sd - delta0_ - rho0_) / rho0_) / (rho0_ * rho0_);
}

// ---------------------------------------------------------------------------
// shared difference helpers

namespace {

struct CenteredW {
    double d1m, d1c, d1p;
};
CenteredW centered1(double hm, double hp) {
    CenteredW w;
    w.d1m = -hp / (hm * (hm + hp));
    w.d1p = hm / (hp * (hm + hp));
    w.d1c = -(w.d1m + w.d1p);
    return w;
}

cvec col_d1(const std::vector<double>& g, const cvec& col) {
    const int n = static_cast<int>(g.size());
    cvec d(n);
    {
        const auto w = onesided_d1(g[0], g[1], g[2]);
        d[0] = w[0] * col[0] + w[1] * col[1] + w[2] * col[2];
    }
    for (int j = 1; j < n - 1; ++j) {
        const auto w = centered1(g[j] - g[j - 1], g[j + 1] - g[j]);
        d[j] = w.d1m * col[j - 1] + w.d1c * col[j] + w.d1p * col[j + 1];
    }
    {
        const auto w = onesided_d1(g[n - 1], g[n - 2], g[n - 3]);
        d[n - 1] = w[0] * col[n - 1] + w[1] * col[n - 2] + w[2] * col[n - 3];
    }
    return d;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// trapezoid of real samples against an extra weight, clipped at xlim with a
// linearly interpolated partial interval
double clipped_trapz(const std::vector<double>& x, const std::vector<double>& f,
                     const std::vector<double>& w, double xlim) {
    double acc = 0.0;
    for (size_t j = 0; j + 1 < x.size(); ++j) {
        if (x[j] >= xlim) break;
        const double a = x[j];
        double b = x[j + 1], fb = f[j + 1] * w[j + 1];
        const double fa = f[j] * w[j];
        if (b > xlim) {
            const double s = (xlim - a) / (b - a);
            fb = fa + s * (fb - fa);
            b = xlim;
        }
        acc += 0.5 * (fa + fb) * (b - a);
    }
    return acc;
}

} // namespace

// ---------------------------------------------------------------------------
// dealiased products

cvec dealias_product(const cvec& a, const cvec& b) {
    const int n = static_cast<int>(a.size());
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("dealias_product: size mismatch");
    int M = 3 * n / 2;
    if (M % 2) ++M;
    cvec A(M, cplx{0, 0}), B(M, cplx{0, 0});
    for (int k = -(n / 2 - 1); k <= n / 2 - 1; ++k) {
        A[storage_index(k, M)] = a[storage_index(k, n)];
        B[storage_index(k, M)] = b[storage_index(k, n)];
    }
    const cvec pa = fourier::inverse(A), pb = fourier::inverse(B);
    cvec pc(M);
    for (int j = 0; j < M; ++j) pc[j] = pa[j] * pb[j];
    const cvec C = fourier::forward(pc);
    cvec out(n, cplx{0, 0});
    for (int k = -(n / 2 - 1); k <= n / 2 - 1; ++k)
        out[storage_index(k, n)] = C[storage_index(k, M)];
    return out;
}

ModeField nonlinear_term(const ModeField& u_tau, const ModeField& u_n,
                         const ModeField& omega) {
    const auto& chart = omega.chart();
    const auto& zg = omega.zgrid();
    const int Nt = omega.n_theta(), nz = omega.n_z();
    const double lam = chart.lambda();
    const double lam2 = lam * lam;
    if (u_tau.n_theta() != Nt || u_n.n_theta() != Nt || u_tau.n_z() != nz ||
        u_n.n_z() != nz)
        throw std::invalid_argument("nonlinear_term: shape mismatch");

    // wall-normal derivative per mode
    ModeField dwdz(omega.chart_ptr(), zg, Nt);
    cvec col(nz);
    for (int m = 0; m < Nt; ++m) {
        const int a = signed_wavenumber(m, Nt);
        for (int j = 0; j < nz; ++j) col[j] = omega.at(a, j);
        const cvec d = col_d1(zg, col);
        for (int j = 0; j < nz; ++j) dwdz.at(a, j) = d[j];
    }

    ModeField out(omega.chart_ptr(), zg, Nt);
    cvec un_row(Nt), ut_row(Nt), dz_row(Nt), dth_row(Nt);
    for (int j = 0; j < nz; ++j) {
        for (int m = 0; m < Nt; ++m) {
            const int a = signed_wavenumber(m, Nt);
            un_row[m] = u_n.at(a, j);
            ut_row[m] = u_tau.at(a, j);
            dz_row[m] = dwdz.at(a, j);
            dth_row[m] = cplx{0.0, chart.mode_wavenumber(a)} * omega.at(a, j);
        }
        const cvec pn = dealias_product(un_row, dz_row);
        const cvec pt = dealias_product(ut_row, dth_row);
        const double J = 1.0 + lam2 * zg[j] * chart.tilde_gamma(0.0);
        for (int m = 0; m < Nt; ++m) {
            const int a = signed_wavenumber(m, Nt);
            out.at(a, j) = -(pn[m] + pt[m] / J) / lam;
        }
    }
    out.enforce_hermitian();
    return out;
}

// ---------------------------------------------------------------------------
// polar advection (shared with the Euler reference)

namespace {

// u . grad w on the polar grid, pseudo-spectral in theta with dealiasing
RadialField advect_polar(const RadialField& u_r, const RadialField& u_t,
                         const RadialField& w) {
    const auto& rg = w.rgrid;
    const int Nt = w.n_theta, nr = w.n_r();
    RadialField dwdr(rg, Nt);
    cvec col(nr);
    for (int m = 0; m < Nt; ++m) {
        const int a = signed_wavenumber(m, Nt);
        for (int i = 0; i < nr; ++i) col[i] = w.at(a, i);
        const cvec d = col_d1(rg, col);
        for (int i = 0; i < nr; ++i) dwdr.at(a, i) = d[i];
    }
    RadialField out(rg, Nt);
    cvec ur_row(Nt), ut_row(Nt), dr_row(Nt), th_row(Nt);
    for (int i = 0; i < nr; ++i) {
        const double r = rg[i];
        for (int m = 0; m < Nt; ++m) {
            const int a = signed_wavenumber(m, Nt);
            ur_row[m] = u_r.at(a, i);
            ut_row[m] = u_t.at(a, i);
            dr_row[m] = dwdr.at(a, i);
            // (1/r) d_theta w; the r -> 0 limit is i a w'(0) (w_a(0) = 0, a != 0)
            if (i == 0)
                th_row[m] = (a != 0) ? cplx{0.0, double(a)} * dwdr.at(a, 0) : cplx{0, 0};
            else
                th_row[m] = cplx{0.0, double(a)} * w.at(a, i) / r;
        }
        const cvec pr = dealias_product(ur_row, dr_row);
        const cvec pt = dealias_product(ut_row, th_row);
        for (int m = 0; m < Nt; ++m) {
            const int a = signed_wavenumber(m, Nt);
            out.at(a, i) = pr[m] + pt[m];
        }
    }
    out.enforce_hermitian();
    return out;
}

void axpy(RadialField& y, double a, const RadialField& x) {
    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

} // namespace

// ---------------------------------------------------------------------------
// DiskSolver

DiskSolver::DiskSolver(std::shared_ptr<const geometry::ScaledChart> chart,
                       std::vector<double> zgrid, std::vector<double> rgrid,
                       int n_theta, double nu, double dt)
    : chart_(std::move(chart)), zgrid_(std::move(zgrid)), rgrid_(std::move(rgrid)),
      n_theta_(n_theta), nu_(nu), dt_(dt),
      cut_(chart_->delta0(), chart_->rho0()) {
    if (dt <= 0.0) throw std::invalid_argument("DiskSolver: dt must be positive");
    const double lam = chart_->lambda();
    if (zgrid_.back() < chart_->strip_depth() - 1e-12)
        throw std::invalid_argument("DiskSolver: near grid must cover the cutoff strip");
    const double r_inner_support = 1.0 - (chart_->delta0() + chart_->rho0()) / lam;
    if (rgrid_.back() < r_inner_support)
        throw std::invalid_argument("DiskSolver: interior grid must cover supp(1 - cutoff)");
    near_ = std::make_unique<stokes::SemigroupStepper>(chart_, zgrid_, n_theta_, nu_,
                                                       lam * lam * dt_, true);
    // Crank-Nicolson radial diffusion per mode, Dirichlet 0 at the outer edge
    const int nr = static_cast<int>(rgrid_.size());
    interior_lu_.reserve(n_theta_);
    for (int m = 0; m < n_theta_; ++m) {
        const int a = std::abs(signed_wavenumber(m, n_theta_));
        banded::BandedLU A(nr, 1, 1);
        if (a == 0) {
            // regularity row: Laplacian of a smooth radial field at the center
            const double h = rgrid_[1] - rgrid_[0];
            A.at(0, 0) = 1.0 / dt_ + 2.0 * nu_ / (h * h);
            A.at(0, 1) = -2.0 * nu_ / (h * h);
        } else {
            A.at(0, 0) = 1.0;
        }
        for (int j = 1; j < nr - 1; ++j) {
            const double hm = rgrid_[j] - rgrid_[j - 1], hp = rgrid_[j + 1] - rgrid_[j];
            const double d2m = 2.0 / (hm * (hm + hp)), d2p = 2.0 / (hp * (hm + hp));
            const auto w1 = centered1(hm, hp);
            const double r = rgrid_[j];
            const double lm = d2m + w1.d1m / r;
            const double lc = -(d2m + d2p) + w1.d1c / r - double(a) * a / (r * r);
            const double lp = d2p + w1.d1p / r;
            A.at(j, j - 1) = -0.5 * nu_ * lm;
            A.at(j, j) = 1.0 / dt_ - 0.5 * nu_ * lc;
            A.at(j, j + 1) = -0.5 * nu_ * lp;
        }
        A.at(nr - 1, nr - 1) = 1.0;
        A.factor();
        interior_lu_.push_back(std::move(A));
    }
}

SolverState DiskSolver::split_initial(const std::function<double(double, double)>& omega0,
                                      double compat_tol) const {
    const double lam = chart_->lambda();
    const int nz = static_cast<int>(zgrid_.size());
    const int nr = static_cast<int>(rgrid_.size());

    std::vector<double> near_phys(static_cast<size_t>(nz) * n_theta_);
    for (int j = 0; j < nz; ++j) {
        const double r = 1.0 - zgrid_[j] / lam;
        const double phi = cut_(zgrid_[j]);
        for (int k = 0; k < n_theta_; ++k) {
            const double th = 2.0 * M_PI * k / n_theta_;
            near_phys[static_cast<size_t>(j) * n_theta_ + k] =
                phi * omega0(r * std::cos(th), r * std::sin(th));
        }
    }
    std::vector<double> far_phys(static_cast<size_t>(nr) * n_theta_);
    for (int i = 0; i < nr; ++i) {
        const double r = rgrid_[i];
        const double phi = cut_(lam * (1.0 - r));
        for (int k = 0; k < n_theta_; ++k) {
            const double th = 2.0 * M_PI * k / n_theta_;
            far_phys[static_cast<size_t>(i) * n_theta_ + k] =
                (1.0 - phi) * omega0(r * std::cos(th), r * std::sin(th));
        }
    }

    SolverState s{0.0, nu_,
                  ModeField::from_physical(chart_, zgrid_, n_theta_, near_phys),
                  RadialField::from_physical(rgrid_, n_theta_, far_phys), 0.0, false};

    // no-slip compatibility: the wall tangential velocity of mode alpha is
    // proportional to int_0^1 omega_alpha(r) r^{|alpha|+1} dr
    const int nq = 1024, na = std::max(n_theta_, 64);
    cvec moments(na, cplx{0, 0});
    std::vector<double> row(na);
    for (int q = 0; q <= nq; ++q) {
        const double r = double(q) / nq;
        // Simpson weights (nq is even)
        const double w =
            ((q == 0 || q == nq) ? 1.0 : (q % 2 ? 4.0 : 2.0)) / (3.0 * nq);
        for (int k = 0; k < na; ++k) {
            const double th = 2.0 * M_PI * k / na;
            row[k] = omega0(r * std::cos(th), r * std::sin(th));
        }
        const cvec mhat = fourier::forward_real(row);
        for (int m = 0; m < na; ++m) {
            const int a = std::abs(signed_wavenumber(m, na));
            moments[m] += w * mhat[m] * std::pow(r, a + 1);
        }
    }
    double worst = 0.0;
    for (int m = 0; m < na; ++m) worst = std::max(worst, std::abs(moments[m]));
    if (worst > compat_tol)
        throw IncompatibleDataError("split_initial: initial velocity does not vanish "
                                    "on the boundary (worst harmonic moment " +
                                    std::to_string(worst) + ")");

    // analyticity diagnostic: exponential decay rate of the wall-trace modes
    for (int k = 0; k < na; ++k) {
        const double th = 2.0 * M_PI * k / na;
        row[k] = omega0(std::cos(th), std::sin(th));
    }
    const cvec trace = fourier::forward_real(row);
    double sa = 0, sl = 0, saa = 0, sal = 0;
    int cnt = 0;
    for (int a = 1; a <= na / 2 - 1; ++a) {
        const double mag = std::abs(trace[storage_index(a, na)]);
        if (mag < 1e-13) continue;
        const double l = std::log(mag);
        sa += a;
        sl += l;
        saa += double(a) * a;
        sal += a * l;
        ++cnt;
    }
    if (cnt >= 2) {
        s.trace_decay = -(cnt * sal - sa * sl) / (cnt * saa - sa * sa);
        s.decay_warning = s.trace_decay < 0.25;
    } else {
        s.trace_decay = 50.0; // trace numerically zero or a single mode
    }
    return s;
}

elliptic::DiskVelocity DiskSolver::velocity(const SolverState& s) const {
    return elliptic::disk_biot_savart(s.omega_b, s.omega_i);
}

RadialField DiskSolver::nonlinear_interior(const elliptic::DiskVelocity& v,
                                           const RadialField& w) const {
    return advect_polar(v.u_r, v.u_t, w);
}

void DiskSolver::sources(const SolverState& s, const elliptic::DiskVelocity& v,
                         ModeField& f, RadialField& adv, cvec& g) const {
    const double lam = chart_->lambda();
    f = nonlinear_term(v.u_tau, v.u_n, s.omega_b); // = -lambda^{-2} u . grad omega^b
    adv = advect_polar(v.u_r, v.u_t, s.omega_i);   // = u . grad omega^i

    // boundary data: g_alpha = d/dz of the zero-Dirichlet potential of the
    // full advection term, evaluated at the wall
    ModeField rhs_near = f;
    rhs_near *= -(lam * lam); // back to physical u . grad omega^b
    const elliptic::DiskStream st = elliptic::disk_poisson(rhs_near, adv);
    const auto w0 = onesided_d1(zgrid_[0], zgrid_[1], zgrid_[2]);
    g.assign(n_theta_, cplx{0, 0});
    for (int m = 0; m < n_theta_; ++m) {
        const int a = signed_wavenumber(m, n_theta_);
        g[m] = w0[0] * st.phi_near.at(a, 0) + w0[1] * st.phi_near.at(a, 1) +
               w0[2] * st.phi_near.at(a, 2);
    }
}

cvec DiskSolver::boundary_forcing(const elliptic::DiskVelocity& v,
                                  const SolverState& s) const {
    ModeField f(chart_, zgrid_, n_theta_);
    RadialField adv(rgrid_, n_theta_);
    cvec g;
    sources(s, v, f, adv, g);
    return g;
}

RadialField DiskSolver::interior_step(const RadialField& w, const RadialField& src) const {
    const int nr = static_cast<int>(rgrid_.size());
    RadialField out(rgrid_, n_theta_);
    cvec rhs(nr);
    for (int m = 0; m < n_theta_; ++m) {
        const int a = std::abs(signed_wavenumber(m, n_theta_));
        const int as = signed_wavenumber(m, n_theta_);
        if (a == 0) {
            const double h = rgrid_[1] - rgrid_[0];
            const double l0 = -4.0 / (h * h);
            rhs[0] = w.at(as, 0) / dt_ +
                     0.5 * nu_ * (l0 * w.at(as, 0) - l0 * w.at(as, 1)) + src.at(as, 0);
        } else {
            rhs[0] = cplx{0, 0};
        }
        for (int j = 1; j < nr - 1; ++j) {
            const double hm = rgrid_[j] - rgrid_[j - 1], hp = rgrid_[j + 1] - rgrid_[j];
            const double d2m = 2.0 / (hm * (hm + hp)), d2p = 2.0 / (hp * (hm + hp));
            const auto w1 = centered1(hm, hp);
            const double r = rgrid_[j];
            const double lm = d2m + w1.d1m / r;
            const double lc = -(d2m + d2p) + w1.d1c / r - double(a) * a / (r * r);
            const double lp = d2p + w1.d1p / r;
            const cplx Lw = lm * w.at(as, j - 1) + lc * w.at(as, j) + lp * w.at(as, j + 1);
            rhs[j] = w.at(as, j) / dt_ + 0.5 * nu_ * Lw + src.at(as, j);
        }
        rhs[nr - 1] = cplx{0, 0};
        interior_lu_[m].solve(rhs);
        for (int i = 0; i < nr; ++i) out.at(as, i) = rhs[i];
    }
    return out;
}

double DiskSolver::cfl_number(const elliptic::DiskVelocity& v) const {
    const double lam = chart_->lambda();
    const int nz = static_cast<int>(zgrid_.size());
    const int nr = static_cast<int>(rgrid_.size());
    const std::vector<double> un = v.u_n.to_physical();
    const std::vector<double> ut = v.u_tau.to_physical();
    double rate = 0.0;
    const double h_s = 2.0 * M_PI / n_theta_; // physical arc spacing at r = 1
    for (int j = 0; j < nz; ++j) {
        const double hz =
            (j + 1 < nz ? zgrid_[j + 1] - zgrid_[j] : zgrid_[j] - zgrid_[j - 1]) / lam;
        const double J = 1.0 + lam * lam * zgrid_[j] * chart_->tilde_gamma(0.0);
        for (int k = 0; k < n_theta_; ++k) {
            const size_t id = static_cast<size_t>(j) * n_theta_ + k;
            rate = std::max(rate, std::abs(un[id]) / hz);
            rate = std::max(rate, std::abs(ut[id]) / (J * h_s));
        }
    }
    const std::vector<double> ur = v.u_r.to_physical();
    const std::vector<double> utp = v.u_t.to_physical();
    const double hr = rgrid_[1] - rgrid_[0];
    for (int i = 1; i < nr; ++i) {
        const double r = rgrid_[i];
        for (int k = 0; k < n_theta_; ++k) {
            const size_t id = static_cast<size_t>(i) * n_theta_ + k;
            rate = std::max(rate, std::abs(ur[id]) / hr);
            rate = std::max(rate, std::abs(utp[id]) / (r * h_s));
        }
    }
    return rate * dt_;
}

void DiskSolver::resync(SolverState& s) const {
    const double lam = chart_->lambda();
    const int nz = static_cast<int>(zgrid_.size());
    const int nr = static_cast<int>(rgrid_.size());
    ModeField nb(chart_, zgrid_, n_theta_);
    RadialField ni(rgrid_, n_theta_);
    const double zmax = zgrid_.back();
    for (int m = 0; m < n_theta_; ++m) {
        const int a = signed_wavenumber(m, n_theta_);
        for (int j = 0; j < nz; ++j) {
            const double r = 1.0 - zgrid_[j] / lam;
            const cplx total = s.omega_b.at(a, j) + s.omega_i.eval_mode(a, r);
            nb.at(a, j) = cut_(zgrid_[j]) * total;
        }
        for (int i = 0; i < nr; ++i) {
            const double zt = lam * (1.0 - rgrid_[i]);
            cplx total = s.omega_i.at(a, i);
            if (zt <= zmax) total += s.omega_b.eval_mode(a, zt);
            ni.at(a, i) = (1.0 - cut_(zt)) * total;
        }
    }
    nb.enforce_hermitian();
    ni.enforce_hermitian();
    s.omega_b = std::move(nb);
    s.omega_i = std::move(ni);
}

SolverState DiskSolver::step(const SolverState& s) const {
    const elliptic::DiskVelocity v1 = velocity(s);
    const double cfl = cfl_number(v1);
    if (cfl > 0.5)
        throw StepRejectedError("step: advective CFL " + std::to_string(cfl) +
                                    " exceeds 0.5",
                                0.4 * dt_ / cfl);

    ModeField f1(chart_, zgrid_, n_theta_);
    RadialField a1(rgrid_, n_theta_);
    cvec g1;
    sources(s, v1, f1, a1, g1);

    // predictor
    RadialField src1(rgrid_, n_theta_);
    for (size_t i = 0; i < src1.data.size(); ++i) src1.data[i] = -a1.data[i];
    SolverState sp{s.t + dt_, nu_, near_->step(s.omega_b, &g1, &f1),
                   interior_step(s.omega_i, src1), s.trace_decay, s.decay_warning};
    resync(sp);

    // corrector with trapezoidal sources
    const elliptic::DiskVelocity v2 = velocity(sp);
    ModeField f2(chart_, zgrid_, n_theta_);
    RadialField a2(rgrid_, n_theta_);
    cvec g2;
    sources(sp, v2, f2, a2, g2);
    f1 += f2;
    f1 *= 0.5;
    for (size_t i = 0; i < src1.data.size(); ++i)
        src1.data[i] = -0.5 * (a1.data[i] + a2.data[i]);

    // the boundary row is an algebraic constraint on the new iterate, so it
    // takes the end-of-step forcing; averaging it would drop an order in time
    SolverState out{s.t + dt_, nu_, near_->step(s.omega_b, &g2, &f1),
                    interior_step(s.omega_i, src1), s.trace_decay, s.decay_warning};
    resync(out);

    const double defect = blend_defect(out);
    double scale = 0.0;
    for (const cplx& c : out.omega_b.raw()) scale = std::max(scale, std::abs(c));
    for (const cplx& c : out.omega_i.data) scale = std::max(scale, std::abs(c));
    if (defect > 0.05 * (1.0 + scale))
        throw DesyncError("step: overlap representations disagree by " +
                          std::to_string(defect));
    return out;
}

double DiskSolver::kinetic_energy(const elliptic::DiskVelocity& v) const {
    const double lam = chart_->lambda();
    // split the area integral at an overlap radius covered by both grids
    const double r_split = std::min(0.7, rgrid_.back() - 2.0 * (rgrid_[1] - rgrid_[0]));
    const int nr = static_cast<int>(rgrid_.size());
    const int nz = static_cast<int>(zgrid_.size());
    double e = 0.0;
    for (int m = 0; m < n_theta_; ++m) {
        const int a = signed_wavenumber(m, n_theta_);
        std::vector<double> fr(nr), wr(nr);
        for (int i = 0; i < nr; ++i) {
            fr[i] = std::norm(v.u_r.at(a, i)) + std::norm(v.u_t.at(a, i));
            wr[i] = rgrid_[i];
        }
        e += 2.0 * M_PI * clipped_trapz(rgrid_, fr, wr, r_split);
        std::vector<double> fz(nz), wz(nz);
        for (int j = 0; j < nz; ++j) {
            fz[j] = std::norm(v.u_tau.at(a, j)) + std::norm(v.u_n.at(a, j));
            wz[j] = 1.0 + lam * lam * zgrid_[j] * chart_->tilde_gamma(0.0);
        }
        e += (2.0 * M_PI / lam) * clipped_trapz(zgrid_, fz, wz, lam * (1.0 - r_split));
    }
    return e;
}

double DiskSolver::enstrophy(const SolverState& s) const {
    const double lam = chart_->lambda();
    const double r_split = std::min(0.7, rgrid_.back() - 2.0 * (rgrid_[1] - rgrid_[0]));
    const int nr = static_cast<int>(rgrid_.size());
    const int nz = static_cast<int>(zgrid_.size());
    const double zmax = zgrid_.back();
    double e = 0.0;
    for (int m = 0; m < n_theta_; ++m) {
        const int a = signed_wavenumber(m, n_theta_);
        std::vector<double> fr(nr), wr(nr);
        for (int i = 0; i < nr; ++i) {
            const double zt = lam * (1.0 - rgrid_[i]);
            cplx total = s.omega_i.at(a, i);
            if (zt <= zmax) total += s.omega_b.eval_mode(a, zt);
            fr[i] = std::norm(total);
            wr[i] = rgrid_[i];
        }
        e += 2.0 * M_PI * clipped_trapz(rgrid_, fr, wr, r_split);
        std::vector<double> fz(nz), wz(nz);
        for (int j = 0; j < nz; ++j) {
            const double r = 1.0 - zgrid_[j] / lam;
            const cplx total = s.omega_b.at(a, j) + s.omega_i.eval_mode(a, r);
            fz[j] = std::norm(total);
            wz[j] = 1.0 + lam * lam * zgrid_[j] * chart_->tilde_gamma(0.0);
        }
        e += (2.0 * M_PI / lam) * clipped_trapz(zgrid_, fz, wz, lam * (1.0 - r_split));
    }
    return e;
}

double DiskSolver::circulation(const SolverState& s) const {
    const double lam = chart_->lambda();
    const double r_split = std::min(0.7, rgrid_.back() - 2.0 * (rgrid_[1] - rgrid_[0]));
    const int nr = static_cast<int>(rgrid_.size());
    const int nz = static_cast<int>(zgrid_.size());
    const double zmax = zgrid_.back();
    std::vector<double> fr(nr), wr(nr);
    for (int i = 0; i < nr; ++i) {
        const double zt = lam * (1.0 - rgrid_[i]);
        cplx total = s.omega_i.at(0, i);
        if (zt <= zmax) total += s.omega_b.eval_mode(0, zt);
        fr[i] = total.real();
        wr[i] = rgrid_[i];
    }
    double c = 2.0 * M_PI * clipped_trapz(rgrid_, fr, wr, r_split);
    std::vector<double> fz(nz), wz(nz);
    for (int j = 0; j < nz; ++j) {
        const double r = 1.0 - zgrid_[j] / lam;
        const cplx total = s.omega_b.at(0, j) + s.omega_i.eval_mode(0, r);
        fz[j] = total.real();
        wz[j] = 1.0 + lam * lam * zgrid_[j] * chart_->tilde_gamma(0.0);
    }
    c += (2.0 * M_PI / lam) * clipped_trapz(zgrid_, fz, wz, lam * (1.0 - r_split));
    return c;
}

double DiskSolver::wall_slip(const elliptic::DiskVelocity& v) const {
    cvec row(v.u_tau.raw().begin(), v.u_tau.raw().begin() + n_theta_);
    return max_abs(fourier::inverse_real(row));
}

double DiskSolver::blend_defect(const SolverState& s) const {
    const double lam = chart_->lambda();
    const double r_lo = 1.0 - zgrid_.back() / lam + 3.0 * (rgrid_[1] - rgrid_[0]);
    const double r_hi = rgrid_.back() - 3.0 * (rgrid_[1] - rgrid_[0]);
    double defect = 0.0;
    for (int q = 0; q < 9; ++q) {
        const double r = r_lo + (r_hi - r_lo) * (q + 0.5) / 9.0;
        const double zt = lam * (1.0 - r);
        const double phi = cut_(zt);
        for (int m = 0; m < n_theta_; ++m) {
            const int a = signed_wavenumber(m, n_theta_);
            const cplx wb = s.omega_b.eval_mode(a, zt);
            const cplx wi = s.omega_i.eval_mode(a, r);
            const cplx total = wb + wi;
            defect = std::max(defect, std::abs(wb - phi * total) +
                                          std::abs(wi - (1.0 - phi) * total));
        }
    }
    return defect;
}

fields::InteriorField DiskSolver::sample_interior(const SolverState& s, double h,
                                                  double d_min) const {
    const double lam = chart_->lambda();
    const double zmax = zgrid_.back();
    const double sp = chart_->scaled_period();
    return fields::InteriorField::covering(
        chart_->curve(), h, d_min, [&](double x, double y) {
            const double r = std::hypot(x, y);
            double th = std::atan2(y, x);
            if (th < 0) th += 2.0 * M_PI;
            double val = s.omega_i.eval(r, th);
            const double zt = lam * (1.0 - r);
            if (zt <= zmax) val += s.omega_b.eval(zt, std::fmod(lam * th, sp));
            return val;
        });
}

// ---------------------------------------------------------------------------
// StripSolver

StripSolver::StripSolver(std::shared_ptr<const geometry::ScaledChart> chart,
                         std::vector<double> zgrid, int n_theta, double nu, double dt)
    : chart_(std::move(chart)), zgrid_(std::move(zgrid)), n_theta_(n_theta), nu_(nu),
      dt_(dt) {
    if (chart_->curve().kind() != geometry::CurveKind::FlatStrip)
        throw elliptic::UnsupportedDomainError("StripSolver: flat strips only");
    const double lam = chart_->lambda();
    near_ = std::make_unique<stokes::SemigroupStepper>(chart_, zgrid_, n_theta_, nu_,
                                                       lam * lam * dt_, false);
}

namespace {
cvec strip_forcing(const geometry::ScaledChart& chart, const std::vector<double>& zg,
                   const ModeField& f) {
    // g = d/dz at the wall of the zero-Dirichlet potential of u . grad omega
    const double lam2 = chart.lambda() * chart.lambda();
    ModeField adv = f;
    adv *= -lam2;
    const elliptic::StripVelocity pot = elliptic::strip_biot_savart(adv);
    const auto w0 = onesided_d1(zg[0], zg[1], zg[2]);
    const int Nt = f.n_theta();
    cvec g(Nt);
    for (int m = 0; m < Nt; ++m) {
        const int a = signed_wavenumber(m, Nt);
        g[m] = w0[0] * pot.phi.at(a, 0) + w0[1] * pot.phi.at(a, 1) +
               w0[2] * pot.phi.at(a, 2);
    }
    return g;
}
} // namespace

ModeField StripSolver::step(const ModeField& w) const {
    const elliptic::StripVelocity v1 = elliptic::strip_biot_savart(w);
    ModeField f1 = nonlinear_term(v1.u_tau, v1.u_n, w);
    cvec g1 = strip_forcing(*chart_, zgrid_, f1);

    const ModeField wp = near_->step(w, &g1, &f1);
    const elliptic::StripVelocity v2 = elliptic::strip_biot_savart(wp);
    const ModeField f2 = nonlinear_term(v2.u_tau, v2.u_n, wp);
    const cvec g2 = strip_forcing(*chart_, zgrid_, f2);

    f1 += f2;
    f1 *= 0.5;
    // end-of-step boundary forcing: the constraint row acts on the new iterate
    ModeField out = near_->step(w, &g2, &f1);
    out.enforce_hermitian();
    return out;
}

// ---------------------------------------------------------------------------
// Euler reference on the full disk

PolarVelocity polar_velocity(const RadialField& omega) {
    const auto& rg = omega.rgrid;
    const int Nt = omega.n_theta, nr = omega.n_r();
    PolarVelocity v{RadialField(rg, Nt), RadialField(rg, Nt)};
    cvec rhs(nr);
    for (int m = 0; m < Nt; ++m) {
        const int a = signed_wavenumber(m, Nt);
        for (int i = 0; i < nr; ++i) rhs[i] = omega.at(a, i);
        const cvec phi = elliptic::solve_radial_poisson(a, rg, rhs, cplx{0, 0});
        const cvec d = col_d1(rg, phi);
        for (int i = 0; i < nr; ++i) {
            v.u_t.at(a, i) = -d[i];
            if (i == 0)
                v.u_r.at(a, i) =
                    (std::abs(a) == 1) ? cplx{0.0, double(a)} * d[0] : cplx{0, 0};
            else
                v.u_r.at(a, i) = cplx{0.0, double(a)} * phi[i] / rg[i];
        }
    }
    return v;
}

namespace {
double grad_u_estimate(const PolarVelocity& v) {
    const auto& rg = v.u_r.rgrid;
    const int Nt = v.u_r.n_theta, nr = v.u_r.n_r();
    RadialField dur(rg, Nt), dut(rg, Nt);
    cvec col(nr);
    for (int m = 0; m < Nt; ++m) {
        const int a = signed_wavenumber(m, Nt);
        for (int i = 0; i < nr; ++i) col[i] = v.u_r.at(a, i);
        cvec d = col_d1(rg, col);
        for (int i = 0; i < nr; ++i) dur.at(a, i) = d[i];
        for (int i = 0; i < nr; ++i) col[i] = v.u_t.at(a, i);
        d = col_d1(rg, col);
        for (int i = 0; i < nr; ++i) dut.at(a, i) = d[i];
    }
    const std::vector<double> p1 = dur.to_physical(), p2 = dut.to_physical();
    const std::vector<double> ur = v.u_r.to_physical(), ut = v.u_t.to_physical();
    double g = 0.0;
    for (int i = 1; i < nr; ++i) {
        const double r = rg[i];
        for (int m = 0; m < Nt; ++m) {
            const size_t id = static_cast<size_t>(i) * Nt + m;
            g = std::max(g, std::abs(p1[id]) + std::abs(p2[id]) +
                                (std::abs(ur[id]) + std::abs(ut[id])) / r);
        }
    }
    return g;
}
} // namespace

EulerHistory euler_reference(const RadialField& omega0, double T, int steps,
                             int snapshots) {
    if (steps <= 0 || T <= 0) throw std::invalid_argument("euler_reference: T, steps > 0");
    const double dt = T / steps;
    auto rate = [](const RadialField& w) {
        const PolarVelocity v = polar_velocity(w);
        RadialField r = advect_polar(v.u_r, v.u_t, w);
        for (auto& c : r.data) c = -c;
        return r;
    };
    EulerHistory h;
    RadialField w = omega0;
    const int every = std::max(1, steps / std::max(1, snapshots));
    auto record = [&](double t) {
        h.times.push_back(t);
        h.omega.push_back(w);
        h.grad_u_inf.push_back(grad_u_estimate(polar_velocity(w)));
        if (h.grad_u_inf.back() > 1e6)
            throw std::runtime_error("euler_reference: velocity gradient blow-up");
    };
    record(0.0);
    for (int n = 1; n <= steps; ++n) {
        const RadialField k1 = rate(w);
        RadialField w2 = w;
        axpy(w2, 0.5 * dt, k1);
        const RadialField k2 = rate(w2);
        RadialField w3 = w;
        axpy(w3, 0.5 * dt, k2);
        const RadialField k3 = rate(w3);
        RadialField w4 = w;
        axpy(w4, dt, k3);
        const RadialField k4 = rate(w4);
        axpy(w, dt / 6.0, k1);
        axpy(w, dt / 3.0, k2);
        axpy(w, dt / 3.0, k3);
        axpy(w, dt / 6.0, k4);
        w.enforce_hermitian();
        if (n % every == 0 || n == steps) record(n * dt);
    }
    return h;
}

double preset_vorticity(double x, double y, double amp) {
    const double r2 = x * x + y * y;
    const double s = 1.0 - r2;
    return 1.0 - 2.0 * r2 + amp * s * s * (1.0 - 2.0 * r2) * (x * x - y * y);
}

} // namespace vortexlab::solver
