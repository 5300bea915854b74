#include "vortexlab/elliptic.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vortexlab/banded.hpp"

namespace vortexlab::elliptic {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// second-derivative and first-derivative 3-point weights on a nonuniform grid
struct CenteredWeights {
    double d2m, d2c, d2p; // phi''
    double d1m, d1c, d1p; // phi'
};
CenteredWeights centered(double hm, double hp) {
    CenteredWeights w;
    w.d2m = 2.0 / (hm * (hm + hp));
    w.d2c = -2.0 / (hm * hp);
    w.d2p = 2.0 / (hp * (hm + hp));
    w.d1m = -hp / (hm * (hm + hp));
    w.d1c = (hp - hm) / (hm * hp);
    w.d1p = hm / (hp * (hm + hp));
    return w;
}
} // namespace

std::array<double, 3> onesided_d1(double x0, double x1, double x2) {
    return {(2 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)),
            (x0 - x2) / ((x1 - x0) * (x1 - x2)),
            (x0 - x1) / ((x2 - x0) * (x2 - x1))};
}

// ---------------------------------------------------------------------------
// per-mode half-strip solves

namespace {
// assemble the (d^2/dz^2 - k^2) problem rows through a generic setter
template <typename Add>
void assemble_mode_rows(const std::vector<double>& zg, const ModeEllipticProblem& p,
                        Add add, cvec& rhs) {
    const int N = static_cast<int>(zg.size()) - 1;
    rhs.assign(N + 1, cplx{0, 0});
    add(0, 0, 1.0);
    rhs[0] = p.bc;
    for (int j = 1; j < N; ++j) {
        const auto w = centered(zg[j] - zg[j - 1], zg[j + 1] - zg[j]);
        add(j, j - 1, w.d2m);
        add(j, j, w.d2c - p.k * p.k);
        add(j, j + 1, w.d2p);
        rhs[j] = p.rhs[j];
    }
    const auto d = onesided_d1(zg[N], zg[N - 1], zg[N - 2]);
    if (p.k != 0.0) {
        // Robin decay closure: phi' + |k| phi = 0
        add(N, N, d[0] + std::abs(p.k));
        add(N, N - 1, d[1]);
        add(N, N - 2, d[2]);
        rhs[N] = 0.0;
    } else {
        add(N, N, d[0]);
        add(N, N - 1, d[1]);
        add(N, N - 2, d[2]);
        rhs[N] = p.far_flux;
    }
}
} // namespace

cvec solve_mode(const std::vector<double>& zg, const ModeEllipticProblem& p) {
    const int n = static_cast<int>(zg.size());
    if (n < 4) throw std::invalid_argument("solve_mode: need at least 4 nodes");
    if (p.rhs.size() != zg.size()) throw std::invalid_argument("solve_mode: rhs size");
    banded::BandedLU A(n, 2, 2);
    cvec rhs;
    assemble_mode_rows(zg, p, [&](int i, int j, double v) { A.at(i, j) = v; }, rhs);
    A.factor();
    A.solve(rhs);
    return rhs;
}

cvec solve_mode_dense(const std::vector<double>& zg, const ModeEllipticProblem& p) {
    // Eigen sparse LU of the same band-structured assembly: an independent
    // factorization path that stays O(n) so high resolutions remain cheap.
    const int n = static_cast<int>(zg.size());
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(3 * static_cast<size_t>(n));
    cvec rhs;
    assemble_mode_rows(
        zg, p, [&](int i, int j, double v) { trip.emplace_back(i, j, cplx(v, 0.0)); },
        rhs);
    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_mode_dense: factorization failed");
    Eigen::VectorXcd b(n);
    for (int i = 0; i < n; ++i) b(i) = rhs[i];
    const Eigen::VectorXcd x = lu.solve(b);
    cvec out(n);
    for (int i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

double kernel_K(double k, double y, double z) {
    const double a = std::abs(k);
    return -(std::exp(-a * std::abs(z - y)) - std::exp(-a * (y + z))) / (2.0 * a);
}

cvec solve_mode_kernel(const std::vector<double>& zg, const ModeEllipticProblem& p) {
    if (p.k == 0.0)
        throw std::invalid_argument("solve_mode_kernel: k = 0 has no decaying kernel");
    const int n = static_cast<int>(zg.size());
    const double a = std::abs(p.k);
    cvec out(n);
    for (int i = 0; i < n; ++i) {
        cplx acc = p.bc * std::exp(-a * zg[i]); // homogeneous Dirichlet lift
        for (int j = 0; j < n; ++j) {
            // trapezoid weight
            double w = 0.0;
            if (j > 0) w += 0.5 * (zg[j] - zg[j - 1]);
            if (j + 1 < n) w += 0.5 * (zg[j + 1] - zg[j]);
            acc += w * kernel_K(a, zg[j], zg[i]) * p.rhs[j];
        }
        out[i] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// curved per-mode solve

namespace {
template <typename Add>
void assemble_curved_rows(const geometry::ScaledChart& chart, int alpha,
                          const std::vector<double>& zg, Add add) {
    const int N = static_cast<int>(zg.size()) - 1;
    const double kap = chart.mode_wavenumber(alpha);
    const double lam2 = chart.lambda() * chart.lambda();
    add(0, 0, cplx{1.0, 0.0});
    for (int j = 1; j < N; ++j) {
        const auto w = centered(zg[j] - zg[j - 1], zg[j + 1] - zg[j]);
        const auto rc = chart.remainder_coefficients(zg[j], 0.0);
        const cplx diag = cplx{w.d2c - kap * kap + lam2 * (-rc.m * kap * kap), 0.0} +
                          cplx{lam2 * rc.cz * w.d1c, lam2 * rc.ct * kap};
        add(j, j - 1, cplx{w.d2m + lam2 * rc.cz * w.d1m, 0.0});
        add(j, j, diag);
        add(j, j + 1, cplx{w.d2p + lam2 * rc.cz * w.d1p, 0.0});
    }
    add(N, N, cplx{1.0, 0.0});
}
} // namespace

cvec solve_mode_curved(const geometry::ScaledChart& chart, int alpha,
                       const std::vector<double>& zg, const cvec& rhs, cplx bc0,
                       cplx bc_outer, bool fixed_point, int* iterations,
                       double* contraction) {
    if (!chart.constant_curvature())
        throw UnsupportedDomainError("solve_mode_curved: theta-dependent curvature");
    const int n = static_cast<int>(zg.size());
    const int N = n - 1;
    auto fill_rhs = [&](cvec& b) {
        b = rhs;
        b[0] = bc0;
        b[N] = bc_outer;
    };
    if (!fixed_point) {
        banded::BandedLU A(n, 1, 1);
        assemble_curved_rows(chart, alpha, zg, [&](int i, int j, cplx v) { A.at(i, j) = v; });
        A.factor();
        cvec b;
        fill_rhs(b);
        A.solve(b);
        if (iterations) *iterations = 1;
        if (contraction) *contraction = 0.0;
        return b;
    }
    // flat solve, curvature terms iterated as sources
    const double kap = chart.mode_wavenumber(alpha);
    const double lam2 = chart.lambda() * chart.lambda();
    banded::BandedLU F(n, 1, 1);
    F.at(0, 0) = 1.0;
    for (int j = 1; j < N; ++j) {
        const auto w = centered(zg[j] - zg[j - 1], zg[j + 1] - zg[j]);
        F.at(j, j - 1) = w.d2m;
        F.at(j, j) = w.d2c - kap * kap;
        F.at(j, j + 1) = w.d2p;
    }
    F.at(N, N) = 1.0;
    F.factor();
    cvec phi(n, cplx{0, 0}), prev_update(n);
    double prev_norm = -1.0, ratio = 0.0;
    int it = 0;
    for (; it < 50; ++it) {
        cvec b;
        fill_rhs(b);
        // subtract lambda^2 R phi (interior rows only)
        for (int j = 1; j < N; ++j) {
            const auto w = centered(zg[j] - zg[j - 1], zg[j + 1] - zg[j]);
            const auto rc = chart.remainder_coefficients(zg[j], 0.0);
            const cplx dphi = w.d1m * phi[j - 1] + w.d1c * phi[j] + w.d1p * phi[j + 1];
            const cplx Rphi = cplx{-rc.m * kap * kap, 0.0} * phi[j] + rc.cz * dphi +
                              cplx{0.0, rc.ct * kap} * phi[j];
            b[j] -= lam2 * Rphi;
        }
        F.solve(b);
        double upd = 0.0, scale = 0.0;
        for (int j = 0; j < n; ++j) {
            upd = std::max(upd, std::abs(b[j] - phi[j]));
            scale = std::max(scale, std::abs(b[j]));
        }
        phi = std::move(b);
        // record the first update ratio: later ones sit on the roundoff floor
        const double cur = (prev_norm > 0.0 && upd > 0.0) ? upd / prev_norm : 0.0;
        if (ratio == 0.0) ratio = cur;
        if (it >= 1 && prev_norm > 0.0 && upd > 1e-13 * scale && cur > 1.0)
            throw LambdaTooLargeError("solve_mode_curved: lambda^2 R iteration diverges");
        prev_norm = upd;
        if (upd <= 1e-10 * std::max(scale, 1e-300)) break;
    }
    if (it == 50)
        throw LambdaTooLargeError("solve_mode_curved: fixed point did not converge");
    if (iterations) *iterations = it + 1;
    if (contraction) *contraction = ratio;
    return phi;
}

// ---------------------------------------------------------------------------
// RadialField

RadialField::RadialField(std::vector<double> rg, int nt) : rgrid(std::move(rg)), n_theta(nt) {
    data.assign(rgrid.size() * static_cast<size_t>(nt), cplx{0, 0});
}

RadialField RadialField::from_physical(std::vector<double> rg, int nt,
                                       std::span<const double> phys) {
    RadialField f(std::move(rg), nt);
    if (phys.size() != f.data.size())
        throw std::invalid_argument("RadialField::from_physical: size mismatch");
    for (int i = 0; i < f.n_r(); ++i) {
        cvec row = fourier::forward_real(
            phys.subspan(static_cast<size_t>(i) * nt, static_cast<size_t>(nt)));
        std::copy(row.begin(), row.end(), f.data.begin() + static_cast<size_t>(i) * nt);
    }
    f.enforce_hermitian();
    return f;
}

cplx& RadialField::at(int alpha, int i) {
    return data[static_cast<size_t>(i) * n_theta + fourier::storage_index(alpha, n_theta)];
}
cplx RadialField::at(int alpha, int i) const {
    return data[static_cast<size_t>(i) * n_theta + fourier::storage_index(alpha, n_theta)];
}

cplx RadialField::eval_mode(int alpha, double r) const {
    if (r > rgrid.back() + 1e-12) return cplx{0, 0};
    const int n = n_r();
    int j = static_cast<int>(std::upper_bound(rgrid.begin(), rgrid.end(), r) -
                             rgrid.begin()) - 1;
    j = std::clamp(j, 0, n - 2);
    const int lo = std::clamp(j - 1, 0, n - 4);
    const int m = fourier::storage_index(alpha, n_theta);
    cplx acc{0, 0};
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (r - rgrid[lo + b]) / (rgrid[lo + a] - rgrid[lo + b]);
        acc += data[static_cast<size_t>(lo + a) * n_theta + m] * w;
    }
    return acc;
}

double RadialField::eval(double r, double theta) const {
    cvec row(n_theta);
    for (int m = 0; m < n_theta; ++m)
        row[m] = eval_mode(fourier::signed_wavenumber(m, n_theta), r);
    double t = theta / kTwoPi;
    return fourier::eval_trig_real(row, t - std::floor(t));
}

std::vector<double> RadialField::to_physical() const {
    std::vector<double> out(data.size());
    for (int i = 0; i < n_r(); ++i) {
        std::span<const cplx> row(data.data() + static_cast<size_t>(i) * n_theta,
                                  static_cast<size_t>(n_theta));
        std::vector<double> p = fourier::inverse_real(row);
        std::copy(p.begin(), p.end(), out.begin() + static_cast<size_t>(i) * n_theta);
    }
    return out;
}

void RadialField::enforce_hermitian() {
    for (int i = 0; i < n_r(); ++i) {
        cplx* row = data.data() + static_cast<size_t>(i) * n_theta;
        for (int a = 1; a < (n_theta + 1) / 2; ++a) {
            const int ip = fourier::storage_index(a, n_theta);
            const int im = fourier::storage_index(-a, n_theta);
            const cplx avg = 0.5 * (row[ip] + std::conj(row[im]));
            row[ip] = avg;
            row[im] = std::conj(avg);
        }
        row[0] = cplx{row[0].real(), 0.0};
        if (n_theta % 2 == 0) {
            const int iny = n_theta / 2;
            row[iny] = cplx{row[iny].real(), 0.0};
        }
    }
}

// ---------------------------------------------------------------------------
// radial Poisson

namespace {
template <typename Add>
void assemble_radial_rows(int n, const std::vector<double>& rg, Add add) {
    const int N = static_cast<int>(rg.size()) - 1;
    if (n == 0) {
        // regularity: Delta phi(0) ~ 4 (phi_1 - phi_0)/h^2
        const double h = rg[1] - rg[0];
        add(0, 0, -4.0 / (h * h));
        add(0, 1, 4.0 / (h * h));
    } else {
        add(0, 0, 1.0);
    }
    for (int j = 1; j < N; ++j) {
        const auto w = centered(rg[j] - rg[j - 1], rg[j + 1] - rg[j]);
        const double r = rg[j];
        add(j, j - 1, w.d2m + w.d1m / r);
        add(j, j, w.d2c + w.d1c / r - static_cast<double>(n) * n / (r * r));
        add(j, j + 1, w.d2p + w.d1p / r);
    }
    add(N, N, 1.0);
}
} // namespace

cvec solve_radial_poisson(int n, const std::vector<double>& rg, const cvec& rhs,
                          cplx bc_outer) {
    const int sz = static_cast<int>(rg.size());
    banded::BandedLU A(sz, 1, 1);
    assemble_radial_rows(std::abs(n), rg, [&](int i, int j, double v) { A.at(i, j) = v; });
    A.factor();
    cvec b = rhs;
    if (std::abs(n) > 0) b[0] = 0.0;
    b[sz - 1] = bc_outer;
    A.solve(b);
    return b;
}

// ---------------------------------------------------------------------------
// disk Poisson via overlapping Schwarz

DiskStream disk_poisson(const fields::ModeField& omega_b, const RadialField& omega_i,
                        double tol, int cap) {
    const auto& chart = omega_b.chart();
    if (chart.curve().kind() != geometry::CurveKind::Circle ||
        std::abs(chart.curve().period() - kTwoPi) > 1e-12)
        throw UnsupportedDomainError("disk_poisson: unit disk charts only");
    const double lam = chart.lambda();
    const auto& zg = omega_b.zgrid();
    const auto& rg = omega_i.rgrid;
    const int Nt = omega_b.n_theta();
    if (omega_i.n_theta != Nt)
        throw std::invalid_argument("disk_poisson: mode count mismatch");
    const double r_out = rg.back();            // interior outer radius
    const double r_edge = 1.0 - zg.back() / lam; // chart inner radius
    if (r_edge >= r_out - 1e-12)
        throw std::invalid_argument("disk_poisson: no overlap between subdomains");

    DiskStream s{fields::ModeField(omega_b.chart_ptr(), zg, Nt),
                 RadialField(rg, Nt), {}};
    const int nz = static_cast<int>(zg.size()), nr = static_cast<int>(rg.size());

    // prefactor per-mode operators
    std::vector<banded::BandedLU> Anear, Afar;
    Anear.reserve(Nt);
    Afar.reserve(Nt);
    for (int m = 0; m < Nt; ++m) {
        const int a = fourier::signed_wavenumber(m, Nt);
        banded::BandedLU An(nz, 1, 1);
        assemble_curved_rows(chart, a, zg, [&](int i, int j, cplx v) { An.at(i, j) = v; });
        An.factor();
        Anear.push_back(std::move(An));
        banded::BandedLU Af(nr, 1, 1);
        assemble_radial_rows(std::abs(a), rg, [&](int i, int j, double v) { Af.at(i, j) = v; });
        Af.factor();
        Afar.push_back(std::move(Af));
    }

    // total vorticity on each grid (the other representation interpolated in)
    std::vector<cvec> rhs_near(Nt, cvec(nz)), rhs_far(Nt, cvec(nr));
    const double lam2 = lam * lam;
    for (int m = 0; m < Nt; ++m) {
        const int a = fourier::signed_wavenumber(m, Nt);
        for (int j = 0; j < nz; ++j) {
            const double r = 1.0 - zg[j] / lam;
            cplx w = omega_b.at(a, j);
            if (r <= r_out) w += omega_i.eval_mode(a, r);
            // chart solve works on (Lap_tilde + lam^2 R) phi = omega / lam^2
            rhs_near[m][j] = w / lam2;
        }
        for (int i = 0; i < nr; ++i) {
            cplx w = omega_i.at(a, i);
            const double zt = lam * (1.0 - rg[i]);
            if (zt <= zg.back() + 1e-15 && rg[i] > 0.0) w += omega_b.eval_mode(a, zt);
            rhs_far[m][i] = w;
        }
    }

    // alternating Schwarz sweeps
    double update = 1e300;
    int it = 0;
    std::vector<cvec> near(Nt, cvec(nz, cplx{0, 0})), far(Nt, cvec(nr, cplx{0, 0}));
    for (; it < cap && update > tol; ++it) {
        update = 0.0;
        for (int m = 0; m < Nt; ++m) {
            const int a = fourier::signed_wavenumber(m, Nt);
            // near subdomain: Dirichlet 0 at the wall, interior value at the edge
            // interpolate current far solution at the chart's inner edge
            cplx bc_outer{0, 0};
            {
                int j = static_cast<int>(std::upper_bound(rg.begin(), rg.end(), r_edge) -
                                         rg.begin()) - 1;
                j = std::clamp(j, 0, nr - 2);
                const int lo = std::clamp(j - 1, 0, nr - 4);
                for (int q = 0; q < 4; ++q) {
                    double w = 1.0;
                    for (int b = 0; b < 4; ++b)
                        if (b != q) w *= (r_edge - rg[lo + b]) / (rg[lo + q] - rg[lo + b]);
                    bc_outer += far[m][lo + q] * w;
                }
            }
            cvec bn = rhs_near[m];
            bn[0] = 0.0;
            bn[nz - 1] = bc_outer;
            Anear[m].solve(bn);
            for (int j = 0; j < nz; ++j)
                update = std::max(update, std::abs(bn[j] - near[m][j]));
            near[m] = std::move(bn);

            // far subdomain: Dirichlet at r_out from the chart solution
            const double zt_out = lam * (1.0 - r_out);
            cplx bc_far{0, 0};
            {
                const int n = nz;
                int j = static_cast<int>(std::upper_bound(zg.begin(), zg.end(), zt_out) -
                                         zg.begin()) - 1;
                j = std::clamp(j, 0, n - 2);
                const int lo = std::clamp(j - 1, 0, n - 4);
                for (int q = 0; q < 4; ++q) {
                    double w = 1.0;
                    for (int b = 0; b < 4; ++b)
                        if (b != q) w *= (zt_out - zg[lo + b]) / (zg[lo + q] - zg[lo + b]);
                    bc_far += near[m][lo + q] * w;
                }
            }
            cvec bf = rhs_far[m];
            if (std::abs(a) > 0) bf[0] = 0.0;
            bf[nr - 1] = bc_far;
            Afar[m].solve(bf);
            for (int i = 0; i < nr; ++i)
                update = std::max(update, std::abs(bf[i] - far[m][i]));
            far[m] = std::move(bf);
        }
    }
    s.schwarz.iterations = it;
    s.schwarz.last_update = update;

    for (int m = 0; m < Nt; ++m) {
        const int a = fourier::signed_wavenumber(m, Nt);
        for (int j = 0; j < nz; ++j) s.phi_near.at(a, j) = near[m][j];
        for (int i = 0; i < nr; ++i) s.phi_far.at(a, i) = far[m][i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// velocity recovery

namespace {
// spectral-in-theta is exact per mode; z-derivative by centered 3-point
cvec column_derivative(const std::vector<double>& zg, const cvec& col) {
    const int n = static_cast<int>(zg.size());
    cvec d(n);
    {
        const auto w = onesided_d1(zg[0], zg[1], zg[2]);
        d[0] = w[0] * col[0] + w[1] * col[1] + w[2] * col[2];
    }
    for (int j = 1; j < n - 1; ++j) {
        const auto w = centered(zg[j] - zg[j - 1], zg[j + 1] - zg[j]);
        d[j] = w.d1m * col[j - 1] + w.d1c * col[j] + w.d1p * col[j + 1];
    }
    {
        const auto w = onesided_d1(zg[n - 1], zg[n - 2], zg[n - 3]);
        d[n - 1] = w[0] * col[n - 1] + w[1] * col[n - 2] + w[2] * col[n - 3];
    }
    return d;
}
} // namespace

DiskVelocity disk_biot_savart(const fields::ModeField& omega_b,
                              const RadialField& omega_i) {
    DiskStream s = disk_poisson(omega_b, omega_i);
    const auto& chart = omega_b.chart();
    const double lam = chart.lambda();
    const auto& zg = omega_b.zgrid();
    const auto& rg = omega_i.rgrid;
    const int Nt = omega_b.n_theta();
    const int nz = static_cast<int>(zg.size()), nr = static_cast<int>(rg.size());

    DiskVelocity v{fields::ModeField(omega_b.chart_ptr(), zg, Nt),
                   fields::ModeField(omega_b.chart_ptr(), zg, Nt),
                   RadialField(rg, Nt), RadialField(rg, Nt), std::move(s)};

    for (int m = 0; m < Nt; ++m) {
        const int a = fourier::signed_wavenumber(m, Nt);
        const double kap = chart.mode_wavenumber(a);
        cvec col(nz);
        for (int j = 0; j < nz; ++j) col[j] = v.stream.phi_near.at(a, j);
        cvec d = column_derivative(zg, col);
        for (int j = 0; j < nz; ++j) {
            const double J = 1.0 + lam * lam * zg[j] * chart.tilde_gamma(0.0);
            v.u_tau.at(a, j) = lam * d[j];                       // u.tau = d_z phi
            v.u_n.at(a, j) = -lam / J * cplx{0.0, kap} * col[j]; // -(1/J) d_theta phi
        }
        // interior polar components
        cvec colr(nr);
        for (int i = 0; i < nr; ++i) colr[i] = v.stream.phi_far.at(a, i);
        cvec dr = column_derivative(rg, colr);
        for (int i = 0; i < nr; ++i) {
            const double r = rg[i];
            v.u_t.at(a, i) = -dr[i];
            if (i == 0) {
                // u_r(0): i a phi / r -> i a phi'(0); nonzero only for |a| = 1
                v.u_r.at(a, i) = (std::abs(a) == 1) ? cplx{0.0, double(a)} * dr[0]
                                                    : cplx{0, 0};
            } else {
                v.u_r.at(a, i) = cplx{0.0, double(a)} * colr[i] / r;
            }
        }
    }
    return v;
}

StripVelocity strip_biot_savart(const fields::ModeField& omega_b) {
    const auto& chart = omega_b.chart();
    if (chart.curve().kind() != geometry::CurveKind::FlatStrip)
        throw UnsupportedDomainError("strip_biot_savart: flat strips only");
    const auto& zg = omega_b.zgrid();
    const int Nt = omega_b.n_theta();
    const int nz = static_cast<int>(zg.size());
    const double lam = chart.lambda();

    StripVelocity v{fields::ModeField(omega_b.chart_ptr(), zg, Nt),
                    fields::ModeField(omega_b.chart_ptr(), zg, Nt),
                    fields::ModeField(omega_b.chart_ptr(), zg, Nt)};
    for (int m = 0; m < Nt; ++m) {
        const int a = fourier::signed_wavenumber(m, Nt);
        const double kap = chart.mode_wavenumber(a);
        ModeEllipticProblem p;
        p.k = kap;
        p.rhs.resize(nz);
        for (int j = 0; j < nz; ++j)
            p.rhs[j] = omega_b.at(a, j) / (lam * lam); // scaled Laplacian
        cvec phi = solve_mode(zg, p);
        cvec d = column_derivative(zg, phi);
        for (int j = 0; j < nz; ++j) {
            v.phi.at(a, j) = phi[j];
            v.u_tau.at(a, j) = lam * d[j];
            v.u_n.at(a, j) = -lam * cplx{0.0, kap} * phi[j];
        }
    }
    return v;
}

fields::VelocityField biot_savart(const fields::ModeField& omega_b,
                                  const RadialField& omega_i, double interior_h) {
    DiskVelocity dv = disk_biot_savart(omega_b, omega_i);
    const auto& curve = omega_b.chart().curve();
    const double d_min = 1.0 - omega_i.rgrid.back();
    auto cart = [&](const RadialField& ur, const RadialField& ut, int comp) {
        return fields::InteriorField::covering(
            curve, interior_h, d_min + 3 * interior_h, [&](double x, double y) {
                const double r = std::hypot(x, y), th = std::atan2(y, x);
                const double vr = ur.eval(r, th), vt = ut.eval(r, th);
                return comp == 0 ? vr * std::cos(th) - vt * std::sin(th)
                                 : vr * std::sin(th) + vt * std::cos(th);
            });
    };
    return fields::VelocityField{std::move(dv.u_tau), std::move(dv.u_n),
                                 cart(dv.u_r, dv.u_t, 0), cart(dv.u_r, dv.u_t, 1)};
}

fields::ModeField weighted_stream_ratio(const fields::ModeField& phi) {
    const auto& chart = phi.chart();
    const auto& zg = phi.zgrid();
    const int Nt = phi.n_theta(), nz = static_cast<int>(zg.size());
    fields::ModeField out(phi.chart_ptr(), zg, Nt);
    const auto w0 = onesided_d1(zg[0], zg[1], zg[2]);
    for (int m = 0; m < Nt; ++m) {
        const int a = fourier::signed_wavenumber(m, Nt);
        if (std::abs(phi.at(a, 0)) > 1e-10)
            throw std::invalid_argument("weighted_stream_ratio: phi(0) != 0");
        const cplx ik{0.0, chart.mode_wavenumber(a)};
        out.at(a, 0) = ik * (w0[0] * phi.at(a, 0) + w0[1] * phi.at(a, 1) +
                             w0[2] * phi.at(a, 2));
        for (int j = 1; j < nz; ++j) out.at(a, j) = ik * phi.at(a, j) / zg[j];
    }
    return out;
}

} // namespace vortexlab::elliptic
