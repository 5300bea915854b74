#include "vortexlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vortexlab::geometry {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double v, double period) {
    double r = std::fmod(v, period);
    if (r < 0) r += period;
    return r;
}
} // namespace

// ---------------------------------------------------------------------------
// BoundaryCurve

BoundaryCurve BoundaryCurve::flat_strip(double period, int n_samples) {
    if (period <= 0) throw std::invalid_argument("flat_strip: period must be > 0");
    BoundaryCurve c;
    c.kind_ = CurveKind::FlatStrip;
    c.length_ = period;
    c.n_ = n_samples;
    c.max_gamma_ = 0.0;
    return c;
}

BoundaryCurve BoundaryCurve::circle(double radius, int n_samples) {
    if (radius <= 0) throw std::invalid_argument("circle: radius must be > 0");
    BoundaryCurve c;
    c.kind_ = CurveKind::Circle;
    c.radius_ = radius;
    c.length_ = kTwoPi * radius;
    c.n_ = n_samples;
    c.max_gamma_ = 1.0 / radius;
    return c;
}

BoundaryCurve BoundaryCurve::fourier_perturbed_circle(
    double radius, const std::vector<double>& cos_coeffs,
    const std::vector<double>& sin_coeffs, int n_samples) {
    if (radius <= 0) throw std::invalid_argument("perturbed circle: radius must be > 0");
    BoundaryCurve c;
    c.kind_ = CurveKind::FourierPerturbedCircle;
    c.radius_ = radius;
    c.n_ = n_samples;

    // Dense sampling of the native parameterization x(phi) = r(phi)(cos, sin).
    const int M = std::max(4 * n_samples, 1024);
    auto rad = [&](double phi) {
        double r = 1.0;
        for (size_t m = 0; m < cos_coeffs.size(); ++m)
            r += cos_coeffs[m] * std::cos((m + 1) * phi);
        for (size_t m = 0; m < sin_coeffs.size(); ++m)
            r += sin_coeffs[m] * std::sin((m + 1) * phi);
        return radius * r;
    };
    std::vector<double> x1(M), x2(M);
    for (int k = 0; k < M; ++k) {
        const double phi = kTwoPi * k / M;
        const double r = rad(phi);
        if (r <= 0) throw std::invalid_argument("perturbed circle: r(phi) <= 0");
        x1[k] = r * std::cos(phi);
        x2[k] = r * std::sin(phi);
    }
    fourier::cvec c1 = fourier::forward_real(x1), c2 = fourier::forward_real(x2);
    fourier::cvec d1 = fourier::derivative(c1, kTwoPi), d2 = fourier::derivative(c2, kTwoPi);

    auto speed = [&](double phi) {
        const double t = phi / kTwoPi;
        return std::hypot(fourier::eval_trig_real(d1, t), fourier::eval_trig_real(d2, t));
    };
    // Cumulative arc length by Fourier antiderivative of the speed.
    std::vector<double> sp(M);
    for (int k = 0; k < M; ++k) sp[k] = speed(kTwoPi * k / M);
    fourier::cvec cs = fourier::forward_real(sp);
    const double mean_speed = cs[0].real();
    auto arclen = [&](double phi) {
        double s = mean_speed * phi;
        for (int m = 1; m < M; ++m) {
            if (M % 2 == 0 && m == M / 2) continue;
            const int a = fourier::signed_wavenumber(m, M);
            const fourier::cplx ik{0.0, static_cast<double>(a)};
            const fourier::cplx e{std::cos(a * phi), std::sin(a * phi)};
            s += (cs[m] * (e - 1.0) / ik).real();
        }
        return s;
    };
    const double L = mean_speed * kTwoPi;

    // Invert arclen to get uniformly spaced arc-length nodes.
    std::vector<double> y1(n_samples), y2(n_samples);
    double phi = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double target = L * j / n_samples;
        for (int it = 0; it < 50; ++it) {
            const double f = arclen(phi) - target;
            const double fp = speed(phi);
            const double step = f / fp;
            phi -= step;
            if (std::abs(step) < 1e-14) break;
        }
        const double t = phi / kTwoPi;
        y1[j] = fourier::eval_trig_real(c1, t);
        y2[j] = fourier::eval_trig_real(c2, t);
        phi += (L / n_samples) / speed(phi); // predictor for the next node
    }
    c.length_ = L;
    c.finalize_from_samples(y1, y2);
    if (c.unit_speed_defect() > 1e-10)
        throw ReparameterizationError("arc-length reparameterization failed to converge");
    return c;
}

void BoundaryCurve::finalize_from_samples(const std::vector<double>& x1,
                                          const std::vector<double>& x2) {
    cx1_ = fourier::forward_real(x1);
    cx2_ = fourier::forward_real(x2);
    fourier::cvec d1 = fourier::derivative(cx1_, length_);
    fourier::cvec d2 = fourier::derivative(cx2_, length_);
    fourier::cvec dd1 = fourier::derivative(cx1_, length_, 2);
    fourier::cvec dd2 = fourier::derivative(cx2_, length_, 2);
    std::vector<double> g(n_);
    max_gamma_ = 0.0;
    for (int j = 0; j < n_; ++j) {
        const double t = static_cast<double>(j) / n_;
        const double x1p = fourier::eval_trig_real(d1, t);
        const double x2p = fourier::eval_trig_real(d2, t);
        const double x1pp = fourier::eval_trig_real(dd1, t);
        const double x2pp = fourier::eval_trig_real(dd2, t);
        g[j] = x1pp * x2p - x1p * x2pp;
        max_gamma_ = std::max(max_gamma_, std::abs(g[j]));
    }
    cg_ = fourier::forward_real(g);
    cgp_ = fourier::derivative(cg_, length_);
}

Point BoundaryCurve::position(double theta) const {
    switch (kind_) {
        case CurveKind::FlatStrip:
            return {theta, 0.0};
        case CurveKind::Circle: {
            const double a = theta / radius_;
            return {radius_ * std::cos(a), radius_ * std::sin(a)};
        }
        case CurveKind::FourierPerturbedCircle: {
            const double t = wrap(theta, length_) / length_;
            return {fourier::eval_trig_real(cx1_, t), fourier::eval_trig_real(cx2_, t)};
        }
    }
    throw std::logic_error("unreachable");
}

Point BoundaryCurve::tangent(double theta) const {
    switch (kind_) {
        case CurveKind::FlatStrip:
            return {1.0, 0.0};
        case CurveKind::Circle: {
            const double a = theta / radius_;
            return {-std::sin(a), std::cos(a)};
        }
        case CurveKind::FourierPerturbedCircle: {
            const double t = wrap(theta, length_) / length_;
            fourier::cvec d1 = fourier::derivative(cx1_, length_);
            fourier::cvec d2 = fourier::derivative(cx2_, length_);
            return {fourier::eval_trig_real(d1, t), fourier::eval_trig_real(d2, t)};
        }
    }
    throw std::logic_error("unreachable");
}

Point BoundaryCurve::normal(double theta) const {
    const Point tau = tangent(theta);
    return {-tau[1], tau[0]};
}

double BoundaryCurve::curvature(double theta) const {
    switch (kind_) {
        case CurveKind::FlatStrip:
            return 0.0;
        case CurveKind::Circle:
            return -1.0 / radius_;
        case CurveKind::FourierPerturbedCircle:
            return fourier::eval_trig_real(cg_, wrap(theta, length_) / length_);
    }
    throw std::logic_error("unreachable");
}

double BoundaryCurve::curvature_derivative(double theta) const {
    switch (kind_) {
        case CurveKind::FlatStrip:
        case CurveKind::Circle:
            return 0.0;
        case CurveKind::FourierPerturbedCircle:
            return fourier::eval_trig_real(cgp_, wrap(theta, length_) / length_);
    }
    throw std::logic_error("unreachable");
}

double BoundaryCurve::max_abs_curvature() const { return max_gamma_; }

double BoundaryCurve::unit_speed_defect() const {
    if (kind_ != CurveKind::FourierPerturbedCircle) return 0.0;
    fourier::cvec d1 = fourier::derivative(cx1_, length_);
    fourier::cvec d2 = fourier::derivative(cx2_, length_);
    double worst = 0.0;
    for (int j = 0; j < n_; ++j) {
        const double t = static_cast<double>(j) / n_;
        const double s = std::hypot(fourier::eval_trig_real(d1, t),
                                    fourier::eval_trig_real(d2, t));
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

std::array<double, 2> BoundaryCurve::project(const Point& x) const {
    switch (kind_) {
        case CurveKind::FlatStrip:
            return {wrap(x[0], length_), x[1]};
        case CurveKind::Circle: {
            const double r = std::hypot(x[0], x[1]);
            double a = std::atan2(x[1], x[0]);
            if (a < 0) a += kTwoPi;
            return {a * radius_, radius_ - r};
        }
        case CurveKind::FourierPerturbedCircle: {
            double a = std::atan2(x[1], x[0]);
            if (a < 0) a += kTwoPi;
            // coarse scan near the polar-angle guess, then Newton on
            // (x - x(theta)) . tau(theta) = 0
            double theta = a / kTwoPi * length_;
            double best = 1e300;
            double best_theta = theta;
            for (int j = -8; j <= 8; ++j) {
                const double th = theta + j * length_ / 128.0;
                const Point p = position(th);
                const double d2 = (x[0] - p[0]) * (x[0] - p[0]) + (x[1] - p[1]) * (x[1] - p[1]);
                if (d2 < best) { best = d2; best_theta = th; }
            }
            theta = best_theta;
            for (int it = 0; it < 40; ++it) {
                const Point p = position(theta);
                const Point tau = tangent(theta);
                const double g = (x[0] - p[0]) * tau[0] + (x[1] - p[1]) * tau[1];
                const double gam = curvature(theta);
                const Point nrm{-tau[1], tau[0]};
                const double zloc = (x[0] - p[0]) * nrm[0] + (x[1] - p[1]) * nrm[1];
                const double gp = -1.0 - zloc * gam; // d/dtheta of the objective
                const double step = g / gp;
                theta -= step;
                if (std::abs(step) < 1e-14) break;
            }
            const Point p = position(theta);
            const Point nrm = normal(theta);
            const double dist = (x[0] - p[0]) * nrm[0] + (x[1] - p[1]) * nrm[1];
            return {wrap(theta, length_), dist};
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// GeodesicChart

GeodesicChart::GeodesicChart(BoundaryCurve curve, double delta)
    : curve_(std::move(curve)) {
    if (delta > 0) {
        delta_ = delta;
    } else {
        const double gmax = curve_.max_abs_curvature();
        const double jbound = (gmax > 0) ? 0.5 / gmax : curve_.period() / 4.0;
        delta_ = std::min(jbound, injectivity_radius());
    }
    // J >= 1/2 margin on the selected width
    const double gmax = curve_.max_abs_curvature();
    if (gmax > 0 && delta_ * gmax > 1.0 - 1e-12)
        throw SingularChartError("GeodesicChart: J not positive on the strip");
}

double GeodesicChart::injectivity_radius() const {
    if (curve_.kind() == CurveKind::FlatStrip) return curve_.period() / 4.0;
    const double gmax = curve_.max_abs_curvature();
    double lo = 0.0, hi = (gmax > 0) ? 0.5 / gmax : curve_.period() / 4.0;
    const int N = std::max(curve_.sample_count(), 128);
    const double L = curve_.period();
    auto injective = [&](double d) {
        std::vector<Point> img(N);
        for (int j = 0; j < N; ++j) {
            const double th = L * j / N;
            const Point p = curve_.position(th);
            const Point nn = curve_.normal(th);
            img[j] = {p[0] + d * nn[0], p[1] + d * nn[1]};
        }
        for (int i = 0; i < N; ++i) {
            for (int j = i + 1; j < N; ++j) {
                double arc = L * (j - i) / N;
                arc = std::min(arc, L - arc);
                if (arc < 4.0 * d) continue;
                const double dist = std::hypot(img[i][0] - img[j][0], img[i][1] - img[j][1]);
                if (dist < 0.5 * d) return false;
            }
        }
        return true;
    };
    if (injective(hi)) return hi;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (injective(mid) ? lo : hi) = mid;
    }
    return lo;
}

Point GeodesicChart::map(double z, double theta) const {
    if (z < 0 || z >= delta_)
        throw OutOfChartError("chart_map: z outside [0, delta)");
    const Point p = curve_.position(theta);
    const Point nn = curve_.normal(theta);
    return {p[0] + z * nn[0], p[1] + z * nn[1]};
}

double GeodesicChart::jacobian(double z, double theta) const {
    return 1.0 + z * curve_.curvature(theta);
}

// ---------------------------------------------------------------------------
// ScaledChart

ScaledChart::ScaledChart(GeodesicChart base, double lambda, double delta0, double rho0)
    : base_(std::move(base)), lambda_(lambda) {
    if (lambda <= 0 || lambda >= 1)
        throw std::invalid_argument("ScaledChart: lambda must be in (0,1)");
    const double cap = lambda_ * base_.delta();
    delta0_ = (delta0 > 0) ? delta0 : 0.45 * cap;
    rho0_ = (rho0 > 0) ? rho0 : std::min(0.225 * cap, 0.099);
    if (delta0_ + 2.0 * rho0_ >= cap)
        throw std::invalid_argument("ScaledChart: requires delta0 + 2 rho0 < lambda * delta");
    if (rho0_ >= 0.1)
        throw std::invalid_argument("ScaledChart: rho0 must be < 1/10");
}

double ScaledChart::tilde_gamma(double theta_tilde) const {
    return curve().curvature(theta_tilde / lambda_) / (lambda_ * lambda_ * lambda_);
}

double ScaledChart::tilde_gamma_derivative(double theta_tilde) const {
    return curve().curvature_derivative(theta_tilde / lambda_) /
           (lambda_ * lambda_ * lambda_ * lambda_);
}

bool ScaledChart::constant_curvature() const {
    return curve().kind() != CurveKind::FourierPerturbedCircle;
}

double ScaledChart::mode_wavenumber(int alpha) const {
    return kTwoPi * alpha / scaled_period();
}

RemainderCoefficients ScaledChart::remainder_coefficients(double z_tilde,
                                                          double theta_tilde) const {
    const double gt = tilde_gamma(theta_tilde);
    const double u = lambda_ * lambda_ * z_tilde * gt;
    const double J = 1.0 + u;
    if (J <= 0)
        throw SingularChartError("remainder_coefficients: degenerate Jacobian");
    RemainderCoefficients rc;
    rc.m = -(2.0 * z_tilde * gt + lambda_ * lambda_ * (z_tilde * gt) * (z_tilde * gt)) / (J * J);
    rc.cz = gt / J;
    rc.ct = -z_tilde * tilde_gamma_derivative(theta_tilde) / (J * J * J);
    return rc;
}

// ---------------------------------------------------------------------------

double full_laplacian_check(const GeodesicChart& chart,
                            const std::function<double(double, double)>& psi,
                            int n_z, int n_theta, double h_fd) {
    const BoundaryCurve& curve = chart.curve();
    const double L = curve.period();
    const double zlo = 0.1 * chart.delta(), zhi = 0.85 * chart.delta();
    const double hz = (zhi - zlo) / (n_z - 1);

    // sample psi on the chart grid
    std::vector<std::vector<double>> grid(n_z, std::vector<double>(n_theta));
    for (int i = 0; i < n_z; ++i)
        for (int j = 0; j < n_theta; ++j) {
            const Point p = chart.map(zlo + i * hz, L * j / n_theta);
            grid[i][j] = psi(p[0], p[1]);
        }

    double worst = 0.0;
    for (int i = 2; i < n_z - 2; ++i) {
        const double z = zlo + i * hz;
        // spectral theta-derivatives along this z-row
        fourier::cvec row = fourier::forward_real(grid[i]);
        std::vector<double> dth = fourier::inverse_real(fourier::derivative(row, L));
        std::vector<double> dth2 = fourier::inverse_real(fourier::derivative(row, L, 2));
        for (int j = 0; j < n_theta; ++j) {
            const double theta = L * j / n_theta;
            const double gam = curve.curvature(theta);
            const double gamp = curve.curvature_derivative(theta);
            const double J = 1.0 + z * gam;
            const double dz = (grid[i + 1][j] - grid[i - 1][j]) / (2 * hz);
            const double dzz = (-grid[i + 2][j] + 16 * grid[i + 1][j] - 30 * grid[i][j] +
                                16 * grid[i - 1][j] - grid[i - 2][j]) / (12 * hz * hz);
            const double m = -(2 * z * gam + (z * gam) * (z * gam)) / (J * J);
            const double chart_lap = dzz + dth2[j] + m * dth2[j] + (gam / J) * dz -
                                     (z * gamp / (J * J * J)) * dth[j];
            const Point p = chart.map(z, theta);
            const double cart_lap =
                (psi(p[0] + h_fd, p[1]) + psi(p[0] - h_fd, p[1]) + psi(p[0], p[1] + h_fd) +
                 psi(p[0], p[1] - h_fd) - 4.0 * psi(p[0], p[1])) / (h_fd * h_fd);
            worst = std::max(worst, std::abs(cart_lap - chart_lap));
        }
    }
    return worst;
}

} // namespace vortexlab::geometry
