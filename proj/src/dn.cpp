#include "vortexlab/dn.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab::dn {

using geometry::BoundaryCurve;
using geometry::CurveKind;
using geometry::Point;
using geometry::ScaledChart;

namespace {

/// Harmonic-polynomial collocation fit: basis (r/rmax)^{|m|} e^{i m phi} in
/// polar coordinates about the curve centroid, matched to the trace on a
/// dense set of boundary samples by least squares.
struct PolyFit {
    Point center;
    double rmax = 0.0;
    int M = 0;
    Eigen::VectorXcd coeff; // index m + M, m in [-M, M]

    cplx value(const Point& x) const {
        const double dx = x[0] - center[0], dy = x[1] - center[1];
        const double r = std::hypot(dx, dy), phi = std::atan2(dy, dx);
        cplx s{0, 0};
        for (int m = -M; m <= M; ++m)
            s += coeff(m + M) * std::pow(r / rmax, std::abs(m)) *
                 std::polar(1.0, m * phi);
        return s;
    }

    /// -n . grad of the fit at a boundary point with inward normal n.
    cplx dn_value(const Point& x, const Point& n) const {
        const double dx = x[0] - center[0], dy = x[1] - center[1];
        const double r = std::hypot(dx, dy), phi = std::atan2(dy, dx);
        const double cr = (n[0] * dx + n[1] * dy) / r;  // n . rhat
        const double ct = (-n[0] * dy + n[1] * dx) / r; // n . phihat
        cplx s{0, 0};
        for (int m = -M; m <= M; ++m) {
            if (m == 0) continue;
            const double rho = std::pow(r / rmax, std::abs(m) - 1);
            const cplx e = std::polar(1.0, m * phi);
            const cplx dr = (std::abs(m) / rmax) * rho * e;
            const cplx dt = cplx{0.0, double(m)} / r * rho * (r / rmax) * e;
            s += coeff(m + M) * (cr * dr + ct * dt);
        }
        return -s;
    }
};

struct Collocation {
    Point center;
    double rmax = 0.0;
    int M = 0, n_pts = 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr;
    std::vector<Point> pts; // collocation boundary points

    explicit Collocation(const BoundaryCurve& curve, int n_theta) {
        M = n_theta / 2;
        n_pts = std::max(4 * n_theta, 128);
        pts.resize(n_pts);
        center = {0.0, 0.0};
        const double L = curve.period();
        for (int k = 0; k < n_pts; ++k) {
            pts[k] = curve.position(k * L / n_pts);
            center[0] += pts[k][0] / n_pts;
            center[1] += pts[k][1] / n_pts;
        }
        rmax = 0.0;
        for (const auto& p : pts)
            rmax = std::max(rmax, std::hypot(p[0] - center[0], p[1] - center[1]));
        Eigen::MatrixXcd A(n_pts, 2 * M + 1);
        for (int k = 0; k < n_pts; ++k) {
            const double dx = pts[k][0] - center[0], dy = pts[k][1] - center[1];
            const double r = std::hypot(dx, dy), phi = std::atan2(dy, dx);
            for (int m = -M; m <= M; ++m)
                A(k, m + M) = std::pow(r / rmax, std::abs(m)) *
                              std::polar(1.0, m * phi);
        }
        qr.compute(A);
    }

    PolyFit fit(const cvec& trace) const {
        Eigen::VectorXcd b(n_pts);
        for (int k = 0; k < n_pts; ++k)
            b(k) = fourier::eval_trig(trace, double(k) / n_pts);
        PolyFit f;
        f.center = center;
        f.rmax = rmax;
        f.M = M;
        f.coeff = qr.solve(b);
        return f;
    }
};

bool is_closed(const BoundaryCurve& curve) {
    return curve.kind() != CurveKind::FlatStrip;
}

} // namespace

fields::ModeField harmonic_extend(
    const std::shared_ptr<const ScaledChart>& chart,
    const std::vector<double>& zgrid, const cvec& trace) {
    const int n_theta = static_cast<int>(trace.size());
    const int n_z = static_cast<int>(zgrid.size()) - 1;
    fields::ModeField out(chart, zgrid, n_theta);
    if (!is_closed(chart->curve())) {
        for (int m = 0; m < n_theta; ++m) {
            const int a = fourier::signed_wavenumber(m, n_theta);
            const double kap = std::abs(chart->mode_wavenumber(a));
            for (int j = 0; j <= n_z; ++j)
                out.at(a, j) = trace[m] * std::exp(-kap * zgrid[j]);
        }
        return out;
    }
    Collocation col(chart->curve(), n_theta);
    PolyFit f = col.fit(trace);
    const double L = chart->curve().period(), lam = chart->lambda();
    std::vector<cplx> phys(static_cast<size_t>(n_z + 1) * n_theta);
    for (int j = 0; j <= n_z; ++j)
        for (int k = 0; k < n_theta; ++k) {
            const Point x = chart->base().map(zgrid[j] / lam, k * L / n_theta);
            phys[static_cast<size_t>(j) * n_theta + k] = f.value(x);
        }
    // per-row FFT into mode storage
    for (int j = 0; j <= n_z; ++j) {
        auto row = fourier::forward(
            std::span<const cplx>(phys.data() + static_cast<size_t>(j) * n_theta,
                                  n_theta));
        for (int m = 0; m < n_theta; ++m)
            out.at(fourier::signed_wavenumber(m, n_theta), j) = row[m];
    }
    return out;
}

cvec apply_dn(const ScaledChart& chart, const cvec& trace) {
    const int n_theta = static_cast<int>(trace.size());
    cvec out(n_theta);
    if (!is_closed(chart.curve())) {
        const double L = chart.curve().period();
        for (int m = 0; m < n_theta; ++m) {
            const int a = fourier::signed_wavenumber(m, n_theta);
            out[m] = trace[m] * std::abs(2.0 * M_PI * a / L);
        }
        return out;
    }
    Collocation col(chart.curve(), n_theta);
    PolyFit f = col.fit(trace);
    const auto& curve = chart.curve();
    const double L = curve.period();
    cvec phys(n_theta);
    for (int k = 0; k < n_theta; ++k) {
        const double th = k * L / n_theta;
        phys[k] = f.dn_value(curve.position(th), curve.normal(th));
    }
    return fourier::forward(phys);
}

cvec DNDecomposition::apply(const cvec& trace) const {
    const int n = static_cast<int>(trace.size());
    if (n != static_cast<int>(principal.size()))
        throw std::invalid_argument("DNDecomposition::apply: size mismatch");
    Eigen::VectorXcd t(n);
    for (int i = 0; i < n; ++i) t(i) = trace[i];
    Eigen::VectorXcd r = correction * t;
    cvec out(n);
    for (int i = 0; i < n; ++i) out[i] = principal[i] * trace[i] + r(i);
    return out;
}

DNDecomposition DNDecomposition::build(const ScaledChart& chart, int n_theta) {
    DNDecomposition d;
    d.principal.resize(n_theta);
    for (int m = 0; m < n_theta; ++m)
        d.principal[m] = std::abs(
            chart.mode_wavenumber(fourier::signed_wavenumber(m, n_theta)));
    d.correction = Eigen::MatrixXcd::Zero(n_theta, n_theta);
    if (is_closed(chart.curve())) {
        const double lam = chart.lambda();
        for (int m = 0; m < n_theta; ++m) {
            cvec unit(n_theta, cplx{0, 0});
            unit[m] = 1.0;
            const cvec col = apply_dn(chart, unit);
            for (int i = 0; i < n_theta; ++i) d.correction(i, m) = col[i] / lam;
            d.correction(m, m) -= d.principal[m];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d.correction);
    d.correction_norm = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return d;
}

} // namespace vortexlab::dn
