#include "vortexlab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vortexlab::fields {

std::vector<double> graded_nodes(double zmax, int n_z, double sigma) {
    if (n_z < 1 || zmax <= 0) throw std::invalid_argument("graded_nodes: bad arguments");
    std::vector<double> z(n_z + 1);
    for (int j = 0; j <= n_z; ++j) {
        const double xi = static_cast<double>(j) / n_z;
        z[j] = (std::abs(sigma) < 1e-12)
                   ? zmax * xi
                   : zmax * std::expm1(sigma * xi) / std::expm1(sigma);
    }
    z[0] = 0.0;
    z[n_z] = zmax;
    return z;
}

double grading_for_layer(double zmax, int n_z, double layer, int nodes_in_layer) {
    if (layer >= zmax) return 0.0;
    auto nodes_inside = [&](double sigma) {
        auto z = graded_nodes(zmax, n_z, sigma);
        int c = 0;
        for (double v : z)
            if (v <= layer + 1e-15) ++c;
        return c;
    };
    double sigma = 0.0;
    while (nodes_inside(sigma) < std::min(nodes_in_layer + 1, n_z) && sigma < 40.0)
        sigma += 0.25;
    return sigma;
}

// ---------------------------------------------------------------------------
// ModeField

ModeField::ModeField(std::shared_ptr<const geometry::ScaledChart> chart,
                     std::vector<double> zgrid, int n_theta)
    : chart_(std::move(chart)), zgrid_(std::move(zgrid)), n_theta_(n_theta) {
    if (n_theta_ < 2) throw std::invalid_argument("ModeField: n_theta < 2");
    if (zgrid_.size() < 2 || !std::is_sorted(zgrid_.begin(), zgrid_.end()) ||
        zgrid_.front() != 0.0)
        throw std::invalid_argument("ModeField: zgrid must start at 0 and increase");
    data_.assign(static_cast<size_t>(zgrid_.size()) * n_theta_, cplx{0.0, 0.0});
}

ModeField ModeField::from_physical(std::shared_ptr<const geometry::ScaledChart> chart,
                                   std::vector<double> zgrid, int n_theta,
                                   std::span<const double> phys) {
    ModeField f(std::move(chart), std::move(zgrid), n_theta);
    if (phys.size() != f.data_.size())
        throw std::invalid_argument("from_physical: sample table size mismatch");
    for (int j = 0; j < f.n_z(); ++j) {
        cvec row = fourier::forward_real(phys.subspan(
            static_cast<size_t>(j) * n_theta, static_cast<size_t>(n_theta)));
        std::copy(row.begin(), row.end(),
                  f.data_.begin() + static_cast<size_t>(j) * n_theta);
    }
    f.enforce_hermitian();
    return f;
}

cplx& ModeField::at(int alpha, int j) {
    return data_[static_cast<size_t>(j) * n_theta_ +
                 fourier::storage_index(alpha, n_theta_)];
}

cplx ModeField::at(int alpha, int j) const {
    return data_[static_cast<size_t>(j) * n_theta_ +
                 fourier::storage_index(alpha, n_theta_)];
}

std::span<cplx> ModeField::column(int) {
    throw std::logic_error("ModeField::column: storage is row-major; use at()");
}
std::span<const cplx> ModeField::column(int) const {
    throw std::logic_error("ModeField::column: storage is row-major; use at()");
}

std::vector<double> ModeField::to_physical() const {
    std::vector<double> out(data_.size());
    for (int j = 0; j < n_z(); ++j) {
        std::span<const cplx> row(data_.data() + static_cast<size_t>(j) * n_theta_,
                                  static_cast<size_t>(n_theta_));
        std::vector<double> p = fourier::inverse_real(row);
        std::copy(p.begin(), p.end(), out.begin() + static_cast<size_t>(j) * n_theta_);
    }
    return out;
}

void ModeField::enforce_hermitian() {
    for (int j = 0; j < n_z(); ++j) {
        cplx* row = data_.data() + static_cast<size_t>(j) * n_theta_;
        for (int a = 1; a < (n_theta_ + 1) / 2; ++a) {
            const int ip = fourier::storage_index(a, n_theta_);
            const int im = fourier::storage_index(-a, n_theta_);
            const cplx avg = 0.5 * (row[ip] + std::conj(row[im]));
            row[ip] = avg;
            row[im] = std::conj(avg);
        }
        row[0] = cplx{row[0].real(), 0.0};
        if (n_theta_ % 2 == 0) {
            const int iny = n_theta_ / 2;
            row[iny] = cplx{row[iny].real(), 0.0};
        }
    }
}

double ModeField::hermitian_defect() const {
    double worst = 0.0;
    for (int j = 0; j < n_z(); ++j) {
        const cplx* row = data_.data() + static_cast<size_t>(j) * n_theta_;
        for (int a = 1; a < (n_theta_ + 1) / 2; ++a) {
            const cplx diff = row[fourier::storage_index(-a, n_theta_)] -
                              std::conj(row[fourier::storage_index(a, n_theta_)]);
            worst = std::max(worst, std::abs(diff));
        }
        worst = std::max(worst, std::abs(row[0].imag()));
    }
    return worst;
}

namespace {
// Lagrange cubic through 4 consecutive nodes; clamps to the grid ends.
template <typename Get>
auto cubic_z(const std::vector<double>& zg, double z, Get value)
    -> decltype(value(0)) {
    const int n = static_cast<int>(zg.size());
    if (z < zg.front() - 1e-12 || z > zg.back() + 1e-12)
        throw std::domain_error("eval: z outside the grid");
    int j = static_cast<int>(std::upper_bound(zg.begin(), zg.end(), z) - zg.begin()) - 1;
    j = std::clamp(j, 0, n - 2);
    int lo = std::clamp(j - 1, 0, n - 4);
    decltype(value(0)) acc{};
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (z - zg[lo + b]) / (zg[lo + a] - zg[lo + b]);
        acc += value(lo + a) * w;
    }
    return acc;
}
} // namespace

cplx ModeField::eval_mode(int alpha, double z) const {
    const int m = fourier::storage_index(alpha, n_theta_);
    return cubic_z(zgrid_, z, [&](int j) {
        return data_[static_cast<size_t>(j) * n_theta_ + m];
    });
}

double ModeField::eval(double z, double theta) const {
    const double t = theta / chart_->scaled_period();
    cvec row(n_theta_);
    for (int m = 0; m < n_theta_; ++m)
        row[m] = cubic_z(zgrid_, z, [&](int j) {
            return data_[static_cast<size_t>(j) * n_theta_ + m];
        });
    return fourier::eval_trig_real(row, t - std::floor(t));
}

ModeField& ModeField::operator+=(const ModeField& o) {
    if (o.data_.size() != data_.size())
        throw std::invalid_argument("ModeField +=: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

ModeField& ModeField::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// InteriorField

InteriorField InteriorField::covering(const geometry::BoundaryCurve& curve, double h,
                                      double d_min,
                                      const std::function<double(double, double)>& f) {
    if (h <= 0) throw std::invalid_argument("InteriorField: h must be > 0");
    // bounding box of the boundary samples
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    const int M = std::max(curve.sample_count(), 256);
    for (int j = 0; j < M; ++j) {
        const Point p = curve.position(curve.period() * j / M);
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    InteriorField g;
    g.h_ = h;
    g.d_min_ = d_min;
    g.x0_ = xmin;
    g.y0_ = ymin;
    g.nx_ = static_cast<int>(std::floor((xmax - xmin) / h)) + 1;
    g.ny_ = static_cast<int>(std::floor((ymax - ymin) / h)) + 1;
    g.values_.assign(static_cast<size_t>(g.nx_) * g.ny_, 0.0);
    g.mask_.assign(static_cast<size_t>(g.nx_) * g.ny_, 0);
    for (int k = 0; k < g.ny_; ++k)
        for (int i = 0; i < g.nx_; ++i) {
            const double x = g.x_of(i), y = g.y_of(k);
            const auto [foot, dist] = curve.project({x, y});
            if (dist >= d_min) {
                g.mask_[g.idx(i, k)] = 1;
                g.values_[g.idx(i, k)] = f(x, y);
            }
        }
    return g;
}

bool InteriorField::contains(double x, double y) const {
    const double fx = (x - x0_) / h_, fy = (y - y0_) / h_;
    int i = static_cast<int>(std::floor(fx)), k = static_cast<int>(std::floor(fy));
    int li = std::clamp(i - 1, 0, nx_ - 4), lk = std::clamp(k - 1, 0, ny_ - 4);
    if (i < 0 || i >= nx_ - 1 || k < 0 || k >= ny_ - 1) return false;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (!mask_[idx(li + a, lk + b)]) return false;
    return true;
}

double InteriorField::eval(double x, double y) const {
    if (!contains(x, y)) throw std::domain_error("InteriorField::eval: outside mask");
    const double fx = (x - x0_) / h_, fy = (y - y0_) / h_;
    const int i = static_cast<int>(std::floor(fx)), k = static_cast<int>(std::floor(fy));
    const int li = std::clamp(i - 1, 0, nx_ - 4), lk = std::clamp(k - 1, 0, ny_ - 4);
    auto w1d = [&](double t, int lo, double arr[4]) {
        for (int a = 0; a < 4; ++a) {
            double w = 1.0;
            for (int b = 0; b < 4; ++b)
                if (b != a) w *= (t - (lo + b)) / static_cast<double>(a - b);
            arr[a] = w;
        }
    };
    double wx[4], wy[4];
    w1d(fx, li, wx);
    w1d(fy, lk, wy);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            acc += wx[a] * wy[b] * values_[idx(li + a, lk + b)];
    return acc;
}

// ---------------------------------------------------------------------------

std::function<double(double, double)> blend(const ModeField& near,
                                            const InteriorField& far,
                                            const std::function<double(double)>& cutoff) {
    const auto chart = near.chart_ptr();
    return [&near, &far, cutoff, chart](double x, double y) {
        const auto& curve = chart->curve();
        const auto [foot, dist] = curve.project({x, y});
        if (dist < -1e-12) throw std::domain_error("blend: point outside the domain");
        const double lam = chart->lambda();
        const double sd = lam * std::max(dist, 0.0); // scaled distance
        double v = 0.0;
        if (sd < chart->strip_depth() && cutoff(sd) > 0.0)
            v += near.eval(sd, lam * foot);
        if (cutoff(sd) < 1.0) v += far.eval(x, y);
        return v;
    };
}

} // namespace vortexlab::fields
