#include "vortexlab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab::norms {

using fields::InteriorField;
using fields::ModeField;
using fourier::cplx;

namespace {
void validate(const AnalyticNormConfig& cfg, double rho) {
    if (!(cfg.eps0 > 0.0 && cfg.eps0 <= 0.5))
        throw std::invalid_argument("norms: eps0 must lie in (0, 1/2]");
    if (!(cfg.rho0 > 0.0 && cfg.rho0 < 0.1))
        throw std::invalid_argument("norms: rho0 must lie in (0, 1/10)");
    if (!(rho > 0.0 && rho < cfg.rho0))
        throw std::invalid_argument("norms: rho must lie in (0, rho0)");
}

double depth(const ModeField& f, const AnalyticNormConfig& cfg) {
    return cfg.delta0 > 0.0 ? cfg.delta0 : f.chart().delta0();
}

double weight(double eps0, double edge, int abs_alpha, double z) {
    return z >= edge ? 1.0 : std::exp(eps0 * (edge - z) * abs_alpha);
}

template <class PerMode>
double sum_modes(const ModeField& f, PerMode per_mode) {
    double total = 0.0;
    for (int m = 0; m < f.n_theta(); ++m)
        total += per_mode(m, std::abs(fourier::signed_wavenumber(m, f.n_theta())));
    return total;
}
} // namespace

namespace {
double l1_rho_impl(const ModeField& f, const AnalyticNormConfig& cfg, double rho) {
    validate(cfg, rho);
    const double edge = depth(f, cfg) + rho;
    const auto& zg = f.zgrid();
    return sum_modes(f, [&](int m, int aa) {
        const int a = fourier::signed_wavenumber(m, f.n_theta());
        double s = 0.0;
        for (size_t j = 0; j + 1 < zg.size() && zg[j] < edge; ++j) {
            const double z1 = std::min(zg[j + 1], edge);
            const double g0 = weight(cfg.eps0, edge, aa, zg[j]) * std::abs(f.at(a, j));
            // linear interpolation of |f| when the edge cuts the cell
            const double t = (z1 - zg[j]) / (zg[j + 1] - zg[j]);
            const double fe = (1 - t) * std::abs(f.at(a, j)) + t * std::abs(f.at(a, j + 1));
            const double g1 = weight(cfg.eps0, edge, aa, z1) * fe;
            s += 0.5 * (z1 - zg[j]) * (g0 + g1);
        }
        return s;
    });
}

double linf_rho_impl(const ModeField& f, const AnalyticNormConfig& cfg, double rho) {
    validate(cfg, rho);
    const double edge = depth(f, cfg) + rho;
    const auto& zg = f.zgrid();
    return sum_modes(f, [&](int m, int aa) {
        const int a = fourier::signed_wavenumber(m, f.n_theta());
        double s = 0.0;
        for (size_t j = 0; j < zg.size() && zg[j] <= edge; ++j)
            s = std::max(s, weight(cfg.eps0, edge, aa, zg[j]) * std::abs(f.at(a, j)));
        return s;
    });
}
} // namespace

double l1_rho(const ModeField& f, const AnalyticNormConfig& cfg) {
    return l1_rho_impl(f, cfg, cfg.rho);
}

double linf_rho(const ModeField& f, const AnalyticNormConfig& cfg) {
    return linf_rho_impl(f, cfg, cfg.rho);
}

fields::ModeField theta_derivative(const ModeField& f) {
    ModeField out(f.chart_ptr(), f.zgrid(), f.n_theta());
    const int N = f.n_theta();
    for (int m = 0; m < N; ++m) {
        const int a = fourier::signed_wavenumber(m, N);
        const cplx mult = (2 * a == N) ? cplx{0, 0}
                                       : cplx{0.0, f.chart().mode_wavenumber(a)};
        for (int j = 0; j < f.n_z(); ++j) out.at(a, j) = mult * f.at(a, j);
    }
    return out;
}

fields::ModeField scaled_z_derivative(const ModeField& f) {
    ModeField out(f.chart_ptr(), f.zgrid(), f.n_theta());
    const auto& zg = f.zgrid();
    const int n = f.n_z(), N = f.n_theta();
    for (int m = 0; m < N; ++m) {
        const int a = fourier::signed_wavenumber(m, N);
        for (int j = 0; j < n; ++j) {
            cplx d;
            if (j == 0)
                d = (f.at(a, 1) - f.at(a, 0)) / (zg[1] - zg[0]);
            else if (j == n - 1)
                d = (f.at(a, j) - f.at(a, j - 1)) / (zg[j] - zg[j - 1]);
            else {
                const double hm = zg[j] - zg[j - 1], hp = zg[j + 1] - zg[j];
                d = (hm / hp * (f.at(a, j + 1) - f.at(a, j)) +
                     hp / hm * (f.at(a, j) - f.at(a, j - 1))) /
                    (hm + hp);
            }
            out.at(a, j) = zg[j] * d;
        }
    }
    return out;
}

namespace {
template <class Norm>
double w_k_impl(const ModeField& f, int k, const AnalyticNormConfig& cfg, double rho,
                Norm norm) {
    if (k < 0 || k > 4) throw std::invalid_argument("norms: k must lie in [0, 4]");
    double total = 0.0;
    ModeField zi = f; // (z d/dz)^j f, j ascending
    for (int j = 0; j <= k; ++j) {
        if (j > 0) zi = scaled_z_derivative(zi);
        ModeField ti = zi;
        for (int i = 0; i + j <= k; ++i) {
            if (i > 0) ti = theta_derivative(ti);
            total += norm(ti, cfg, rho);
        }
    }
    return total;
}

double w_k1_at(const ModeField& f, int k, const AnalyticNormConfig& cfg, double rho) {
    return w_k_impl(f, k, cfg, rho, l1_rho_impl);
}
} // namespace

double w_k1(const ModeField& f, int k, const AnalyticNormConfig& cfg) {
    return w_k_impl(f, k, cfg, cfg.rho, l1_rho_impl);
}

double w_kinf(const ModeField& f, int k, const AnalyticNormConfig& cfg) {
    return w_k_impl(f, k, cfg, cfg.rho, linf_rho_impl);
}

double interior_sobolev(const InteriorField& f, int k) {
    if (k < 0 || k > 4) throw std::invalid_argument("norms: k must lie in [0, 4]");
    const int nx = f.nx(), ny = f.ny();
    const double h = f.spacing();
    // successive centered derivatives; entries without a full masked stencil
    // are dropped from the norm (and from further differentiation)
    struct Layer {
        std::vector<double> v;
        std::vector<char> ok;
    };
    auto deriv = [&](const Layer& in, bool in_x) {
        Layer out;
        out.v.assign(in.v.size(), 0.0);
        out.ok.assign(in.ok.size(), 0);
        for (int q = 0; q < ny; ++q)
            for (int i = 0; i < nx; ++i) {
                const size_t c = static_cast<size_t>(q) * nx + i;
                const int im = in_x ? i - 1 : i, ip = in_x ? i + 1 : i;
                const int qm = in_x ? q : q - 1, qp = in_x ? q : q + 1;
                if (im < 0 || qm < 0 || ip >= nx || qp >= ny) continue;
                const size_t cm = static_cast<size_t>(qm) * nx + im;
                const size_t cp = static_cast<size_t>(qp) * nx + ip;
                if (!in.ok[c] || !in.ok[cm] || !in.ok[cp]) continue;
                out.v[c] = (in.v[cp] - in.v[cm]) / (2 * h);
                out.ok[c] = 1;
            }
        return out;
    };
    Layer base;
    base.v.assign(static_cast<size_t>(nx) * ny, 0.0);
    base.ok.assign(base.v.size(), 0);
    for (int q = 0; q < ny; ++q)
        for (int i = 0; i < nx; ++i)
            if (f.mask(i, q)) {
                base.v[static_cast<size_t>(q) * nx + i] = f.value(i, q);
                base.ok[static_cast<size_t>(q) * nx + i] = 1;
            }
    double total = 0.0;
    std::vector<Layer> xlayers{base};
    for (int i = 1; i <= k; ++i) xlayers.push_back(deriv(xlayers.back(), true));
    for (int i = 0; i <= k; ++i) {
        Layer cur = xlayers[i];
        for (int j = 0; i + j <= k; ++j) {
            if (j > 0) cur = deriv(cur, false);
            for (size_t c = 0; c < cur.v.size(); ++c)
                if (cur.ok[c]) total += cur.v[c] * cur.v[c] * h * h;
        }
    }
    return std::sqrt(total);
}

double iterative_norm_A(std::span<const NormRecord> history,
                        const AnalyticNormConfig& cfg) {
    if (history.empty()) throw std::invalid_argument("iterative_norm_A: empty history");
    double A = -1.0;
    for (const auto& rec : history) {
        const double lam2 = rec.w.chart().lambda() * rec.w.chart().lambda();
        const double shift = lam2 * cfg.beta * rec.t;
        if (shift >= cfg.rho0) continue;
        const double top = cfg.rho0 - shift;
        double best = 0.0;
        for (int q = 1; q <= 16; ++q) {
            const double rho = top * q / 17.0;
            const double v = w_k1_at(rec.w, 1, cfg, rho) +
                             w_k1_at(rec.w, 2, cfg, rho) * std::pow(top - rho, cfg.zeta);
            best = std::max(best, v);
        }
        A = std::max(A, best + rec.h4_interior);
    }
    if (A < 0.0)
        throw std::invalid_argument("iterative_norm_A: no record inside the window");
    return A;
}

} // namespace vortexlab::norms
