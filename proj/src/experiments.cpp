#include "vortexlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "vortexlab/cli_io.hpp"

namespace vortexlab::experiments {

using elliptic::RadialField;
using fields::ModeField;
using fourier::signed_wavenumber;
using solver::DiskSolver;
using solver::SolverState;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> uniform(double a, double b, int n) {
    std::vector<double> g(n + 1);
    for (int j = 0; j <= n; ++j) g[j] = a + (b - a) * j / n;
    return g;
}

std::function<double(double, double)> build_ic(const SweepPlan& plan) {
    if (plan.ic == "zero" && plan.ic_modes.empty())
        return [](double, double) { return 0.0; };
    const double base_amp = plan.ic == "preset" ? plan.ic_amp : 0.0;
    const bool radial_base = plan.ic == "preset" || plan.ic == "radial";
    const bool ring_base = plan.ic == "ring";
    auto modes = plan.ic_modes;
    return [=](double x, double y) {
        double v = radial_base ? solver::preset_vorticity(x, y, base_amp) : 0.0;
        if (ring_base) {
            // radial profile with zero circulation and a double zero at the
            // wall, so the boundary signal is produced entirely by the
            // viscous response rather than by diffusion of the initial data
            const double s = 1.0 - x * x - y * y;
            v = s * s * (1.0 - 4.0 * (x * x + y * y));
        }
        if (!modes.empty()) {
            const double r = std::hypot(x, y);
            const double th = std::atan2(y, x);
            for (const auto& [a, amp] : modes)
                v += amp * mode_profile(a, r) * std::cos(a * th);
        }
        return v;
    };
}

/// ||grad u||_{L2(disk)}^2 from polar velocity modes; the r = 0 cell is
/// closed with the first interior value (its weight vanishes with r).
double grad_l2sq(const solver::PolarVelocity& v) {
    const auto& rg = v.u_r.rgrid;
    const int n = static_cast<int>(rg.size());
    const int nt = v.u_r.n_theta;
    std::vector<double> dens(n, 0.0);
    for (int m = 0; m < nt; ++m) {
        const int a = signed_wavenumber(m, nt);
        for (int i = 1; i < n; ++i) {
            const int lo = std::max(0, std::min(i - 1, n - 3));
            const double h1 = rg[lo + 1] - rg[lo], h2 = rg[lo + 2] - rg[lo + 1];
            auto d1 = [&](const RadialField& f) {
                // centered/one-sided quadratic derivative at node i
                const cplx f0 = f.at(a, lo), f1 = f.at(a, lo + 1), f2 = f.at(a, lo + 2);
                const double x = rg[i] - rg[lo];
                const cplx c1 = (f1 - f0) / h1;
                const cplx c2 = ((f2 - f1) / h2 - c1) / (h1 + h2);
                return c1 + c2 * (2.0 * x - h1);
            };
            const cplx ur = v.u_r.at(a, i), ut = v.u_t.at(a, i);
            const cplx ia{0.0, static_cast<double>(a)};
            const double r = rg[i];
            dens[i] += std::norm(d1(v.u_r)) + std::norm(d1(v.u_t)) +
                       std::norm((ia * ur - ut) / r) + std::norm((ia * ut + ur) / r);
        }
    }
    dens[0] = dens[1];
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        acc += pi * (dens[i] * rg[i] + dens[i + 1] * rg[i + 1]) * (rg[i + 1] - rg[i]);
    return acc;
}

/// Everything about the shared inviscid reference a viscous run compares to.
struct EulerShared {
    std::vector<double> times;
    std::vector<RadialField> omega;
    std::vector<cvec> slip;      ///< u_E . tau at r = 1, per snapshot
    std::vector<double> grad_sq; ///< ||grad u_E||^2 per snapshot
    double grad_bound = 0.0;
};

EulerShared make_euler_shared(const SweepPlan& plan,
                              const std::function<double(double, double)>& ic) {
    const int nr = 1024;
    const int nt = plan.n_theta;
    const auto rg = uniform(0.0, 1.0, nr);
    std::vector<double> phys(static_cast<size_t>(nr + 1) * nt);
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j < nt; ++j) {
            const double th = 2.0 * pi * j / nt;
            phys[static_cast<size_t>(i) * nt + j] =
                ic(rg[i] * std::cos(th), rg[i] * std::sin(th));
        }
    const RadialField w0 = RadialField::from_physical(rg, nt, phys);

    const double dt_target = 5e-3;
    const int per_rec =
        std::max(1, static_cast<int>(std::ceil(plan.T / plan.n_records / dt_target)));
    const int steps = plan.n_records * per_rec;
    const solver::EulerHistory hist =
        solver::euler_reference(w0, plan.T, steps, plan.n_records);

    EulerShared e;
    e.times = hist.times;
    e.omega = hist.omega;
    e.grad_bound = *std::max_element(hist.grad_u_inf.begin(), hist.grad_u_inf.end());
    for (const auto& w : hist.omega) {
        const solver::PolarVelocity pv = solver::polar_velocity(w);
        cvec s(nt);
        for (int m = 0; m < nt; ++m)
            s[m] = pv.u_t.at(signed_wavenumber(m, nt), w.n_r() - 1);
        e.slip.push_back(std::move(s));
        e.grad_sq.push_back(grad_l2sq(pv));
    }
    return e;
}

/// Blended viscous vorticity sampled per mode on the reference radius grid.
RadialField total_modes(const DiskSolver& solver, const SolverState& s,
                        const std::vector<double>& rg) {
    const double lam = solver.chart()->lambda();
    const double zmax = solver.zgrid().back();
    RadialField out(rg, solver.n_theta());
    for (int m = 0; m < solver.n_theta(); ++m) {
        const int a = signed_wavenumber(m, solver.n_theta());
        for (size_t i = 0; i < rg.size(); ++i) {
            cplx v = s.omega_i.eval_mode(a, rg[i]);
            const double zt = lam * (1.0 - rg[i]);
            if (zt <= zmax) v += s.omega_b.eval_mode(a, zt);
            out.at(a, static_cast<int>(i)) = v;
        }
    }
    return out;
}

/// ||u_nu - u_E||_{L2}: solve the stream function of the vorticity difference
/// and use int |grad psi|^2 = -int psi omega (Dirichlet stream).
double velocity_l2_diff(const RadialField& w_nu, const RadialField& w_e) {
    const auto& rg = w_e.rgrid;
    const int n = static_cast<int>(rg.size());
    const int nt = w_e.n_theta;
    double acc = 0.0;
    cvec rhs(n);
    for (int m = 0; m < nt; ++m) {
        const int a = signed_wavenumber(m, nt);
        for (int i = 0; i < n; ++i) rhs[i] = w_nu.at(a, i) - w_e.at(a, i);
        const cvec psi = elliptic::solve_radial_poisson(std::abs(a), rg, rhs, 0.0);
        double part = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double f0 = -(psi[i] * std::conj(rhs[i])).real() * rg[i];
            const double f1 = -(psi[i + 1] * std::conj(rhs[i + 1])).real() * rg[i + 1];
            part += pi * (f0 + f1) * (rg[i + 1] - rg[i]);
        }
        acc += part;
    }
    return std::sqrt(std::max(acc, 0.0));
}

double wall_vorticity_sup(const SolverState& s) {
    const int nt = s.omega_b.n_theta();
    cvec row(nt);
    for (int m = 0; m < nt; ++m)
        row[m] = s.omega_b.at(signed_wavenumber(m, nt), 0);
    double sup = 0.0;
    for (double v : fourier::inverse_real(row)) sup = std::max(sup, std::abs(v));
    return sup;
}

cvec wall_trace(const SolverState& s) {
    const int nt = s.omega_b.n_theta();
    cvec row(nt);
    for (int m = 0; m < nt; ++m)
        row[m] = s.omega_b.at(signed_wavenumber(m, nt), 0);
    return row;
}

/// Enstrophy fraction carried by modes above n_theta / 4 at the end of a run,
/// a loss-of-resolution indicator for the analytic-data time horizon.
double spectral_tail(const DiskSolver& solver, const SolverState& s) {
    const int nt = solver.n_theta();
    double total = 0.0, tail = 0.0;
    auto add = [&](int a, double e) {
        total += e;
        if (std::abs(a) > nt / 4) tail += e;
    };
    for (int m = 0; m < nt; ++m) {
        const int a = signed_wavenumber(m, nt);
        double e = 0.0;
        for (int i = 0; i < s.omega_i.n_r(); ++i) e += std::norm(s.omega_i.at(a, i));
        for (size_t j = 0; j < solver.zgrid().size(); ++j)
            e += std::norm(s.omega_b.at(a, j));
        add(a, e);
    }
    return total > 0.0 ? tail / total : 0.0;
}

struct RunOut {
    std::vector<ExperimentRecord> records;
    RunSummary summary;
};

RunOut run_one(const SweepPlan& plan, double nu,
               const std::function<double(double, double)>& ic,
               const EulerShared& eul) {
    RunOut out;
    out.summary.nu = nu;

    auto chart = std::make_shared<geometry::ScaledChart>(
        geometry::GeodesicChart(geometry::BoundaryCurve::circle(1.0)), plan.lambda);
    const double zmax = chart->strip_depth() * 4.0 / 3.0;
    const double dz = zmax / plan.n_z;
    const double dr = dz / plan.lambda;
    const int n_r = static_cast<int>(std::llround(0.75 / dr));
    const auto zg = uniform(0.0, zmax, plan.n_z);
    const auto rg = uniform(0.0, n_r * dr, n_r);

    double dt0 = plan.dt;
    if (dt0 <= 0.0) {
        const int amax = plan.n_theta / 2 - 1;
        dt0 = std::min(0.02, 0.5 / (static_cast<double>(amax) * amax * nu));
    }

    norms::AnalyticNormConfig ncfg = plan.norms;

    // the diffusive auto-step knows nothing about the flow speed; on an
    // advective CFL rejection halve the step and restart the march
    for (int attempt = 0;; ++attempt) {
    const int per_rec = std::max(
        1, static_cast<int>(std::ceil(plan.T / plan.n_records / dt0)));
    const double dt = plan.T / (static_cast<double>(plan.n_records) * per_rec);
    out.summary.dt = dt;
    out.summary.steps = plan.n_records * per_rec;
    out.records.clear();
    out.summary.max_energy_slack = 0.0;
    std::vector<norms::NormRecord> history;

    try {
        const DiskSolver ds(chart, zg, rg, plan.n_theta, nu, dt);
        SolverState s = ds.split_initial(ic);

        const double e0 = ds.kinetic_energy(ds.velocity(s));
        double diss = 0.0;     // 2 nu int ||omega||^2
        double bdry_sup = wall_vorticity_sup(s);
        double d0sq = 0.0;

        std::vector<double> times;
        std::vector<cvec> traces;
        std::vector<cvec> slips;

        for (int k = 0; k <= plan.n_records; ++k) {
            ExperimentRecord rec;
            rec.nu = nu;
            rec.t = s.t;
            const RadialField w_nu = total_modes(ds, s, eul.omega[k].rgrid);
            rec.l2_diff = velocity_l2_diff(w_nu, eul.omega[k]);
            if (k == 0) d0sq = rec.l2_diff * rec.l2_diff;
            rec.bdry_vort = std::sqrt(nu) * bdry_sup;
            times.push_back(s.t);
            traces.push_back(wall_trace(s));
            slips.push_back(eul.slip[k]);
            double pairing = 0.0;
            for (int m = 0; m < plan.n_theta; ++m)
                pairing += (traces.back()[m] * std::conj(slips.back()[m])).real();
            rec.kato_integrand = -nu * 2.0 * pi * pairing;
            if (times.size() >= 2)
                rec.kato_integral = kato_integral(times, traces, slips, nu);
            rec.grad_bound = eul.grad_bound;
            rec.gronwall_rhs = std::exp(2.0 * s.t * eul.grad_bound) * d0sq;
            rec.energy_lhs = ds.kinetic_energy(ds.velocity(s)) + diss;
            rec.energy_rhs = e0;
            // trapezoid of nu ||grad u_E||^2 on the record grid
            double ed = 0.0;
            for (int j = 0; j < k; ++j)
                ed += 0.5 * nu * (eul.grad_sq[j] + eul.grad_sq[j + 1]) *
                      (eul.times[j + 1] - eul.times[j]);
            rec.euler_diss = ed;

            rec.l1_rho = norms::l1_rho(s.omega_b, ncfg);
            rec.w11 = norms::w_k1(s.omega_b, 1, ncfg);
            rec.w21 = norms::w_k1(s.omega_b, 2, ncfg);
            rec.h4_interior =
                norms::interior_sobolev(ds.sample_interior(s, 0.02, 0.06), 4);
            history.push_back({s.t, s.omega_b, rec.h4_interior});
            rec.a_beta = norms::iterative_norm_A(history, ncfg);
            out.records.push_back(rec);

            if (plan.checkpoint_every > 0 && !plan.output.empty() &&
                k % plan.checkpoint_every == 0) {
                const auto dir = std::filesystem::path(plan.output) / "checkpoints";
                std::filesystem::create_directories(dir);
                char name[64];
                std::snprintf(name, sizeof name, "state_nu%.6g_rec%03d.bin", nu, k);
                cli_io::save_state(s, (dir / name).string());
            }

            if (k == plan.n_records) break;
            for (int n = 0; n < per_rec; ++n) {
                const double ens0 = ds.enstrophy(s);
                s = ds.step(s);
                diss += nu * dt * (ens0 + ds.enstrophy(s));
                bdry_sup = std::max(bdry_sup, wall_vorticity_sup(s));
                const double e = ds.kinetic_energy(ds.velocity(s));
                out.summary.max_energy_slack = std::max(
                    out.summary.max_energy_slack, (e + diss - e0) / std::max(e0, 1e-300));
            }
        }
        out.summary.spectral_tail = spectral_tail(ds, s);
        if (out.summary.spectral_tail > 1e-4)
            out.summary.note = "spectral tail exceeds 1e-4 before T";
    } catch (const solver::StepRejectedError& e) {
        if (attempt < 4) {
            dt0 = dt / 2.0;
            continue;
        }
        out.summary.completed = false;
        out.summary.note = e.what();
    } catch (const std::exception& e) {
        out.summary.completed = false;
        out.summary.note = e.what();
    }
    break;
    }
    return out;
}

} // namespace

double mode_profile(int alpha, double r) {
    const double a = std::abs(alpha);
    const double s = 1.0 - r * r;
    return std::pow(r, a) * s * s * (1.0 - (a + 4.0) / (a + 1.0) * r * r);
}

void validate_plan(const SweepPlan& plan) {
    if (plan.nus.empty()) throw std::invalid_argument("plan: nus must be nonempty");
    for (double nu : plan.nus)
        if (!(nu > 0.0)) throw std::invalid_argument("plan: viscosities must be > 0");
    for (size_t i = 1; i < plan.nus.size(); ++i)
        if (plan.nus[i] >= plan.nus[i - 1])
            throw std::invalid_argument(
                "plan: nus must be strictly descending (reorder the list)");
    if (!(plan.T > 0.0)) throw std::invalid_argument("plan: T must be > 0");
    if (!(plan.lambda > 0.0 && plan.lambda < 1.0))
        throw std::invalid_argument("plan: lambda must lie in (0, 1)");
    if (plan.n_theta < 8 || plan.n_theta % 2 != 0)
        throw std::invalid_argument("plan: n_theta must be even and >= 8");
    if (plan.n_z < 16) throw std::invalid_argument("plan: n_z must be >= 16");
    if (plan.n_records < 1) throw std::invalid_argument("plan: n_records must be >= 1");
    if (plan.ic != "preset" && plan.ic != "radial" && plan.ic != "ring" &&
        plan.ic != "zero")
        throw std::invalid_argument("plan: unknown ic preset '" + plan.ic + "'");
    for (const auto& [a, amp] : plan.ic_modes) {
        (void)amp;
        if (a == 0 || std::abs(a) >= plan.n_theta / 2)
            throw std::invalid_argument("plan: ic mode index out of band");
    }
    if (!(plan.norms.rho0 > 0.0 && plan.norms.rho0 < 0.1))
        throw std::invalid_argument("plan: rho0 must lie in (0, 1/10)");
    if (!(plan.norms.eps0 > 0.0 && plan.norms.eps0 <= 0.5))
        throw std::invalid_argument("plan: eps0 must lie in (0, 1/2]");
}

double kato_integral(const std::vector<double>& times,
                     const std::vector<cvec>& wall_vorticity,
                     const std::vector<cvec>& euler_slip, double nu) {
    if (times.size() != wall_vorticity.size() || times.size() != euler_slip.size())
        throw std::invalid_argument("kato_integral: mismatched time grids");
    const size_t n = times.size();
    auto integrand = [&](size_t k) {
        if (wall_vorticity[k].size() != euler_slip[k].size())
            throw std::invalid_argument("kato_integral: mismatched mode counts");
        double v = 0.0;
        for (size_t m = 0; m < wall_vorticity[k].size(); ++m)
            v += (wall_vorticity[k][m] * std::conj(euler_slip[k][m])).real();
        return -nu * 2.0 * pi * v;
    };
    double acc = 0.0;
    for (size_t k = 0; k + 1 < n; ++k)
        acc += 0.5 * (integrand(k) + integrand(k + 1)) * (times[k + 1] - times[k]);
    return acc;
}

std::vector<StabilityPoint> stability_check(std::span<const ExperimentRecord> records) {
    std::vector<StabilityPoint> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const double grow = std::exp(2.0 * r.t * r.grad_bound);
        const double rhs =
            r.gronwall_rhs + grow * (std::abs(r.kato_integral) + r.euler_diss);
        const double margin = rhs - r.l2_diff * r.l2_diff;
        out.push_back({margin >= -1e-14 * std::max(1.0, rhs), margin});
    }
    return out;
}

RateFit fit_rate(std::vector<std::pair<double, double>> pairs) {
    RateFit fit;
    std::vector<double> x, y;
    for (const auto& [nu, metric] : pairs) {
        if (!(metric > 0.0) || !(nu > 0.0)) continue; // excluded with warning
        x.push_back(std::log(nu));
        y.push_back(std::log(metric));
    }
    fit.used = static_cast<int>(x.size());
    if (fit.used < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < fit.used; ++i) mx += x[i], my += y[i];
    mx /= fit.used;
    my /= fit.used;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < fit.used; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.exponent = sxy / sxx;
    if (syy == 0.0) {
        fit.confidence = 1.0;
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        fit.confidence = std::clamp(1.0 - std::sqrt(std::max(ss_res, 0.0) / syy), 0.0, 1.0);
    }
    return fit;
}

SweepResult run_sweep(const SweepPlan& plan) {
    validate_plan(plan);
    const auto ic = build_ic(plan);
    const EulerShared eul = make_euler_shared(plan, ic);

    const int n_runs = static_cast<int>(plan.nus.size());
    std::vector<RunOut> outs(n_runs);
    int cap = plan.threads;
    if (cap < 0) {
        cap = 0;
        if (const char* env = std::getenv("VORTEXLAB_THREADS")) cap = std::atoi(env);
    }
    if (cap > 1 && n_runs > 1) {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(cap, n_runs);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1))
                    outs[i] = run_one(plan, plan.nus[i], ic, eul);
            });
        for (auto& th : pool) th.join();
    } else {
        for (int i = 0; i < n_runs; ++i) outs[i] = run_one(plan, plan.nus[i], ic, eul);
    }

    SweepResult res;
    std::vector<std::pair<double, double>> rate_pairs;
    for (int i = 0; i < n_runs; ++i) {
        double sup = 0.0;
        for (const auto& r : outs[i].records) sup = std::max(sup, r.l2_diff);
        if (outs[i].summary.completed) rate_pairs.emplace_back(plan.nus[i], sup);
        res.runs.push_back(outs[i].summary);
        res.records.insert(res.records.end(), outs[i].records.begin(),
                           outs[i].records.end());
    }
    res.rate = fit_rate(rate_pairs);
    if (!plan.output.empty())
        cli_io::write_report(res.records, res.runs, res.rate, plan.output, plan.plots);
    return res;
}

} // namespace vortexlab::experiments
