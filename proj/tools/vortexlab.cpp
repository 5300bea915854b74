#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vortexlab/cli_io.hpp"
#include "vortexlab/dn.hpp"
#include "vortexlab/experiments.hpp"
#include "vortexlab/stokes.hpp"

using namespace vortexlab;
using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<double> uniform(double a, double b, int n) {
    std::vector<double> g(n + 1);
    for (int j = 0; j <= n; ++j) g[j] = a + (b - a) * j / n;
    return g;
}

std::shared_ptr<const geometry::ScaledChart> disk_chart(double lambda = 0.1) {
    return std::make_shared<geometry::ScaledChart>(
        geometry::GeodesicChart(geometry::BoundaryCurve::circle(1.0)), lambda);
}

// ---------------------------------------------------------------- validate

struct CheckRunner {
    int failed = 0;
    void operator()(const std::string& name, bool ok, const std::string& detail = "") {
        std::printf("[%s] %s%s%s\n", ok ? "pass" : "FAIL", name.c_str(),
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++failed;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

int cmd_validate() {
    CheckRunner check;

    { // banded mode solve against the dense oracle, manufactured data
        const auto zg = uniform(0.0, 4.0, 512);
        double worst = 0.0;
        for (double k : {0.5, 3.0, 17.0}) {
            elliptic::ModeEllipticProblem p;
            p.k = k;
            p.bc = 0.3;
            p.rhs.resize(zg.size());
            for (size_t j = 0; j < zg.size(); ++j)
                p.rhs[j] = std::exp(-2.0 * zg[j]) * std::sin(3.0 * zg[j]);
            const cvec a = elliptic::solve_mode(zg, p);
            const cvec b = elliptic::solve_mode_dense(zg, p);
            for (size_t j = 0; j < zg.size(); ++j)
                worst = std::max(worst, std::abs(a[j] - b[j]));
        }
        check("elliptic: banded solve matches dense LU", worst < 1e-10,
              "max diff " + num(worst));
    }

    { // disk Dirichlet-Neumann map: e^{i n theta} -> n e^{i n theta}
        const int Nt = 64;
        auto chart = disk_chart();
        double worst = 0.0;
        for (int n = 1; n <= 8; ++n) {
            cvec trace(Nt, 0.0);
            trace[fourier::storage_index(n, Nt)] = 1.0;
            trace[fourier::storage_index(-n, Nt)] = 1.0;
            const cvec g = dn::apply_dn(*chart, trace);
            worst = std::max(
                worst, std::abs(g[fourier::storage_index(n, Nt)] - double(n)) / n);
        }
        check("dn: disk map is the mode multiplier", worst < 0.01,
              "max rel err " + num(worst));
    }

    { // zero-mode mass conservation under the wall-flux stepper
        auto chart = std::make_shared<geometry::ScaledChart>(
            geometry::GeodesicChart(geometry::BoundaryCurve::flat_strip(4 * pi)), 0.5,
            0.6, 0.09);
        const auto zg = fields::graded_nodes(4.0, 512, 0.0);
        stokes::SemigroupStepper s(chart, zg, 8, 0.05, 2e-3);
        fields::ModeField w(chart, zg, 8);
        for (size_t j = 0; j < zg.size(); ++j)
            w.at(0, j) = std::exp(-(zg[j] - 2.0) * (zg[j] - 2.0) / 0.16);
        auto mass = [&](const fields::ModeField& f) {
            double m = 0.0;
            for (size_t j = 0; j + 1 < zg.size(); ++j)
                m += 0.5 * (zg[j + 1] - zg[j]) *
                     (f.at(0, j).real() + f.at(0, j + 1).real());
            return m;
        };
        const double m0 = mass(w);
        double drift = 0.0;
        for (int n = 0; n < 20; ++n) {
            w = s.step(w);
            drift = std::max(drift, std::abs(mass(w) - m0) / std::abs(m0));
        }
        check("stokes: zero-mode mass is conserved", drift < 1e-8,
              "max rel drift " + num(drift));
    }

    { // radial Poisson against the solid-rotation stream function
        const auto rg = uniform(0.0, 1.0, 400);
        cvec rhs(rg.size(), 4.0);
        const cvec phi = elliptic::solve_radial_poisson(0, rg, rhs, 0.0);
        double worst = 0.0;
        for (size_t i = 0; i < rg.size(); ++i)
            worst = std::max(worst,
                             std::abs(phi[i] - 4.0 * (rg[i] * rg[i] - 1.0) / 4.0));
        check("elliptic: radial Poisson solid rotation", worst < 1e-10,
              "max err " + num(worst));
    }

    { // cutoff partition values and C^1 continuity at the seams
        const solver::CutoffFunction cut(0.0225, 0.01125);
        bool ok = cut(0.03) == 1.0 && cut(0.046) == 0.0;
        for (double sd : {0.03375, 0.045}) {
            const double h = 1e-6;
            const double fd = (cut(sd + h) - cut(sd - h)) / (2.0 * h);
            ok = ok && std::abs(fd - cut.derivative(sd)) < 1e-3;
        }
        check("solver: cutoff plateau, support, and C1 seams", ok);
    }

    { // spectral wall pairing: omega = 1, slip = 1 integrates to -2 pi nu T
        const int nt = 16;
        cvec one(nt, 0.0);
        one[0] = 1.0;
        const double v = experiments::kato_integral({0.0, 0.5, 1.0}, {one, one, one},
                                                    {one, one, one}, 0.25);
        check("experiments: wall pairing identity", std::abs(v + 0.5 * pi) < 1e-13,
              "got " + num(v));
    }

    { // rate fit on an exact power law
        const auto fit = experiments::fit_rate(
            {{1e-2, 0.1}, {1e-3, 0.1 * std::sqrt(0.1)}, {1e-4, 0.01}});
        check("experiments: rate fit recovers 1/2",
              std::abs(fit.exponent - 0.5) < 1e-12 && fit.confidence > 1.0 - 1e-10);
    }

    { // config serialization is a parser fixed point
        const cli_io::RunConfig cfg = cli_io::parse_config("{}");
        const std::string canon = cli_io::config_json(cfg);
        bool ok = cli_io::config_json(cli_io::parse_config(canon)) == canon;
        bool rejected = false;
        try {
            cli_io::parse_config(R"({"physics": {"bogus": 1}})");
        } catch (const std::invalid_argument&) {
            rejected = true;
        }
        check("cli_io: config round-trip and unknown-key rejection", ok && rejected);
    }

    { // radial vorticity is a steady Euler flow
        const int nr = 256, nt = 16;
        const auto rg = uniform(0.0, 1.0, nr);
        elliptic::RadialField w0(rg, nt);
        for (int i = 0; i <= nr; ++i) w0.at(0, i) = 1.0 - 2.0 * rg[i] * rg[i];
        const auto hist = solver::euler_reference(w0, 0.1, 20, 2);
        double worst = 0.0;
        for (int i = 0; i <= nr; ++i)
            worst = std::max(worst,
                             std::abs(hist.omega.back().at(0, i) - w0.at(0, i)));
        check("solver: radial data is Euler-steady", worst < 1e-8,
              "max drift " + num(worst));
    }

    std::printf("%s\n", check.failed == 0 ? "all checks passed"
                                          : "validation FAILED");
    return check.failed == 0 ? 0 : 1;
}

// --------------------------------------------------------------------- run

int cmd_run(const std::string& config_path) {
    const cli_io::RunConfig cfg = cli_io::load_config(config_path);
    const auto& p = cfg.plan;
    std::printf("sweep: %zu viscosities, T = %g, grid %d x %d, ic \"%s\"\n",
                p.nus.size(), p.T, p.n_theta, p.n_z, p.ic.c_str());
    const experiments::SweepResult res = experiments::run_sweep(p);

    bool all_ok = true;
    for (const auto& r : res.runs) {
        std::printf(
            "  nu = %-8g dt = %-10g steps = %-6d energy slack = %-9.3g %s%s\n", r.nu,
            r.dt, r.steps, r.max_energy_slack, r.completed ? "done" : "FAILED",
            r.note.empty() ? "" : (" (" + r.note + ")").c_str());
        all_ok = all_ok && r.completed;
    }
    if (res.rate.used >= 2)
        std::printf("rate: sup_t ||u_nu - u_E|| ~ nu^%.3f (confidence %.3f, %d pts)\n",
                    res.rate.exponent, res.rate.confidence, res.rate.used);
    if (!p.output.empty()) std::printf("report written to %s\n", p.output.c_str());
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"viscous/inviscid vorticity experiments on the unit disk"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the sweep described by a config file");
    run->add_option("--config", config_path, "JSON plan")->required();

    app.add_subcommand("validate",
                       "quick built-in cross-module sanity checks; exit 0 on pass");

    std::string report_dir;
    auto* report =
        app.add_subcommand("report", "re-render summary and plots from records.csv");
    report->add_option("--dir", report_dir, "report directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("validate")) return cmd_validate();
        if (app.got_subcommand("run")) return cmd_run(config_path);
        cli_io::render_report_dir(report_dir);
        std::printf("report re-rendered in %s\n", report_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
