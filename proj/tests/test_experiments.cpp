#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortexlab/experiments.hpp"

using namespace vortexlab;
using namespace vortexlab::experiments;
constexpr double pi = std::numbers::pi;

TEST_CASE("mode_profile has zero wall trace and zero harmonic moment") {
    for (int a = 1; a <= 6; ++a) {
        CHECK(std::abs(mode_profile(a, 1.0)) < 1e-14);
        // int_0^1 q_a(r) r^{a+1} dr = 0 makes single-mode data no-slip
        // compatible; Simpson on a fine grid
        const int n = 4000;
        const double h = 1.0 / n;
        double mom = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double r = j * h;
            const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            mom += w * mode_profile(a, r) * std::pow(r, a + 1);
        }
        mom *= h / 3.0;
        CHECK(std::abs(mom) < 1e-10);
    }
    // alpha = 2 recovers the preset angular profile r^2 (1-r^2)^2 (1-2r^2)
    for (double r : {0.1, 0.35, 0.7, 0.93}) {
        const double s = 1.0 - r * r;
        CHECK(mode_profile(2, r) ==
              doctest::Approx(r * r * s * s * (1.0 - 2.0 * r * r)).epsilon(1e-13));
    }
}

TEST_CASE("fit_rate recovers power laws and flags degenerate data") {
    std::vector<std::pair<double, double>> lin, half, flat;
    for (double nu : {1e-2, 3e-3, 1e-3, 3e-4}) {
        lin.emplace_back(nu, 7.0 * nu);
        half.emplace_back(nu, 0.2 * std::sqrt(nu));
        flat.emplace_back(nu, 5.0);
    }
    const RateFit f1 = fit_rate(lin);
    CHECK(f1.exponent == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f1.confidence == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f1.used == 4);
    CHECK(fit_rate(half).exponent == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(fit_rate(flat).exponent) < 1e-12);

    // zero metrics are dropped; under two usable points the fit is void
    std::vector<std::pair<double, double>> sparse = {
        {1e-2, 0.0}, {1e-3, 1e-3}, {1e-4, 0.0}};
    const RateFit fs = fit_rate(sparse);
    CHECK(fs.used == 1);
    CHECK(fs.exponent == 0.0);
    CHECK(fs.confidence == 0.0);
}

TEST_CASE("kato_integral pairing and trapezoid on synthetic traces") {
    const int nt = 16;
    std::vector<double> times = {0.0, 0.5, 1.0};
    cvec zero(nt, 0.0), one(nt, 0.0);
    one[0] = 1.0;

    // a zero wall trace kills the integral regardless of the slip
    CHECK(kato_integral(times, {zero, zero, zero}, {one, one, one}, 1.0) == 0.0);
    // omega = 1 and u_E . tau = 1 on the circle: -nu int oint = -2 pi nu T
    CHECK(kato_integral(times, {one, one, one}, {one, one, one}, 1.0) ==
          doctest::Approx(-2.0 * pi).epsilon(1e-14));
    CHECK(kato_integral(times, {one, one, one}, {one, one, one}, 0.25) ==
          doctest::Approx(-0.5 * pi).epsilon(1e-14));

    // orthogonal angular modes do not pair: omega in mode 3, slip in mode 0
    cvec m3(nt, 0.0);
    m3[3] = 2.0;
    CHECK(kato_integral(times, {m3, m3, m3}, {one, one, one}, 1.0) == 0.0);

    CHECK_THROWS_AS(kato_integral({0.0, 1.0}, {one, one, one}, {one, one, one}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(kato_integral(times, {one, one, one}, {zero, zero, cvec(8)}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("validate_plan rejects out-of-contract plans with pointed messages") {
    SweepPlan ok;
    CHECK_NOTHROW(validate_plan(ok));

    SweepPlan p = ok;
    p.nus = {1e-3, 1e-2};
    CHECK_THROWS_WITH_AS(validate_plan(p),
                         "plan: nus must be strictly descending (reorder the list)",
                         std::invalid_argument);
    p = ok;
    p.nus = {1e-2, -1e-3};
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.lambda = 1.5;
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.n_theta = 21;
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.n_z = 8;
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.ic = "vortex-patch";
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.ic_modes = {{p.n_theta / 2, 0.1}}; // outside the resolvable band
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.norms.rho0 = 0.2;
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
    p = ok;
    p.norms.eps0 = 0.6;
    CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
}

TEST_CASE("stability_check margin arithmetic on synthetic records") {
    ExperimentRecord r;
    r.t = 0.5;
    r.grad_bound = 1.0;
    r.gronwall_rhs = 1.0;
    r.kato_integral = -0.1;
    r.euler_diss = 0.2;
    r.l2_diff = 0.5;
    const double grow = std::exp(2.0 * r.t * r.grad_bound);
    std::vector<ExperimentRecord> recs = {r, r};
    recs[1].l2_diff = 10.0; // a gross violation

    const auto pts = stability_check(recs);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].ok);
    CHECK(pts[0].margin ==
          doctest::Approx(1.0 + grow * 0.3 - 0.25).epsilon(1e-14));
    CHECK_FALSE(pts[1].ok);
    CHECK(pts[1].margin < 0.0);
}

TEST_CASE("run_sweep on zero data stays identically at rest") {
    SweepPlan plan;
    plan.nus = {1e-2, 1e-3};
    plan.T = 0.05;
    plan.n_theta = 16;
    plan.n_z = 48;
    plan.n_records = 2;
    plan.ic = "zero";
    const SweepResult res = run_sweep(plan);

    REQUIRE(res.runs.size() == 2);
    REQUIRE(res.records.size() == 2 * (plan.n_records + 1));
    for (const auto& r : res.runs) {
        CHECK(r.completed);
        CHECK(r.max_energy_slack == 0.0);
    }
    for (const auto& rec : res.records) {
        CHECK(rec.l2_diff == 0.0);
        CHECK(rec.bdry_vort == 0.0);
        CHECK(rec.kato_integral == 0.0);
        CHECK(rec.energy_lhs == 0.0);
        CHECK(rec.l1_rho == 0.0);
    }
    CHECK(res.rate.used == 0); // nothing to fit against
}

TEST_CASE("short preset sweep: budgets, record layout, and stability chain") {
    SweepPlan plan;
    plan.nus = {3e-3};
    plan.T = 0.05;
    plan.n_theta = 32;
    plan.n_z = 64;
    plan.n_records = 2;
    const SweepResult res = run_sweep(plan);

    REQUIRE(res.runs.size() == 1);
    CHECK(res.runs[0].completed);
    CHECK(res.runs[0].max_energy_slack < 1e-3);
    CHECK(res.runs[0].spectral_tail < 1e-4);
    REQUIRE(res.records.size() == static_cast<size_t>(plan.n_records + 1));

    CHECK(res.records.front().t == 0.0);
    CHECK(res.records.back().t == doctest::Approx(plan.T).epsilon(1e-12));
    // zero-moment data with no wall slip starts the runs on top of each other
    CHECK(res.records.front().l2_diff < 1e-6);
    for (size_t k = 1; k < res.records.size(); ++k) {
        CHECK(res.records[k].t > res.records[k - 1].t);
        CHECK(res.records[k].euler_diss >= res.records[k - 1].euler_diss);
        CHECK(res.records[k].l2_diff >= 0.0);
        CHECK(std::isfinite(res.records[k].a_beta));
        CHECK(res.records[k].l1_rho > 0.0);
    }
    for (const auto& p : stability_check(res.records)) CHECK(p.ok);
}
