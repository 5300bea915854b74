#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vortexlab/norms.hpp"

using namespace vortexlab;
using namespace vortexlab::norms;
using fields::InteriorField;
using fields::ModeField;
using fields::graded_nodes;
using fourier::cplx;
using geometry::BoundaryCurve;
using geometry::GeodesicChart;
using geometry::ScaledChart;
constexpr double pi = std::numbers::pi;

namespace {
std::shared_ptr<const ScaledChart> disk_chart(double lambda = 0.1) {
    return std::make_shared<ScaledChart>(GeodesicChart(BoundaryCurve::circle(1.0)),
                                         lambda);
}

ModeField zero_field(const std::shared_ptr<const ScaledChart>& chart, int Nt = 16,
                     int Nz = 4000, double zmax = 0.12) {
    return ModeField(chart, graded_nodes(zmax, Nz, 0.0), Nt);
}

// random real field with modes limited to |alpha| <= amax and smooth profiles
ModeField random_field(const std::shared_ptr<const ScaledChart>& chart, int Nt,
                       int amax, std::mt19937& rng, int Nz = 600) {
    ModeField f(chart, graded_nodes(0.12, Nz, 0.0), Nt);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int a = 0; a <= amax; ++a) {
        const cplx c{u(rng), a ? u(rng) : 0.0};
        const double p = 2.0 + u(rng), q = 10.0 * (1.0 + 0.5 * u(rng));
        for (int j = 0; j <= Nz; ++j) {
            const double z = f.zgrid()[j];
            const cplx v = c * (1.0 + p * z) * std::exp(-q * z);
            f.at(a, j) = v;
            if (a) f.at(-a, j) = std::conj(v);
        }
    }
    return f;
}

ModeField pointwise_product(const ModeField& f, const ModeField& g) {
    auto pf = f.to_physical(), pg = g.to_physical();
    for (size_t i = 0; i < pf.size(); ++i) pf[i] *= pg[i];
    return ModeField::from_physical(f.chart_ptr(), f.zgrid(), f.n_theta(), pf);
}
} // namespace

TEST_CASE("closed-form values of the analytic L1 norm") {
    auto chart = disk_chart();
    AnalyticNormConfig cfg; // delta0 from chart = 0.0225, rho = 0.045
    const double edge = 0.0225 + cfg.rho;

    auto z0 = zero_field(chart);
    CHECK(l1_rho(z0, cfg) == 0.0);

    auto c0 = zero_field(chart);
    for (int j = 0; j < c0.n_z(); ++j) c0.at(0, j) = 1.0;
    CHECK(l1_rho(c0, cfg) == doctest::Approx(edge).epsilon(1e-9));

    auto c3 = zero_field(chart);
    for (int j = 0; j < c3.n_z(); ++j) c3.at(3, j) = 1.0;
    const double exact = (std::exp(3.0 * cfg.eps0 * edge) - 1.0) / (3.0 * cfg.eps0);
    CHECK(l1_rho(c3, cfg) == doctest::Approx(exact).epsilon(1e-8));

    // bad configs are rejected
    AnalyticNormConfig bad = cfg;
    bad.rho = 0.2;
    CHECK_THROWS_AS((void)l1_rho(c0, bad), std::invalid_argument);
    bad = cfg;
    bad.eps0 = 0.7;
    CHECK_THROWS_AS((void)l1_rho(c0, bad), std::invalid_argument);
}

TEST_CASE("Linf norm, ordering, and the k = 0 reduction") {
    auto chart = disk_chart();
    AnalyticNormConfig cfg;
    auto c = zero_field(chart, 8, 1200);
    for (int j = 0; j < c.n_z(); ++j) c.at(0, j) = -2.5;
    CHECK(linf_rho(c, cfg) == doctest::Approx(2.5));
    CHECK(w_kinf(c, 0, cfg) == doctest::Approx(2.5));

    std::mt19937 rng(7);
    auto f = random_field(chart, 16, 5, rng);
    CHECK(w_k1(f, 0, cfg) == doctest::Approx(l1_rho(f, cfg)).epsilon(1e-13));
    const double edge = 0.0225 + cfg.rho;
    CHECK(l1_rho(f, cfg) <= edge * linf_rho(f, cfg) * (1.0 + 1e-12));
    CHECK_THROWS_AS((void)w_k1(f, 5, cfg), std::invalid_argument);
}

TEST_CASE("first-order norm of f = z picks up the scaled z-derivative") {
    auto chart = disk_chart();
    AnalyticNormConfig cfg;
    auto f = zero_field(chart, 8, 4000);
    for (int j = 0; j < f.n_z(); ++j) f.at(0, j) = f.zgrid()[j];
    const double edge = 0.0225 + cfg.rho;
    // z d/dz z = z, d/dtheta z = 0: w_11 = 2 * int_0^edge z dz = edge^2
    CHECK(w_k1(f, 1, cfg) == doctest::Approx(edge * edge).epsilon(1e-6));
}

TEST_CASE("algebra inequality holds with constant one") {
    auto chart = disk_chart();
    AnalyticNormConfig cfg;
    std::mt19937 rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        auto f = random_field(chart, 32, 7, rng, 300);
        auto g = random_field(chart, 32, 7, rng, 300);
        auto fg = pointwise_product(f, g);
        CHECK(l1_rho(fg, cfg) <= linf_rho(f, cfg) * l1_rho(g, cfg) * (1.0 + 1e-12));
    }
}

TEST_CASE("derivative loss constant is bounded and batch-stable") {
    auto chart = disk_chart();
    AnalyticNormConfig cfg;
    const double pairs[][2] = {{0.06, 0.02}, {0.08, 0.04}, {0.05, 0.015}};
    auto batch_C = [&](unsigned seed) {
        std::mt19937 rng(seed);
        double C = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            auto f = random_field(chart, 32, 12, rng, 300);
            auto df = theta_derivative(f);
            for (auto [rho, rhop] : pairs) {
                AnalyticNormConfig a = cfg, b = cfg;
                a.rho = rho;
                b.rho = rhop;
                C = std::max(C, l1_rho(df, b) * (rho - rhop) / l1_rho(f, a));
            }
        }
        return C;
    };
    const double C1 = batch_C(101), C2 = batch_C(202);
    // theory: |kappa| = (2 pi / scaled period) |alpha| and
    // sup_x x e^{-eps0 x} = 1/(eps0 e)
    const double theory = (2 * pi / chart->scaled_period()) / (cfg.eps0 * std::exp(1.0));
    CHECK(C1 <= theory * 1.0001);
    CHECK(C2 <= theory * 1.0001);
    CHECK(std::abs(C1 - C2) / std::max(C1, C2) < 0.2);
}

TEST_CASE("rho-monotonicity of the analytic norm") {
    auto chart = disk_chart();
    std::mt19937 rng(13);
    auto f = random_field(chart, 16, 6, rng);
    AnalyticNormConfig cfg;
    double prev = 0.0;
    for (double rho : {0.01, 0.03, 0.05, 0.07, 0.089}) {
        cfg.rho = rho;
        const double v = l1_rho(f, cfg);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("interior Sobolev norms on the masked disk grid") {
    auto curve = BoundaryCurve::circle(1.0);
    const double h = 0.01, d_min = 0.1125; // lambda d >= delta0/2 at lambda = 0.1
    auto zero = InteriorField::covering(curve, h, d_min, [](double, double) {
        return 0.0;
    });
    CHECK(interior_sobolev(zero, 4) == 0.0);

    auto one = InteriorField::covering(curve, h, d_min, [](double, double) {
        return 1.0;
    });
    int count = 0;
    for (int q = 0; q < one.ny(); ++q)
        for (int i = 0; i < one.nx(); ++i) count += one.mask(i, q) ? 1 : 0;
    CHECK(interior_sobolev(one, 2) ==
          doctest::Approx(std::sqrt(count * h * h)).epsilon(1e-12));
    const double R = 1.0 - d_min;
    CHECK(interior_sobolev(one, 0) == doctest::Approx(std::sqrt(pi) * R).epsilon(0.01));

    auto sx = InteriorField::covering(curve, h, d_min, [](double x, double) {
        return std::sin(x);
    });
    // |sin|^2 + |cos|^2 integrates to the mask area
    CHECK(interior_sobolev(sx, 1) == doctest::Approx(std::sqrt(pi) * R).epsilon(0.02));
}

TEST_CASE("iterative norm: window, homogeneity, and grid consistency") {
    auto chart = disk_chart();
    AnalyticNormConfig cfg;
    cfg.beta = 2.0;
    std::mt19937 rng(17);

    CHECK_THROWS_AS((void)iterative_norm_A({}, cfg), std::invalid_argument);

    std::vector<NormRecord> recs;
    recs.push_back({0.0, zero_field(chart, 8, 400), 0.0});
    CHECK(iterative_norm_A(recs, cfg) == 0.0);

    recs.clear();
    recs.push_back({0.1, random_field(chart, 16, 4, rng), 0.3});
    const double a1 = iterative_norm_A(recs, cfg);
    auto doubled = recs[0].w;
    doubled *= 2.0;
    std::vector<NormRecord> recs2;
    recs2.push_back({0.1, doubled, 0.6});
    CHECK(iterative_norm_A(recs2, cfg) == doctest::Approx(2.0 * a1).epsilon(1e-12));

    // A dominates the summand at every rho-grid point of the record
    const double lam2 = chart->lambda() * chart->lambda();
    const double top = cfg.rho0 - lam2 * cfg.beta * 0.1;
    for (int q = 1; q <= 16; ++q) {
        AnalyticNormConfig at = cfg;
        at.rho = top * q / 17.0;
        const double v = w_k1(recs[0].w, 1, at) +
                         w_k1(recs[0].w, 2, at) * std::pow(top - at.rho, cfg.zeta);
        CHECK(a1 + 1e-12 >= v + 0.3);
    }

    // records outside the time window are rejected
    std::vector<NormRecord> late;
    late.push_back({cfg.rho0 / (lam2 * cfg.beta) + 1.0, recs[0].w, 0.0});
    CHECK_THROWS_AS((void)iterative_norm_A(late, cfg), std::invalid_argument);
}
