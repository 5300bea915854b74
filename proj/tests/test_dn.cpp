#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortexlab/dn.hpp"

using namespace vortexlab;
using namespace vortexlab::dn;
using fields::ModeField;
using fields::graded_nodes;
using geometry::BoundaryCurve;
using geometry::GeodesicChart;
using geometry::ScaledChart;
constexpr double pi = std::numbers::pi;

namespace {
std::shared_ptr<const ScaledChart> disk_chart(double lambda = 0.1) {
    return std::make_shared<ScaledChart>(GeodesicChart(BoundaryCurve::circle(1.0)),
                                         lambda);
}
} // namespace

TEST_CASE("flat strip: exact half-plane extension and DN multiplier") {
    auto curve = BoundaryCurve::flat_strip(2 * pi);
    auto chart = std::make_shared<ScaledChart>(GeodesicChart(curve), 0.25, 0.2, 0.09);
    const int Nt = 16;
    auto zg = graded_nodes(chart->strip_depth(), 64, 0.0);
    cvec trace(Nt, cplx{0, 0});
    trace[3] = cplx{1.5, -0.5};
    trace[0] = 2.0;
    auto w = harmonic_extend(chart, zg, trace);
    for (size_t j = 0; j < zg.size(); ++j) {
        const double kap = chart->mode_wavenumber(3);
        CHECK(std::abs(w.at(3, j) - trace[3] * std::exp(-kap * zg[j])) < 1e-14);
        CHECK(std::abs(w.at(0, j) - 2.0) < 1e-14); // constant extension
        CHECK(std::abs(w.at(5, j)) == 0.0);
    }
    auto g = apply_dn(*chart, trace);
    CHECK(std::abs(g[3] - trace[3] * 3.0) < 1e-14); // |k| = 3 at period 2 pi
    CHECK(std::abs(g[0]) == 0.0);                   // DN of a constant vanishes
}

TEST_CASE("disk: separation-of-variables extension r^{|n|} e^{i n theta}") {
    auto chart = disk_chart();
    const int Nt = 64;
    auto zg = graded_nodes(chart->strip_depth(), 128, 0.0);
    for (int n : {1, 3, 7}) {
        cvec trace(Nt, cplx{0, 0});
        trace[fourier::storage_index(n, Nt)] = 1.0;
        auto w = harmonic_extend(chart, zg, trace);
        double worst = 0.0;
        for (size_t j = 0; j < zg.size(); ++j) {
            const double r = 1.0 - zg[j] / chart->lambda();
            worst = std::max(worst, std::abs(w.at(n, j) - std::pow(r, n)));
            // no spurious leakage into other modes
            worst = std::max(worst, std::abs(w.at(n + 2, j)));
        }
        CHECK(worst < 1e-10);
    }
    // zero trace extends to zero
    auto w0 = harmonic_extend(chart, zg, cvec(Nt, cplx{0, 0}));
    for (size_t j = 0; j < zg.size(); ++j) CHECK(std::abs(w0.at(2, j)) == 0.0);
}

TEST_CASE("disk DN is the mode multiplier |n| to high accuracy") {
    auto chart = disk_chart();
    const int Nt = 64;
    for (int n = 1; n <= 16; ++n) {
        cvec trace(Nt, cplx{0, 0});
        trace[fourier::storage_index(n, Nt)] = 1.0;
        auto g = apply_dn(*chart, trace);
        CHECK(std::abs(g[fourier::storage_index(n, Nt)] - double(n)) < 0.01 * n);
    }
    // constant trace
    cvec c(Nt, cplx{0, 0});
    c[0] = 5.0;
    auto g0 = apply_dn(*chart, c);
    for (int m = 0; m < Nt; ++m) CHECK(std::abs(g0[m]) < 1e-10);
}

TEST_CASE("the dense physical DN matrix is symmetric positive semidefinite") {
    auto chart = disk_chart();
    const int Nt = 64;
    // physical matrix: column k = DN applied to the delta trace at sample k
    Eigen::MatrixXd D(Nt, Nt);
    for (int k = 0; k < Nt; ++k) {
        std::vector<double> delta(Nt, 0.0);
        delta[k] = 1.0;
        auto g = apply_dn(*chart, fourier::forward_real(delta));
        auto phys = fourier::inverse_real(g);
        for (int i = 0; i < Nt; ++i) D(i, k) = phys[i];
    }
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (D + D.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("correction operator vanishes on the disk") {
    auto d = DNDecomposition::build(*disk_chart(), 32);
    CHECK(d.correction_norm < 1e-8);
    CHECK(d.principal[fourier::storage_index(4, 32)] ==
          doctest::Approx(40.0)); // |kappa| = n / lambda
    cvec zero(32, cplx{0, 0});
    for (auto v : d.apply(zero)) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("correction norm shrinks like lambda^2 at fixed scaled perturbation") {
    // boundary perturbation coefficient eps0 * lambda^3 keeps gammatilde of
    // the same size across lambda, so the correction scales like lambda^2
    const double eps0 = 2.0;
    auto norm_at = [&](double lam) {
        auto curve = BoundaryCurve::fourier_perturbed_circle(
            1.0, {0.0, eps0 * lam * lam * lam}, {});
        ScaledChart chart{GeodesicChart(curve), lam};
        return DNDecomposition::build(chart, 32).correction_norm;
    };
    const double c1 = norm_at(0.2), c2 = norm_at(0.1), c3 = norm_at(0.05);
    CHECK(c1 > c2);
    CHECK(c2 > c3);
    CHECK(c1 / c2 > 2.0);
    CHECK(c1 / c2 < 8.0);
    CHECK(c2 / c3 > 2.0);
    CHECK(c2 / c3 < 8.0);
}

TEST_CASE("extension satisfies the discrete per-mode interior equation") {
    auto chart = disk_chart();
    const int Nt = 32, Nz = 512;
    auto zg = graded_nodes(chart->strip_depth(), Nz, 0.0);
    cvec trace(Nt, cplx{0, 0});
    trace[fourier::storage_index(2, Nt)] = 1.0;
    trace[fourier::storage_index(4, Nt)] = cplx{0.5, 0.25};
    auto w = harmonic_extend(chart, zg, trace);
    const double lam = chart->lambda(), h = zg[1] - zg[0];
    double worst = 0.0;
    for (int a : {2, 4}) {
        const double kap = chart->mode_wavenumber(a);
        double scale = 0.0;
        for (int j = 1; j < Nz; ++j) scale = std::max(scale, std::abs(w.at(a, j)));
        for (int j = 1; j < Nz; ++j) {
            const auto rc = chart->remainder_coefficients(zg[j], 0.0);
            const cplx d2 =
                (w.at(a, j - 1) - 2.0 * w.at(a, j) + w.at(a, j + 1)) / (h * h);
            const cplx d1 = (w.at(a, j + 1) - w.at(a, j - 1)) / (2 * h);
            const cplx res = d2 - kap * kap * w.at(a, j) +
                             lam * lam * (-rc.m * kap * kap * w.at(a, j) +
                                          rc.cz * d1 +
                                          cplx{0.0, rc.ct * kap} * w.at(a, j));
            worst = std::max(worst, std::abs(res) / (kap * kap * scale));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("scaled decomposition agrees with the direct DN application") {
    const double lam = 0.1;
    auto curve = BoundaryCurve::fourier_perturbed_circle(1.0, {0.002}, {0.001});
    ScaledChart chart{GeodesicChart(curve), lam};
    const int Nt = 32;
    auto d = DNDecomposition::build(chart, Nt);
    cvec trace(Nt, cplx{0, 0});
    trace[fourier::storage_index(1, Nt)] = 1.0;
    trace[fourier::storage_index(-3, Nt)] = cplx{0.2, 0.7};
    auto via_matrix = d.apply(trace);
    auto direct = apply_dn(chart, trace);
    for (int m = 0; m < Nt; ++m)
        CHECK(std::abs(via_matrix[m] - direct[m] / lam) < 1e-9);
}
