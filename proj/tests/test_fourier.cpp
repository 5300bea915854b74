#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vortexlab/fourier.hpp"

using namespace vortexlab::fourier;
constexpr double pi = std::numbers::pi;

TEST_CASE("forward transform of constants and single harmonics") {
    const int N = 32;
    std::vector<double> c(N, 3.5);
    cvec m = forward_real(c);
    CHECK(std::abs(m[0] - cplx{3.5, 0.0}) < 1e-14);
    for (int k = 1; k < N; ++k) CHECK(std::abs(m[k]) < 1e-13);

    std::vector<double> cosw(N);
    for (int j = 0; j < N; ++j) cosw[j] = std::cos(2 * pi * 3 * j / N);
    m = forward_real(cosw);
    CHECK(std::abs(m[storage_index(3, N)] - cplx{0.5, 0.0}) < 1e-13);
    CHECK(std::abs(m[storage_index(-3, N)] - cplx{0.5, 0.0}) < 1e-13);
    CHECK(std::abs(m[0]) < 1e-13);
}

TEST_CASE("round trip is the identity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1, 1);
    const int N = 48;
    cvec x(N);
    for (auto& v : x) v = {dist(rng), dist(rng)};
    cvec back = inverse(forward(x));
    for (int j = 0; j < N; ++j) CHECK(std::abs(back[j] - x[j]) < 1e-13);
}

TEST_CASE("signed wavenumber and storage index are inverse maps") {
    for (int N : {8, 9, 64}) {
        for (int m = 0; m < N; ++m) {
            const int a = signed_wavenumber(m, N);
            CHECK(a >= -N / 2);
            CHECK(a <= N / 2);
            if (a != N / 2 || N % 2 == 1) CHECK(storage_index(a, N) == m);
        }
    }
}

TEST_CASE("trig interpolation reproduces smooth samples off-grid") {
    const int N = 64;
    auto f = [](double t) { return std::exp(std::sin(2 * pi * t)) - 2.0; };
    std::vector<double> x(N);
    for (int j = 0; j < N; ++j) x[j] = f(static_cast<double>(j) / N);
    cvec m = forward_real(x);
    for (double t : {0.013, 0.377, 0.5001, 0.961})
        CHECK(std::abs(eval_trig_real(m, t) - f(t)) < 1e-12);
}

TEST_CASE("spectral derivative matches closed forms") {
    const int N = 64;
    const double L = 2 * pi;
    std::vector<double> x(N);
    for (int j = 0; j < N; ++j) x[j] = std::sin(3.0 * L * j / N);
    std::vector<double> d = derivative_real(x, L);
    std::vector<double> d2 = derivative_real(x, L, 2);
    for (int j = 0; j < N; ++j) {
        const double th = L * j / N;
        CHECK(d[j] == doctest::Approx(3.0 * std::cos(3 * th)).epsilon(1e-11));
        CHECK(d2[j] == doctest::Approx(-9.0 * std::sin(3 * th)).epsilon(1e-11));
    }
}

TEST_CASE("derivative of an analytic function converges spectrally") {
    auto f = [](double t) { return 1.0 / (2.0 + std::cos(2 * pi * t)); };
    auto fp = [](double t) {
        const double c = 2.0 + std::cos(2 * pi * t);
        return 2 * pi * std::sin(2 * pi * t) / (c * c);
    };
    double err32 = 0, err64 = 0;
    for (int N : {32, 64}) {
        std::vector<double> x(N);
        for (int j = 0; j < N; ++j) x[j] = f(static_cast<double>(j) / N);
        std::vector<double> d = derivative_real(x, 1.0);
        double e = 0;
        for (int j = 0; j < N; ++j)
            e = std::max(e, std::abs(d[j] - fp(static_cast<double>(j) / N)));
        (N == 32 ? err32 : err64) = e;
    }
    CHECK(err64 < 1e-10);
    CHECK(err64 < err32);
}
