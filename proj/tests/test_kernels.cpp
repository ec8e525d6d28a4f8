#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vlab/error.hpp"
#include "vlab/fft.hpp"
#include "vlab/kernels.hpp"
#include "vlab/random.hpp"
#include "vlab/spline.hpp"

namespace vlab {
namespace {

constexpr double kPi = std::numbers::pi;

SpatialField cosine_density(int m, double a, int mode = 1) {
    SpatialField rho(1, m, 1, FieldKind::Density);
    for (int i = 0; i < m; ++i) rho.values[i] = 1.0 + a * std::cos(2.0 * kPi * mode * SpatialField::node(i, m));
    return rho;
}

TEST(Fft, RoundTripScalesByPoints) {
    Rng rng(3);
    for (int d = 1; d <= 3; ++d) {
        const int m = 8;
        std::vector<cplx> a(grid_points(d, m));
        for (auto& z : a) z = {rng.normal(), rng.normal()};
        auto b = a;
        fft_forward(b, d, m);
        fft_inverse(b, d, m);
        for (std::size_t i = 0; i < a.size(); ++i)
            EXPECT_NEAR(std::abs(b[i] / static_cast<double>(a.size()) - a[i]), 0.0, 1e-13);
    }
}

TEST(Fft, CoefficientsMatchDirectSum) {
    const int m = 12;
    Rng rng(5);
    std::vector<double> a(m);
    for (auto& x : a) x = rng.normal();
    const auto hat = fourier_coefficients(a, 1, m);
    for (int k = 0; k < m; ++k) {
        cplx s = 0.0;
        for (int i = 0; i < m; ++i) s += a[i] * std::exp(cplx(0.0, -2.0 * kPi * k * i / m));
        EXPECT_NEAR(std::abs(hat[k] - s / static_cast<double>(m)), 0.0, 1e-14);
    }
    const auto back = synthesize_real(hat, 1, m);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(back[i], a[i], 1e-13);
}

TEST(Fft, RealTransformsRoundTrip) {
    const int d = 2, m = 16;
    Rng rng(7);
    std::vector<double> a(grid_points(d, m));
    for (auto& x : a) x = rng.uniform();
    auto spec = fft_r2c(a, d, m);
    EXPECT_EQ(spec.size(), half_spectrum_size(d, m));
    std::vector<double> out(a.size());
    fft_c2r(spec, out, d, m);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(out[i] / a.size(), a[i], 1e-14);
}

TEST(Fft, Wavenumbers) {
    EXPECT_EQ(wavenumber(0, 8), 0);
    EXPECT_EQ(wavenumber(4, 8), 4);
    EXPECT_EQ(wavenumber(5, 8), -3);
    int k[2];
    wavevector(1 * 8 + 7, 2, 8, k);
    EXPECT_EQ(k[0], 1);
    EXPECT_EQ(k[1], -1);
}

TEST(Spline, ReproducesNodesAndCubics) {
    for (auto bc : {SplineBoundary::Periodic, SplineBoundary::Zero}) {
        const int n = 20;
        SplineSolver s(n, bc);
        Rng rng(11);
        std::vector<double> v(n), c(n);
        for (auto& x : v) x = rng.uniform();
        s.coefficients(v, c);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(s.evaluate(c, i), v[i], 1e-13);
    }
}

TEST(Spline, PeriodicIntegerShiftIsRotation) {
    const int n = 16;
    SplineSolver s(n, SplineBoundary::Periodic);
    std::vector<double> v(n), out(n), scratch;
    for (int i = 0; i < n; ++i) v[i] = std::sin(2.0 * kPi * i / n) + 0.1 * (i % 3);
    s.shift(v, out, 3.0, scratch);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(out[i], v[((i - 3) % n + n) % n], 1e-12);
}

TEST(Spline, PeriodicShiftOfSmoothDataIsAccurate) {
    const int n = 64;
    SplineSolver s(n, SplineBoundary::Periodic);
    std::vector<double> v(n), out(n), scratch;
    for (int i = 0; i < n; ++i) v[i] = std::cos(2.0 * kPi * i / n);
    s.shift(v, out, 0.37, scratch);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(out[i], std::cos(2.0 * kPi * (i - 0.37) / n), 1e-6);
}

TEST(GreenKernel, SpecExamples) {
    EXPECT_NEAR(green_kernel_1d(0.25).second, 0.25, 1e-15);
    EXPECT_NEAR(green_kernel_1d(-0.25).second, -0.25, 1e-15);
    EXPECT_NEAR(green_kernel_1d(0.5).second, 0.0, 1e-15);
    EXPECT_EQ(green_kernel_1d(0.0).second, 0.0);
    EXPECT_THROW(green_kernel_1d(0.7), DomainError);
}

TEST(GreenKernel, MatchesFourierOracleAtRationals) {
    for (long q : {2L, 3L, 4L, 7L, 10L, 64L, 97L}) {
        for (long p = -q / 2; p <= q / 2; ++p) {
            const double x = static_cast<double>(p) / q;
            if (x < -0.5 || x > 0.5) continue;
            const auto [g, k] = green_kernel_1d(x);
            const auto [go, ko] = oracle::green_fourier((p % q + q) % q, q);
            EXPECT_NEAR(g, go, 1e-11) << p << "/" << q;
            if (p != 0) EXPECT_NEAR(k, ko, 1e-11) << p << "/" << q;
        }
    }
}

TEST(GreenKernel, SolvesPoissonWithZeroMean) {
    const double mean = oracle::simpson([](double x) { return green_kernel_1d(x).first; }, -0.5, 0.5, 2000);
    EXPECT_NEAR(mean, 0.0, 1e-13);
    // Away from 0, G'' = -1 and the jump of K at 0 is 1.
    const double h = 1e-4;
    for (double x : {-0.4, -0.1, 0.2, 0.45}) {
        const double second = (green_kernel_1d(x + h).first - 2.0 * green_kernel_1d(x).first +
                               green_kernel_1d(x - h).first) / (h * h);
        EXPECT_NEAR(second, -1.0, 1e-6);
    }
    EXPECT_NEAR(green_kernel_1d(1e-12).second - green_kernel_1d(-1e-12).second, 1.0, 1e-11);
}

TEST(KernelFourier, SpecExamples) {
    auto k1 = kernel_fourier(1, 8);
    EXPECT_DOUBLE_EQ(k1.green_hat[1], -1.0 / (4.0 * kPi * kPi));
    EXPECT_EQ(k1.green_hat[0], 0.0);
    EXPECT_EQ(k1.force_hat[0], cplx(0.0));
    auto k2 = kernel_fourier(2, 8);
    EXPECT_DOUBLE_EQ(k2.green_hat[1 * 8 + 1], -1.0 / (8.0 * kPi * kPi));
    EXPECT_THROW(kernel_fourier(1, 7), DomainError);
}

TEST(KernelFourier, GreenMatchesQuadratureOfClosedForm) {
    auto k1 = kernel_fourier(1, 16);
    for (int k = 1; k <= 4; ++k) {
        const double q = oracle::simpson(
            [k](double x) { return green_kernel_1d(x).first * std::cos(2.0 * kPi * k * x); }, -0.5, 0.5, 4000);
        EXPECT_NEAR(k1.green_hat[k], q, 1e-12);
    }
}

TEST(KernelFourier, ForceIsOddAndReal) {
    for (int d = 1; d <= 3; ++d) {
        const int m = 8;
        auto kf = kernel_fourier(d, m);
        const std::size_t n = grid_points(d, m);
        for (int a = 0; a < d; ++a) {
            for (std::size_t idx = 0; idx < n; ++idx) {
                int k[3], mk[3];
                wavevector(idx, d, m, k);
                bool nyquist = false;
                for (int b = 0; b < d; ++b) {
                    mk[b] = -k[b];
                    nyquist |= std::abs(k[b]) == m / 2;
                }
                if (nyquist) continue;
                const cplx f = force_multiplier(d, m, a, k);
                const cplx g = force_multiplier(d, m, a, mk);
                EXPECT_NEAR(std::abs(g - std::conj(f)), 0.0, 1e-15);
                EXPECT_NEAR(std::abs(g + f), 0.0, 1e-15);
            }
        }
    }
}

TEST(Mollifier, MassSupportAndSymmetry) {
    for (const char* profile : {"bump"}) {
        for (double r : {0.2, 1.0 / 16, 1.0 / 64}) {
            MollifierSpec spec{r, profile};
            const double m1 = oracle::simpson([&](double x) { return mollifier_value(spec, 1, std::abs(x)); }, -r, r, 4000);
            EXPECT_NEAR(m1, 1.0, 1e-12);
            const double m2 = oracle::simpson(
                [&](double s) { return 2.0 * kPi * s * mollifier_value(spec, 2, s); }, 0.0, r, 4000);
            EXPECT_NEAR(m2, 1.0, 1e-12);
            const double m3 = oracle::simpson(
                [&](double s) { return 4.0 * kPi * s * s * mollifier_value(spec, 3, s); }, 0.0, r, 4000);
            EXPECT_NEAR(m3, 1.0, 1e-12);
            EXPECT_EQ(mollifier_value(spec, 1, r), 0.0);
            EXPECT_EQ(mollifier_value(spec, 1, 1.5 * r), 0.0);
            EXPECT_GT(mollifier_value(spec, 1, 0.5 * r), 0.0);
        }
    }
    EXPECT_THROW(mollifier_profile("triangle", 0.5), DomainError);
}

TEST(Mollifier, SampledMassIsOneOnEveryGrid) {
    for (int d = 1; d <= 2; ++d) {
        for (int m : {64, 128}) {
            for (double r : {0.2, 0.125}) {
                const auto s = mollifier_samples({r, "bump"}, d, m);
                double mass = 0.0;
                for (double v : s) {
                    EXPECT_GE(v, 0.0);
                    mass += v * std::pow(1.0 / m, d);
                }
                EXPECT_NEAR(mass, 1.0, 1e-12);
                const auto mult = mollifier_multipliers({r, "bump"}, d, m);
                EXPECT_EQ(mult[0], 1.0);
            }
        }
    }
}

TEST(Mollifier, FourierTransformMatchesQuadrature) {
    MollifierSpec spec{0.1, "bump"};
    for (double k : {0.0, 1.0, 3.0, 7.5}) {
        const double q = oracle::simpson(
            [&](double x) { return mollifier_value(spec, 1, std::abs(x)) * std::cos(2.0 * kPi * k * x); }, -0.1, 0.1, 4000);
        EXPECT_NEAR(mollifier_fourier(spec, 1, k), q, 1e-10);
    }
}

TEST(ForceTable, Errors) {
    EXPECT_THROW(mollified_force_table({0.25, "bump"}, 1.0, 256, 1), DomainError);
    EXPECT_THROW(mollified_force_table({0.3, "bump"}, 1.0, 256, 1), DomainError);
    EXPECT_THROW(mollified_force_table({1.0 / 32, "bump"}, 1.0, 128, 1), ResolutionError);
    EXPECT_THROW(mollified_force_table({1.0 / 32, "bump"}, 1.0, 257, 1), ResolutionError);
    EXPECT_NO_THROW(mollified_force_table({1.0 / 32, "bump"}, 1.0, 256, 1));
}

TEST(ForceTable, OddAndZeroMean) {
    for (int d = 1; d <= 2; ++d) {
        const int m = d == 1 ? 256 : 64;
        const double r = d == 1 ? 1.0 / 32 : 1.0 / 8;
        auto t = mollified_force_table({r, "bump"}, 0.5, m, d);
        double peak = 0.0;
        for (double v : t.force) peak = std::max(peak, std::abs(v));
        ASSERT_GT(peak, 0.0);
        const std::size_t n = t.points();
        for (int a = 0; a < d; ++a) {
            double sum = 0.0;
            for (std::size_t idx = 0; idx < n; ++idx) {
                int k[2], mirror = 0;
                std::size_t rem = idx;
                for (int b = d - 1; b >= 0; --b) {
                    k[b] = static_cast<int>(rem % m);
                    rem /= m;
                }
                for (int b = 0; b < d; ++b) mirror = mirror * m + (m - k[b]) % m;
                const double v = t.force[a * n + idx];
                EXPECT_LE(std::abs(v + t.force[a * n + mirror]), 1e-10 * peak);
                sum += v;
            }
            EXPECT_NEAR(sum / n, 0.0, 1e-12 * peak);
        }
    }
}

TEST(ForceTable, UniformDensityGivesZeroForce) {
    auto t = mollified_force_table({1.0 / 32, "bump"}, 0.5, 256, 1);
    SpatialField rho(1, 256, 1, FieldKind::Density);
    std::fill(rho.values.begin(), rho.values.end(), 1.0);
    EXPECT_LE(max_abs(mollified_force_field(t, rho)), 1e-12);
}

TEST(ForceTable, ConvergesToSpectralForceAsRadiusHalves) {
    const int m = 1024;
    Rng rng(13);
    SpatialField rho(1, m, 1, FieldKind::Density);
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = rng.uniform(-0.1, 0.1);
    for (auto& x : b) x = rng.uniform(-0.1, 0.1);
    for (int i = 0; i < m; ++i) {
        const double x = SpatialField::node(i, m);
        double v = 1.0;
        for (int k = 1; k <= 6; ++k) v += a[k - 1] * std::cos(2 * kPi * k * x) + b[k - 1] * std::sin(2 * kPi * k * x);
        rho.values[i] = v;
    }
    const auto exact = spectral_force_field(rho, 0.5);
    double prev = INFINITY;
    for (double r : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
        auto t = mollified_force_table({r, "bump"}, 0.5, m, 1);
        const auto e = mollified_force_field(t, rho);
        double diff = 0.0;
        for (int i = 0; i < m; ++i) diff = std::max(diff, std::abs(e.values[i] - exact.values[i]));
        EXPECT_LT(diff, prev);
        prev = diff;
    }
    EXPECT_LT(prev, 1e-2 * max_abs(exact));
}

TEST(ForceTable, MatchesClosedFormConvolutionForSmallRadius) {
    // eps^-2 K * (rho - 1) against the closed-form kernel by quadrature.
    const int m = 512;
    const double eps = 0.5;
    auto rho = cosine_density(m, 0.3);
    auto t = mollified_force_table({1.0 / 64, "bump"}, eps, m, 1);
    const auto e = mollified_force_field(t, rho);
    for (int i = 0; i < m; i += 37) {
        const double x = SpatialField::node(i, m);
        const double q = oracle::simpson(
            [&](double y) {
                const double lag = wrap_torus(x - y);
                return green_kernel_1d(lag).second * 0.3 * std::cos(2 * kPi * y);
            },
            -0.5, 0.5, 20000);
        EXPECT_NEAR(e.values[i], q / (eps * eps), 2e-3);
    }
}

TEST(SpectralPoisson, DivergenceRecoversDensity) {
    Rng rng(17);
    for (int d = 1; d <= 2; ++d) {
        const int m = 32;
        SpatialField rho(d, m, 1, FieldKind::Density);
        std::vector<double> amp(8);
        for (auto& x : amp) x = rng.uniform(-0.2, 0.2);
        for (std::size_t idx = 0; idx < rho.points(); ++idx) {
            double x[2] = {SpatialField::node(static_cast<int>(idx % m), m), 0.0};
            if (d == 2) x[1] = SpatialField::node(static_cast<int>(idx / m), m);
            double v = 1.0;
            for (int k = 1; k <= 4; ++k)
                v += amp[k - 1] * std::cos(2 * kPi * k * x[0]) + amp[k + 3] * std::sin(2 * kPi * (k * x[1] + x[0]));
            rho.values[idx] = v;
        }
        const double eps = 0.3;
        const auto e = spectral_force_field(rho, eps);
        const auto div = spectral_divergence(e);
        double scale = 0.0;
        for (std::size_t i = 0; i < rho.points(); ++i) scale = std::max(scale, std::abs(rho.values[i] - 1.0) / (eps * eps));
        for (std::size_t i = 0; i < rho.points(); ++i)
            EXPECT_NEAR(div.values[i], (rho.values[i] - 1.0) / (eps * eps), 1e-8 * scale);
    }
}

TEST(SpectralPoisson, SingleModeClosedForm) {
    const int m = 64;
    const double eps = 0.2, a = 0.4;
    const auto rho = cosine_density(m, a);
    const auto e = spectral_force_field(rho, eps);
    for (int i = 0; i < m; ++i) {
        const double x = SpatialField::node(i, m);
        EXPECT_NEAR(e.values[i], a * std::sin(2 * kPi * x) / (2 * kPi * eps * eps), 1e-10);
    }
}

TEST(Lipschitz, UniformDensityHasZeroConstant) {
    SpatialField h(1, 256, 1, FieldKind::Density);
    std::fill(h.values.begin(), h.values.end(), 1.0);
    EXPECT_LE(lipschitz_estimate(MollifierSpec{1.0 / 16, "bump"}, h), 1e-10);
}

TEST(Lipschitz, GrowsAtMostLogarithmically) {
    const int m = 8192;
    SpatialField h(1, m, 1, FieldKind::Density);
    for (int i = 0; i < m; ++i) h.values[i] = std::abs(SpatialField::node(i, m)) < 0.1 ? 1.0 : 0.0;
    std::vector<double> ratio;
    for (int e = 4; e <= 10; ++e) {
        const double r = std::ldexp(1.0, -e);
        const double L = lipschitz_estimate(MollifierSpec{r, "bump"}, h);
        ratio.push_back(L / std::abs(std::log(r)));
    }
    const double first = ratio.front();
    for (double q : ratio) EXPECT_LE(q, 2.0 * first);
}

TEST(Lipschitz, DoublingDensityAtMostDoublesConstant) {
    const int m = 2048;
    Rng rng(19);
    SpatialField h(1, m, 1, FieldKind::Density), h2 = h;
    for (int i = 0; i < m; ++i) {
        h.values[i] = rng.uniform();
        h2.values[i] = 2.0 * h.values[i];
    }
    const MollifierSpec spec{1.0 / 64, "bump"};
    const double l1 = lipschitz_estimate(spec, h), l2 = lipschitz_estimate(spec, h2);
    EXPECT_LE(l2, 2.0 * l1 * (1.0 + 1e-12));
}

TEST(AnalyticNorm, SpecExamples) {
    const int m = 32;
    SpatialField one(1, m, 1, FieldKind::Generic);
    std::fill(one.values.begin(), one.values.end(), 1.0);
    EXPECT_NEAR(analytic_norm(one, 2.0).value, 1.0, 1e-14);
    EXPECT_NEAR(analytic_norm(one, 7.0).value, 1.0, 1e-14);
    SpatialField c(1, m, 1, FieldKind::Generic);
    for (int i = 0; i < m; ++i) c.values[i] = std::cos(2 * kPi * SpatialField::node(i, m));
    EXPECT_NEAR(analytic_norm(c, 2.0).value, 2.0, 1e-13);
    EXPECT_NEAR(analytic_norm(c, 3.0).value, 3.0, 1e-13);
    EXPECT_EQ(analytic_norm(c, 3.0).modes, 2);
}

TEST(AnalyticNorm, Errors) {
    std::vector<cplx> coeffs(2048, cplx(1.0));
    EXPECT_THROW(analytic_norm(coeffs, 1.0), DomainError);
    EXPECT_THROW(analytic_norm(coeffs, 10.0), OverflowError);
}

}  // namespace
}  // namespace vlab
