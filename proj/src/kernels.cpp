#include "vlab/kernels.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vlab/error.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

double unit_sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        default: throw DomainError("dimension must be 1, 2 or 3");
    }
}

void check_dim(int d) {
    if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3, got " + std::to_string(d));
}

}  // namespace

double mollifier_profile(const std::string& profile, double s) {
    if (profile == "bump") {
        if (s >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - s * s));
    }
    if (profile == "bump2") {
        if (s >= 1.0) return 0.0;
        return std::exp(-2.0 / (1.0 - s * s));
    }
    throw DomainError("unknown mollifier profile '" + profile + "'");
}

double mollifier_normalization(int d, const std::string& profile) {
    check_dim(d);
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto f = [&](double s) { return mollifier_profile(profile, s) * std::pow(s, d - 1); };
    const double radial = integrator.integrate(f, 0.0, 1.0);
    return 1.0 / (unit_sphere_area(d) * radial);
}

double mollifier_value(const MollifierSpec& spec, int d, double dist) {
    const double s = dist / spec.r;
    if (s >= 1.0) return 0.0;
    return mollifier_normalization(d, spec.profile) * mollifier_profile(spec.profile, s) /
           std::pow(spec.r, d);
}

double mollifier_fourier(const MollifierSpec& spec, int d, double kabs) {
    check_dim(d);
    const double xi = 2.0 * kPi * spec.r * kabs;
    const double c = mollifier_normalization(d, spec.profile);
    auto integrand = [&](double s) {
        const double e = mollifier_profile(spec.profile, s);
        switch (d) {
            case 1: return 2.0 * e * std::cos(xi * s);
            case 2: return 2.0 * kPi * e * s * std::cyl_bessel_j(0.0, xi * s);
            default: {
                const double z = xi * s;
                const double sinc = z == 0.0 ? 1.0 : std::sin(z) / z;
                return 4.0 * kPi * e * s * s * sinc;
            }
        }
    };
    const int panels = 16 + static_cast<int>(std::ceil(xi));
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        acc += boost::math::quadrature::gauss<double, 20>::integrate(integrand, a, b);
    }
    return c * acc;
}

std::vector<double> mollifier_samples(const MollifierSpec& spec, int d, int m) {
    check_dim(d);
    const std::size_t n = grid_points(d, m);
    std::vector<double> out(n, 0.0);
    const double cell = std::pow(1.0 / m, d);
    double mass = 0.0;
    int k[3];
    for (std::size_t idx = 0; idx < n; ++idx) {
        wavevector(idx, d, m, k);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double x = static_cast<double>(k[a]) / m;
            r2 += x * x;
        }
        const double v = mollifier_profile(spec.profile, std::sqrt(r2) / spec.r);
        out[idx] = v;
        mass += v * cell;
    }
    if (!(mass > 0.0)) throw ResolutionError("mollifier support contains no grid node");
    for (double& v : out) v /= mass;
    return out;
}

std::vector<double> mollifier_multipliers(const MollifierSpec& spec, int d, int m) {
    const auto samples = mollifier_samples(spec, d, m);
    const auto hat = fourier_coefficients(samples, d, m);
    std::vector<double> out(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) out[i] = hat[i].real();
    out[0] = 1.0;
    return out;
}

std::pair<double, double> green_kernel_1d(double x) {
    if (!(x >= -0.5 && x <= 0.5)) throw DomainError("green_kernel_1d: x outside [-1/2, 1/2]");
    const double ax = std::abs(x);
    const double g = -0.5 * x * x + 0.5 * ax - 1.0 / 12.0;
    double k = 0.0;
    if (x > 0.0) k = -x + 0.5;
    if (x < 0.0) k = -x - 0.5;
    return {g, k};
}

double green_multiplier(int d, const int* k) {
    double k2 = 0.0;
    for (int a = 0; a < d; ++a) k2 += static_cast<double>(k[a]) * k[a];
    if (k2 == 0.0) return 0.0;
    return -1.0 / (4.0 * kPi * kPi * k2);
}

cplx force_multiplier(int d, int m, int a, const int* k) {
    if (2 * k[a] == m || 2 * k[a] == -m) return {0.0, 0.0};
    return {0.0, 2.0 * kPi * k[a] * green_multiplier(d, k)};
}

KernelFourier kernel_fourier(int d, int m) {
    check_dim(d);
    if (m < 2 || m % 2 != 0) throw DomainError("kernel_fourier: cutoff M must be even and >= 2");
    KernelFourier out;
    out.d = d;
    out.m = m;
    const std::size_t n = grid_points(d, m);
    out.green_hat.resize(n);
    out.force_hat.resize(n * static_cast<std::size_t>(d));
    int k[3];
    for (std::size_t idx = 0; idx < n; ++idx) {
        wavevector(idx, d, m, k);
        out.green_hat[idx] = green_multiplier(d, k);
        for (int a = 0; a < d; ++a) out.force_hat[a * n + idx] = force_multiplier(d, m, a, k);
    }
    return out;
}

KernelTable mollified_force_table(const MollifierSpec& spec, double eps, int m, int d) {
    check_dim(d);
    if (!(spec.r > 0.0) || spec.r >= 0.25)
        throw DomainError("mollification radius must satisfy 0 < r < 1/4");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (m % 2 != 0) throw ResolutionError("grid size must be even");
    if (static_cast<double>(m) * spec.r < 8.0)
        throw ResolutionError("grid of " + std::to_string(m) + " cells does not resolve r = " +
                              std::to_string(spec.r) + " (need at least " +
                              std::to_string(static_cast<int>(std::ceil(8.0 / spec.r))) + ")");
    KernelTable t;
    t.d = d;
    t.m = m;
    t.eps = eps;
    t.r = spec.r;
    t.profile = spec.profile;
    t.fourier = kernel_fourier(d, m);
    t.chi_hat = mollifier_multipliers(spec, d, m);
    const std::size_t n = t.points();
    const double scale = 1.0 / (eps * eps);
    std::vector<cplx> coeffs(n);
    for (std::size_t i = 0; i < n; ++i)
        coeffs[i] = scale * t.chi_hat[i] * t.chi_hat[i] * t.fourier.green_hat[i];
    t.green = synthesize_real(coeffs, d, m);
    t.force.resize(n * static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        for (std::size_t i = 0; i < n; ++i)
            coeffs[i] = scale * t.chi_hat[i] * t.chi_hat[i] * t.fourier.force_hat[a * n + i];
        const auto vals = synthesize_real(coeffs, d, m);
        std::copy(vals.begin(), vals.end(), t.force.begin() + static_cast<std::ptrdiff_t>(a * n));
    }
    return t;
}

namespace {

template <class Fetch>
double interpolate_lag(int d, int m, const double* lag_in, Fetch fetch) {
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        const double s = (lag_in[a] - std::floor(lag_in[a])) * m;
        const double fl = std::floor(s);
        base[a] = static_cast<int>(fl) % m;
        frac[a] = s - fl;
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            const int bit = (corner >> a) & 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
            idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>((base[a] + bit) % m);
        }
        if (w != 0.0) acc += w * fetch(idx);
    }
    return acc;
}

}  // namespace

void KernelTable::force_at(const double* lag_in, double* out) const {
    const std::size_t n = points();
    for (int a = 0; a < d; ++a)
        out[a] = interpolate_lag(d, m, lag_in, [&](std::size_t i) { return force[a * n + i]; });
}

double KernelTable::green_at(const double* lag_in) const {
    return interpolate_lag(d, m, lag_in, [&](std::size_t i) { return green[i]; });
}

namespace {

SpatialField apply_force_multiplier(const SpatialField& rho, double eps,
                                    const std::vector<double>* chi_hat) {
    const int d = rho.d;
    const int m = rho.m;
    const auto rho_hat = fourier_coefficients(rho.component(0), d, m);
    const std::size_t n = rho.points();
    SpatialField e(d, m, d, FieldKind::Force);
    const double scale = 1.0 / (eps * eps);
    std::vector<cplx> coeffs(n);
    int k[3];
    for (int a = 0; a < d; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            wavevector(i, d, m, k);
            double mult = scale;
            if (chi_hat) mult *= (*chi_hat)[i] * (*chi_hat)[i];
            coeffs[i] = mult * force_multiplier(d, m, a, k) * rho_hat[i];
        }
        const auto vals = synthesize_real(coeffs, d, m);
        std::copy(vals.begin(), vals.end(), e.component(a).begin());
    }
    return e;
}

}  // namespace

SpatialField mollified_force_field(const KernelTable& table, const SpatialField& rho) {
    if (rho.d != table.d || rho.m != table.m)
        throw MismatchError("density grid does not match the kernel table grid");
    return apply_force_multiplier(rho, table.eps, &table.chi_hat);
}

SpatialField spectral_force_field(const SpatialField& rho, double eps) {
    check_dim(rho.d);
    return apply_force_multiplier(rho, eps, nullptr);
}

SpatialField spectral_divergence(const SpatialField& e) {
    const int d = e.d;
    const int m = e.m;
    const std::size_t n = e.points();
    std::vector<cplx> acc(n, cplx(0.0, 0.0));
    int k[3];
    for (int a = 0; a < d; ++a) {
        const auto hat = fourier_coefficients(e.component(a), d, m);
        for (std::size_t i = 0; i < n; ++i) {
            wavevector(i, d, m, k);
            if (2 * k[a] == m) continue;
            acc[i] += cplx(0.0, 2.0 * kPi * k[a]) * hat[i];
        }
    }
    SpatialField out(d, m, 1, FieldKind::Generic);
    const auto vals = synthesize_real(acc, d, m);
    std::copy(vals.begin(), vals.end(), out.values.begin());
    return out;
}

double lipschitz_estimate(const MollifierSpec& spec, const SpatialField& density) {
    const int d = density.d;
    const int m = density.m;
    check_dim(d);
    const std::size_t n = density.points();
    const std::size_t half = half_spectrum_size(d, m);
    const int last = m / 2 + 1;

    std::vector<cplx> hhat = fft_r2c(density.component(0), d, m);
    {
        auto samples = mollifier_samples(spec, d, m);
        auto chi = fft_r2c(samples, d, m);
        samples.clear();
        samples.shrink_to_fit();
        const double cell = std::pow(1.0 / m, d);
        const double norm = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < half; ++i) hhat[i] *= chi[i].real() * cell * norm;
    }

    std::vector<double> acc(n, 0.0);
    std::vector<double> field(n);
    std::vector<cplx> buf(half);
    const double inv2h = 0.5 * m;
    std::size_t stride[3] = {1, 1, 1};
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * static_cast<std::size_t>(m);
    int k[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
        for (std::size_t i = 0; i < half; ++i) {
            std::size_t rem = i;
            k[d - 1] = static_cast<int>(rem % static_cast<std::size_t>(last));
            rem /= static_cast<std::size_t>(last);
            for (int b = d - 2; b >= 0; --b) {
                k[b] = wavenumber(static_cast<int>(rem % static_cast<std::size_t>(m)), m);
                rem /= static_cast<std::size_t>(m);
            }
            buf[i] = force_multiplier(d, m, a, k) * hhat[i];
        }
        fft_c2r(buf, field, d, m);
        for (std::size_t idx = 0; idx < n; ++idx) {
            for (int b = 0; b < d; ++b) {
                const std::size_t s = stride[b];
                const std::size_t coord = (idx / s) % static_cast<std::size_t>(m);
                const std::size_t up = coord + 1 == static_cast<std::size_t>(m) ? idx - coord * s : idx + s;
                const std::size_t down = coord == 0 ? idx + (static_cast<std::size_t>(m) - 1) * s : idx - s;
                const double g = (field[up] - field[down]) * inv2h;
                acc[idx] += g * g;
            }
        }
    }
    double best = 0.0;
    for (double v : acc) best = std::max(best, v);
    return std::sqrt(best);
}

double lipschitz_estimate(const KernelTable& table, const SpatialField& density) {
    if (density.d != table.d || density.m != table.m)
        throw MismatchError("density grid does not match the kernel table grid");
    return lipschitz_estimate(MollifierSpec{table.r, table.profile}, density);
}

AnalyticNorm analytic_norm(std::span<const cplx> coeffs, double delta0, double noise_floor) {
    if (!(delta0 > 1.0)) throw DomainError("analytic norm requires delta0 > 1");
    const int m = static_cast<int>(coeffs.size());
    if (m == 0) throw DomainError("analytic norm of an empty coefficient table");
    const double log_delta = std::log(delta0);
    const double log_max = std::log(DBL_MAX);
    double cmax = 0.0;
    for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
    const double floor_abs = noise_floor * cmax;

    AnalyticNorm out;
    std::vector<double> terms(static_cast<std::size_t>(m / 2 + 1), 0.0);
    int last_retained = 0;
    for (int i = 0; i < m; ++i) {
        const int k = std::abs(wavenumber(i, m));
        if (static_cast<double>(k) * log_delta > log_max)
            throw OverflowError("analytic norm weight delta0^|k| overflows at mode k = " +
                                std::to_string(wavenumber(i, m)));
        const double mag = std::abs(coeffs[static_cast<std::size_t>(i)]);
        if (mag == 0.0) continue;
        const double w = mag * std::pow(delta0, k);
        if (mag <= floor_abs) {
            out.tail_bound += w;
            ++out.floored;
            continue;
        }
        out.value += w;
        terms[static_cast<std::size_t>(k)] += w;
        ++out.modes;
        last_retained = std::max(last_retained, k);
    }
    // Geometric extrapolation of the unresolved modes when the spectrum reaches the cutoff.
    if (last_retained > m / 4 && last_retained >= 2) {
        const double t1 = terms[static_cast<std::size_t>(last_retained)];
        const double t0 = terms[static_cast<std::size_t>(last_retained - 1)];
        const double q = t0 > 0.0 ? t1 / t0 : 1.0;
        if (q < 1.0)
            out.tail_bound += t1 * q / (1.0 - q);
        else
            out.tail_bound = HUGE_VAL;
    }
    return out;
}

AnalyticNorm analytic_norm(const SpatialField& g, double delta0, double noise_floor) {
    if (g.d != 1) throw DomainError("analytic norm is defined for 1D fields");
    const auto hat = fourier_coefficients(g.component(0), 1, g.m);
    return analytic_norm(hat, delta0, noise_floor);
}

}  // namespace vlab
