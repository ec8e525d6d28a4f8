#include "vlab/correctors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlab/error.hpp"
#include "vlab/kernels.hpp"
#include "vlab/spline.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

void enforce_conjugate(CorrectorState& s) {
    s.d_minus.resize(s.d_plus.size());
    for (std::size_t i = 0; i < s.d_plus.size(); ++i) s.d_minus[i] = std::conj(s.d_plus[i]);
}

}  // namespace

CorrectorState corrector_init_fields(const SpatialField& rho, const SpatialField& j, double eps, double mass_tol) {
    const int d = rho.d;
    const int m = rho.m;
    if (j.d != d || j.m != m || j.components != d) throw MismatchError("momentum field does not match the density");
    const double mu = mean(rho);
    if (std::abs(mu - 1.0) > mass_tol)
        throw NormalizationError("mean density " + std::to_string(mu) + " differs from 1");
    const std::size_t n = rho.points();
    const auto e = spectral_force_field(rho, eps);

    // gradient projection of eps E + i j, component by component in Fourier space
    std::vector<std::vector<cplx>> hat(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        std::vector<cplx> comb(n);
        for (std::size_t i = 0; i < n; ++i) comb[i] = cplx(eps * e.component(a)[i], j.component(a)[i]);
        fft_forward(comb, d, m);
        hat[a] = std::move(comb);
    }
    CorrectorState s;
    s.d = d;
    s.m = m;
    s.eps = eps;
    s.j = j;
    s.d_plus.assign(n * static_cast<std::size_t>(d), cplx(0.0, 0.0));
    int k[3];
    std::vector<std::vector<cplx>> proj(static_cast<std::size_t>(d), std::vector<cplx>(n, cplx(0.0, 0.0)));
    for (std::size_t i = 0; i < n; ++i) {
        wavevector(i, d, m, k);
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        if (k2 == 0.0) continue;
        cplx dot(0.0, 0.0);
        for (int a = 0; a < d; ++a) dot += static_cast<double>(k[a]) * hat[a][i];
        for (int a = 0; a < d; ++a) proj[a][i] = static_cast<double>(k[a]) * dot / k2;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (int a = 0; a < d; ++a) {
        fft_inverse(proj[a], d, m);
        for (std::size_t i = 0; i < n; ++i) s.d_plus[a * n + i] = 0.5 * inv * proj[a][i];
    }
    enforce_conjugate(s);
    return s;
}

CorrectorState corrector_init(const PhaseSpaceGrid& f0, double eps) {
    const auto mom = moments(f0);
    return corrector_init_fields(mom.rho, mom.j, eps);
}

std::vector<CorrectorState> corrector_evolve(const CorrectorState& state, double T, double dt) {
    if (state.d != 1) throw DomainError("corrector evolution is implemented in d = 1");
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const int m = state.m;
    const auto jv = state.j.component(0);
    const double jmax = *std::max_element(jv.begin(), jv.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double jmin = *std::min_element(jv.begin(), jv.end());
    const double jtop = *std::max_element(jv.begin(), jv.end());
    if (std::abs(jmax) * dt * m > 1.0 + 1e-12)
        throw CflError("corrector transport CFL " + std::to_string(std::abs(jmax) * dt * m) + " exceeds 1");
    const bool uniform = jtop - jmin <= 1e-14 * std::max(1.0, std::abs(jmax));
    const int steps = static_cast<int>(std::llround(T / dt));

    std::vector<CorrectorState> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    out.push_back(state);
    CorrectorState cur = state;
    const SplineSolver spline(m, SplineBoundary::Periodic);
    std::vector<double> re(static_cast<std::size_t>(m)), im(re.size()), cre(re.size()), cim(re.size());
    for (int s = 0; s < steps; ++s) {
        if (uniform) {
            // exact translation by u t in Fourier space
            std::vector<cplx> hat(cur.d_plus.begin(), cur.d_plus.end());
            fft_forward(hat, 1, m);
            const double shift = jv[0] * dt;
            for (int i = 0; i < m; ++i) {
                const int k = wavenumber(i, m);
                if (2 * k == m) continue;
                hat[i] *= std::exp(cplx(0.0, -2.0 * kPi * k * shift));
            }
            fft_inverse(hat, 1, m);
            for (int i = 0; i < m; ++i) cur.d_plus[i] = hat[i] / static_cast<double>(m);
        } else {
            double mean_before_re = 0.0, mean_before_im = 0.0;
            for (int i = 0; i < m; ++i) {
                re[i] = cur.d_plus[i].real();
                im[i] = cur.d_plus[i].imag();
                mean_before_re += re[i];
                mean_before_im += im[i];
            }
            spline.coefficients(re, cre);
            spline.coefficients(im, cim);
            double mean_after_re = 0.0, mean_after_im = 0.0;
            for (int i = 0; i < m; ++i) {
                const double foot = i - jv[i] * dt * m;
                re[i] = spline.evaluate(cre, foot);
                im[i] = spline.evaluate(cim, foot);
                mean_after_re += re[i];
                mean_after_im += im[i];
            }
            // c(t) dt restores the mean
            const double cr = (mean_before_re - mean_after_re) / m;
            const double ci = (mean_before_im - mean_after_im) / m;
            for (int i = 0; i < m; ++i) cur.d_plus[i] = cplx(re[i] + cr, im[i] + ci);
        }
        enforce_conjugate(cur);
        cur.time = state.time + (s + 1) * dt;
        out.push_back(cur);
    }
    return out;
}

CorrectorField corrector_R(const CorrectorState& state, double t) {
    const double theta = state.phase == OscillationPhase::InverseEps ? t / state.eps : t / std::sqrt(state.eps);
    const cplx ep = std::exp(cplx(0.0, theta));
    const cplx em = std::exp(cplx(0.0, -theta));
    const std::size_t n = grid_points(state.d, state.m);
    CorrectorField out;
    out.R = SpatialField(state.d, state.m, state.d, FieldKind::Corrector);
    for (std::size_t i = 0; i < state.d_plus.size(); ++i) {
        const cplx val = (state.d_plus[i] * ep - state.d_minus[i] * em) / cplx(0.0, 1.0);
        out.imag_residue = std::max(out.imag_residue, std::abs(val.imag()));
        out.R.values[i] = val.real();
    }
    // central-difference gradient magnitude (Frobenius over components and axes)
    const int m = state.m;
    std::size_t stride[3] = {1, 1, 1};
    for (int a = state.d - 2; a >= 0; --a) stride[a] = stride[a + 1] * static_cast<std::size_t>(m);
    for (std::size_t idx = 0; idx < n; ++idx) {
        double g2 = 0.0;
        for (int c = 0; c < state.d; ++c) {
            const auto comp = out.R.component(c);
            for (int b = 0; b < state.d; ++b) {
                const std::size_t coord = (idx / stride[b]) % static_cast<std::size_t>(m);
                const std::size_t up = coord + 1 == static_cast<std::size_t>(m) ? idx - coord * stride[b] : idx + stride[b];
                const std::size_t down = coord == 0 ? idx + (static_cast<std::size_t>(m) - 1) * stride[b] : idx - stride[b];
                const double g = (comp[up] - comp[down]) * 0.5 * m;
                g2 += g * g;
            }
        }
        out.grad_sup = std::max(out.grad_sup, std::sqrt(g2));
    }
    return out;
}

double corrector_curl(const CorrectorState& state) {
    if (state.d == 1) return 0.0;
    const int d = state.d;
    const int m = state.m;
    const std::size_t n = grid_points(d, m);
    std::vector<std::vector<cplx>> hat(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        hat[a].assign(state.d_plus.begin() + static_cast<std::ptrdiff_t>(a * n),
                      state.d_plus.begin() + static_cast<std::ptrdiff_t>((a + 1) * n));
        fft_forward(hat[a], d, m);
    }
    double worst = 0.0;
    int k[3];
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            std::vector<cplx> c(n);
            for (std::size_t i = 0; i < n; ++i) {
                wavevector(i, d, m, k);
                c[i] = cplx(0.0, 2.0 * kPi) * (static_cast<double>(k[a]) * hat[b][i] - static_cast<double>(k[b]) * hat[a][i]);
            }
            fft_inverse(c, d, m);
            for (auto& v : c) worst = std::max(worst, std::abs(v) / static_cast<double>(n));
        }
    return worst;
}

}  // namespace vlab
