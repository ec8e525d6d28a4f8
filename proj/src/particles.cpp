#include "vlab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vlab/error.hpp"
#include "vlab/parallel.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_table(const ParticleEnsemble& ens, const KernelTable& table) {
    auto differs = [](double a, double b) { return std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b)); };
    if (ens.d != table.d || differs(ens.eps, table.eps) || differs(ens.r, table.r))
        throw MismatchError("kernel table (d=" + std::to_string(table.d) + ", eps=" +
                            std::to_string(table.eps) + ", r=" + std::to_string(table.r) +
                            ") does not match the ensemble (d=" + std::to_string(ens.d) + ", eps=" +
                            std::to_string(ens.eps) + ", r=" + std::to_string(ens.r) + ")");
}

struct CicStencil {
    std::size_t idx[8];
    double w[8];
    int count;
};

CicStencil cic(const double* x, int d, int m) {
    CicStencil s{};
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        const double t = (wrap_torus(x[a]) + 0.5) * m;
        const double fl = std::floor(t);
        base[a] = static_cast<int>(fl) % m;
        frac[a] = t - fl;
    }
    s.count = 1 << d;
    for (int corner = 0; corner < s.count; ++corner) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            const int bit = (corner >> a) & 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
            idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>((base[a] + bit) % m);
        }
        s.idx[corner] = idx;
        s.w[corner] = w;
    }
    return s;
}

// Modes of the empirical measure mu^_k = (1/N) sum_j e^{-2 pi i k x_j}, |k_a| < m/2,
// stored on the FFT-ordered m^d grid (Nyquist entries left at zero).
std::vector<cplx> empirical_modes(const ParticleEnsemble& ens, int m) {
    const int d = ens.d;
    const int kmax = m / 2 - 1;
    const int width = 2 * kmax + 1;
    const std::size_t n = grid_points(d, m);
    std::vector<cplx> modes(n, cplx(0.0, 0.0));
    std::vector<cplx> phase(static_cast<std::size_t>(d * width));
    std::vector<int> counter(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < ens.n; ++i) {
        const double* x = ens.pos(i);
        for (int a = 0; a < d; ++a) {
            for (int k = -kmax; k <= kmax; ++k) {
                const double arg = -2.0 * kPi * k * x[a];
                phase[static_cast<std::size_t>(a * width + k + kmax)] = cplx(std::cos(arg), std::sin(arg));
            }
        }
        std::fill(counter.begin(), counter.end(), -kmax);
        while (true) {
            cplx p(1.0, 0.0);
            std::size_t idx = 0;
            for (int a = 0; a < d; ++a) {
                p *= phase[static_cast<std::size_t>(a * width + counter[a] + kmax)];
                const int fi = counter[a] < 0 ? counter[a] + m : counter[a];
                idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(fi);
            }
            modes[idx] += p;
            int a = d - 1;
            while (a >= 0 && counter[a] == kmax) counter[a--] = -kmax;
            if (a < 0) break;
            ++counter[a];
        }
    }
    const double inv = 1.0 / static_cast<double>(ens.n);
    for (auto& c : modes) c *= inv;
    return modes;
}

}  // namespace

ParticleEnsemble::ParticleEnsemble(int d_, std::size_t n_)
    : d(d_), n(n_), x(n_ * static_cast<std::size_t>(d_), 0.0), v(n_ * static_cast<std::size_t>(d_), 0.0) {}

std::vector<double> force_direct(const ParticleEnsemble& ens, const KernelTable& table) {
    check_table(ens, table);
    const int d = ens.d;
    std::vector<double> acc(ens.n * static_cast<std::size_t>(d), 0.0);
    const double inv_n = 1.0 / static_cast<double>(ens.n);
    parallel_for(ens.n, [&](std::size_t begin, std::size_t end) {
        double lagv[3];
        double t[3];
        for (std::size_t i = begin; i < end; ++i) {
            double sum[3] = {0.0, 0.0, 0.0};
            const double* xi = ens.pos(i);
            for (std::size_t j = 0; j < ens.n; ++j) {
                if (j == i) continue;
                const double* xj = ens.pos(j);
                for (int a = 0; a < d; ++a) lagv[a] = xi[a] - xj[a];
                table.force_at(lagv, t);
                for (int a = 0; a < d; ++a) sum[a] += t[a];
            }
            for (int a = 0; a < d; ++a) acc[i * d + a] = sum[a] * inv_n;
        }
    });
    return acc;
}

SpatialField deposit_density(const ParticleEnsemble& ens, int m) {
    SpatialField rho(ens.d, m, 1, FieldKind::Density);
    const double w = std::pow(static_cast<double>(m), ens.d) / static_cast<double>(ens.n);
    for (std::size_t i = 0; i < ens.n; ++i) {
        const auto s = cic(ens.pos(i), ens.d, m);
        for (int c = 0; c < s.count; ++c) rho.values[s.idx[c]] += w * s.w[c];
    }
    return rho;
}

SpatialField deposit_momentum(const ParticleEnsemble& ens, int m) {
    SpatialField j(ens.d, m, ens.d, FieldKind::Momentum);
    const std::size_t n = j.points();
    const double w = std::pow(static_cast<double>(m), ens.d) / static_cast<double>(ens.n);
    for (std::size_t i = 0; i < ens.n; ++i) {
        const auto s = cic(ens.pos(i), ens.d, m);
        for (int a = 0; a < ens.d; ++a)
            for (int c = 0; c < s.count; ++c) j.values[a * n + s.idx[c]] += w * s.w[c] * ens.vel(i)[a];
    }
    return j;
}

std::vector<double> force_pic(const ParticleEnsemble& ens, const KernelTable& table, Deposit deposit) {
    check_table(ens, table);
    const int d = ens.d;
    const int m = table.m;
    std::vector<double> acc(ens.n * static_cast<std::size_t>(d), 0.0);
    if (deposit == Deposit::CloudInCell) {
        const auto rho = deposit_density(ens, m);
        const auto e = mollified_force_field(table, rho);
        for (std::size_t i = 0; i < ens.n; ++i) {
            const auto s = cic(ens.pos(i), d, m);
            for (int a = 0; a < d; ++a) {
                const auto comp = e.component(a);
                double sum = 0.0;
                for (int c = 0; c < s.count; ++c) sum += s.w[c] * comp[s.idx[c]];
                acc[i * d + a] = sum;
            }
        }
        return acc;
    }

    const auto modes = empirical_modes(ens, m);
    const std::size_t n = grid_points(d, m);
    const double scale = 1.0 / (table.eps * table.eps);
    // coefficient field c_a(k) mu^_k, gathered at each particle by direct synthesis
    std::vector<cplx> coeff(n * static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
        for (std::size_t i = 0; i < n; ++i)
            coeff[a * n + i] = scale * table.chi_hat[i] * table.chi_hat[i] * table.fourier.force_hat[a * n + i] * modes[i];
    const int kmax = m / 2 - 1;
    const int width = 2 * kmax + 1;
    parallel_for(ens.n, [&](std::size_t begin, std::size_t end) {
        std::vector<cplx> phase(static_cast<std::size_t>(d * width));
        std::vector<int> counter(static_cast<std::size_t>(d));
        for (std::size_t p = begin; p < end; ++p) {
            const double* x = ens.pos(p);
            for (int a = 0; a < d; ++a)
                for (int k = -kmax; k <= kmax; ++k) {
                    const double arg = 2.0 * kPi * k * x[a];
                    phase[static_cast<std::size_t>(a * width + k + kmax)] = cplx(std::cos(arg), std::sin(arg));
                }
            double sum[3] = {0.0, 0.0, 0.0};
            std::fill(counter.begin(), counter.end(), -kmax);
            while (true) {
                cplx ph(1.0, 0.0);
                std::size_t idx = 0;
                for (int a = 0; a < d; ++a) {
                    ph *= phase[static_cast<std::size_t>(a * width + counter[a] + kmax)];
                    const int fi = counter[a] < 0 ? counter[a] + m : counter[a];
                    idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(fi);
                }
                for (int a = 0; a < d; ++a) sum[a] += (coeff[a * n + idx] * ph).real();
                int a = d - 1;
                while (a >= 0 && counter[a] == kmax) counter[a--] = -kmax;
                if (a < 0) break;
                ++counter[a];
            }
            for (int a = 0; a < d; ++a) acc[p * d + a] = sum[a];
        }
    });
    return acc;
}

std::vector<double> force_exact_1d(const ParticleEnsemble& ens) {
    if (ens.d != 1) throw DomainError("force_exact_1d requires d = 1");
    const std::size_t n = ens.n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ens.x[a] < ens.x[b]; });
    double s = 0.0;
    for (double x : ens.x) s += x;
    std::vector<double> acc(n);
    const double nd = static_cast<double>(n);
    const double scale = 1.0 / (ens.eps * ens.eps * nd);
    std::size_t k = 0;
    while (k < n) {
        std::size_t e = k;
        while (e + 1 < n && ens.x[order[e + 1]] == ens.x[order[k]]) ++e;
        const double less = static_cast<double>(k);
        const double greater = static_cast<double>(n - 1 - e);
        for (std::size_t q = k; q <= e; ++q) {
            const double xi = ens.x[order[q]];
            acc[order[q]] = scale * (-(nd * xi - s) + 0.5 * (less - greater));
        }
        k = e + 1;
    }
    return acc;
}

namespace {

void check_finite(const ParticleEnsemble& ens) {
    for (std::size_t i = 0; i < ens.n; ++i)
        for (int a = 0; a < ens.d; ++a)
            if (!std::isfinite(ens.pos(i)[a]) || !std::isfinite(ens.vel(i)[a]))
                throw NonFiniteError("non-finite state at particle " + std::to_string(i), i);
}

void kick(ParticleEnsemble& ens, const std::vector<double>& acc, double h) {
    for (std::size_t i = 0; i < ens.v.size(); ++i) ens.v[i] += h * acc[i];
}

void drift(ParticleEnsemble& ens, double dt) {
    for (std::size_t i = 0; i < ens.x.size(); ++i) ens.x[i] = wrap_torus(ens.x[i] + dt * ens.v[i]);
}

}  // namespace

ParticleEnsemble step_leapfrog(const ParticleEnsemble& ens, double dt, const ForceFn& force) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    ParticleEnsemble out = ens;
    kick(out, force(out), 0.5 * dt);
    drift(out, dt);
    kick(out, force(out), 0.5 * dt);
    out.time += dt;
    check_finite(out);
    return out;
}

void advance_leapfrog(ParticleEnsemble& ens, double dt, int steps, const ForceFn& force,
                      const std::function<void(const ParticleEnsemble&)>& observer) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    auto acc = force(ens);
    const double t0 = ens.time;
    for (int s = 0; s < steps; ++s) {
        kick(ens, acc, 0.5 * dt);
        drift(ens, dt);
        acc = force(ens);
        kick(ens, acc, 0.5 * dt);
        ens.time = t0 + (s + 1) * dt;
        check_finite(ens);
        if (observer) observer(ens);
    }
}

namespace {

double kinetic_energy(const ParticleEnsemble& ens) {
    double k = 0.0;
    for (double v : ens.v) k += v * v;
    return 0.5 * k / static_cast<double>(ens.n);
}

}  // namespace

EnergyReport regularized_energy(const ParticleEnsemble& ens, const KernelTable& table, Deposit deposit) {
    check_table(ens, table);
    const int m = table.m;
    const std::size_t n = table.points();
    std::vector<cplx> modes;
    if (deposit == Deposit::ExactFourier) {
        modes = empirical_modes(ens, m);
    } else {
        const auto rho = deposit_density(ens, m);
        modes = fourier_coefficients(rho.component(0), ens.d, m);
    }
    const double scale = 1.0 / (table.eps * table.eps);
    double pot = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        pot -= 0.5 * scale * table.chi_hat[i] * table.chi_hat[i] * table.fourier.green_hat[i] * std::norm(modes[i]);
    EnergyReport rep;
    rep.kinetic = kinetic_energy(ens);
    rep.potential = pot;
    rep.total = rep.kinetic + rep.potential;
    rep.time = ens.time;
    return rep;
}

EnergyReport unregularized_energy_1d(const ParticleEnsemble& ens) {
    if (ens.d != 1) throw DomainError("unregularized_energy_1d requires d = 1");
    std::vector<double> xs = ens.x;
    std::sort(xs.begin(), xs.end());
    const double nd = static_cast<double>(ens.n);
    double s = 0.0, s2 = 0.0, abs_sum = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        s += xs[k];
        s2 += xs[k] * xs[k];
        abs_sum += xs[k] * (2.0 * static_cast<double>(k) - nd + 1.0);
    }
    // sum over all ordered pairs (i, j), diagonal included, of G(x_i - x_j)
    const double sq = 2.0 * nd * s2 - 2.0 * s * s;
    const double gsum = -0.5 * sq + abs_sum - nd * nd / 12.0;
    EnergyReport rep;
    rep.kinetic = kinetic_energy(ens);
    rep.potential = -0.5 * gsum / (ens.eps * ens.eps * nd * nd);
    rep.total = rep.kinetic + rep.potential;
    rep.time = ens.time;
    return rep;
}

std::vector<double> total_momentum(const ParticleEnsemble& ens) {
    std::vector<double> p(static_cast<std::size_t>(ens.d), 0.0);
    for (std::size_t i = 0; i < ens.n; ++i)
        for (int a = 0; a < ens.d; ++a) p[a] += ens.vel(i)[a];
    return p;
}

}  // namespace vlab
