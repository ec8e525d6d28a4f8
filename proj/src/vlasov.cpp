#include "vlab/vlasov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlab/error.hpp"
#include "vlab/fft.hpp"
#include "vlab/parallel.hpp"
#include "vlab/spline.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

PhaseSpaceGrid::PhaseSpaceGrid(int mx_, int mv_, double vmax_)
    : mx(mx_), mv(mv_), vmax(vmax_), f(static_cast<std::size_t>(mx_) * mv_, 0.0) {
    if (mx_ < 2 || mv_ < 4) throw DomainError("phase-space grid needs mx >= 2 and mv >= 4");
    if (!(vmax_ > 0.0)) throw DomainError("vmax must be positive");
}

double PhaseSpaceGrid::mass() const {
    double s = 0.0;
    for (double v : f) s += v;
    return s * dx() * dv();
}

double PhaseSpaceGrid::boundary_mass(int cells) const {
    double s = 0.0;
    for (int i = 0; i < mx; ++i)
        for (int c = 0; c < cells && c < mv; ++c) s += std::abs(at(i, c)) + std::abs(at(i, mv - 1 - c));
    return s * dx() * dv();
}

Moments moments(const PhaseSpaceGrid& g) {
    Moments out;
    out.rho = SpatialField(1, g.mx, 1, FieldKind::Density);
    out.j = SpatialField(1, g.mx, 1, FieldKind::Momentum);
    for (int i = 0; i < g.mx; ++i) {
        double r = 0.0, j = 0.0;
        for (int k = 0; k < g.mv; ++k) {
            r += g.at(i, k);
            j += g.v(k) * g.at(i, k);
        }
        out.rho.values[i] = r * g.dv();
        out.j.values[i] = j * g.dv();
    }
    out.sup_density = *std::max_element(out.rho.values.begin(), out.rho.values.end());
    return out;
}

PoissonSolution poisson_solve(const SpatialField& rho, double eps, const std::optional<MollifierSpec>& mollifier,
                              double mass_tol) {
    if (rho.d != 1) throw DomainError("poisson_solve handles the 1D grid");
    const double mu = mean(rho);
    if (std::abs(mu - 1.0) > mass_tol)
        throw NormalizationError("mean density " + std::to_string(mu) + " differs from 1");
    const int m = rho.m;
    const auto hat = fourier_coefficients(rho.component(0), 1, m);
    std::vector<double> chi;
    if (mollifier) chi = mollifier_multipliers(*mollifier, 1, m);
    std::vector<cplx> u(static_cast<std::size_t>(m)), e(static_cast<std::size_t>(m));
    const double inv_eps2 = 1.0 / (eps * eps);
    for (int i = 1; i < m; ++i) {
        const int k = wavenumber(i, m);
        double mult = inv_eps2 / (4.0 * kPi * kPi * k * k);
        if (mollifier) mult *= chi[i] * chi[i];
        u[i] = mult * hat[i];
        e[i] = 2 * k == m ? cplx(0.0, 0.0) : cplx(0.0, -2.0 * kPi * k) * u[i];
    }
    PoissonSolution out{SpatialField(1, m, 1, FieldKind::Potential), SpatialField(1, m, 1, FieldKind::Force)};
    out.U.values = synthesize_real(u, 1, m);
    out.E.values = synthesize_real(e, 1, m);
    return out;
}

double field_energy(const SpatialField& rho, double eps, const std::vector<double>* chi_hat) {
    const int m = rho.m;
    const auto hat = fourier_coefficients(rho.component(0), rho.d, m);
    double s = 0.0;
    int k[3];
    for (std::size_t i = 1; i < hat.size(); ++i) {
        wavevector(i, rho.d, m, k);
        double k2 = 0.0;
        for (int a = 0; a < rho.d; ++a) k2 += static_cast<double>(k[a]) * k[a];
        double w = 1.0 / (4.0 * kPi * kPi * k2);
        if (chi_hat) w *= (*chi_hat)[i] * (*chi_hat)[i];
        s += w * std::norm(hat[i]);
    }
    return 0.5 * s / (eps * eps);
}

namespace {

double kinetic_energy(const PhaseSpaceGrid& g) {
    double s = 0.0;
    for (int i = 0; i < g.mx; ++i)
        for (int j = 0; j < g.mv; ++j) s += 0.5 * g.v(j) * g.v(j) * g.at(i, j);
    return s * g.dx() * g.dv();
}

// x-advection by v * h for every velocity column.
void advect_x(PhaseSpaceGrid& g, double h, const SplineSolver& sx) {
    parallel_for(static_cast<std::size_t>(g.mv), [&](std::size_t begin, std::size_t end) {
        std::vector<double> col(static_cast<std::size_t>(g.mx)), out(col.size()), scratch;
        for (std::size_t j = begin; j < end; ++j) {
            for (int i = 0; i < g.mx; ++i) col[i] = g.at(i, static_cast<int>(j));
            sx.shift(col, out, g.v(static_cast<int>(j)) * h / g.dx(), scratch);
            for (int i = 0; i < g.mx; ++i) g.at(i, static_cast<int>(j)) = out[i];
        }
    });
}

void advect_v(PhaseSpaceGrid& g, const SpatialField& e, double h, const SplineSolver& sv) {
    parallel_for(static_cast<std::size_t>(g.mx), [&](std::size_t begin, std::size_t end) {
        std::vector<double> row(static_cast<std::size_t>(g.mv)), out(row.size()), scratch;
        for (std::size_t i = begin; i < end; ++i) {
            double* data = g.f.data() + i * static_cast<std::size_t>(g.mv);
            std::copy(data, data + g.mv, row.begin());
            sv.shift(row, out, e.values[i] * h / g.dv(), scratch);
            std::copy(out.begin(), out.end(), data);
        }
    });
}

SpatialField field_of(const PhaseSpaceGrid& g, double eps, const std::optional<MollifierSpec>& mollifier) {
    auto mom = moments(g);
    // renormalized runs keep the mean at 1 up to round-off; the tolerance only guards corruption
    return poisson_solve(mom.rho, eps, mollifier, 1e-6).E;
}

}  // namespace

VlasovTrajectory run_vp(const PhaseSpaceGrid& f0, double eps, const std::optional<MollifierSpec>& mollifier,
                        double T, double dt, const VlasovOptions& options) {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    if (dt > eps / 10.0 * (1.0 + 1e-12))
        throw CflError("dt = " + std::to_string(dt) + " does not resolve the plasma oscillation (need dt <= eps/10 = " +
                       std::to_string(eps / 10.0) + ")");
    if (mollifier && (mollifier->r >= 0.25 || f0.mx * mollifier->r < 8.0))
        throw ResolutionError("x-grid does not resolve the mollification radius");

    PhaseSpaceGrid g = f0;
    g.eps = eps;
    g.r = mollifier ? mollifier->r : 0.0;
    const double mass0 = g.mass();
    auto check_support = [&](const PhaseSpaceGrid& s) {
        const double bm = s.boundary_mass(options.boundary_cells);
        if (bm > options.boundary_tol) {
            // extent of the occupied velocity range, padded by a quarter
            double vext = 0.0;
            for (int i = 0; i < s.mx; ++i)
                for (int j = 0; j < s.mv; ++j)
                    if (s.at(i, j) > options.boundary_tol) vext = std::max(vext, std::abs(s.v(j)));
            throw SupportError("phase-space support reached the velocity boundary at t = " + std::to_string(s.time) +
                                   " (boundary mass " + std::to_string(bm) + ")",
                               std::max(1.5 * s.vmax, 1.25 * vext + 4.0 * s.dv()));
        }
    };
    check_support(g);

    const SplineSolver sx(g.mx, SplineBoundary::Periodic);
    const SplineSolver sv(g.mv, SplineBoundary::Zero);
    const int probe = options.probe_node >= 0 ? options.probe_node : g.mx / 4;
    std::vector<double> chi;
    if (mollifier) chi = mollifier_multipliers(*mollifier, 1, g.mx);
    const int steps = static_cast<int>(std::llround(T / dt));
    const double t0 = g.time;

    VlasovTrajectory traj;
    std::vector<bool> taken(options.snapshot_times.size(), false);
    auto record = [&](int step, const SpatialField& e) {
        const double t = t0 + step * dt;
        traj.times.push_back(t);
        traj.probe_E.push_back(e.values[static_cast<std::size_t>(probe)]);
        traj.mass.push_back(g.mass());
        if (options.track_energy) {
            auto mom = moments(g);
            traj.energy.push_back(kinetic_energy(g) + field_energy(mom.rho, eps, mollifier ? &chi : nullptr));
        }
        for (std::size_t s = 0; s < options.snapshot_times.size(); ++s) {
            if (taken[s] || std::abs(options.snapshot_times[s] - t) > 0.5 * dt + 1e-12) continue;
            taken[s] = true;
            VlasovSnapshot snap;
            snap.f = g;
            snap.f.time = t;
            snap.rho = moments(g).rho;
            snap.E = e;
            traj.snapshots.push_back(std::move(snap));
        }
    };

    SpatialField e = field_of(g, eps, mollifier);
    record(0, e);
    for (int step = 0; step < steps; ++step) {
        advect_x(g, 0.5 * dt, sx);
        e = field_of(g, eps, mollifier);
        if (options.max_shift_cells > 0.0) {
            const double shift = max_abs(e) * dt / g.dv();
            if (shift > options.max_shift_cells)
                throw CflError("velocity shift of " + std::to_string(shift) + " cells per step exceeds the limit of " +
                               std::to_string(options.max_shift_cells));
        }
        advect_v(g, e, dt, sv);
        advect_x(g, 0.5 * dt, sx);

        double undershoot = 0.0, clipped = 0.0;
        for (double& v : g.f) {
            if (v < 0.0) {
                undershoot = std::max(undershoot, -v);
                clipped -= v;
                v = 0.0;
            }
        }
        traj.max_undershoot = std::max(traj.max_undershoot, undershoot);
        traj.clipped_mass += clipped * g.dx() * g.dv();
        if (options.renormalize) {
            const double scale = mass0 / g.mass();
            for (double& v : g.f) v *= scale;
        }
        g.time = t0 + (step + 1) * dt;
        check_support(g);
        e = field_of(g, eps, mollifier);
        record(step + 1, e);
    }
    traj.steps = steps;
    traj.final_state = g;
    return traj;
}

PhaseSpaceGrid rescale_solution(const PhaseSpaceGrid& f, double eps, std::optional<double> vmax_out) {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    PhaseSpaceGrid out;
    if (!vmax_out) {
        out = f;
        out.vmax = eps * f.vmax;
        for (double& v : out.f) v /= eps;
    } else {
        const double need = *vmax_out / eps;
        if (need > f.vmax * (1.0 + 1e-12))
            throw DomainError("rescaling to vmax " + std::to_string(*vmax_out) + " needs source Vmax " +
                              std::to_string(need) + " > " + std::to_string(f.vmax));
        out = PhaseSpaceGrid(f.mx, f.mv, *vmax_out);
        const SplineSolver sv(f.mv, SplineBoundary::Zero);
        std::vector<double> row(static_cast<std::size_t>(f.mv)), coeffs(row.size());
        for (int i = 0; i < f.mx; ++i) {
            for (int j = 0; j < f.mv; ++j) row[j] = f.at(i, j);
            sv.coefficients(row, coeffs);
            for (int j = 0; j < out.mv; ++j) {
                const double src_v = out.v(j) / eps;
                const double s = (src_v + f.vmax) / f.dv() - 0.5;
                out.at(i, j) = std::max(0.0, sv.evaluate(coeffs, s)) / eps;
            }
        }
    }
    out.time = f.time / eps;
    out.eps = 1.0;
    return out;
}

PhaseSpaceGrid KieReference::at(double t) const {
    PhaseSpaceGrid g = g0;
    g.time = t;
    return g;
}

KieReference kie_reference(const PhaseSpaceGrid& g0, double tol) {
    const auto mom = moments(g0);
    for (int i = 0; i < g0.mx; ++i)
        if (std::abs(mom.rho.values[i] - 1.0) > tol)
            throw DomainError("stationary reference needs rho = 1; rho(" + std::to_string(g0.x(i)) +
                              ") = " + std::to_string(mom.rho.values[i]));
    return KieReference{g0};
}

double dominant_angular_frequency(const std::vector<double>& series, double dt) {
    const std::size_t n = series.size();
    if (n < 8) throw DomainError("series too short for a spectral estimate");
    double mu = 0.0;
    for (double v : series) mu += v;
    mu /= static_cast<double>(n);
    std::size_t padded = 1;
    while (padded < 8 * n) padded <<= 1;
    std::vector<cplx> buf(padded, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
        buf[i] = (series[i] - mu) * w;
    }
    fft_forward(buf, 1, static_cast<int>(padded));
    std::size_t best = 1;
    for (std::size_t i = 1; i < padded / 2; ++i)
        if (std::abs(buf[i]) > std::abs(buf[best])) best = i;
    double shift = 0.0;
    if (best > 1 && best + 1 < padded / 2) {
        const double a = std::abs(buf[best - 1]), b = std::abs(buf[best]), c = std::abs(buf[best + 1]);
        const double den = a - 2.0 * b + c;
        if (den != 0.0) shift = 0.5 * (a - c) / den;
    }
    const double freq = (static_cast<double>(best) + shift) / (static_cast<double>(padded) * dt);
    return 2.0 * kPi * freq;
}

}  // namespace vlab
