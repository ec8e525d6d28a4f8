#pragma once

#include <optional>
#include <vector>

#include "vlab/field.hpp"
#include "vlab/kernels.hpp"

namespace vlab {

// 1D1V phase-space density on T^1 x [-vmax, vmax]. x nodes at -1/2 + i dx, velocity
// cell centers at -vmax + (j + 1/2) dv; f is stored row-major as f[ix * mv + iv].
struct PhaseSpaceGrid {
    int mx = 0;
    int mv = 0;
    double vmax = 1.0;
    double time = 0.0;
    double eps = 1.0;
    double r = 0.0;  // 0 when unregularized
    std::vector<double> f;

    PhaseSpaceGrid() = default;
    PhaseSpaceGrid(int mx_, int mv_, double vmax_);

    double dx() const { return 1.0 / mx; }
    double dv() const { return 2.0 * vmax / mv; }
    double x(int i) const { return -0.5 + i * dx(); }
    double v(int j) const { return -vmax + (j + 0.5) * dv(); }
    double& at(int i, int j) { return f[static_cast<std::size_t>(i) * mv + j]; }
    double at(int i, int j) const { return f[static_cast<std::size_t>(i) * mv + j]; }
    double mass() const;
    // Mass within `cells` velocity cells of either end of the grid.
    double boundary_mass(int cells) const;
};

struct Moments {
    SpatialField rho;
    SpatialField j;
    double sup_density = 0.0;
};

Moments moments(const PhaseSpaceGrid& f);

struct PoissonSolution {
    SpatialField U;
    SpatialField E;
};

// Spectral solve of -eps^2 U'' = rho - 1 with zero-mean U, E = -U'. The optional
// mollifier multiplies the solution by chi_r^2 (the regularized field). Throws
// NormalizationError when |mean(rho) - 1| > mass_tol.
PoissonSolution poisson_solve(const SpatialField& rho, double eps,
                              const std::optional<MollifierSpec>& mollifier = std::nullopt,
                              double mass_tol = 1e-6);

// Field energy (eps^-2 / 2) sum_k chi_k^2 |rho_k|^2 / (4 pi^2 k^2), equal to
// (eps^2 / 2) int |E|^2 for the unmollified field.
double field_energy(const SpatialField& rho, double eps, const std::vector<double>* chi_hat = nullptr);

struct VlasovOptions {
    std::vector<double> snapshot_times;   // snapshots taken at the step closest to each time
    int probe_node = -1;                  // node of the E(t, x0) series; -1 selects mx / 4
    double boundary_tol = 1e-10;          // allowed mass in the outer velocity cells
    int boundary_cells = 2;
    double max_shift_cells = 16.0;        // per-step velocity shift limit, in cells
    bool renormalize = true;
    bool track_energy = true;
};

struct VlasovSnapshot {
    PhaseSpaceGrid f;
    SpatialField rho;
    SpatialField E;
};

struct VlasovTrajectory {
    std::vector<VlasovSnapshot> snapshots;
    std::vector<double> times;      // every step, starting at t = 0
    std::vector<double> probe_E;
    std::vector<double> mass;
    std::vector<double> energy;     // kinetic + field energy (empty unless tracked)
    double clipped_mass = 0.0;      // total negative mass removed by clipping
    double max_undershoot = 0.0;    // most negative value seen before clipping (magnitude)
    int steps = 0;
    PhaseSpaceGrid final_state;
};

// Strang-split semi-Lagrangian solver: half x-advection, field solve and full
// v-advection, half x-advection. Requires dt <= eps / 10.
VlasovTrajectory run_vp(const PhaseSpaceGrid& f0, double eps, const std::optional<MollifierSpec>& mollifier,
                        double T, double dt, const VlasovOptions& options = {});

// F(t, x, v) = eps^-1 f(eps t, x, v / eps). Without vmax_out the map is node to node
// (vmax scales by eps); otherwise the rescaled density is resampled on [-vmax_out, vmax_out]
// and DomainError names the Vmax the source would need.
PhaseSpaceGrid rescale_solution(const PhaseSpaceGrid& f, double eps,
                                std::optional<double> vmax_out = std::nullopt);

// Stationary homogeneous reference solution of the kinetic isothermal Euler system.
struct KieReference {
    PhaseSpaceGrid g0;
    PhaseSpaceGrid at(double t) const;
};

// Rejects densities whose rho deviates from 1 by more than tol at some node.
KieReference kie_reference(const PhaseSpaceGrid& g0, double tol = 1e-10);

// Angular frequency of the dominant oscillation in a uniformly sampled series
// (Hann window, zero padding, parabolic peak refinement, mean removed).
double dominant_angular_frequency(const std::vector<double>& series, double dt);

}  // namespace vlab
