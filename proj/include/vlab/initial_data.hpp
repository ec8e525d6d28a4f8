#pragma once

#include <cstdint>
#include <string>

#include "vlab/particles.hpp"
#include "vlab/vlasov.hpp"

namespace vlab {

// Separable initial densities f0(x, v) = rho0(x) * prod_a g(v_a - drift_a), with
// rho0(x) = 1 + amplitude * cos(2 pi mode x_1).
//   uniform      rho0 = 1, g uniform on [-1/2, 1/2]
//   monokinetic  g = Dirac at `velocity`
//   perturbed    g one of: bump (exp(-1/(1 - (v/R)^2))), waterbag, truncated_gaussian (sigma = R/3)
struct InitialSpec {
    std::string family = "perturbed";
    int d = 1;
    double amplitude = 0.0;
    int mode = 1;
    std::string profile = "bump";
    double width = 0.4;     // velocity support half-width R
    double drift = 0.0;
    double velocity = 0.0;  // monokinetic velocity
};

std::string describe(const InitialSpec& spec);

// Normalized 1D velocity profile g(v) (without drift). DomainError for unknown names.
double velocity_profile(const InitialSpec& spec, double v);
double spatial_density(const InitialSpec& spec, double x1);

// N i.i.d. draws; velocities by rejection from the uniform envelope on [-R, R] and
// positions by rejection from the uniform envelope of height 1 + |amplitude|.
// Throws SamplingError when the acceptance rate would fall below min_efficiency.
ParticleEnsemble sample_initial(const InitialSpec& spec, std::size_t n, std::uint64_t seed,
                                double min_efficiency = 1e-3);

// Cell-center discretization of f0 on a 1D1V grid, with the velocity profile renormalized
// to unit discrete mass so that rho0 is exact at the nodes.
PhaseSpaceGrid initial_grid(const InitialSpec& spec, int mx, int mv, double vmax);

}  // namespace vlab
