#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vlab/field.hpp"
#include "vlab/kernels.hpp"

namespace vlab {

struct ParticleEnsemble {
    int d = 1;
    std::size_t n = 0;
    std::vector<double> x;  // n * d, wrapped to [-1/2, 1/2)
    std::vector<double> v;  // n * d
    double time = 0.0;
    double eps = 1.0;
    double r = 0.0;         // 0 for the unregularized system
    std::string f0_spec;

    ParticleEnsemble() = default;
    ParticleEnsemble(int d_, std::size_t n_);
    double* pos(std::size_t i) { return x.data() + i * d; }
    const double* pos(std::size_t i) const { return x.data() + i * d; }
    double* vel(std::size_t i) { return v.data() + i * d; }
    const double* vel(std::size_t i) const { return v.data() + i * d; }
};

enum class Deposit { CloudInCell, ExactFourier };

// a_i = (1/N) sum_{j != i} T(x_i - x_j), T the tabulated kernel with linear
// interpolation, summed in ascending j.
std::vector<double> force_direct(const ParticleEnsemble& ens, const KernelTable& table);

// Same sum through deposition, spectral convolution with eps^-2 chi^2 K^ and gathering.
// CloudInCell is O(N + M^d log M); ExactFourier uses the exact Fourier modes of the
// empirical measure (|k_a| < M/2), which excludes self-interaction exactly.
std::vector<double> force_pic(const ParticleEnsemble& ens, const KernelTable& table,
                              Deposit deposit = Deposit::CloudInCell);

// Unregularized 1D force eps^-2 (1/N) sum_{j != i} K(x_i - x_j), exact in O(N log N).
std::vector<double> force_exact_1d(const ParticleEnsemble& ens);

using ForceFn = std::function<std::vector<double>(const ParticleEnsemble&)>;

// Kick-drift-kick leapfrog. Throws NonFiniteError naming the first bad particle.
ParticleEnsemble step_leapfrog(const ParticleEnsemble& ens, double dt, const ForceFn& force);

// Repeated leapfrog reusing the closing kick's force; `observer` runs after each step.
void advance_leapfrog(ParticleEnsemble& ens, double dt, int steps, const ForceFn& force,
                      const std::function<void(const ParticleEnsemble&)>& observer = {});

struct EnergyReport {
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
    double time = 0.0;
};

// Kinetic (1/2N) sum |v|^2 plus the mollified Green interaction of the deposited
// (rho - 1) with itself, evaluated spectrally.
EnergyReport regularized_energy(const ParticleEnsemble& ens, const KernelTable& table,
                                Deposit deposit = Deposit::ExactFourier);

// Energy of the unregularized 1D system with the closed-form Green function
// (self pairs included so the potential is the nonnegative field energy).
EnergyReport unregularized_energy_1d(const ParticleEnsemble& ens);

// Cloud-in-cell density (mean 1) and momentum density on the m^d node grid.
SpatialField deposit_density(const ParticleEnsemble& ens, int m);
SpatialField deposit_momentum(const ParticleEnsemble& ens, int m);

std::vector<double> total_momentum(const ParticleEnsemble& ens);

}  // namespace vlab
