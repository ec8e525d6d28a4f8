#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vlab/fft.hpp"
#include "vlab/field.hpp"

namespace vlab {

struct MollifierSpec {
    double r = 1.0 / 32.0;
    std::string profile = "bump";
};

// Unnormalized radial profile on the unit ball, s = |x| in [0, 1]. Throws DomainError
// for an unknown profile name.
double mollifier_profile(const std::string& profile, double s);

// Constant c_d with c_d * integral of profile(|y|) over the unit ball of R^d equal to 1.
double mollifier_normalization(int d, const std::string& profile);

// chi_r(x) at distance |x| = dist.
double mollifier_value(const MollifierSpec& spec, int d, double dist);

// Continuous Fourier transform of chi_r at frequency magnitude |k| (torus units), by
// quadrature of the radial integral.
double mollifier_fourier(const MollifierSpec& spec, int d, double kabs);

// chi_r sampled at the lag nodes of the m^d grid, normalized to unit discrete mass.
std::vector<double> mollifier_samples(const MollifierSpec& spec, int d, int m);

// Real Fourier multipliers of the sampled mollifier (FFT order); entry 0 is exactly 1.
std::vector<double> mollifier_multipliers(const MollifierSpec& spec, int d, int m);

// Closed-form torus Green function G'' = delta_0 - 1 with zero mean and K = G'.
// K(0) = 0 by convention. x must lie in [-1/2, 1/2].
std::pair<double, double> green_kernel_1d(double x);

struct KernelFourier {
    int d = 1;
    int m = 0;
    std::vector<double> green_hat;  // G^(k) = -1/(4 pi^2 |k|^2), 0 at k = 0
    std::vector<cplx> force_hat;    // d blocks: K^_a(k) = 2 pi i k_a G^(k), own Nyquist removed
};

KernelFourier kernel_fourier(int d, int m);

// Multiplier K^_a(k) for component a at the signed wavevector k.
cplx force_multiplier(int d, int m, int a, const int* k);
double green_multiplier(int d, const int* k);

// Tabulated eps^-2 chi_r * chi_r * K (and the matching Green table) on the lag grid
// x = i / m, i = 0..m-1 per axis. Immutable after construction.
struct KernelTable {
    int d = 1;
    int m = 0;
    double eps = 1.0;
    double r = 0.0;
    std::string profile = "bump";
    std::vector<double> force;    // d blocks of m^d values
    std::vector<double> green;    // eps^-2 chi_r * G * chi_r
    std::vector<double> chi_hat;  // mollifier multipliers, FFT order
    KernelFourier fourier;

    std::size_t points() const { return grid_points(d, m); }
    // Linear interpolation of the force table at an arbitrary lag (wrapped).
    void force_at(const double* lag, double* out) const;
    double green_at(const double* lag) const;
};

// Checks r < 1/4 (DomainError), m even and m*r >= 8 (ResolutionError).
KernelTable mollified_force_table(const MollifierSpec& spec, double eps, int m, int d);

// E = eps^-2 chi_r * chi_r * K * rho on the grid of rho (table grid must match).
SpatialField mollified_force_field(const KernelTable& table, const SpatialField& rho);

// Unmollified spectral force eps^-2 K * rho.
SpatialField spectral_force_field(const SpatialField& rho, double eps);

// Spectral divergence of a vector field with d components.
SpatialField spectral_divergence(const SpatialField& e);

// sup over the grid of the central-difference gradient (Frobenius norm of the Jacobian)
// of chi_r * K * h, computed with real transforms so large 2D grids fit in memory.
double lipschitz_estimate(const MollifierSpec& spec, const SpatialField& density);
double lipschitz_estimate(const KernelTable& table, const SpatialField& density);

struct AnalyticNorm {
    double value = 0.0;       // sum |g^(k)| delta0^|k| over retained modes
    double tail_bound = 0.0;  // truncation tail estimate plus contribution of floored modes
    int modes = 0;            // retained nonzero modes
    int floored = 0;          // modes below the noise floor, excluded from value
};

// coeffs: 1D Fourier coefficients in FFT order. Modes with modulus below
// noise_floor * max|g^| are treated as round-off; their weighted sum goes into the tail.
AnalyticNorm analytic_norm(std::span<const cplx> coeffs, double delta0, double noise_floor = 1e-13);
AnalyticNorm analytic_norm(const SpatialField& g, double delta0, double noise_floor = 1e-13);

}  // namespace vlab
