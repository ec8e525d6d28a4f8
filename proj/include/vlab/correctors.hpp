#pragma once

#include <vector>

#include "vlab/fft.hpp"
#include "vlab/field.hpp"
#include "vlab/vlasov.hpp"

namespace vlab {

// Phase of the plasma oscillation: t / eps (default) or t / sqrt(eps).
enum class OscillationPhase { InverseEps, InverseSqrtEps };

// Corrector fields d+ and d- = conj(d+) on the node grid (d components each).
struct CorrectorState {
    int d = 1;
    int m = 0;
    double eps = 1.0;
    double time = 0.0;
    std::vector<cplx> d_plus;
    std::vector<cplx> d_minus;
    SpatialField j;  // momentum of the reference solution
    OscillationPhase phase = OscillationPhase::InverseEps;
};

// d+(0) = P[(eps E(0) + i j)] / 2 with E(0) = eps^-2 K * (rho - 1) and P the projection
// onto zero-mean gradient fields (in 1D: removing the mean).
CorrectorState corrector_init_fields(const SpatialField& rho, const SpatialField& j, double eps,
                                     double mass_tol = 1e-6);
CorrectorState corrector_init(const PhaseSpaceGrid& f0, double eps);

// Evolves d_t + j d_x = c(t) on [time, time + T] (d = 1), c fixed by mean preservation.
// A spatially constant j is transported exactly in Fourier space; otherwise cubic
// semi-Lagrangian steps. CflError when max|j| dt / dx > 1. Returns the states at every step.
std::vector<CorrectorState> corrector_evolve(const CorrectorState& state, double T, double dt);

struct CorrectorField {
    SpatialField R;              // (1/i)(d+ e^{i theta} - d- e^{-i theta})
    double grad_sup = 0.0;       // max central-difference gradient magnitude
    double imag_residue = 0.0;   // max |Im| before taking the real part
};

CorrectorField corrector_R(const CorrectorState& state, double t);

// Max over nodes of the discrete curl of d+ (zero in 1D).
double corrector_curl(const CorrectorState& state);

}  // namespace vlab
