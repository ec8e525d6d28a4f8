#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vlab {

// Multiplicative constants of the limit theorems. None has a known value; all default to 1.
struct RegimeConstants {
    double C = 1.0;
    double C_T = 1.0;
    double C_2 = 1.0;
    double A = 1.0;
    double A_T = 1.0;
    double kappa = 1.0;
    double c = 1.0;
};

struct RegimeParams {
    int d = 1;
    double eps = 0.5;
    double r = 0.0;                 // 0 selects the unregularized 1D path
    std::optional<double> log_r;    // overrides log(r) when r underflows
    double N = 1000.0;
    double gamma = 1.0;
    double delta = 2.5;             // d = 2 only, must exceed 2
    double T = 1.0;
    double eta = 0.5;
    std::optional<double> eta_prime;
    double alpha = 0.0;
    double beta = 0.25;
    double lambda = 2.0;
    std::optional<double> M;        // density bound; defaults to the schedule value
    RegimeConstants constants;

    double log_radius() const;
};

// d = 2: max(gamma, delta) with delta > 2; d = 3: max(gamma, 38/3). DomainError otherwise.
double zeta(int d, double gamma, double delta = 2.5);

// Throws DomainError on non-positive parameters or inconsistent exponents
// (delta <= 2 in 2D, beta >= eta, eta' outside (beta, eta)).
void validate(const RegimeParams& p);

struct Schedules {
    std::optional<double> zeta;
    std::optional<double> M;            // C_T eps^{-zeta d}
    std::optional<double> log_r_max;    // -C_T eps^{-2 - d zeta}
    std::optional<double> r_max;
    std::optional<double> log_r_gronwall;  // -C_T eps^{-2 - d zeta} T^2 / beta^2
    double eps_min = 0.0;               // A / log N
    double r_min = 0.0;                 // A_T N^{-1/(d(d+2)) + alpha}
    double phi = 0.0;
    double log_phi = 0.0;
    // d >= 2: phi = exp(-exp(phi_inner)); kept separately since log_phi overflows first.
    std::optional<double> phi_inner;
    double placement_budget = 0.0;      // eps^-gamma r^{1 + d/2 + eta/2}
    double log_placement_budget = 0.0;
    bool admissible = false;
    std::vector<std::string> violations;
};

Schedules schedules(const RegimeParams& p);

// Samples (t_k, ||rho(t_k)||_inf) of the reference density, t_0 = 0.
struct DensityHistory {
    std::vector<double> times;
    std::vector<double> sup;

    // Trapezoidal integral of sup over [0, t], linearly interpolated at t.
    double integral(double t) const;
    double max_until(double t) const;
};

struct GronwallBounds {
    double alpha_1d = 0.0;      // sqrt(2) t + 8 int ||rho||
    double bound_1d = 0.0;      // eps^-1 exp(alpha / eps)
    double log_bound_1d = 0.0;
    double M = 0.0;
    double lambda_opt = 0.0;
    double alpha_opt = 0.0;
    double growth_factor = 0.0;
    double log_growth_factor = 0.0;
    double rur_bound = 0.0;
    double log_rur_bound = 0.0;
};

// With r = 0 only the 1D quantities are set (the rest are NaN).
// The density bound M is p.M if given, otherwise the maximum of the history on [0, t],
// otherwise the schedule value. r must lie in (0, 1) (DomainError).
GronwallBounds gronwall_bounds(const RegimeParams& p, const DensityHistory& history, double t);

// C 1{x <= 1} exp(-c N g(x)) with g by the sign of p - m/2.
double concentration_bound(double m, double p, double x, double N, double C = 1.0, double c = 1.0);

// Smallest C with measured_i <= C model_i for all i (model_i > 0).
double calibrate_scale(std::span<const double> measured, std::span<const double> model);

}  // namespace vlab
