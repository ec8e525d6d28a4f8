#include "vlab/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "vlab/error.hpp"

namespace vlab {

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(name) + " must be positive and finite");
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

double RegimeParams::log_radius() const {
    if (log_r) return *log_r;
    return std::log(r);
}

double zeta(int d, double gamma, double delta) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (d == 2) {
        if (!(delta > 2.0)) throw DomainError("delta must exceed 2 in two dimensions");
        return std::max(gamma, delta);
    }
    if (d == 3) return std::max(gamma, 38.0 / 3.0);
    throw DomainError("zeta is defined for d = 2 and d = 3 only");
}

void validate(const RegimeParams& p) {
    if (p.d < 1 || p.d > 3) throw DomainError("dimension must be 1, 2 or 3");
    require_positive(p.eps, "eps");
    require_positive(p.N, "N");
    require_positive(p.gamma, "gamma");
    require_positive(p.T, "T");
    require_positive(p.eta, "eta");
    require_positive(p.beta, "beta");
    require_positive(p.lambda, "lambda");
    if (p.alpha < 0.0) throw DomainError("alpha must be nonnegative");
    if (p.r < 0.0) throw DomainError("r must be nonnegative");
    if (p.d == 2 && !(p.delta > 2.0)) throw DomainError("delta must exceed 2 in two dimensions");
    if (p.beta >= p.eta) throw DomainError("rate exponents require beta < eta (beta=" + fmt(p.beta) + ", eta=" + fmt(p.eta) + ")");
    if (p.eta_prime && !(p.beta < *p.eta_prime && *p.eta_prime < p.eta))
        throw DomainError("rate exponents require beta < eta' < eta");
    if (p.M) require_positive(*p.M, "M");
    const auto& c = p.constants;
    for (double x : {c.C, c.C_T, c.C_2, c.A, c.A_T, c.kappa, c.c}) require_positive(x, "regime constant");
}

Schedules schedules(const RegimeParams& p) {
    validate(p);
    const auto& c = p.constants;
    const double d = p.d;
    Schedules s;
    if (p.d >= 2) {
        const double z = zeta(p.d, p.gamma, p.delta);
        s.zeta = z;
        s.M = c.C_T * std::pow(p.eps, -z * d);
        const double e = std::pow(p.eps, -2.0 - d * z);
        s.log_r_max = -c.C_T * e;
        s.r_max = std::exp(*s.log_r_max);
        s.log_r_gronwall = -c.C_T * e * p.T * p.T / (p.beta * p.beta);
    }
    s.eps_min = p.N > 1.0 ? c.A / std::log(p.N) : std::numeric_limits<double>::infinity();
    s.r_min = c.A_T * std::pow(p.N, -1.0 / (d * (d + 2.0)) + p.alpha);

    if (p.d == 1) {
        s.phi = c.C / p.eps * std::exp(-c.C / p.eps);
        s.log_phi = std::log(c.C / p.eps) - c.C / p.eps;
    } else {
        const double expo = p.d == 2 ? 2.0 * (1.0 + std::max(p.delta, p.gamma)) : 2.0 + std::max(38.0, 3.0 * p.gamma);
        s.phi_inner = c.C * std::pow(p.eps, -expo);
        s.log_phi = -std::exp(*s.phi_inner);
        s.phi = std::exp(s.log_phi);
    }

    const double rexp = 1.0 + d / 2.0 + p.eta / 2.0;
    if (p.r > 0.0 || p.log_r) {
        s.log_placement_budget = -p.gamma * std::log(p.eps) + rexp * p.log_radius();
        s.placement_budget = std::exp(s.log_placement_budget);
    } else {
        s.log_placement_budget = -std::numeric_limits<double>::infinity();
        s.placement_budget = 0.0;
    }

    if (p.eps > 1.0) s.violations.push_back("eps <= 1 (eps = " + fmt(p.eps) + ")");
    if (p.eps < s.eps_min)
        s.violations.push_back("eps >= eps_min(N) = A/log N (eps = " + fmt(p.eps) + ", eps_min = " + fmt(s.eps_min) + ")");
    if (p.d >= 2) {
        const double lr = p.r > 0.0 || p.log_r ? p.log_radius() : -std::numeric_limits<double>::infinity();
        if (lr > *s.log_r_max)
            s.violations.push_back("r <= r_max(eps) (log r = " + fmt(lr) + ", log r_max = " + fmt(*s.log_r_max) + ")");
        if (lr < std::log(s.r_min))
            s.violations.push_back("r >= r_min(N) (log r = " + fmt(lr) + ", log r_min = " + fmt(std::log(s.r_min)) + ")");
    }
    s.admissible = s.violations.empty();
    return s;
}

double DensityHistory::integral(double t) const {
    if (times.size() != sup.size()) throw MismatchError("density history times and values differ in length");
    if (times.empty() || t <= times.front()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double a = times[k - 1];
        const double b = times[k];
        if (t <= a) break;
        if (t < b) {
            const double w = (t - a) / (b - a);
            const double mid = sup[k - 1] + w * (sup[k] - sup[k - 1]);
            acc += 0.5 * (sup[k - 1] + mid) * (t - a);
            return acc;
        }
        acc += 0.5 * (sup[k - 1] + sup[k]) * (b - a);
    }
    if (t > times.back()) throw DomainError("density history does not reach t = " + fmt(t));
    return acc;
}

double DensityHistory::max_until(double t) const {
    double m = 0.0;
    for (std::size_t k = 0; k < times.size() && times[k] <= t; ++k) m = std::max(m, sup[k]);
    return m;
}

GronwallBounds gronwall_bounds(const RegimeParams& p, const DensityHistory& history, double t) {
    validate(p);
    if (t < 0.0) throw DomainError("time must be nonnegative");
    const auto& c = p.constants;
    GronwallBounds g;
    g.alpha_1d = std::sqrt(2.0) * t + 8.0 * history.integral(t);
    g.log_bound_1d = -std::log(p.eps) + g.alpha_1d / p.eps;
    g.bound_1d = std::exp(g.log_bound_1d);

    if (!p.log_r && p.r >= 1.0) throw DomainError("r must lie in (0, 1) for |log r|");
    if (!p.log_r && p.r == 0.0) {
        // unregularized path: only the 1D bound applies
        const double nan = std::numeric_limits<double>::quiet_NaN();
        g.M = g.lambda_opt = g.alpha_opt = g.growth_factor = g.log_growth_factor = g.rur_bound = g.log_rur_bound = nan;
        return g;
    }
    const double lr = p.log_radius();
    if (!(lr < 0.0)) throw DomainError("r must lie in (0, 1) for |log r|");
    const double L = -lr;
    if (p.M)
        g.M = *p.M;
    else if (!history.times.empty())
        g.M = history.max_until(t);
    else if (p.d >= 2)
        g.M = *schedules(p).M;
    else
        throw DomainError("density bound M unavailable in d = 1 without a history");

    g.lambda_opt = c.C / p.eps * std::sqrt(L) * std::sqrt(g.M);
    g.alpha_opt = c.C / g.lambda_opt / (p.eps * p.eps) * L * g.M;
    g.log_growth_factor = c.C / p.eps * std::sqrt(L) * std::sqrt(g.M) * t;
    g.growth_factor = std::exp(g.log_growth_factor);
    g.log_rur_bound = std::log(c.C) - 1.5 * std::log(p.eps) + 0.75 * std::log(g.M) + lr - 0.25 * std::log(L) +
                      g.log_growth_factor;
    g.rur_bound = std::exp(g.log_rur_bound);
    return g;
}

double concentration_bound(double m, double p, double x, double N, double C, double c) {
    if (!(x > 0.0) || !(m > 0.0) || !(p > 0.0)) throw DomainError("concentration bound needs x, m, p > 0");
    if (x > 1.0) return 0.0;
    double g;
    if (p > m / 2.0)
        g = x * x;
    else if (p == m / 2.0) {
        const double q = x / std::log(2.0 + 1.0 / x);
        g = q * q;
    } else
        g = std::pow(x, m / p);
    return C * std::exp(-c * N * g);
}

double calibrate_scale(std::span<const double> measured, std::span<const double> model) {
    if (measured.size() != model.size()) throw MismatchError("calibration series differ in length");
    double best = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        if (!(model[i] > 0.0)) throw DomainError("calibration model values must be positive");
        best = std::max(best, measured[i] / model[i]);
    }
    return best;
}

}  // namespace vlab
