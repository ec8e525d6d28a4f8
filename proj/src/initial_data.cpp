#include "vlab/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vlab/error.hpp"
#include "vlab/random.hpp"

namespace vlab {

namespace {

constexpr double kPi = std::numbers::pi;

double raw_profile(const std::string& profile, double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    if (profile == "bump") return std::exp(-1.0 / (1.0 - s * s));
    if (profile == "waterbag") return 1.0;
    if (profile == "truncated_gaussian") return std::exp(-4.5 * s * s);
    throw DomainError("unknown velocity profile '" + profile + "'");
}

double profile_mass(const std::string& profile) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([&](double s) { return raw_profile(profile, s); }, -1.0, 1.0);
}

double profile_peak(const std::string& profile) {
    if (profile == "bump") return std::exp(-1.0);
    return 1.0;
}

}  // namespace

std::string describe(const InitialSpec& spec) {
    std::ostringstream os;
    os << spec.family << "(d=" << spec.d << ",amplitude=" << spec.amplitude << ",mode=" << spec.mode;
    if (spec.family == "monokinetic")
        os << ",velocity=" << spec.velocity;
    else if (spec.family == "perturbed")
        os << ",profile=" << spec.profile << ",width=" << spec.width << ",drift=" << spec.drift;
    os << ")";
    return os.str();
}

double velocity_profile(const InitialSpec& spec, double v) {
    if (spec.family == "uniform") return std::abs(v) <= 0.5 ? 1.0 : 0.0;
    return raw_profile(spec.profile, v / spec.width) / (spec.width * profile_mass(spec.profile));
}

double spatial_density(const InitialSpec& spec, double x1) {
    const double a = spec.family == "uniform" ? 0.0 : spec.amplitude;
    return 1.0 + a * std::cos(2.0 * kPi * spec.mode * x1);
}

ParticleEnsemble sample_initial(const InitialSpec& spec, std::size_t n, std::uint64_t seed,
                                double min_efficiency) {
    if (n < 1) throw DomainError("sample_initial needs N >= 1");
    if (spec.d < 1 || spec.d > 3) throw DomainError("dimension must be 1, 2 or 3");
    const bool uniform = spec.family == "uniform";
    const bool mono = spec.family == "monokinetic";
    if (!uniform && !mono && spec.family != "perturbed")
        throw DomainError("unknown initial family '" + spec.family + "'");
    const double amp = uniform ? 0.0 : spec.amplitude;
    if (std::abs(amp) > 1.0) throw DomainError("amplitude must satisfy |a| <= 1 for a nonnegative density");
    const double x_eff = 1.0 / (1.0 + std::abs(amp));
    double v_eff = 1.0;
    if (!uniform && !mono) v_eff = profile_mass(spec.profile) / (2.0 * profile_peak(spec.profile));
    if (x_eff < min_efficiency || v_eff < min_efficiency)
        throw SamplingError("rejection efficiency below " + std::to_string(min_efficiency) +
                            "; choose a tighter envelope for " + describe(spec));

    Rng rng(seed);
    ParticleEnsemble ens(spec.d, n);
    ens.f0_spec = describe(spec);
    const double peak = profile_peak(spec.profile);
    for (std::size_t i = 0; i < n; ++i) {
        double* x = ens.pos(i);
        double* v = ens.vel(i);
        while (true) {
            const double cand = rng.uniform(-0.5, 0.5);
            if (amp == 0.0 || rng.uniform() * (1.0 + std::abs(amp)) <= spatial_density(spec, cand)) {
                x[0] = cand;
                break;
            }
        }
        for (int a = 1; a < spec.d; ++a) x[a] = rng.uniform(-0.5, 0.5);
        for (int a = 0; a < spec.d; ++a) {
            if (uniform) {
                v[a] = rng.uniform(-0.5, 0.5);
            } else if (mono) {
                v[a] = a == 0 ? spec.velocity : 0.0;
            } else {
                while (true) {
                    const double s = rng.uniform(-1.0, 1.0);
                    if (rng.uniform() * peak <= raw_profile(spec.profile, s)) {
                        v[a] = spec.width * s + spec.drift;
                        break;
                    }
                }
            }
        }
    }
    return ens;
}

PhaseSpaceGrid initial_grid(const InitialSpec& spec, int mx, int mv, double vmax) {
    if (spec.d != 1) throw DomainError("phase-space grids are 1D1V");
    if (spec.family == "monokinetic") throw DomainError("monokinetic data has no grid density");
    PhaseSpaceGrid g(mx, mv, vmax);
    std::vector<double> prof(static_cast<std::size_t>(mv));
    double mass = 0.0;
    for (int j = 0; j < mv; ++j) {
        const double v = g.v(j);
        prof[j] = spec.family == "uniform" ? (std::abs(v) <= 0.5 ? 1.0 : 0.0)
                                           : raw_profile(spec.profile, (v - spec.drift) / spec.width);
        mass += prof[j] * g.dv();
    }
    if (!(mass > 0.0)) throw DomainError("velocity profile not resolved by the grid");
    for (int i = 0; i < mx; ++i) {
        const double rho = spatial_density(spec, g.x(i));
        for (int j = 0; j < mv; ++j) g.at(i, j) = rho * prof[j] / mass;
    }
    return g;
}

}  // namespace vlab
