#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace oracle {

constexpr double pi = std::numbers::pi;

// G and K = G' at x = p/q from the Fourier series
//   G = -sum_{k>=1} cos(2 pi k x) / (2 pi^2 k^2),  K = sum_{k>=1} sin(2 pi k x) / (pi k),
// summed exactly over residue classes mod q with the polygamma functions.
inline std::pair<double, double> green_fourier(long p, long q) {
    double g = 0.0, k = 0.0;
    for (long r = 1; r <= q; ++r) {
        const double phase = 2.0 * pi * static_cast<double>(r * p % q) / static_cast<double>(q);
        const double t = static_cast<double>(r) / static_cast<double>(q);
        g += std::cos(phase) * boost::math::trigamma(t);
        k -= std::sin(phase) * boost::math::digamma(t);
    }
    const double qq = static_cast<double>(q);
    return {-g / (2.0 * pi * pi * qq * qq), k / (pi * qq)};
}

// Brute-force W_p^p between two uniform clouds of equal size: the optimum of the
// assignment LP is attained at a permutation (Birkhoff), so enumerate them all.
template <class Dist>
double assignment_cost(std::size_t n, Dist dist, int p) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += std::pow(dist(i, perm[i]), p);
        best = std::min(best, c / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// W_1 between two 1D weighted samples by integrating |F - G| over the merged support.
inline double w1_cdf(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
    std::vector<std::pair<double, double>> all;
    for (auto& e : a) all.push_back(e);
    for (auto& e : b) all.push_back({e.first, -e.second});
    std::sort(all.begin(), all.end());
    double acc = 0.0, cdf = 0.0;
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        cdf += all[i].second;
        acc += std::abs(cdf) * (all[i + 1].first - all[i].first);
    }
    return acc;
}

// Composite Simpson rule.
template <class F>
double simpson(F f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace oracle
