#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vlab/error.hpp"
#include "vlab/initial_data.hpp"
#include "vlab/network_simplex.hpp"
#include "vlab/random.hpp"
#include "vlab/transport.hpp"

namespace vlab {
namespace {

constexpr double kPi = std::numbers::pi;

// Uniform-weight 1D1V cloud with positions in the fundamental domain.
WeightedPointCloud random_cloud(Rng& rng, std::size_t n, double vscale = 0.5, bool random_weights = false) {
    WeightedPointCloud c;
    c.dim = 2;
    c.pos_dims = 1;
    std::vector<double> w(n, 1.0 / n);
    if (random_weights) {
        double s = 0.0;
        for (auto& x : w) s += (x = 0.1 + rng.uniform());
        for (auto& x : w) x /= s;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double p[2] = {rng.uniform(-0.5, 0.5), rng.uniform(-vscale, vscale)};
        c.add(p, w[i]);
    }
    return c;
}

double dist(const WeightedPointCloud& a, std::size_t i, const WeightedPointCloud& b, std::size_t j, Metric m) {
    return phase_distance(a.point(i), b.point(j), a.dim, a.pos_dims, m);
}

void expect_marginals(const TransportResult& r, const WeightedPointCloud& mu, const WeightedPointCloud& nu) {
    std::vector<double> rows(mu.size(), 0.0), cols(nu.size(), 0.0);
    for (const auto& e : r.plan.entries) {
        EXPECT_GE(e.mass, 0.0);
        rows[e.i] += e.mass;
        cols[e.j] += e.mass;
    }
    for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_NEAR(rows[i], mu.weights[i], 1e-12);
    for (std::size_t j = 0; j < nu.size(); ++j) EXPECT_NEAR(cols[j], nu.weights[j], 1e-12);
}

TEST(W1, SpecExamples) {
    const double a[] = {0.0}, b[] = {0.3};
    EXPECT_NEAR(w1_1d(cloud_1d(a), cloud_1d(b)), 0.3, 1e-15);
    const double c[] = {0.0, 0.5}, d[] = {0.1, 0.4};
    EXPECT_NEAR(w1_1d(cloud_1d(c), cloud_1d(d)), 0.1, 1e-15);
    EXPECT_EQ(w1_1d(cloud_1d(c), cloud_1d(c)), 0.0);
    EXPECT_THROW(w1_1d(cloud_1d(c), cloud_1d(d), Metric::TorusGeodesic), MismatchError);
}

TEST(W1, MatchesCdfOracleOnWeightedClouds) {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t na = 1 + rng.index(12), nb = 1 + rng.index(12);
        std::vector<double> xa(na), wa(na), xb(nb), wb(nb);
        std::vector<std::pair<double, double>> oa, ob;
        double sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < na; ++i) sa += (wa[i] = rng.uniform() + 0.01);
        for (std::size_t i = 0; i < nb; ++i) sb += (wb[i] = rng.uniform() + 0.01);
        for (std::size_t i = 0; i < na; ++i) {
            xa[i] = rng.uniform(-0.5, 0.5);
            wa[i] /= sa;
            oa.push_back({xa[i], wa[i]});
        }
        for (std::size_t i = 0; i < nb; ++i) {
            xb[i] = rng.uniform(-0.5, 0.5);
            wb[i] /= sb;
            ob.push_back({xb[i], wb[i]});
        }
        EXPECT_NEAR(wp_1d(xa, wa, xb, wb, 1), oracle::w1_cdf(oa, ob), 1e-12);
        // Cross-method: exact LP with a one-dimensional cloud.
        const auto lp = wasserstein_discrete(cloud_1d(xa, wa), cloud_1d(xb, wb), 1).distance;
        EXPECT_NEAR(lp, oracle::w1_cdf(oa, ob), 1e-10);
        const auto lp2 = wasserstein_discrete(cloud_1d(xa, wa), cloud_1d(xb, wb), 2).distance;
        EXPECT_NEAR(lp2, wp_1d(xa, wa, xb, wb, 2), 1e-10);
    }
}

TEST(W2Discrete, SpecExamples) {
    WeightedPointCloud a, b;
    const double p[2] = {0.0, 0.0}, q[2] = {0.3, 0.4};
    a.add(p, 1.0);
    b.add(q, 1.0);
    const auto r = w2_discrete(a, b);
    EXPECT_NEAR(r.distance, 0.5, 1e-15);
    ASSERT_EQ(r.plan.entries.size(), 1u);
    EXPECT_EQ(r.plan.entries[0].mass, 1.0);

    Rng rng(5);
    const auto mu = random_cloud(rng, 7);
    const auto self = w2_discrete(mu, mu);
    EXPECT_NEAR(self.distance, 0.0, 1e-15);
    for (const auto& e : self.plan.entries) EXPECT_EQ(e.i, e.j);
}

TEST(W2Discrete, MatchesPermutationBruteForce) {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.index(6);
        const auto mu = random_cloud(rng, n), nu = random_cloud(rng, n);
        for (auto metric : {Metric::EuclideanFundamental, Metric::TorusGeodesic}) {
            for (int p : {1, 2}) {
                const auto r = wasserstein_discrete(mu, nu, p, metric);
                const double brute = oracle::assignment_cost(
                    n, [&](std::size_t i, std::size_t j) { return dist(mu, i, nu, j, metric); }, p);
                EXPECT_NEAR(r.plan.cost_p, brute, 1e-10);
                EXPECT_NEAR(r.distance, std::pow(brute, 1.0 / p), 1e-10);
                expect_marginals(r, mu, nu);
            }
        }
    }
}

TEST(W2Discrete, MetricAxioms) {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_cloud(rng, 1 + rng.index(9), 0.5, true);
        const auto b = random_cloud(rng, 1 + rng.index(9), 0.5, true);
        const auto c = random_cloud(rng, 1 + rng.index(9), 0.5, true);
        for (auto metric : {Metric::EuclideanFundamental, Metric::TorusGeodesic}) {
            const double ab = w2_discrete(a, b, metric).distance;
            const double ba = w2_discrete(b, a, metric).distance;
            const double bc = w2_discrete(b, c, metric).distance;
            const double ac = w2_discrete(a, c, metric).distance;
            EXPECT_NEAR(ab, ba, 1e-12);
            EXPECT_LE(ac, ab + bc + 1e-10);
            EXPECT_GE(ab, 0.0);
            expect_marginals(w2_discrete(a, b, metric), a, b);
        }
    }
}

TEST(NetworkSimplex, DualCertificate) {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n1 = 2 + rng.index(40), n2 = 2 + rng.index(40);
        std::vector<double> a(n1), b(n2), cost(n1 * n2);
        double sa = 0.0, sb = 0.0;
        for (auto& x : a) sa += (x = rng.uniform() + 0.05);
        for (auto& x : b) sb += (x = rng.uniform() + 0.05);
        for (auto& x : a) x /= sa;
        for (auto& x : b) x /= sb;
        for (auto& c : cost) c = rng.uniform();
        const auto sol = solve_transport(a, b, cost);
        double primal = 0.0;
        for (const auto& f : sol.flows) {
            primal += f.mass * cost[f.i * n2 + f.j];
            if (f.mass > 1e-14) EXPECT_NEAR(cost[f.i * n2 + f.j] - sol.u[f.i] - sol.w[f.j], 0.0, 1e-10);
        }
        double dual = 0.0;
        for (std::size_t i = 0; i < n1; ++i) dual += a[i] * sol.u[i];
        for (std::size_t j = 0; j < n2; ++j) dual += b[j] * sol.w[j];
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) EXPECT_GE(cost[i * n2 + j] - sol.u[i] - sol.w[j], -1e-10);
        EXPECT_NEAR(primal, sol.cost, 1e-12);
        EXPECT_NEAR(primal, dual, 1e-10);
    }
}

TEST(W2Discrete, Errors) {
    Rng rng(1);
    const auto a = random_cloud(rng, 2001), b = random_cloud(rng, 2001);
    EXPECT_THROW(w2_discrete(a, b), SizeError);
    WeightedPointCloud bad = random_cloud(rng, 3);
    bad.weights[0] = 0.9;
    EXPECT_THROW(bad.validate(), DomainError);
    EXPECT_THROW(parse_metric("manhattan"), DomainError);
    EXPECT_EQ(parse_metric(to_string(Metric::TorusGeodesic)), Metric::TorusGeodesic);
}

TEST(Sliced, IdenticalAndDiracs) {
    Rng rng(3);
    const auto mu = random_cloud(rng, 20);
    EXPECT_NEAR(sliced_w2(mu, mu, 64, 1).value, 0.0, 1e-15);
    WeightedPointCloud a, b;
    const double p[2] = {0.0, 0.0}, q[2] = {0.3, 0.4};
    a.add(p, 1.0);
    b.add(q, 1.0);
    // Mean of |<delta, theta>| over the unit circle is |delta| 2 / pi.
    const auto est = sliced_w2(a, b, 4000, 5);
    EXPECT_NEAR(est.value, 0.5 * 2.0 / kPi, 3.0 * est.stderr_);
    EXPECT_THROW(sliced_w2(a, b, 8, 1), DomainError);
}

TEST(Sliced, BelowExactPlusThreeStderr) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random_cloud(rng, 30), nu = random_cloud(rng, 25);
        const auto est = sliced_w2(mu, nu, 128, trial + 1);
        EXPECT_LE(est.value, w2_discrete(mu, nu).distance + 3.0 * est.stderr_);
    }
}

TEST(GridCloud, SingleCellVsDiracAtCenter) {
    PhaseSpaceGrid g(4, 4, 1.0);
    g.at(1, 2) = 1.0 / (g.dx() * g.dv());
    WeightedPointCloud c;
    const double p[2] = {g.x(1) + 0.5 * g.dx(), g.v(2)};
    c.add(p, 1.0);
    GridCloudOptions opt;
    opt.blocks_x = 4;
    opt.blocks_v = 4;
    const auto r = grid_vs_cloud_w(g, c, opt);
    EXPECT_LE(r.value, std::hypot(g.dx(), g.dv()));
    EXPECT_EQ(r.method, "exact-lp");
}

TEST(GridCloud, JensenOrdering) {
    InitialSpec spec;
    spec.amplitude = 0.3;
    const auto g = initial_grid(spec, 32, 64, 1.0);
    const auto cloud = cloud_from_ensemble(sample_initial(spec, 300, 4));
    GridCloudOptions o1, o2;
    o1.blocks_x = o2.blocks_x = 16;
    o1.blocks_v = o2.blocks_v = 16;
    o1.p = 1;
    o2.p = 2;
    EXPECT_LE(grid_vs_cloud_w(g, cloud, o1).value, grid_vs_cloud_w(g, cloud, o2).value + 1e-12);
}

TEST(GridCloud, DistanceShrinksWithSampleSize) {
    InitialSpec spec;
    spec.family = "uniform";
    PhaseSpaceGrid g(32, 32, 0.5);
    for (double& v : g.f) v = 1.0;
    GridCloudOptions opt;
    opt.max_cloud_atoms = 0;
    std::vector<double> logn, logw;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        double acc = 0.0;
        for (std::uint64_t s = 1; s <= 3; ++s)
            acc += grid_vs_cloud_w(g, cloud_from_ensemble(sample_initial(spec, n, s)), opt).value;
        logn.push_back(std::log(static_cast<double>(n)));
        logw.push_back(std::log(acc / 3.0));
    }
    EXPECT_LT(logw[1], logw[0]);
    EXPECT_LT(logw[2], logw[1]);
    const double slope = (logw[2] - logw[0]) / (logn[2] - logn[0]);
    EXPECT_LT(slope, -0.3);
    EXPECT_GT(slope, -0.7);
}

TEST(AnisotropicD, Examples) {
    Rng rng(17);
    const auto a = random_cloud(rng, 10);
    EXPECT_EQ(anisotropic_D(a, a, 3.0), 0.0);
    auto b = a;
    const double h = 0.05, lambda = 3.0;
    for (std::size_t i = 0; i < b.size(); ++i) b.point(i)[0] += h;
    EXPECT_NEAR(anisotropic_D(a, b, lambda), lambda * lambda * h * h / 2.0, 1e-14);
    const auto t = truncate_D({0.0, 0.0}, lambda, 0.1, 1);
    EXPECT_EQ(t.values, std::vector<double>({0.0, 0.0}));
    EXPECT_TRUE(truncate_D({0.1}, 1.2, 0.1, 1).weak_lambda);
    EXPECT_FALSE(truncate_D({0.1}, 1.5, 0.1, 1).weak_lambda);
}

TEST(AnisotropicD, TruncationIsMonotoneAndCapped) {
    const double lambda = 2.0, r = 0.2;
    const auto t = truncate_D({1e-4, 5e-4, 2e-4, 1.0}, lambda, r, 1);
    const double level = 1.0 / (lambda * lambda * std::pow(r, 3));
    EXPECT_NEAR(t.values[0], 1e-4 * level, 1e-15);
    EXPECT_NEAR(t.values[1], 5e-4 * level, 1e-15);
    EXPECT_NEAR(t.values[2], 5e-4 * level, 1e-15);
    EXPECT_EQ(t.values[3], 1.0);
}

TEST(AnisotropicD, HalfFactorFailsForVelocityOffsets) {
    // A pure velocity offset c: W2^2 = c^2 but D = c^2 / 2.
    Rng rng(19);
    const auto a = random_cloud(rng, 6);
    auto b = a;
    for (std::size_t i = 0; i < b.size(); ++i) b.point(i)[1] += 0.2;
    const double w = w2_discrete(a, b).distance;
    EXPECT_GT(w * w, anisotropic_D(a, b, 3.0));
    EXPECT_LE(w * w, 2.0 * anisotropic_D(a, b, 3.0) + 1e-12);
}

TEST(AnisotropicD, TwiceDBoundsW2Squared) {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_cloud(rng, 8);
        auto b = a;
        for (auto& x : b.points) x += rng.uniform(-0.1, 0.1);
        for (std::size_t i = 0; i < b.size(); ++i) b.point(i)[0] = wrap_torus(b.point(i)[0]);
        const double lambda = 1.0 + 3.0 * rng.uniform();
        const double w = w2_discrete(a, b, Metric::TorusGeodesic).distance;
        EXPECT_LE(w * w, 2.0 * anisotropic_D(a, b, lambda, Metric::TorusGeodesic) + 1e-12);
    }
}

TEST(Mollify, SelfDistanceAtMostR) {
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const auto mu = random_cloud(rng, 6);
        const double r = 0.01 + 0.2 * rng.uniform();
        const auto m = mollify_measure(mu, r);
        m.validate(1e-12);
        for (int p : {1, 2}) EXPECT_LE(wasserstein_discrete(m, mu, p).distance, r + 1e-12);
    }
}

TEST(Mollify, ContractionAndMonotoneInRadius) {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto mu = random_cloud(rng, 5), nu = random_cloud(rng, 5);
        const double r = 0.01 + 0.2 * rng.uniform();
        const double lhs = w2_discrete(mollify_measure(mu, r), mollify_measure(nu, r)).distance;
        EXPECT_LE(lhs, w2_discrete(mu, nu).distance + 1e-10);
    }
    const auto mu = random_cloud(rng, 5);
    double prev = INFINITY;
    for (double r : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        const double w = w2_discrete(mollify_measure(mu, r), mu).distance;
        EXPECT_LE(w, prev + 1e-12);
        prev = w;
    }
    EXPECT_LE(prev, 0.0125);
    EXPECT_THROW(mollify_measure(mu, 0.3), DomainError);
}

TEST(Mollify, StochasticModeIsSeededAndWithinR) {
    Rng rng(37);
    const auto mu = random_cloud(rng, 4);
    MollifyOptions opt;
    opt.mode = MollifyMode::Stochastic;
    opt.samples = 16;
    opt.seed = 3;
    const auto a = mollify_measure(mu, 0.1, opt), b = mollify_measure(mu, 0.1, opt);
    EXPECT_EQ(a.points, b.points);
    EXPECT_EQ(a.size(), 64u);
    a.validate(1e-12);
    EXPECT_LE(w2_discrete(a, mu).distance, 0.1 + 1e-12);
}

TEST(Filter, IdentityShiftAndLipschitzFactor) {
    Rng rng(41);
    const auto mu = random_cloud(rng, 6);
    SpatialField zero(1, 32, 1, FieldKind::Corrector);
    EXPECT_EQ(filter_measure(mu, zero).points, mu.points);
    SpatialField c = zero;
    std::fill(c.values.begin(), c.values.end(), 0.25);
    const auto shifted = filter_measure(mu, c);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        EXPECT_EQ(shifted.point(i)[0], mu.point(i)[0]);
        EXPECT_NEAR(shifted.point(i)[1], mu.point(i)[1] - 0.25, 1e-15);
    }
    for (int trial = 0; trial < 50; ++trial) {
        SpatialField R(1, 64, 1, FieldKind::Corrector);
        const double amp = rng.uniform(0.0, 0.3);
        const double ph = rng.uniform(0.0, 2.0 * kPi);
        for (int i = 0; i < 64; ++i) R.values[i] = amp * std::sin(2 * kPi * SpatialField::node(i, 64) + ph);
        const auto a = random_cloud(rng, 5), b = random_cloud(rng, 5);
        const double lhs = wasserstein_discrete(filter_measure(a, R), filter_measure(b, R), 1).distance;
        const double rhs = (1.0 + interpolated_lipschitz(R)) * wasserstein_discrete(a, b, 1).distance;
        EXPECT_LE(lhs, rhs + 1e-10);
    }
}

TEST(Scale, IdentityCompositionAndInequality) {
    Rng rng(43);
    const auto mu = random_cloud(rng, 6);
    EXPECT_EQ(scale_measure(mu, 1.0).points, mu.points);
    const auto back = scale_measure(scale_measure(mu, 2.5), 1.0 / 2.5);
    for (std::size_t i = 0; i < mu.points.size(); ++i) EXPECT_NEAR(back.points[i], mu.points[i], 1e-15);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_cloud(rng, 5), b = random_cloud(rng, 5);
        const double R = 1.0 + 4.0 * rng.uniform();
        for (int p : {1, 2}) {
            const double lhs = wasserstein_discrete(a, b, p).distance;
            const double rhs = R * wasserstein_discrete(scale_measure(a, R), scale_measure(b, R), p).distance;
            EXPECT_LE(lhs, rhs + 1e-10);
        }
    }
    EXPECT_THROW(scale_measure(mu, 0.0), DomainError);
}

TEST(Scale, InequalityNeedsRAtLeastOne) {
    // Two atoms offset only in x: shrinking R below 1 leaves W unchanged while R W shrinks.
    WeightedPointCloud a, b;
    const double p[2] = {0.0, 0.0}, q[2] = {0.2, 0.0};
    a.add(p, 1.0);
    b.add(q, 1.0);
    const double R = 0.5;
    EXPECT_GT(w2_discrete(a, b).distance, R * w2_discrete(scale_measure(a, R), scale_measure(b, R)).distance);
}

TEST(Loeper, OneDimensionalCircleW2MatchesQuantizedLp) {
    const std::vector<double> a1 = {0.3, 0.1}, b1 = {0.0, 0.05}, a2 = {-0.2}, b2 = {0.25};
    const auto chk = loeper_check_1d(a1, b1, a2, b2, 0.5);
    auto quantize = [](const std::vector<double>& a, const std::vector<double>& b) {
        const int n = 400;
        std::vector<double> x(n), w(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = -0.5 + (i + 0.5) / n;
            double h = 1.0;
            for (std::size_t k = 0; k < a.size(); ++k) h += a[k] * std::cos(2 * kPi * (k + 1) * x[i]);
            for (std::size_t k = 0; k < b.size(); ++k) h += b[k] * std::sin(2 * kPi * (k + 1) * x[i]);
            s += (w[i] = h);
        }
        for (auto& v : w) v /= s;
        return cloud_1d(x, w);
    };
    const double lp = w2_discrete(quantize(a1, b1), quantize(a2, b2), Metric::TorusGeodesic).distance;
    EXPECT_NEAR(chk.w2, lp, 2.0 / 400);
    EXPECT_LE(chk.lhs, chk.rhs + chk.tolerance);
}

TEST(Loeper, RandomBandLimitedPairs) {
    Rng rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a1(3), b1(3), a2(3), b2(3);
        for (auto* v : {&a1, &b1, &a2, &b2})
            for (auto& x : *v) x = rng.uniform(-0.12, 0.12);
        const double eps = 0.1 + rng.uniform();
        const auto chk = loeper_check_1d(a1, b1, a2, b2, eps);
        EXPECT_LE(chk.lhs, chk.rhs + chk.tolerance);
    }
}

TEST(Loeper, TwoDimensionalCheck) {
    const int m = 16;
    SpatialField h1(2, m, 1, FieldKind::Density), h2 = h1;
    for (int iy = 0; iy < m; ++iy)
        for (int ix = 0; ix < m; ++ix) {
            const double x = SpatialField::node(ix, m), y = SpatialField::node(iy, m);
            h1.values[iy * m + ix] = 1.0 + 0.3 * std::cos(2 * kPi * x);
            h2.values[iy * m + ix] = 1.0 + 0.3 * std::sin(2 * kPi * (x + y));
        }
    const auto chk = loeper_check_2d(h1, h2, 0.5, 16);
    EXPECT_GT(chk.lhs, 0.0);
    EXPECT_LE(chk.lhs, chk.rhs + chk.tolerance);
}

}  // namespace
}  // namespace vlab
