#include "vlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "vlab/error.hpp"
#include "vlab/network_simplex.hpp"
#include "vlab/random.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(Metric m) {
    return m == Metric::EuclideanFundamental ? "euclidean-fundamental" : "torus-geodesic";
}

Metric parse_metric(const std::string& s) {
    if (s == "euclidean-fundamental" || s == "euclidean") return Metric::EuclideanFundamental;
    if (s == "torus-geodesic" || s == "torus") return Metric::TorusGeodesic;
    throw DomainError("unknown metric '" + s + "'");
}

void WeightedPointCloud::add(std::span<const double> p, double w) {
    points.insert(points.end(), p.begin(), p.end());
    weights.push_back(w);
}

void WeightedPointCloud::validate(double tol) const {
    if (points.size() != weights.size() * static_cast<std::size_t>(dim))
        throw DomainError("point array does not match the number of weights");
    double s = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("negative or non-finite weight");
        s += w;
    }
    if (std::abs(s - 1.0) > tol) throw DomainError("weights sum to " + std::to_string(s) + ", not 1");
    for (double x : points)
        if (!std::isfinite(x)) throw DomainError("non-finite point coordinate");
}

WeightedPointCloud cloud_from_ensemble(const ParticleEnsemble& ens) {
    WeightedPointCloud c;
    c.dim = 2 * ens.d;
    c.pos_dims = ens.d;
    c.points.resize(ens.n * static_cast<std::size_t>(c.dim));
    c.weights.assign(ens.n, 1.0 / static_cast<double>(ens.n));
    for (std::size_t i = 0; i < ens.n; ++i) {
        double* p = c.point(i);
        for (int a = 0; a < ens.d; ++a) {
            p[a] = ens.pos(i)[a];
            p[ens.d + a] = ens.vel(i)[a];
        }
    }
    return c;
}

WeightedPointCloud cloud_1d(std::span<const double> pts, std::span<const double> weights) {
    WeightedPointCloud c;
    c.dim = 1;
    c.pos_dims = 1;
    c.points.assign(pts.begin(), pts.end());
    if (weights.empty())
        c.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
    else
        c.weights.assign(weights.begin(), weights.end());
    return c;
}

double phase_distance(const double* a, const double* b, int dim, int pos_dims, Metric metric) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        double diff = a[k] - b[k];
        if (k < pos_dims && metric == Metric::TorusGeodesic) diff = std::abs(wrap_torus(diff));
        s += diff * diff;
    }
    return std::sqrt(s);
}

TransportResult wasserstein_discrete(const WeightedPointCloud& mu, const WeightedPointCloud& nu, int p,
                                     Metric metric) {
    if (mu.dim != nu.dim || mu.pos_dims != nu.pos_dims) throw MismatchError("clouds live in different spaces");
    if (p < 1) throw DomainError("W_p needs p >= 1");
    mu.validate(1e-9);
    nu.validate(1e-9);
    std::vector<std::size_t> ia, ib;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weights[i] > 0.0) ia.push_back(i);
    for (std::size_t j = 0; j < nu.size(); ++j)
        if (nu.weights[j] > 0.0) ib.push_back(j);
    if (ia.size() * ib.size() > kLpBudget)
        throw SizeError("exact transport of " + std::to_string(ia.size()) + " x " + std::to_string(ib.size()) +
                        " atoms exceeds the LP budget; use sliced_w2 or binning");
    std::vector<double> a(ia.size()), b(ib.size()), cost(ia.size() * ib.size());
    for (std::size_t i = 0; i < ia.size(); ++i) a[i] = mu.weights[ia[i]];
    for (std::size_t j = 0; j < ib.size(); ++j) b[j] = nu.weights[ib[j]];
    for (std::size_t i = 0; i < ia.size(); ++i)
        for (std::size_t j = 0; j < ib.size(); ++j) {
            const double dist = phase_distance(mu.point(ia[i]), nu.point(ib[j]), mu.dim, mu.pos_dims, metric);
            cost[i * ib.size() + j] = p == 1 ? dist : (p == 2 ? dist * dist : std::pow(dist, p));
        }
    const auto sol = solve_transport(a, b, cost);
    TransportResult res;
    res.plan.n_source = mu.size();
    res.plan.n_target = nu.size();
    res.plan.p = p;
    res.plan.metric = metric;
    res.plan.cost_p = std::max(0.0, sol.cost);
    for (const auto& f : sol.flows) res.plan.entries.push_back({ia[f.i], ib[f.j], f.mass});
    res.distance = std::pow(res.plan.cost_p, 1.0 / p);
    return res;
}

TransportResult w2_discrete(const WeightedPointCloud& mu, const WeightedPointCloud& nu, Metric metric) {
    return wasserstein_discrete(mu, nu, 2, metric);
}

double wp_1d(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
             std::span<const double> wb, int p) {
    if (xa.size() != wa.size() || xb.size() != wb.size()) throw MismatchError("points and weights differ in length");
    if (xa.empty() || xb.empty()) throw DomainError("empty measure");
    auto sorted = [](std::span<const double> x) {
        std::vector<std::size_t> idx(x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
        return idx;
    };
    const auto oa = sorted(xa);
    const auto ob = sorted(xb);
    const double sa = std::accumulate(wa.begin(), wa.end(), 0.0);
    const double sb = std::accumulate(wb.begin(), wb.end(), 0.0);
    std::size_t i = 0, j = 0;
    double ra = wa[oa[0]] / sa, rb = wb[ob[0]] / sb;
    double acc = 0.0;
    while (i < oa.size() && j < ob.size()) {
        const double step = std::min(ra, rb);
        const double gap = std::abs(xa[oa[i]] - xb[ob[j]]);
        acc += step * (p == 1 ? gap : std::pow(gap, p));
        if (ra < rb) {
            rb -= ra;
            if (++i < oa.size()) ra = wa[oa[i]] / sa;
        } else if (rb < ra) {
            ra -= rb;
            if (++j < ob.size()) rb = wb[ob[j]] / sb;
        } else {
            if (++i < oa.size()) ra = wa[oa[i]] / sa;
            if (++j < ob.size()) rb = wb[ob[j]] / sb;
        }
    }
    return std::pow(std::max(acc, 0.0), 1.0 / p);
}

double w1_1d(const WeightedPointCloud& mu, const WeightedPointCloud& nu, Metric metric) {
    if (metric != Metric::EuclideanFundamental)
        throw MismatchError("w1_1d computes the fundamental-domain Euclidean distance only");
    if (mu.dim != 1 || nu.dim != 1) throw MismatchError("w1_1d needs one-dimensional clouds");
    return wp_1d(mu.points, mu.weights, nu.points, nu.weights, 1);
}

SlicedEstimate sliced_w2(const WeightedPointCloud& mu, const WeightedPointCloud& nu, int n_projections,
                         std::uint64_t seed) {
    if (n_projections < 16) throw DomainError("sliced_w2 needs at least 16 projections");
    if (mu.dim != nu.dim) throw MismatchError("clouds live in different spaces");
    Rng rng(seed);
    const int dim = mu.dim;
    std::vector<double> theta(static_cast<std::size_t>(dim));
    std::vector<double> pa(mu.size()), pb(nu.size());
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n_projections; ++k) {
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& t : theta) {
                t = rng.normal();
                norm += t * t;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& t : theta) t /= norm;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            double s = 0.0;
            for (int c = 0; c < dim; ++c) s += theta[c] * mu.point(i)[c];
            pa[i] = s;
        }
        for (std::size_t i = 0; i < nu.size(); ++i) {
            double s = 0.0;
            for (int c = 0; c < dim; ++c) s += theta[c] * nu.point(i)[c];
            pb[i] = s;
        }
        const double w = wp_1d(pa, mu.weights, pb, nu.weights, 2);
        sum += w;
        sum2 += w * w;
    }
    SlicedEstimate est;
    est.projections = n_projections;
    est.value = sum / n_projections;
    const double var = std::max(0.0, sum2 / n_projections - est.value * est.value);
    est.stderr_ = std::sqrt(var * n_projections / (n_projections - 1.0) / n_projections);
    return est;
}

namespace {

int block_of(double value, double lo, double width, int count) {
    int b = static_cast<int>(std::floor((value - lo) / width));
    return std::clamp(b, 0, count - 1);
}

}  // namespace

WeightedPointCloud quantize_grid(const PhaseSpaceGrid& grid, int blocks_x, int blocks_v, double* half_diagonal) {
    const double wx = 1.0 / blocks_x;
    const double wv = 2.0 * grid.vmax / blocks_v;
    std::vector<double> mass(static_cast<std::size_t>(blocks_x) * blocks_v, 0.0);
    double moved = 0.0;
    for (int i = 0; i < grid.mx; ++i) {
        const int bx = block_of(grid.x(i), -0.5, wx, blocks_x);
        for (int j = 0; j < grid.mv; ++j) {
            const double m = grid.at(i, j) * grid.dx() * grid.dv();
            if (m <= 0.0) continue;
            const int bv = block_of(grid.v(j), -grid.vmax, wv, blocks_v);
            mass[static_cast<std::size_t>(bx) * blocks_v + bv] += m;
            const double cx = -0.5 + (bx + 0.5) * wx, cv = -grid.vmax + (bv + 0.5) * wv;
            moved = std::max(moved, std::hypot(grid.x(i) - cx, grid.v(j) - cv));
        }
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    WeightedPointCloud c;
    c.dim = 2;
    c.pos_dims = 1;
    for (int bx = 0; bx < blocks_x; ++bx)
        for (int bv = 0; bv < blocks_v; ++bv) {
            const double m = mass[static_cast<std::size_t>(bx) * blocks_v + bv];
            if (m <= 0.0) continue;
            const double pt[2] = {-0.5 + (bx + 0.5) * wx, -grid.vmax + (bv + 0.5) * wv};
            c.add(pt, m / total);
        }
    if (half_diagonal) *half_diagonal = moved;
    return c;
}

WeightedPointCloud bin_cloud(const WeightedPointCloud& cloud, int blocks_x, int blocks_v, double vmax,
                             double* half_diagonal) {
    if (cloud.dim != 2) throw MismatchError("bin_cloud expects a 1D1V cloud");
    const double wx = 1.0 / blocks_x;
    const double wv = 2.0 * vmax / blocks_v;
    std::vector<double> mass(static_cast<std::size_t>(blocks_x) * blocks_v, 0.0);
    double moved = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double* p = cloud.point(i);
        const int bx = block_of(p[0], -0.5, wx, blocks_x);
        const int bv = block_of(p[1], -vmax, wv, blocks_v);
        mass[static_cast<std::size_t>(bx) * blocks_v + bv] += cloud.weights[i];
        const double cx = -0.5 + (bx + 0.5) * wx, cv = -vmax + (bv + 0.5) * wv;
        moved = std::max(moved, std::hypot(p[0] - cx, p[1] - cv));
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    WeightedPointCloud c;
    c.dim = 2;
    c.pos_dims = 1;
    for (int bx = 0; bx < blocks_x; ++bx)
        for (int bv = 0; bv < blocks_v; ++bv) {
            const double m = mass[static_cast<std::size_t>(bx) * blocks_v + bv];
            if (m <= 0.0) continue;
            const double pt[2] = {-0.5 + (bx + 0.5) * wx, -vmax + (bv + 0.5) * wv};
            c.add(pt, m / total);
        }
    if (half_diagonal) *half_diagonal = moved;
    return c;
}

GridCloudResult grid_vs_cloud_w(const PhaseSpaceGrid& grid, const WeightedPointCloud& cloud,
                                const GridCloudOptions& options) {
    if (cloud.dim != 2) throw MismatchError("grid_vs_cloud_w expects a 1D1V cloud");
    GridCloudResult res;
    double hd_grid = 0.0, hd_cloud = 0.0;
    const auto q = quantize_grid(grid, options.blocks_x, options.blocks_v, &hd_grid);
    WeightedPointCloud target = cloud;
    if (options.bin_cloud && cloud.size() > options.max_cloud_atoms)
        target = bin_cloud(cloud, options.blocks_x, options.blocks_v, grid.vmax, &hd_cloud);
    res.quantization_error = hd_grid + hd_cloud;
    if (q.size() * target.size() <= kLpBudget) {
        res.value = wasserstein_discrete(q, target, options.p, options.metric).distance;
        res.method = "exact-lp";
        return res;
    }
    res.warning = "problem of " + std::to_string(q.size()) + " x " + std::to_string(target.size()) +
                  " atoms exceeds the LP budget; sliced W2 surrogate reported";
    res.value = sliced_w2(q, target, options.fallback_projections, options.seed).value;
    res.method = "sliced";
    return res;
}

double anisotropic_D(const WeightedPointCloud& a, const WeightedPointCloud& b, double lambda, Metric metric) {
    if (a.size() != b.size() || a.dim != b.dim) throw MismatchError("paired clouds must have equal size");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double* p = a.point(i);
        const double* q = b.point(i);
        double dx2 = 0.0, dv2 = 0.0;
        for (int k = 0; k < a.dim; ++k) {
            double diff = p[k] - q[k];
            if (k < a.pos_dims) {
                if (metric == Metric::TorusGeodesic) diff = wrap_torus(diff);
                dx2 += diff * diff;
            } else {
                dv2 += diff * diff;
            }
        }
        s += a.weights[i] * (lambda * lambda * dx2 + dv2);
    }
    return 0.5 * s;
}

TruncatedD truncate_D(const std::vector<double>& d_series, double lambda, double r, int d) {
    TruncatedD out;
    out.weak_lambda = lambda * lambda <= 2.0;
    const double level = 1.0 / (lambda * lambda * std::pow(r, d + 2));
    double sup = 0.0;
    for (double v : d_series) {
        sup = std::max(sup, v);
        out.values.push_back(std::min(1.0, level * sup));
    }
    return out;
}

WeightedPointCloud mollify_measure(const WeightedPointCloud& mu, double r, const MollifyOptions& options) {
    if (!(r > 0.0) || r >= 0.25) throw DomainError("mollification radius must satisfy 0 < r < 1/4");
    const int pd = mu.pos_dims;
    WeightedPointCloud out;
    out.dim = mu.dim;
    out.pos_dims = pd;
    std::vector<double> pt(static_cast<std::size_t>(mu.dim));
    if (options.mode == MollifyMode::Quadrature) {
        const int n = options.nodes_per_axis;
        std::vector<std::vector<double>> nodes;
        std::vector<double> wts;
        std::vector<int> counter(static_cast<std::size_t>(pd), 0);
        double total = 0.0;
        while (true) {
            std::vector<double> y(static_cast<std::size_t>(pd));
            double r2 = 0.0;
            for (int a = 0; a < pd; ++a) {
                y[a] = -1.0 + (2.0 * counter[a] + 1.0) / n;
                r2 += y[a] * y[a];
            }
            const double w = mollifier_profile(options.profile, std::sqrt(r2));
            if (w > 0.0) {
                nodes.push_back(y);
                wts.push_back(w);
                total += w;
            }
            int a = pd - 1;
            while (a >= 0 && counter[a] == n - 1) counter[a--] = 0;
            if (a < 0) break;
            ++counter[a];
        }
        for (std::size_t i = 0; i < mu.size(); ++i) {
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                for (int c = 0; c < mu.dim; ++c) pt[c] = mu.point(i)[c];
                for (int a = 0; a < pd; ++a) {
                    pt[a] += r * nodes[q][a];
                    if (options.wrap) pt[a] = wrap_torus(pt[a]);
                }
                out.add(pt, mu.weights[i] * wts[q] / total);
            }
        }
        return out;
    }
    Rng rng(options.seed);
    const double peak = mollifier_profile(options.profile, 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (int s = 0; s < options.samples; ++s) {
            for (int c = 0; c < mu.dim; ++c) pt[c] = mu.point(i)[c];
            std::vector<double> y(static_cast<std::size_t>(pd));
            while (true) {
                double r2 = 0.0;
                for (auto& c : y) {
                    c = rng.uniform(-1.0, 1.0);
                    r2 += c * c;
                }
                if (r2 < 1.0 && rng.uniform() * peak <= mollifier_profile(options.profile, std::sqrt(r2))) break;
            }
            for (int a = 0; a < pd; ++a) {
                pt[a] += r * y[a];
                if (options.wrap) pt[a] = wrap_torus(pt[a]);
            }
            out.add(pt, mu.weights[i] / options.samples);
        }
    }
    return out;
}

WeightedPointCloud filter_measure(const WeightedPointCloud& mu, const SpatialField& R) {
    const int pd = mu.pos_dims;
    if (R.d != pd || R.components != mu.dim - pd)
        throw MismatchError("filter field does not match the phase-space dimension");
    WeightedPointCloud out = mu;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double* p = out.point(i);
        for (int a = 0; a < R.components; ++a) p[pd + a] -= interpolate_linear(R, a, p);
    }
    return out;
}

double interpolated_lipschitz(const SpatialField& R) {
    const int m = R.m;
    const std::size_t n = R.points();
    std::size_t stride[3] = {1, 1, 1};
    for (int a = R.d - 2; a >= 0; --a) stride[a] = stride[a + 1] * static_cast<std::size_t>(m);
    double total = 0.0;
    for (int c = 0; c < R.components; ++c) {
        const auto data = R.component(c);
        for (int b = 0; b < R.d; ++b) {
            double best = 0.0;
            for (std::size_t idx = 0; idx < n; ++idx) {
                const std::size_t coord = (idx / stride[b]) % static_cast<std::size_t>(m);
                const std::size_t up =
                    coord + 1 == static_cast<std::size_t>(m) ? idx - coord * stride[b] : idx + stride[b];
                best = std::max(best, std::abs(data[up] - data[idx]) * m);
            }
            total += best * best;
        }
    }
    return std::sqrt(total);
}

WeightedPointCloud scale_measure(const WeightedPointCloud& mu, double R) {
    if (!(R > 0.0)) throw DomainError("velocity scale must be positive");
    WeightedPointCloud out = mu;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int c = out.pos_dims; c < out.dim; ++c) out.point(i)[c] /= R;
    return out;
}

namespace {

struct TrigDensity {
    const std::vector<double>& a;
    const std::vector<double>& b;

    double value(double x) const {
        double s = 1.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(2.0 * kPi * (k + 1) * x);
        for (std::size_t k = 0; k < b.size(); ++k) s += b[k] * std::sin(2.0 * kPi * (k + 1) * x);
        return s;
    }
    // integral from -1/2 to x
    double cdf(double x) const {
        double s = x + 0.5;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double w = 2.0 * kPi * (k + 1);
            s += a[k] * std::sin(w * x) / w;
        }
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double w = 2.0 * kPi * (k + 1);
            s -= b[k] * (std::cos(w * x) - std::cos(-0.5 * w)) / w;
        }
        return s;
    }
    double quantile(double s) const {
        double lo = -0.5, hi = 0.5;
        double x = s - 0.5;
        for (int it = 0; it < 100; ++it) {
            const double f = cdf(x) - s;
            if (std::abs(f) < 1e-15) break;
            if (f > 0.0)
                hi = x;
            else
                lo = x;
            const double h = value(x);
            double nx = h > 0.0 ? x - f / h : 0.5 * (lo + hi);
            if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
            if (std::abs(nx - x) < 1e-16) {
                x = nx;
                break;
            }
            x = nx;
        }
        return x;
    }
    double sup() const {
        double best = 0.0;
        for (int i = 0; i < 8192; ++i) best = std::max(best, value(-0.5 + i / 8192.0));
        return best;
    }
};

}  // namespace

LoeperCheck loeper_check_1d(const std::vector<double>& a1, const std::vector<double>& b1,
                            const std::vector<double>& a2, const std::vector<double>& b2, double eps) {
    const TrigDensity h1{a1, b1}, h2{a2, b2};
    LoeperCheck out;
    const std::size_t K = std::max({a1.size(), b1.size(), a2.size(), b2.size()});
    double lhs2 = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double da = (k < a1.size() ? a1[k] : 0.0) - (k < a2.size() ? a2[k] : 0.0);
        const double db = (k < b1.size() ? b1[k] : 0.0) - (k < b2.size() ? b2[k] : 0.0);
        const double kk = static_cast<double>(k + 1);
        lhs2 += (da * da + db * db) / (8.0 * kPi * kPi * kk * kk);
    }
    out.lhs = std::sqrt(lhs2) / (eps * eps);
    // circle W2: minimize over the rotation of the lifted quantile function
    const int panels = 64;
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> nodes, weights, q1;
    for (int p = 0; p < panels; ++p) {
        const double lo = static_cast<double>(p) / panels, half = 0.5 / panels;
        for (std::size_t k = 0; k < Gauss::abscissa().size(); ++k) {
            const double x = Gauss::abscissa()[k], w = Gauss::weights()[k] * half;
            for (double sgn : {1.0, -1.0}) {
                if (k == 0 && sgn < 0.0 && x == 0.0) continue;
                nodes.push_back(lo + half + sgn * x * half);
                weights.push_back(w);
                q1.push_back(h1.quantile(nodes.back()));
            }
        }
    }
    auto cost = [&](double theta) {
        double acc = 0.0;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            const double u = nodes[n] + theta;
            const double fl = std::floor(u);
            const double d = q1[n] - (h2.quantile(u - fl) + fl);
            acc += weights[n] * d * d;
        }
        return acc;
    };
    double best_theta = 0.0, best = cost(0.0);
    for (int i = -5; i <= 5; ++i) {
        const double th = i / 10.0;
        const double c = cost(th);
        if (c < best) {
            best = c;
            best_theta = th;
        }
    }
    std::uintmax_t iters = 60;
    const auto mn = boost::math::tools::brent_find_minima(cost, best_theta - 0.1, best_theta + 0.1, 40, iters);
    const double w2sq = std::min(best, mn.second);
    out.w2 = std::sqrt(std::max(0.0, w2sq));
    out.sup_h = std::max(h1.sup(), h2.sup());
    out.rhs = std::sqrt(out.sup_h) * out.w2 / (eps * eps);
    out.tolerance = 1e-10 * std::max(1.0, out.rhs);
    return out;
}

namespace {

cplx interval_integral(int k, double u0, double u1) {
    if (k == 0) return {u1 - u0, 0.0};
    const double w = 2.0 * kPi * k;
    return (std::exp(cplx(0.0, w * u1)) - std::exp(cplx(0.0, w * u0))) / cplx(0.0, w);
}

WeightedPointCloud quantize_density_2d(const SpatialField& h, int blocks, double* half_diagonal) {
    const int m = h.m;
    const auto hat = fourier_coefficients(h.component(0), 2, m);
    const double w = 1.0 / blocks;
    std::vector<std::vector<cplx>> ints(static_cast<std::size_t>(blocks), std::vector<cplx>(static_cast<std::size_t>(m)));
    for (int b = 0; b < blocks; ++b)
        for (int i = 0; i < m; ++i) ints[b][i] = interval_integral(wavenumber(i, m), b * w, (b + 1) * w);
    WeightedPointCloud c;
    c.dim = 2;
    c.pos_dims = 2;
    std::vector<double> mass;
    for (int b0 = 0; b0 < blocks; ++b0)
        for (int b1 = 0; b1 < blocks; ++b1) {
            cplx s(0.0, 0.0);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) s += hat[static_cast<std::size_t>(i) * m + j] * ints[b0][i] * ints[b1][j];
            mass.push_back(std::max(0.0, s.real()));
        }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    std::size_t k = 0;
    for (int b0 = 0; b0 < blocks; ++b0)
        for (int b1 = 0; b1 < blocks; ++b1) {
            const double pt[2] = {-0.5 + (b0 + 0.5) * w, -0.5 + (b1 + 0.5) * w};
            c.add(pt, mass[k++] / total);
        }
    *half_diagonal = std::sqrt(2.0) * 0.5 * w;
    return c;
}

}  // namespace

LoeperCheck loeper_check_2d(const SpatialField& h1, const SpatialField& h2, double eps, int blocks) {
    if (h1.d != 2 || h2.d != 2 || h1.m != h2.m) throw MismatchError("loeper_check_2d needs matching 2D grids");
    LoeperCheck out;
    SpatialField diff = h1;
    for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= h2.values[i];
    const auto e = spectral_force_field(diff, eps);
    double s = 0.0;
    for (double v : e.values) s += v * v;
    out.lhs = std::sqrt(s / static_cast<double>(e.points()));
    double hd1 = 0.0, hd2 = 0.0;
    const auto q1 = quantize_density_2d(h1, blocks, &hd1);
    const auto q2 = quantize_density_2d(h2, blocks, &hd2);
    out.w2 = w2_discrete(q1, q2, Metric::TorusGeodesic).distance;
    out.sup_h = std::max(max_abs(h1), max_abs(h2));
    out.rhs = std::sqrt(out.sup_h) * out.w2 / (eps * eps);
    out.tolerance = std::sqrt(out.sup_h) * (hd1 + hd2) / (eps * eps);
    return out;
}

}  // namespace vlab
