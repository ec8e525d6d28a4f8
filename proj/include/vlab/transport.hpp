#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlab/field.hpp"
#include "vlab/kernels.hpp"
#include "vlab/particles.hpp"
#include "vlab/vlasov.hpp"

namespace vlab {

// Cost metric on phase space. Positions either use the Euclidean distance of their
// representatives in the fundamental domain [-1/2, 1/2)^d or the geodesic distance on
// the torus; velocities are always Euclidean.
enum class Metric { EuclideanFundamental, TorusGeodesic };

std::string to_string(Metric m);
Metric parse_metric(const std::string& s);

// K atoms with `dim` coordinates each; the first `pos_dims` are torus positions.
struct WeightedPointCloud {
    int dim = 2;
    int pos_dims = 1;
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    const double* point(std::size_t i) const { return points.data() + i * static_cast<std::size_t>(dim); }
    double* point(std::size_t i) { return points.data() + i * static_cast<std::size_t>(dim); }
    void add(std::span<const double> p, double w);
    // Throws DomainError unless weights are nonnegative and sum to 1 within tol and points are finite.
    void validate(double tol = 1e-12) const;
};

WeightedPointCloud cloud_from_ensemble(const ParticleEnsemble& ens);
WeightedPointCloud cloud_1d(std::span<const double> points, std::span<const double> weights = {});

double phase_distance(const double* a, const double* b, int dim, int pos_dims, Metric metric);

struct TransportPlan {
    struct Entry {
        std::size_t i;
        std::size_t j;
        double mass;
    };
    std::vector<Entry> entries;
    std::size_t n_source = 0;
    std::size_t n_target = 0;
    double cost_p = 0.0;  // sum of mass * distance^p
    int p = 2;
    Metric metric = Metric::EuclideanFundamental;
};

struct TransportResult {
    double distance = 0.0;
    TransportPlan plan;
};

// Largest K * K' handled by the exact LP.
inline constexpr std::size_t kLpBudget = 4'000'000;

// Exact W_p via network simplex. Zero-weight atoms are dropped (their indices are
// kept in the plan). Throws SizeError above the LP budget.
TransportResult wasserstein_discrete(const WeightedPointCloud& mu, const WeightedPointCloud& nu, int p,
                                     Metric metric = Metric::EuclideanFundamental);
TransportResult w2_discrete(const WeightedPointCloud& mu, const WeightedPointCloud& nu,
                            Metric metric = Metric::EuclideanFundamental);

// Exact 1D W_p (p >= 1) by merging the piecewise-constant quantile functions.
double wp_1d(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
             std::span<const double> wb, int p);
// Exact W_1 between 1D clouds; the torus metric is rejected with MismatchError.
double w1_1d(const WeightedPointCloud& mu, const WeightedPointCloud& nu,
             Metric metric = Metric::EuclideanFundamental);

struct SlicedEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    int projections = 0;
};

// Mean over random unit directions of the 1D W_2 of the projected clouds. Positions
// are used as fundamental-domain coordinates.
SlicedEstimate sliced_w2(const WeightedPointCloud& mu, const WeightedPointCloud& nu, int n_projections,
                         std::uint64_t seed);

struct GridCloudOptions {
    int p = 1;
    int blocks_x = 32;           // aggregation target: blocks along x
    int blocks_v = 32;           // and along v
    bool bin_cloud = true;       // bin the cloud onto the same blocks when it is large
    std::size_t max_cloud_atoms = 2048;
    Metric metric = Metric::EuclideanFundamental;
    int fallback_projections = 256;
    std::uint64_t seed = 1;
};

struct GridCloudResult {
    double value = 0.0;
    double quantization_error = 0.0;  // bound on |value - W_p(grid density, cloud)|
    std::string method;               // "exact-lp" or "sliced"
    std::string warning;
};

// Quantizes a phase-space density to block centers (and optionally bins the cloud the
// same way) and solves the exact LP.
GridCloudResult grid_vs_cloud_w(const PhaseSpaceGrid& grid, const WeightedPointCloud& cloud,
                                const GridCloudOptions& options = {});

// Block quantization of a grid density; returns the cloud and its half block diagonal.
WeightedPointCloud quantize_grid(const PhaseSpaceGrid& grid, int blocks_x, int blocks_v, double* half_diagonal);
// Bins a 1D1V cloud onto the same blocks as quantize_grid on a grid with the given vmax.
WeightedPointCloud bin_cloud(const WeightedPointCloud& cloud, int blocks_x, int blocks_v, double vmax,
                             double* half_diagonal);

// D(t) = 1/2 sum_pairs w (lambda^2 |x - y|^2 + |v - w|^2) for paired atoms (same index).
double anisotropic_D(const WeightedPointCloud& a, const WeightedPointCloud& b, double lambda,
                     Metric metric = Metric::EuclideanFundamental);

struct TruncatedD {
    std::vector<double> values;
    bool weak_lambda = false;  // lambda^2 <= 2
};

TruncatedD truncate_D(const std::vector<double>& d_series, double lambda, double r, int d);

enum class MollifyMode { Quadrature, Stochastic };

struct MollifyOptions {
    MollifyMode mode = MollifyMode::Quadrature;
    int nodes_per_axis = 4;   // quadrature nodes per position axis
    int samples = 8;          // stochastic copies per atom
    std::uint64_t seed = 1;
    bool wrap = false;        // wrap shifted positions back onto the fundamental domain
    std::string profile = "bump";
};

// chi_r * mu acting on the positions.
WeightedPointCloud mollify_measure(const WeightedPointCloud& mu, double r, const MollifyOptions& options = {});

// (x, v) -> (x, v - R(x)) with R interpolated linearly from the grid.
WeightedPointCloud filter_measure(const WeightedPointCloud& mu, const SpatialField& R);
// Lipschitz constant of the piecewise-linear interpolant of R.
double interpolated_lipschitz(const SpatialField& R);

// (x, v) -> (x, v / R).
WeightedPointCloud scale_measure(const WeightedPointCloud& mu, double R);

struct LoeperCheck {
    double lhs = 0.0;        // ||grad(Psi_1 - Psi_2)||_L2
    double w2 = 0.0;         // W_2(h1, h2); in 2D of the block-quantized densities
    double sup_h = 0.0;
    double rhs = 0.0;        // eps^-2 sup_h^{1/2} W_2
    double tolerance = 0.0;  // allowance added to rhs (quantization error in 2D)
};

// h = 1 + sum_k (a_k cos 2 pi k x + b_k sin 2 pi k x), k = 1..K; W_2 on the circle from the
// quantile functions, minimized over rotations.
LoeperCheck loeper_check_1d(const std::vector<double>& a1, const std::vector<double>& b1,
                            const std::vector<double>& a2, const std::vector<double>& b2, double eps);
// Grid densities (mean 1) on T^2; torus W_2 from block quantization with its error allowance.
LoeperCheck loeper_check_2d(const SpatialField& h1, const SpatialField& h2, double eps, int blocks);

}  // namespace vlab
