#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vlab {

enum class FieldKind { Density, Potential, Force, Momentum, Corrector, Generic };

std::string to_string(FieldKind kind);

// Scalar or vector field sampled on the periodic grid of [-1/2, 1/2)^d with m
// nodes per axis; node i of an axis sits at -1/2 + i/m. Components are stored
// one after another, each in row-major order.
struct SpatialField {
    int d = 1;
    int m = 0;
    int components = 1;
    FieldKind kind = FieldKind::Generic;
    std::vector<double> values;

    SpatialField() = default;
    SpatialField(int d_, int m_, int components_, FieldKind kind_);

    std::size_t points() const;
    double spacing() const { return 1.0 / m; }
    std::span<double> component(int c);
    std::span<const double> component(int c) const;

    static double node(int i, int m) { return -0.5 + static_cast<double>(i) / m; }
};

// Mean of one component over the grid.
double mean(const SpatialField& f, int component = 0);
double max_abs(const SpatialField& f);

// Multilinear interpolation of component c at an arbitrary point (wrapped onto the torus).
double interpolate_linear(const SpatialField& f, int c, const double* x);

// Wraps a coordinate into [-1/2, 1/2).
double wrap_torus(double x);

}  // namespace vlab
