#include "vlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "vlab/fft.hpp"

namespace vlab {

std::string to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::Density: return "density";
        case FieldKind::Potential: return "potential";
        case FieldKind::Force: return "force";
        case FieldKind::Momentum: return "momentum";
        case FieldKind::Corrector: return "corrector";
        case FieldKind::Generic: break;
    }
    return "generic";
}

SpatialField::SpatialField(int d_, int m_, int components_, FieldKind kind_)
    : d(d_), m(m_), components(components_), kind(kind_),
      values(grid_points(d_, m_) * static_cast<std::size_t>(components_), 0.0) {}

std::size_t SpatialField::points() const { return grid_points(d, m); }

std::span<double> SpatialField::component(int c) {
    return std::span<double>(values).subspan(static_cast<std::size_t>(c) * points(), points());
}

std::span<const double> SpatialField::component(int c) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(c) * points(), points());
}

double mean(const SpatialField& f, int component) {
    const auto c = f.component(component);
    double s = 0.0;
    for (double v : c) s += v;
    return s / static_cast<double>(c.size());
}

double max_abs(const SpatialField& f) {
    double best = 0.0;
    for (double v : f.values) best = std::max(best, std::abs(v));
    return best;
}

double wrap_torus(double x) {
    double y = x - std::floor(x + 0.5);
    if (y >= 0.5) y -= 1.0;
    if (y < -0.5) y += 1.0;
    return y;
}

double interpolate_linear(const SpatialField& f, int c, const double* x) {
    const auto data = f.component(c);
    const int m = f.m;
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < f.d; ++a) {
        const double s = (wrap_torus(x[a]) + 0.5) * m;
        const double fl = std::floor(s);
        base[a] = static_cast<int>(fl) % m;
        frac[a] = s - fl;
    }
    double acc = 0.0;
    const int corners = 1 << f.d;
    for (int corner = 0; corner < corners; ++corner) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < f.d; ++a) {
            const int bit = (corner >> a) & 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
            idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>((base[a] + bit) % m);
        }
        acc += w * data[idx];
    }
    return acc;
}

}  // namespace vlab
