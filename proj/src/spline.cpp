#include "vlab/spline.hpp"

#include <cmath>

#include "vlab/error.hpp"

namespace vlab {

namespace {
constexpr double kOff = 1.0 / 6.0;
constexpr double kDiag = 4.0 / 6.0;
}  // namespace

SplineSolver::SplineSolver(int n, SplineBoundary boundary) : n_(n), boundary_(boundary) {
    if (n < 3) throw DomainError("spline grid needs at least 3 nodes");
    cprime_.resize(n);
    denom_.resize(n);
    // Periodic: A = T' + u v^T with T' tridiagonal, u = (gamma,0..,0,c), v = (1,0..,0,a/gamma).
    double first_diag = kDiag;
    double last_diag = kDiag;
    if (boundary_ == SplineBoundary::Periodic) {
        gamma_ = -kDiag;
        first_diag = kDiag - gamma_;
        last_diag = kDiag - kOff * kOff / gamma_;
    }
    for (int i = 0; i < n; ++i) {
        const double b = i == 0 ? first_diag : (i == n - 1 ? last_diag : kDiag);
        const double prev = i == 0 ? 0.0 : cprime_[i - 1];
        denom_[i] = b - kOff * prev;
        cprime_[i] = kOff / denom_[i];
    }
    if (boundary_ == SplineBoundary::Periodic) {
        std::vector<double> u(n, 0.0);
        u[0] = gamma_;
        u[n - 1] = kOff;
        z_.resize(n);
        thomas(u, z_);
        vz_factor_ = 1.0 + z_[0] + kOff * z_[n - 1] / gamma_;
    }
}

void SplineSolver::thomas(std::span<const double> rhs, std::span<double> x) const {
    const int n = n_;
    x[0] = rhs[0] / denom_[0];
    for (int i = 1; i < n; ++i) x[i] = (rhs[i] - kOff * x[i - 1]) / denom_[i];
    for (int i = n - 2; i >= 0; --i) x[i] -= cprime_[i] * x[i + 1];
}

void SplineSolver::coefficients(std::span<const double> values, std::span<double> coeffs) const {
    thomas(values, coeffs);
    if (boundary_ == SplineBoundary::Periodic) {
        const double vy = coeffs[0] + kOff * coeffs[n_ - 1] / gamma_;
        const double factor = vy / vz_factor_;
        for (int i = 0; i < n_; ++i) coeffs[i] -= factor * z_[i];
    }
}

double SplineSolver::evaluate(std::span<const double> coeffs, double s) const {
    const double fl = std::floor(s);
    const double u = s - fl;
    const long j0 = static_cast<long>(fl);
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double w[4] = {(1.0 - u) * (1.0 - u) * (1.0 - u) / 6.0, (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0,
                         (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0, u3 / 6.0};
    double acc = 0.0;
    for (int t = 0; t < 4; ++t) {
        long j = j0 - 1 + t;
        if (boundary_ == SplineBoundary::Periodic) {
            j %= n_;
            if (j < 0) j += n_;
        } else if (j < 0 || j >= n_) {
            continue;
        }
        acc += w[t] * coeffs[static_cast<std::size_t>(j)];
    }
    return acc;
}

void SplineSolver::shift(std::span<const double> in, std::span<double> out, double shift,
                         std::vector<double>& scratch) const {
    scratch.resize(n_);
    coefficients(in, scratch);
    for (int i = 0; i < n_; ++i) out[i] = evaluate(scratch, static_cast<double>(i) - shift);
}

}  // namespace vlab
