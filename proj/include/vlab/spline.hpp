#pragma once

#include <span>
#include <vector>

namespace vlab {

// Cubic B-spline interpolation on the integer nodes 0..n-1 of a uniform grid.
// Periodic wraps the data; Zero treats the data as vanishing outside the grid
// (coefficients c_{-1} = c_n = 0), which is the clamped-end choice for the
// velocity direction of phase space.
enum class SplineBoundary { Periodic, Zero };

class SplineSolver {
public:
    SplineSolver(int n, SplineBoundary boundary);

    int size() const { return n_; }
    SplineBoundary boundary() const { return boundary_; }

    // B-spline coefficients c with (c_{i-1} + 4 c_i + c_{i+1}) / 6 = values_i.
    void coefficients(std::span<const double> values, std::span<double> coeffs) const;

    // Evaluates the interpolant with coefficients c at index-space position s.
    double evaluate(std::span<const double> coeffs, double s) const;

    // out_i = S(i - shift): translation of the interpolant by `shift` cells.
    void shift(std::span<const double> in, std::span<double> out, double shift,
               std::vector<double>& scratch) const;

private:
    int n_;
    SplineBoundary boundary_;
    // Thomas factorization of the (possibly bordered) tridiagonal matrix.
    std::vector<double> cprime_;
    std::vector<double> denom_;
    // Sherman-Morrison correction for the periodic case.
    std::vector<double> z_;
    double gamma_ = 0.0;
    double vz_factor_ = 0.0;

    void thomas(std::span<const double> rhs, std::span<double> x) const;
};

}  // namespace vlab
