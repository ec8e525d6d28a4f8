#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vlab {

using cplx = std::complex<double>;

// Thin FFTW wrapper for complex transforms on d-dimensional periodic boxes with
// m points per axis, row-major layout. Forward uses e^{-2 pi i k x}; the inverse
// is unnormalized, so inverse(forward(a)) = m^d * a.
void fft_forward(std::vector<cplx>& data, int d, int m);
void fft_inverse(std::vector<cplx>& data, int d, int m);

// Real field -> its Fourier coefficients normalized by the number of points,
// i.e. hat[k] = (1/m^d) sum_x a(x) e^{-2 pi i k x}.
std::vector<cplx> fourier_coefficients(std::span<const double> values, int d, int m);

// Sum of hat[k] e^{2 pi i k x} on the grid, real part returned.
std::vector<double> synthesize_real(std::vector<cplx> coeffs, int d, int m);

// Signed wavenumber of FFT index i on an axis with m points.
inline int wavenumber(int i, int m) { return i <= m / 2 ? i : i - m; }

// Fills k (length d) with the signed wavenumbers of flat index idx.
void wavevector(std::size_t idx, int d, int m, int* k);

std::size_t grid_points(int d, int m);

// Real-to-complex transform keeping the last axis halved (m/2 + 1 entries),
// for fields too large to hold in full complex form. Layout follows FFTW.
std::size_t half_spectrum_size(int d, int m);
std::vector<cplx> fft_r2c(std::span<const double> values, int d, int m);
// Consumes `spectrum` (FFTW destroys the input); unnormalized.
void fft_c2r(std::vector<cplx>& spectrum, std::span<double> out, int d, int m);

}  // namespace vlab
