#include "vlab/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace vlab {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void transform(std::vector<cplx>& data, int d, int m, int sign) {
    int dims[3] = {m, m, m};
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft(d, dims, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace

std::size_t grid_points(int d, int m) {
    std::size_t n = 1;
    for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(m);
    return n;
}

void wavevector(std::size_t idx, int d, int m, int* k) {
    for (int a = d - 1; a >= 0; --a) {
        k[a] = wavenumber(static_cast<int>(idx % static_cast<std::size_t>(m)), m);
        idx /= static_cast<std::size_t>(m);
    }
}

void fft_forward(std::vector<cplx>& data, int d, int m) { transform(data, d, m, FFTW_FORWARD); }

void fft_inverse(std::vector<cplx>& data, int d, int m) { transform(data, d, m, FFTW_BACKWARD); }

std::vector<cplx> fourier_coefficients(std::span<const double> values, int d, int m) {
    std::vector<cplx> out(values.begin(), values.end());
    fft_forward(out, d, m);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& c : out) c *= scale;
    return out;
}

std::size_t half_spectrum_size(int d, int m) {
    return grid_points(d - 1, m) * static_cast<std::size_t>(m / 2 + 1);
}

std::vector<cplx> fft_r2c(std::span<const double> values, int d, int m) {
    std::vector<cplx> out(half_spectrum_size(d, m));
    std::vector<double> in(values.begin(), values.end());
    int dims[3] = {m, m, m};
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c(d, dims, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                 FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
    return out;
}

void fft_c2r(std::vector<cplx>& spectrum, std::span<double> out, int d, int m) {
    int dims[3] = {m, m, m};
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_c2r(d, dims, reinterpret_cast<fftw_complex*>(spectrum.data()),
                                 out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

std::vector<double> synthesize_real(std::vector<cplx> coeffs, int d, int m) {
    fft_inverse(coeffs, d, m);
    std::vector<double> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = coeffs[i].real();
    return out;
}

}  // namespace vlab
