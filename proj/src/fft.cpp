#include "nwl/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "nwl/errors.hpp"

namespace nwl {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Fft::Fft(std::size_t n) : n_(n) {
    if (n < 2 || n % 2 != 0) {
        throw validation_error("fft: transform size must be even and >= 2");
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_buf_ = fftw_alloc_real(n_);
    complex_buf_ = fftw_alloc_complex(n_ / 2 + 1);
    plan_r2c_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_buf_,
                                     static_cast<fftw_complex*>(complex_buf_),
                                     FFTW_ESTIMATE);
    plan_c2r_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_),
                                     static_cast<fftw_complex*>(complex_buf_),
                                     real_buf_, FFTW_ESTIMATE);
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
    fftw_free(real_buf_);
    fftw_free(complex_buf_);
}

std::vector<std::complex<double>> Fft::forward(const std::vector<double>& values) {
    if (values.size() != n_) {
        throw validation_error("fft: input size does not match plan size");
    }
    std::memcpy(real_buf_, values.data(), n_ * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_r2c_));
    const std::size_t bins = n_ / 2 + 1;
    std::vector<std::complex<double>> out(bins);
    std::memcpy(out.data(), complex_buf_, bins * sizeof(fftw_complex));
    return out;
}

std::vector<double> Fft::inverse(const std::vector<std::complex<double>>& spectrum) {
    const std::size_t bins = n_ / 2 + 1;
    if (spectrum.size() != bins) {
        throw validation_error("fft: spectrum size does not match plan size");
    }
    // c2r destroys its input, so copy into the work buffer.
    std::memcpy(complex_buf_, spectrum.data(), bins * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(plan_c2r_));
    std::vector<double> out(n_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = real_buf_[i] * scale;
    return out;
}

Fft& fft_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<Fft>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<Fft>(n)).first;
    }
    return *it->second;
}

} // namespace nwl
