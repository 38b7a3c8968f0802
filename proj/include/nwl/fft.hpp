#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nwl {

// Real <-> half-complex FFT for one transform size, backed by FFTW.
// Forward is the unnormalized DFT F_k = sum_j f_j exp(-2*pi*i*j*k/n);
// inverse divides by n so inverse(forward(f)) == f.
//
// Plans are created with FFTW_ESTIMATE (deterministic plan choice) under a
// global planner lock; execution on a given Fft instance is not re-entrant,
// use fft_for(n) to get a thread-local instance.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }

    std::vector<std::complex<double>> forward(const std::vector<double>& values);
    std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum);

private:
    std::size_t n_;
    double* real_buf_;
    void* complex_buf_; // fftw_complex*
    void* plan_r2c_;
    void* plan_c2r_;
};

// Thread-local plan cache keyed by transform size.
Fft& fft_for(std::size_t n);

} // namespace nwl
