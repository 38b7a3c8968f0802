#pragma once

#include <cstddef>
#include <vector>

namespace nwl {

// Uniform periodic grid on [0, length). Wavenumbers follow the usual DFT
// layout: bin k of the real-to-complex spectrum carries xi_k = 2*pi*k/length
// for k = 0..n/2; the signed list covers k in {-n/2, ..., n/2-1}.
class Grid {
public:
    Grid(std::size_t n, double length);

    std::size_t n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return spacing_; }
    std::size_t num_bins() const { return n_ / 2 + 1; }

    // xi for r2c bin k, k in [0, n/2]. Bin n/2 is the Nyquist mode.
    double xi(std::size_t bin) const { return xi_[bin]; }
    const std::vector<double>& xi_bins() const { return xi_; }

    // Signed wavenumbers in DFT order: 0, 1, ..., n/2-1, -n/2, ..., -1
    // (scaled by 2*pi/length).
    std::vector<double> wavenumbers() const;

    double node(std::size_t i) const { return spacing_ * static_cast<double>(i); }
    std::vector<double> nodes() const;
    double midpoint() const { return length_ / 2.0; }

    bool operator==(const Grid& other) const {
        return n_ == other.n_ && length_ == other.length_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    std::size_t n_;
    double length_;
    double spacing_;
    std::vector<double> xi_;
};

Grid make_grid(std::size_t n, double length);

} // namespace nwl
