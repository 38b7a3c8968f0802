#include "nwl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nwl/errors.hpp"

namespace nwl {

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
    if (n < 16) {
        throw validation_error("grid: n must be >= 16, got " + std::to_string(n));
    }
    if (n % 2 != 0) {
        throw validation_error("grid: n must be even, got " + std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw validation_error("grid: length must be positive and finite");
    }
    spacing_ = length_ / static_cast<double>(n_);
    const double dxi = 2.0 * std::numbers::pi / length_;
    xi_.resize(num_bins());
    for (std::size_t k = 0; k < xi_.size(); ++k) {
        xi_[k] = dxi * static_cast<double>(k);
    }
}

std::vector<double> Grid::wavenumbers() const {
    const double dxi = 2.0 * std::numbers::pi / length_;
    std::vector<double> out(n_);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n_ / 2);
    for (std::size_t i = 0; i < n_; ++i) {
        std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i);
        if (k >= half) k -= static_cast<std::ptrdiff_t>(n_);
        out[i] = dxi * static_cast<double>(k);
    }
    return out;
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = node(i);
    return out;
}

Grid make_grid(std::size_t n, double length) { return Grid(n, length); }

} // namespace nwl
