#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "nwl/grid.hpp"
#include "nwl/symbol.hpp"

namespace nwl {

using Spectrum = std::vector<std::complex<double>>;

// Real samples on a periodic grid. All spectral helpers below share one
// normalization: with F = forward(values) unnormalized, quadrature sums use
// the bin weights w_k = length/n^2 * (1 for k=0 and k=n/2, else 2), so that
// sum_k w_k |F_k|^2 equals the rectangle-rule L2 norm squared.
class GridFunction {
public:
    GridFunction(const Grid& grid, std::vector<double> values);

    static GridFunction zeros(const Grid& grid);
    static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);
    static GridFunction from_spectrum(const Grid& grid, const Spectrum& spectrum);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    Spectrum spectrum() const;

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

// Quadrature weight of r2c bin k for grid g (see class comment).
double bin_weight(const Grid& g, std::size_t bin);

GridFunction apply_multiplier(const GridFunction& f, const SymbolSpec& s);
GridFunction apply_multiplier(const GridFunction& f, const MultiplierTable& table);
Spectrum apply_multiplier(const Grid& g, const Spectrum& spec, const MultiplierTable& table);

// Spectral d/dx; the Nyquist mode of i*xi is zeroed to keep real data real.
GridFunction spectral_derivative(const GridFunction& f);

// Translate f by y (periodic, spectral phase shift; exact for band-limited data).
GridFunction spectral_shift(const GridFunction& f, double y);

double sobolev_norm(const GridFunction& f, double s);
double sobolev_norm(const Grid& g, const Spectrum& spec, double s);
double lp_norm(const GridFunction& f, double q);
double sup_norm(const GridFunction& f);

// Rectangle-rule inner product <f, g> on the box.
double inner_product(const GridFunction& f, const GridFunction& g);

// Fraction of the L2 mass outside the central half of the box, |x - L/2| > L/4.
double tail_mass(const GridFunction& f);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

} // namespace nwl
