#include "nwl/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "nwl/errors.hpp"
#include "nwl/fft.hpp"

namespace nwl {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) {
        throw validation_error(std::string(where) + ": grid mismatch");
    }
}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n()) {
        throw validation_error("grid function: value count does not match grid");
    }
}

GridFunction GridFunction::zeros(const Grid& grid) {
    return GridFunction(grid, std::vector<double>(grid.n(), 0.0));
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i) v[i] = f(grid.node(i));
    return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::from_spectrum(const Grid& grid, const Spectrum& spectrum) {
    return GridFunction(grid, fft_for(grid.n()).inverse(spectrum));
}

Spectrum GridFunction::spectrum() const { return fft_for(grid_.n()).forward(values_); }

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

double bin_weight(const Grid& g, std::size_t bin) {
    const double base = g.length() / (static_cast<double>(g.n()) * static_cast<double>(g.n()));
    const bool single = (bin == 0 || bin == g.n() / 2);
    return single ? base : 2.0 * base;
}

Spectrum apply_multiplier(const Grid& g, const Spectrum& spec, const MultiplierTable& table) {
    require_same_grid(g, table.grid(), "apply_multiplier");
    Spectrum out(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) out[k] = spec[k] * table[k];
    return out;
}

GridFunction apply_multiplier(const GridFunction& f, const MultiplierTable& table) {
    require_same_grid(f.grid(), table.grid(), "apply_multiplier");
    Spectrum spec = f.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= table[k];
    return GridFunction::from_spectrum(f.grid(), spec);
}

GridFunction apply_multiplier(const GridFunction& f, const SymbolSpec& s) {
    return apply_multiplier(f, tabulate(s, f.grid()));
}

GridFunction spectral_derivative(const GridFunction& f) {
    Spectrum spec = f.spectrum();
    const Grid& g = f.grid();
    const std::size_t nyq = g.n() / 2;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double xi = (k == nyq) ? 0.0 : g.xi(k);
        spec[k] *= std::complex<double>(0.0, xi);
    }
    return GridFunction::from_spectrum(g, spec);
}

GridFunction spectral_shift(const GridFunction& f, double y) {
    Spectrum spec = f.spectrum();
    const Grid& g = f.grid();
    const std::size_t nyq = g.n() / 2;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double phase = -g.xi(k) * y;
        if (k == nyq) {
            // keep the shifted data real: the Nyquist mode picks up cos only
            spec[k] *= std::cos(phase);
        } else {
            spec[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
    return GridFunction::from_spectrum(g, spec);
}

double sobolev_norm(const Grid& g, const Spectrum& spec, double s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double xi = g.xi(k);
        sum += bin_weight(g, k) * std::pow(1.0 + xi * xi, s) * std::norm(spec[k]);
    }
    return std::sqrt(sum);
}

double sobolev_norm(const GridFunction& f, double s) {
    return sobolev_norm(f.grid(), f.spectrum(), s);
}

double lp_norm(const GridFunction& f, double q) {
    if (q < 1.0) {
        throw validation_error("lp_norm: exponent must be >= 1");
    }
    double sum = 0.0;
    for (double v : f.values()) sum += std::pow(std::abs(v), q);
    return std::pow(sum * f.grid().spacing(), 1.0 / q);
}

double sup_norm(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid(), "inner_product");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
    return sum * f.grid().spacing();
}

double tail_mass(const GridFunction& f) {
    const Grid& g = f.grid();
    const double mid = g.midpoint();
    const double quarter = g.length() / 4.0;
    double tail = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v2 = f[i] * f[i];
        total += v2;
        double d = std::abs(g.node(i) - mid);
        d = std::min(d, g.length() - d);
        if (d > quarter) tail += v2;
    }
    return total > 0.0 ? tail / total : 0.0;
}

} // namespace nwl
