#pragma once

#include <utility>
#include <vector>

#include "nwl/grid.hpp"

namespace nwl {

// Even positive Fourier symbol of the product form
//   s(xi) = prefactor * prod_j (1 + a_j xi^2)^{e_j},   a_j > 0.
// Everything the model needs (l, b, their roots and inverses) lives in this
// family; it is closed under multiplication and real powers but not under
// subtraction, which is why symbol_shift_sub returns a tabulated symbol.
struct SymbolFactor {
    double a = 1.0;
    double e = 1.0;
};

class SymbolSpec {
public:
    SymbolSpec() = default;
    SymbolSpec(double prefactor, std::vector<SymbolFactor> factors);

    static SymbolSpec identity() { return SymbolSpec(); }

    double prefactor() const { return prefactor_; }
    const std::vector<SymbolFactor>& factors() const { return factors_; }

    // Sum of 2*e_j; 0 for the identity.
    double order() const;

    double eval(double xi) const;

    // Limit of s(xi) * (1+xi^2)^(-order/2) as |xi| -> infinity.
    double infinity_ratio() const;

    bool is_identity() const { return factors_.empty() && prefactor_ == 1.0; }

private:
    double prefactor_ = 1.0;
    std::vector<SymbolFactor> factors_; // merged by a, zero exponents dropped
};

double symbol_eval(const SymbolSpec& spec, double xi);
SymbolSpec symbol_mul(const SymbolSpec& s1, const SymbolSpec& s2);
SymbolSpec symbol_pow(const SymbolSpec& s, double q);

// Per-bin values of a multiplier on a specific grid. Bins follow the r2c
// layout of Grid::xi.
class MultiplierTable {
public:
    MultiplierTable(const Grid& grid, std::vector<double> values);

    template <typename F>
    static MultiplierTable from_function(const Grid& grid, F&& f) {
        std::vector<double> v(grid.num_bins());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.xi(k));
        return MultiplierTable(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    double operator[](std::size_t bin) const { return values_[bin]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double min_value() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

MultiplierTable tabulate(const SymbolSpec& spec, const Grid& grid);

// l(xi) - kappa, valid only while the result stays strictly positive.
MultiplierTable symbol_shift_sub(const SymbolSpec& s, double kappa, const Grid& grid);

// Best constants (inf, sup) of s(xi)*(1+xi^2)^(-order/2) over xi in R,
// from a log-spaced sample plus the analytic limits at 0 and infinity.
struct CoercivityConstants {
    double low = 0.0;  // c_low^2
    double high = 0.0; // c_high^2
};

CoercivityConstants coercivity_constants(const SymbolSpec& spec,
                                         std::size_t samples = 10000,
                                         double xi_max = 1.0e6);

} // namespace nwl
