#include "nwl/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nwl/errors.hpp"

namespace nwl {

namespace {
// Factors sharing the same a merge into one; zero exponents vanish.
std::vector<SymbolFactor> normalize_factors(std::vector<SymbolFactor> factors) {
    std::sort(factors.begin(), factors.end(),
              [](const SymbolFactor& x, const SymbolFactor& y) { return x.a < y.a; });
    std::vector<SymbolFactor> out;
    for (const auto& f : factors) {
        if (!out.empty() && out.back().a == f.a) {
            out.back().e += f.e;
        } else {
            out.push_back(f);
        }
    }
    std::erase_if(out, [](const SymbolFactor& f) { return f.e == 0.0; });
    return out;
}
} // namespace

SymbolSpec::SymbolSpec(double prefactor, std::vector<SymbolFactor> factors)
    : prefactor_(prefactor), factors_(normalize_factors(std::move(factors))) {
    if (!(prefactor_ > 0.0) || !std::isfinite(prefactor_)) {
        throw validation_error("symbol: prefactor must be positive and finite");
    }
    for (const auto& f : factors_) {
        if (!(f.a > 0.0) || !std::isfinite(f.a) || !std::isfinite(f.e)) {
            throw validation_error("symbol: factor coefficients must be positive and finite");
        }
    }
}

double SymbolSpec::order() const {
    double s = 0.0;
    for (const auto& f : factors_) s += 2.0 * f.e;
    return s;
}

double SymbolSpec::eval(double xi) const {
    const double xi2 = xi * xi;
    double v = prefactor_;
    for (const auto& f : factors_) v *= std::pow(1.0 + f.a * xi2, f.e);
    return v;
}

double SymbolSpec::infinity_ratio() const {
    double v = prefactor_;
    for (const auto& f : factors_) v *= std::pow(f.a, f.e);
    return v;
}

double symbol_eval(const SymbolSpec& spec, double xi) { return spec.eval(xi); }

SymbolSpec symbol_mul(const SymbolSpec& s1, const SymbolSpec& s2) {
    std::vector<SymbolFactor> factors = s1.factors();
    factors.insert(factors.end(), s2.factors().begin(), s2.factors().end());
    return SymbolSpec(s1.prefactor() * s2.prefactor(), std::move(factors));
}

SymbolSpec symbol_pow(const SymbolSpec& s, double q) {
    std::vector<SymbolFactor> factors = s.factors();
    for (auto& f : factors) f.e *= q;
    return SymbolSpec(std::pow(s.prefactor(), q), std::move(factors));
}

MultiplierTable::MultiplierTable(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.num_bins()) {
        throw validation_error("multiplier table: value count does not match grid bins");
    }
}

double MultiplierTable::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

MultiplierTable tabulate(const SymbolSpec& spec, const Grid& grid) {
    return MultiplierTable::from_function(grid, [&](double xi) { return spec.eval(xi); });
}

MultiplierTable symbol_shift_sub(const SymbolSpec& s, double kappa, const Grid& grid) {
    auto table = MultiplierTable::from_function(
        grid, [&](double xi) { return s.eval(xi) - kappa; });
    if (!(table.min_value() > 0.0)) {
        throw validation_error("symbol_shift_sub: shift by " + std::to_string(kappa) +
                               " violates positivity of the symbol");
    }
    return table;
}

CoercivityConstants coercivity_constants(const SymbolSpec& spec, std::size_t samples,
                                         double xi_max) {
    const double half_order = spec.order() / 2.0;
    auto ratio = [&](double xi) {
        return spec.eval(xi) * std::pow(1.0 + xi * xi, -half_order);
    };

    // Analytic limits first: ratio(0) = prefactor, ratio(inf) = prefactor * prod a^e.
    double lo = std::min(spec.prefactor(), spec.infinity_ratio());
    double hi = std::max(spec.prefactor(), spec.infinity_ratio());

    const double xi_min = 1.0e-6;
    const double log_step = std::log(xi_max / xi_min) / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        const double xi = xi_min * std::exp(log_step * static_cast<double>(i));
        const double r = ratio(xi);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

} // namespace nwl
