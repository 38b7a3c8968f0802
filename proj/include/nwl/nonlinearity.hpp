#pragma once

#include "nwl/grid_function.hpp"

namespace nwl {

// g0(u) = |u|^{p-1} u evaluated by collocation (the caller applies the sign).
// With dealias set and integer p in {2,...,5} the product is formed on a
// 3/2 zero-padded grid; for non-integer p plain collocation is used and
// resolution-doubling checks take over.
Spectrum power_nonlinearity_spectrum(const Grid& grid, const Spectrum& u_hat, double p,
                                     bool dealias);
GridFunction power_nonlinearity(const GridFunction& u, double p, bool dealias);

bool dealias_applicable(double p);

} // namespace nwl
