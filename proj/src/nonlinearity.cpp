#include "nwl/nonlinearity.hpp"

#include <cmath>

#include "nwl/fft.hpp"

namespace nwl {

namespace {
inline double g0(double u, double p) { return std::pow(std::abs(u), p - 1.0) * u; }

std::size_t padded_size(std::size_t n) {
    std::size_t m = (3 * n) / 2;
    if (m % 2 != 0) ++m;
    return m;
}
} // namespace

bool dealias_applicable(double p) {
    if (p < 2.0 || p > 5.0) return false;
    return p == std::floor(p);
}

Spectrum power_nonlinearity_spectrum(const Grid& grid, const Spectrum& u_hat, double p,
                                     bool dealias) {
    const std::size_t n = grid.n();
    if (!dealias || !dealias_applicable(p)) {
        std::vector<double> u = fft_for(n).inverse(u_hat);
        for (double& v : u) v = g0(v, p);
        return fft_for(n).forward(u);
    }

    const std::size_t m = padded_size(n);
    const double up = static_cast<double>(m) / static_cast<double>(n);
    Spectrum padded(m / 2 + 1, {0.0, 0.0});
    for (std::size_t k = 0; k < n / 2; ++k) padded[k] = u_hat[k] * up;
    // the coarse Nyquist bin aliases +-n/2; it splits evenly on the fine grid
    padded[n / 2] = u_hat[n / 2] * (0.5 * up);

    std::vector<double> u = fft_for(m).inverse(padded);
    for (double& v : u) v = g0(v, p);
    Spectrum fine = fft_for(m).forward(u);

    const double down = 1.0 / up;
    Spectrum out(n / 2 + 1);
    for (std::size_t k = 0; k < n / 2; ++k) out[k] = fine[k] * down;
    out[n / 2] = 2.0 * fine[n / 2].real() * down;
    return out;
}

GridFunction power_nonlinearity(const GridFunction& u, double p, bool dealias) {
    return GridFunction::from_spectrum(
        u.grid(), power_nonlinearity_spectrum(u.grid(), u.spectrum(), p, dealias));
}

} // namespace nwl
