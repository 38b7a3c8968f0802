#include "nwl/waves.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nwl/errors.hpp"
#include "nwl/fft.hpp"
#include "nwl/functionals.hpp"
#include "nwl/nonlinearity.hpp"

namespace nwl {

namespace {

// sech(z) without overflow for large |z|.
double sech(double z) {
    const double e = std::exp(-std::abs(z));
    return 2.0 * e / (1.0 + e * e);
}

GridFunction sech_profile(const Grid& grid, double amplitude, double width, double power) {
    const double mid = grid.midpoint();
    return GridFunction::sample(grid, [&](double x) {
        return amplitude * std::pow(sech(width * (x - mid)), power);
    });
}

void fill_diagnostics(TravelingWave& wave, const PDEModel& model) {
    wave.diag.residual_l2 = ode_residual(wave.profile, model, wave.c);
    wave.residual_l2 = wave.diag.residual_l2;
    wave.diag.Ic = functional_Ic(wave.profile, model, wave.c);
    wave.diag.Q = functional_Q(wave.profile, model.p());
    const double p = model.p();
    wave.diag.d = (p - 1.0) / (p + 1.0) * wave.diag.Ic;
    wave.diag.m1 =
        std::pow(wave.diag.Q / std::pow(2.0, (p + 1.0) / (p - 1.0)), (p - 1.0) / (p + 1.0));
    wave.diag.tail_mass = tail_mass(wave.profile);
}

// Peak location by parabolic interpolation through the maximum sample.
double peak_location(const GridFunction& f) {
    const auto& v = f.values();
    const std::size_t n = v.size();
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] > v[j]) j = i;
    }
    const double fm = v[(j + n - 1) % n];
    const double f0 = v[j];
    const double fp = v[(j + 1) % n];
    const double denom = fm - 2.0 * f0 + fp;
    double delta = 0.0;
    if (denom != 0.0) delta = 0.5 * (fm - fp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    return f.grid().node(j) + delta * f.grid().spacing();
}

GridFunction center_and_symmetrize(const GridFunction& phi) {
    const Grid& g = phi.grid();
    GridFunction centered = spectral_shift(phi, g.midpoint() - peak_location(phi));
    auto& v = centered.values();
    const std::size_t n = v.size();
    for (std::size_t i = 1; i < n / 2; ++i) {
        const double avg = 0.5 * (v[i] + v[n - i]);
        v[i] = avg;
        v[n - i] = avg;
    }
    return centered;
}

} // namespace

double ode_residual(const GridFunction& phi, const PDEModel& model, double c) {
    const Grid& g = phi.grid();
    const double c2 = c * c;
    const auto table = MultiplierTable::from_function(g, [&](double xi) {
        return (model.l_spec().eval(xi) - c2) / model.b_spec().eval(xi);
    });
    GridFunction linear = apply_multiplier(phi, table);
    const double sigma = static_cast<double>(model.sigma());
    const double p = model.p();
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double res =
            linear[i] + sigma * std::pow(std::abs(phi[i]), p - 1.0) * phi[i];
        sum += res * res;
    }
    return std::sqrt(sum * g.spacing());
}

PDEModel boussinesq_model(double p) {
    return build_model(SymbolSpec(1.0, {{1.0, 1.0}}), SymbolSpec::identity(), p, -1);
}

PDEModel improved_boussinesq_model(double p) {
    const SymbolSpec s(1.0, {{1.0, -1.0}});
    return build_model(s, s, p, 1);
}

PDEModel double_dispersion_model(double p, double a1, double a2, Regime regime) {
    const SymbolSpec l(1.0, {{a2, 1.0}, {a1, -1.0}});
    const SymbolSpec b(1.0, {{a1, -1.0}});
    return build_model(l, b, p, regime == Regime::A ? -1 : 1);
}

PDEModel klein_gordon_model(double p) {
    return build_model(SymbolSpec::identity(), SymbolSpec(1.0, {{1.0, -1.0}}), p, -1);
}

TravelingWave exact_boussinesq_wave(double p, double c, const Grid& grid) {
    if (!(c * c < 1.0)) {
        throw validation_error("exact_boussinesq_wave: requires c^2 < 1");
    }
    const double amp = std::pow(0.5 * (p + 1.0) * (1.0 - c * c), 1.0 / (p - 1.0));
    const double width = 0.5 * (p - 1.0) * std::sqrt(1.0 - c * c);
    TravelingWave wave(c, sech_profile(grid, amp, width, 2.0 / (p - 1.0)));
    wave.converged = true;
    fill_diagnostics(wave, boussinesq_model(p));
    return wave;
}

TravelingWave exact_improved_boussinesq_wave(double p, double c, const Grid& grid) {
    if (!(c * c > 1.0)) {
        throw validation_error("exact_improved_boussinesq_wave: requires c^2 > 1");
    }
    const double amp = std::pow(0.5 * (p + 1.0) * (c * c - 1.0), 1.0 / (p - 1.0));
    const double width = 0.5 * (p - 1.0) * std::sqrt(1.0 - 1.0 / (c * c));
    TravelingWave wave(c, sech_profile(grid, amp, width, 2.0 / (p - 1.0)));
    wave.converged = true;
    fill_diagnostics(wave, improved_boussinesq_model(p));
    return wave;
}

TravelingWave exact_double_dispersion_wave(double p, double c, double a1, double a2,
                                           const Grid& grid, Regime regime) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) {
        throw validation_error("exact_double_dispersion_wave: a1, a2 must be positive");
    }
    const double c2 = c * c;
    double amp = 0.0, width = 0.0;
    if (regime == Regime::A) {
        if (!(c2 < std::min(1.0, a2 / a1))) {
            throw validation_error(
                "exact_double_dispersion_wave: regime 1 requires c^2 < min{1, a2/a1}");
        }
        amp = std::pow(0.5 * (p + 1.0) * (1.0 - c2), 1.0 / (p - 1.0));
        width = 0.5 * (p - 1.0) * std::sqrt((1.0 - c2) / (a2 - a1 * c2));
    } else {
        if (!(c2 > std::max(1.0, a2 / a1))) {
            throw validation_error(
                "exact_double_dispersion_wave: regime 2 requires c^2 > max{1, a2/a1}");
        }
        amp = std::pow(0.5 * (p + 1.0) * (c2 - 1.0), 1.0 / (p - 1.0));
        width = 0.5 * (p - 1.0) * std::sqrt((c2 - 1.0) / (a1 * c2 - a2));
    }
    TravelingWave wave(c, sech_profile(grid, amp, width, 2.0 / (p - 1.0)));
    wave.converged = true;
    fill_diagnostics(wave, double_dispersion_model(p, a1, a2, regime));
    return wave;
}

namespace {
// Decay rate of the linearized operator near xi = 0 gives the initial width.
double initial_width(const PDEModel& model, double c) {
    const double c2 = c * c;
    auto op = [&](double xi) {
        const double v = (model.l_spec().eval(xi) - c2) / model.b_spec().eval(xi);
        return model.regime() == Regime::A ? v : -v;
    };
    const double a0 = op(0.0);
    const double dxi = 1.0e-3;
    const double a2 = (op(dxi) - a0) / (dxi * dxi);
    double mu = 1.0;
    if (a0 > 0.0 && a2 > 0.0) mu = std::sqrt(a0 / a2);
    return 0.5 * (model.p() - 1.0) * mu;
}
} // namespace

TravelingWave solve_wave_fixed_point(const PDEModel& model, double c, const Grid& grid,
                                     const WaveSolverOptions& opts) {
    require_admissible(model, c, "solve_wave_fixed_point");
    const double p = model.p();
    const double gamma = opts.gamma_exp > 0.0 ? opts.gamma_exp : p / (p - 1.0);
    const MultiplierTable op = model.wave_operator(grid, c);
    if (!(op.min_value() > 0.0)) {
        throw numerical_error("solve_wave_fixed_point: wave operator is not positive");
    }

    const double width = opts.initial_width > 0.0 ? opts.initial_width : initial_width(model, c);
    GridFunction phi = sech_profile(grid, 1.0, width, 2.0 / (p - 1.0));

    Fft& fft = fft_for(grid.n());
    double m_factor = 0.0;
    std::size_t iter = 0;
    bool fixed_point_ok = false;
    for (; iter < opts.max_iter; ++iter) {
        const Spectrum phi_hat = fft.forward(phi.values());
        Spectrum n_hat = power_nonlinearity_spectrum(grid, phi_hat, p, opts.dealias);

        double a_quad = 0.0; // <A phi, phi>
        double n_quad = 0.0; // <N(phi), phi>
        for (std::size_t k = 0; k < phi_hat.size(); ++k) {
            const double wk = bin_weight(grid, k);
            a_quad += wk * op[k] * std::norm(phi_hat[k]);
            n_quad += wk * (n_hat[k].real() * phi_hat[k].real() +
                            n_hat[k].imag() * phi_hat[k].imag());
        }
        if (!(std::abs(n_quad) > 0.0) || !std::isfinite(n_quad)) {
            throw numerical_error("solve_wave_fixed_point: degenerate nonlinear pairing");
        }
        m_factor = a_quad / n_quad;
        const double scale = std::pow(m_factor, gamma);

        for (std::size_t k = 0; k < n_hat.size(); ++k) n_hat[k] *= scale / op[k];
        GridFunction next = GridFunction::from_spectrum(grid, n_hat);

        double diff_sq = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const double d = next[i] - phi[i];
            diff_sq += d * d;
        }
        const double update = std::sqrt(diff_sq * grid.spacing());
        phi = std::move(next);

        const double norm = lp_norm(phi, 2.0);
        if (norm < 1.0e-12) {
            throw numerical_error("solve_wave_fixed_point: iteration collapsed to zero");
        }
        if (!phi.all_finite()) {
            throw numerical_error("solve_wave_fixed_point: iteration diverged");
        }
        if (update < opts.tol && std::abs(m_factor - 1.0) < opts.tol) {
            fixed_point_ok = true;
            ++iter;
            break;
        }
    }
    if (!fixed_point_ok) {
        throw numerical_error("solve_wave_fixed_point: no convergence within " +
                              std::to_string(opts.max_iter) + " iterations (c = " +
                              std::to_string(c) + ")");
    }

    // Nonnegative, centered, even representative of the translate family.
    double extremum = 0.0;
    for (double v : phi.values()) {
        if (std::abs(v) > std::abs(extremum)) extremum = v;
    }
    if (extremum < 0.0) {
        for (double& v : phi.values()) v = -v;
    }
    TravelingWave wave(c, center_and_symmetrize(phi));
    wave.diag.iterations = iter;
    wave.diag.stabilizing_factor_final = m_factor;
    fill_diagnostics(wave, model);
    wave.converged = true;
    return wave;
}

MinimizerResult minimize_m1(const PDEModel& model, double c, const Grid& grid,
                            const MinimizerOptions& opts) {
    require_admissible(model, c, "minimize_m1");
    const double p = model.p();
    const MultiplierTable op = model.wave_operator(grid, c);
    if (!(op.min_value() > 0.0)) {
        throw numerical_error("minimize_m1: wave operator is not positive");
    }
    Fft& fft = fft_for(grid.n());

    auto renormalize = [&](GridFunction psi) {
        const double q = functional_Q(psi, p);
        if (!(q > 0.0)) {
            throw numerical_error("minimize_m1: constraint normalization degenerate");
        }
        const double s = std::pow(opts.q_target / q, 1.0 / (p + 1.0));
        for (double& v : psi.values()) v *= s;
        return psi;
    };

    // I_c in regime A, J_c in regime B; both equal the quadratic form of op.
    auto objective = [&](const GridFunction& psi) {
        const Spectrum s = fft.forward(psi.values());
        double sum = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            sum += bin_weight(grid, k) * op[k] * std::norm(s[k]);
        }
        return 0.5 * sum;
    };

    GridFunction psi =
        renormalize(sech_profile(grid, 1.0, initial_width(model, c), 2.0 / (p - 1.0)));
    double f_cur = objective(psi);
    double step = opts.initial_step;
    std::size_t flat_count = 0;
    std::size_t iter = 0;
    bool converged = false;

    for (; iter < opts.max_iter; ++iter) {
        // L2 gradients of the objective and the constraint
        GridFunction grad = apply_multiplier(psi, op);
        std::vector<double> grad_q(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            grad_q[i] = (p + 1.0) * std::pow(std::abs(psi[i]), p - 1.0) * psi[i];
        }

        double gq_gq = 0.0, g_gq = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            gq_gq += grad_q[i] * grad_q[i];
            g_gq += grad[i] * grad_q[i];
        }
        const double mu = g_gq / gq_gq;

        // Preconditioned projected direction A^{-1}(grad - mu grad_q)
        std::vector<double> rhs(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) rhs[i] = mu * grad_q[i];
        Spectrum rhs_hat = fft.forward(rhs);
        for (std::size_t k = 0; k < rhs_hat.size(); ++k) rhs_hat[k] /= op[k];
        const std::vector<double> pre = fft.inverse(rhs_hat);

        std::vector<double> dir(psi.size());
        double dir_norm_sq = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            dir[i] = psi[i] - pre[i];
            dir_norm_sq += dir[i] * dir[i];
        }
        if (dir_norm_sq * grid.spacing() < 1.0e-30) {
            converged = true;
            break;
        }

        bool improved = false;
        double f_next = f_cur;
        GridFunction best = psi;
        while (step > 1.0e-14) {
            GridFunction trial = psi;
            for (std::size_t i = 0; i < trial.size(); ++i) {
                trial.values()[i] -= step * dir[i];
            }
            trial = renormalize(std::move(trial));
            const double f_trial = objective(trial);
            if (f_trial < f_cur) {
                best = std::move(trial);
                f_next = f_trial;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            converged = true;
            break;
        }
        const double decrease = f_cur - f_next;
        psi = std::move(best);
        f_cur = f_next;
        step = std::min(step * 1.5, 4.0);

        if (decrease <= opts.tol * std::max(std::abs(f_cur), 1.0e-30)) {
            if (++flat_count >= 4) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            flat_count = 0;
        }
    }
    if (!converged) {
        throw numerical_error("minimize_m1: no convergence within " +
                              std::to_string(opts.max_iter) + " iterations");
    }
    MinimizerResult result{std::move(psi), f_cur, iter, true};
    return result;
}

} // namespace nwl
