#include "nwl/evolution.hpp"

#include <cmath>
#include <limits>

#include "nwl/errors.hpp"
#include "nwl/nonlinearity.hpp"

namespace nwl {

LinearPropagator linear_propagator(const Grid& grid, const PDEModel& model, double dt) {
    const std::size_t bins = grid.num_bins();
    const std::size_t nyq = grid.n() / 2;
    LinearPropagator prop;
    prop.cos_wdt.resize(bins);
    prop.sin_xi_over_w.resize(bins);
    prop.sin_xi_l_over_w.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double xi = (k == nyq) ? 0.0 : grid.xi(k);
        const double l = model.l_spec().eval(grid.xi(k));
        const double omega = std::abs(xi) * std::sqrt(l);
        if (omega == 0.0) {
            prop.cos_wdt[k] = 1.0;
            prop.sin_xi_over_w[k] = xi * dt; // analytic omega -> 0 limit, 0 at xi = 0
            prop.sin_xi_l_over_w[k] = xi * l * dt;
        } else {
            const double s = std::sin(omega * dt);
            prop.cos_wdt[k] = std::cos(omega * dt);
            prop.sin_xi_over_w[k] = s * xi / omega;
            prop.sin_xi_l_over_w[k] = s * xi * l / omega;
        }
    }
    return prop;
}

namespace {

struct SpectralState {
    Spectrum u;
    Spectrum w;
};

void apply_propagator(const LinearPropagator& prop, SpectralState& s) {
    const std::complex<double> i_unit(0.0, 1.0);
    for (std::size_t k = 0; k < s.u.size(); ++k) {
        const auto u0 = s.u[k];
        const auto w0 = s.w[k];
        s.u[k] = prop.cos_wdt[k] * u0 + prop.sin_xi_over_w[k] * (i_unit * w0);
        s.w[k] = prop.sin_xi_l_over_w[k] * (i_unit * u0) + prop.cos_wdt[k] * w0;
    }
}

bool spectrum_finite(const Spectrum& s) {
    for (const auto& z : s) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

} // namespace

StepBounds stable_step_bounds(const Grid& grid, const PDEModel& model, const GridFunction& u0) {
    double xi_b = 0.0;
    for (std::size_t k = 0; k < grid.num_bins(); ++k) {
        const double xi = grid.xi(k);
        xi_b = std::max(xi_b, std::abs(xi) * model.b_spec().eval(xi));
    }
    const double u_max = std::max(sup_norm(u0), 1.0e-12);
    const double rate = xi_b * model.p() * std::pow(u_max, model.p() - 1.0);
    // RK4 stays stable up to |lambda dt| ~ 2.8 on the imaginary axis.
    return {0.5 / rate, 2.8 / rate};
}

Trajectory evolve(const SystemState& state0, const PDEModel& model, double dt, double t_end,
                  const EvolveOptions& opts) {
    const Grid& grid = state0.u.grid();
    if (dt == 0.0 || !std::isfinite(dt)) {
        throw validation_error("evolve: dt must be nonzero and finite");
    }
    if (t_end * dt <= 0.0) {
        throw validation_error("evolve: t_end must have the sign of dt");
    }
    if (!state0.u.all_finite() || !state0.w.all_finite()) {
        throw validation_error("evolve: non-finite initial data");
    }
    if (!opts.linear_only) {
        const StepBounds bounds = stable_step_bounds(grid, model, state0.u);
        if (std::abs(dt) > bounds.refuse_above) {
            throw validation_error(
                "evolve: dt = " + std::to_string(dt) + " exceeds the nonlinear stability bound " +
                std::to_string(bounds.refuse_above) + " (suggested dt = " +
                std::to_string(bounds.suggested) + ")");
        }
    }

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const double sigma = static_cast<double>(model.sigma());
    const double p = model.p();
    const std::size_t nyq = grid.n() / 2;
    const LinearPropagator half = linear_propagator(grid, model, 0.5 * dt);

    // i xi b(xi), the derivative-and-B factor of the nonlinear term
    std::vector<double> xi_b(grid.num_bins());
    for (std::size_t k = 0; k < grid.num_bins(); ++k) {
        xi_b[k] = (k == nyq) ? 0.0 : grid.xi(k) * model.b_spec().eval(grid.xi(k));
    }

    auto nonlinear_w = [&](const SpectralState& s) -> Spectrum {
        Spectrum g_hat = power_nonlinearity_spectrum(grid, s.u, p, opts.dealias);
        const std::complex<double> i_unit(0.0, 1.0);
        for (std::size_t k = 0; k < g_hat.size(); ++k) {
            g_hat[k] *= sigma * xi_b[k] * i_unit;
        }
        return g_hat;
    };

    Trajectory traj(grid);
    traj.dt = dt;

    // Levine functional needs a zero-mean u so that v = primitive(u) exists.
    const double mean0 = std::abs(state0.u.spectrum()[0].real()) / static_cast<double>(grid.n());
    if (opts.track_levine && mean0 > 1.0e-12 * std::max(1.0, sup_norm(state0.u))) {
        throw validation_error("evolve: levine tracking requires zero-mean u");
    }

    SpectralState s{state0.u.spectrum(), state0.w.spectrum()};

    auto record = [&](double t, bool force_snapshot) -> bool {
        // returns false when the run must stop (blow-up threshold or NaN)
        if (!spectrum_finite(s.u) || !spectrum_finite(s.w)) {
            traj.series.t.push_back(t);
            traj.series.E.push_back(std::numeric_limits<double>::quiet_NaN());
            traj.series.M.push_back(std::numeric_limits<double>::quiet_NaN());
            traj.series.x_norm.push_back(std::numeric_limits<double>::infinity());
            traj.series.sup_norm.push_back(std::numeric_limits<double>::infinity());
            if (opts.diag_c) {
                traj.series.Ic.push_back(std::numeric_limits<double>::quiet_NaN());
                traj.series.Q.push_back(std::numeric_limits<double>::quiet_NaN());
            }
            if (opts.track_levine) {
                traj.series.levine_H.push_back(std::numeric_limits<double>::quiet_NaN());
            }
            return false;
        }
        GridFunction u_phys = GridFunction::from_spectrum(grid, s.u);
        GridFunction w_phys = GridFunction::from_spectrum(grid, s.w);
        SystemState state(u_phys, w_phys, t);

        double e = 0.0;
        if (opts.linear_only) {
            // only the quadratic part is conserved by the pure linear flow
            const double q_term = functional_Q(u_phys, p) / (p + 1.0);
            e = energy(state, model) - sigma * q_term;
        } else {
            e = energy(state, model);
        }
        const double m = momentum(state, model);
        const double xn = x_norm(state, model);
        traj.series.t.push_back(t);
        traj.series.E.push_back(e);
        traj.series.M.push_back(m);
        traj.series.x_norm.push_back(xn);
        traj.series.sup_norm.push_back(sup_norm(u_phys));
        if (opts.diag_c) {
            traj.series.Ic.push_back(functional_Ic(u_phys, model, *opts.diag_c));
            traj.series.Q.push_back(functional_Q(u_phys, p));
        }
        if (opts.track_levine) {
            double h_sum = 0.0;
            for (std::size_t k = 1; k < s.u.size(); ++k) {
                const double xi = (k == nyq) ? 0.0 : grid.xi(k);
                if (xi == 0.0) continue;
                h_sum += bin_weight(grid, k) * std::norm(s.u[k]) /
                         (xi * xi * model.b_spec().eval(grid.xi(k)));
            }
            traj.series.levine_H.push_back(0.5 * h_sum);
        }

        const bool want_snapshot =
            force_snapshot ||
            (opts.snapshot_stride > 0 &&
             (traj.series.t.size() - 1) % opts.snapshot_stride == 0);
        if (want_snapshot) {
            traj.snapshots.push_back({t, u_phys.values(), w_phys.values()});
        }

        const double x0 = traj.series.x_norm.front();
        if (xn > opts.blowup_factor * std::max(x0, 1.0e-30)) return false;
        return true;
    };

    if (!record(0.0, true)) {
        traj.status = RunStatus::Aborted;
        traj.abort_reason = "initial data already beyond threshold";
        return traj;
    }

    bool blew_up = false;
    for (std::size_t step = 0; step < n_steps; ++step) {
        // integrating-factor RK4: exact half-step propagators around the
        // pseudo-spectral nonlinear stages
        const Spectrum n1 = opts.linear_only ? Spectrum(grid.num_bins(), {0.0, 0.0})
                                             : nonlinear_w(s);

        SpectralState a = s; // E V_n
        apply_propagator(half, a);

        SpectralState stage2 = s; // E (V_n + dt/2 N1)
        for (std::size_t k = 0; k < stage2.w.size(); ++k) stage2.w[k] += 0.5 * dt * n1[k];
        apply_propagator(half, stage2);
        const Spectrum n2 = opts.linear_only ? n1 : nonlinear_w(stage2);

        SpectralState stage3 = a; // a + dt/2 N2
        for (std::size_t k = 0; k < stage3.w.size(); ++k) stage3.w[k] += 0.5 * dt * n2[k];
        const Spectrum n3 = opts.linear_only ? n1 : nonlinear_w(stage3);

        SpectralState stage4 = a; // E (a + dt N3)
        for (std::size_t k = 0; k < stage4.w.size(); ++k) stage4.w[k] += dt * n3[k];
        apply_propagator(half, stage4);
        const Spectrum n4 = opts.linear_only ? n1 : nonlinear_w(stage4);

        // V_{n+1} = E(E(V_n + dt/6 N1) + dt/3 (N2 + N3)) + dt/6 N4
        SpectralState next = s;
        for (std::size_t k = 0; k < next.w.size(); ++k) next.w[k] += (dt / 6.0) * n1[k];
        apply_propagator(half, next);
        for (std::size_t k = 0; k < next.w.size(); ++k) {
            next.w[k] += (dt / 3.0) * (n2[k] + n3[k]);
        }
        apply_propagator(half, next);
        for (std::size_t k = 0; k < next.w.size(); ++k) next.w[k] += (dt / 6.0) * n4[k];

        s = std::move(next);
        const double t_now = dt * static_cast<double>(step + 1);
        const bool last = step + 1 == n_steps;
        if (!record(t_now, last)) {
            blew_up = true;
            traj.t_star = dt * static_cast<double>(step);
            break;
        }
    }

    traj.status = blew_up ? RunStatus::BlewUp : RunStatus::Completed;
    if (!blew_up) traj.t_star = traj.series.t.back();
    return traj;
}

SystemState Trajectory::snapshot_state(std::size_t i) const {
    const Snapshot& s = snapshots.at(i);
    return SystemState(GridFunction(grid, s.u), GridFunction(grid, s.w), s.t);
}

std::pair<double, double> conserved_drift(const Trajectory& traj) {
    const auto& series = traj.series;
    if (series.t.size() < 2) {
        throw validation_error("conserved_drift: need at least two samples");
    }
    const double e0 = series.E.front();
    const double m0 = series.M.front();
    const double e_floor = std::max(std::abs(e0), 1.0e-30);
    const double m_floor = std::max(std::abs(m0), 1.0e-30);
    double de = 0.0, dm = 0.0;
    for (std::size_t i = 1; i < series.t.size(); ++i) {
        if (!std::isfinite(series.E[i]) || !std::isfinite(series.M[i])) break;
        de = std::max(de, std::abs(series.E[i] - e0) / e_floor);
        dm = std::max(dm, std::abs(series.M[i] - m0) / m_floor);
    }
    return {de, dm};
}

GridFunction primitive_x(const GridFunction& u) {
    Spectrum spec = u.spectrum();
    const Grid& g = u.grid();
    const double mean = std::abs(spec[0].real()) / static_cast<double>(g.n());
    if (mean > 1.0e-12 * std::max(1.0, sup_norm(u))) {
        throw validation_error("primitive_x: input has nonzero mean");
    }
    const std::size_t nyq = g.n() / 2;
    spec[0] = 0.0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        if (k == nyq) {
            spec[k] = 0.0; // derivative convention zeroes the Nyquist mode
        } else {
            spec[k] /= std::complex<double>(0.0, g.xi(k));
        }
    }
    return GridFunction::from_spectrum(g, spec);
}

} // namespace nwl
