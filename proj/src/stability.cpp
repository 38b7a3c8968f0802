#include "nwl/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "nwl/errors.hpp"
#include "nwl/fft.hpp"

namespace nwl {

namespace {

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Correlation of two spectra under the (1+xi^2)^s weight, evaluated at every
// shift of the (refine * n)-point lattice via a zero-padded inverse transform.
std::vector<double> weighted_correlation(const Grid& g, const Spectrum& a, const Spectrum& b,
                                         double s, std::size_t refine) {
    const std::size_t n = g.n();
    const std::size_t bins = g.num_bins();
    Spectrum z(bins);
    const double base = g.length() / (static_cast<double>(n) * static_cast<double>(n));
    for (std::size_t k = 0; k < bins; ++k) {
        const double xi = g.xi(k);
        z[k] = base * std::pow(1.0 + xi * xi, s) * a[k] * std::conj(b[k]);
    }
    const std::size_t m = refine * n;
    if (refine == 1) {
        auto vals = fft_for(n).inverse(z);
        for (double& v : vals) v *= static_cast<double>(n);
        return vals;
    }
    Spectrum padded(m / 2 + 1, {0.0, 0.0});
    for (std::size_t k = 0; k + 1 < bins; ++k) padded[k] = z[k];
    padded[n / 2] = 0.5 * z[n / 2]; // former Nyquist bin is now an interior mode
    auto vals = fft_for(m).inverse(padded);
    for (double& v : vals) v *= static_cast<double>(m);
    return vals;
}

double direct_correlation(const Grid& g, const Spectrum& a, const Spectrum& b, double s,
                          double y) {
    const std::size_t bins = g.num_bins();
    const double base = g.length() / (static_cast<double>(g.n()) * static_cast<double>(g.n()));
    double sum = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        const double xi = g.xi(k);
        const std::complex<double> z = a[k] * std::conj(b[k]) *
                                       std::complex<double>(std::cos(xi * y), std::sin(xi * y));
        const double mult = (k == 0 || k == g.n() / 2) ? 1.0 : 2.0;
        sum += mult * base * std::pow(1.0 + xi * xi, s) * z.real();
    }
    return sum;
}

} // namespace

OrbitalDistanceResult orbital_distance_detailed(const SystemState& state,
                                                const TravelingWave& wave,
                                                const PDEModel& model, std::size_t refine) {
    require_same_grid(state.u.grid(), wave.profile.grid(), "orbital_distance");
    if (refine == 0) refine = 1;
    const Grid& g = state.u.grid();
    const double c = wave.c;
    const double s_u = model.s0();
    const double s_w = model.s0() - model.rho() / 2.0;

    const Spectrum su = state.u.spectrum();
    const Spectrum sw = state.w.spectrum();
    const Spectrum sphi = wave.profile.spectrum();

    const double nu = sobolev_norm(g, su, s_u);
    const double nw = sobolev_norm(g, sw, s_w);
    const double nphi_u = sobolev_norm(g, sphi, s_u);
    const double nphi_w = sobolev_norm(g, sphi, s_w);
    const double const_u = nu * nu + nphi_u * nphi_u;
    const double const_w = nw * nw + c * c * nphi_w * nphi_w;

    // ||u - phi_y||^2 = const_u - 2 Cu(y),  ||w + c phi_y||^2 = const_w + 2c Cw(y)
    const std::vector<double> cu = weighted_correlation(g, su, sphi, s_u, refine);
    const std::vector<double> cw = weighted_correlation(g, sw, sphi, s_w, refine);

    auto objective_at = [&](std::size_t j) {
        const double du = std::sqrt(std::max(0.0, const_u - 2.0 * cu[j]));
        const double dw = std::sqrt(std::max(0.0, const_w + 2.0 * c * cw[j]));
        return du + dw;
    };

    const std::size_t m = cu.size();
    std::size_t best = 0;
    double best_val = objective_at(0);
    for (std::size_t j = 1; j < m; ++j) {
        const double v = objective_at(j);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }

    // local quadratic fit around the best lattice shift
    const double step = g.length() / static_cast<double>(m);
    const double fm = objective_at((best + m - 1) % m);
    const double fp = objective_at((best + 1) % m);
    const double denom = fm - 2.0 * best_val + fp;
    double delta = 0.0;
    if (denom > 0.0) delta = std::clamp(0.5 * (fm - fp) / denom, -0.5, 0.5);
    const double y_fit = (static_cast<double>(best) + delta) * step;

    auto objective_exact = [&](double y) {
        const double du = std::sqrt(std::max(0.0, const_u - 2.0 * direct_correlation(g, su, sphi, s_u, y)));
        const double dw = std::sqrt(std::max(0.0, const_w + 2.0 * c * direct_correlation(g, sw, sphi, s_w, y)));
        return du + dw;
    };

    // Near an exact family member the objective is a cone |y - y*|, so one
    // parabola fit is not enough; golden-section polish inside the bracket.
    double lo = (static_cast<double>(best) - 1.0) * step;
    double hi = (static_cast<double>(best) + 1.0) * step;
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = objective_exact(x1);
    double f2 = objective_exact(x2);
    for (int it = 0; it < 80 && hi - lo > 1.0e-13 * g.length(); ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = objective_exact(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = objective_exact(x2);
        }
    }

    OrbitalDistanceResult result;
    result.distance = best_val;
    result.shift = static_cast<double>(best) * step;
    for (const auto& [y, v] : {std::pair{y_fit, objective_exact(y_fit)},
                               std::pair{x1, f1}, std::pair{x2, f2}}) {
        if (v < result.distance) {
            result.distance = v;
            result.shift = y;
        }
    }
    return result;
}

double orbital_distance(const SystemState& state, const TravelingWave& wave,
                        const PDEModel& model, std::size_t refine) {
    return orbital_distance_detailed(state, wave, model, refine).distance;
}

std::vector<double> uniform_c_grid(double c_min, double c_max, double c_step) {
    if (!(c_step > 0.0) || c_max < c_min) {
        throw validation_error("c grid: need c_step > 0 and c_max >= c_min");
    }
    std::vector<double> out;
    const std::size_t count = static_cast<std::size_t>(std::llround((c_max - c_min) / c_step)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(c_min + c_step * static_cast<double>(i));
    }
    return out;
}

DcCurve dc_curve(const PDEModel& model, const std::vector<double>& c_values, const Grid& grid,
                 const DcCurveOptions& opts) {
    if (c_values.size() < 3) {
        throw validation_error("dc_curve: need at least 3 velocity samples");
    }
    const double dc = c_values[1] - c_values[0];
    for (std::size_t i = 1; i + 1 < c_values.size(); ++i) {
        if (std::abs((c_values[i + 1] - c_values[i]) - dc) > 1.0e-9 * std::max(1.0, std::abs(dc))) {
            throw validation_error("dc_curve: velocity samples must be uniformly spaced");
        }
    }
    for (double c : c_values) require_admissible(model, c, "dc_curve");

    DcCurve curve;
    curve.c_step = dc;
    curve.samples.resize(c_values.size());

    std::vector<std::string> failures(c_values.size());
    parallel_for(c_values.size(), opts.workers, [&](std::size_t i) {
        const double c = c_values[i];
        try {
            const TravelingWave wave = solve_wave_fixed_point(model, c, grid, opts.solver);
            DcSample& s = curve.samples[i];
            s.c = c;
            s.d = dee_from_wave(wave, model);
            s.m1 = m1_from_wave(wave, model);
            s.d_prime_from_M = -c * b_half_inv_norm_sq(wave.profile, model);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (!failures[i].empty()) {
            throw numerical_error("dc_curve: solve failed at c = " +
                                  std::to_string(c_values[i]) + ": " + failures[i]);
        }
    }

    // wave d-values carry the solver accuracy; second differences amplify by 4/dc^2
    double eps_d = 0.0;
    for (const auto& s : curve.samples) {
        eps_d = std::max(eps_d, std::max(1.0e-14, 1.0e-9 * std::abs(s.d)));
    }
    curve.noise_floor = 10.0 * 4.0 * eps_d / (dc * dc);

    const std::size_t n = curve.samples.size();
    auto d_at = [&](std::size_t i) { return curve.samples[i].d; };
    for (std::size_t i = 0; i < n; ++i) {
        DcSample& s = curve.samples[i];
        if (i == 0) {
            s.d_prime = (-3.0 * d_at(0) + 4.0 * d_at(1) - d_at(2)) / (2.0 * dc);
        } else if (i == n - 1) {
            s.d_prime = (3.0 * d_at(i) - 4.0 * d_at(i - 1) + d_at(i - 2)) / (2.0 * dc);
        } else {
            s.d_prime = (d_at(i + 1) - d_at(i - 1)) / (2.0 * dc);
        }
        if (i == 0 || i == n - 1) {
            s.d_second = 0.0;
            s.convexity = Convexity::Indeterminate;
            continue;
        }
        s.d_second = (d_at(i + 1) - 2.0 * d_at(i) + d_at(i - 1)) / (dc * dc);
        double d2 = s.d_second;
        if (std::abs(d2) < curve.noise_floor && i >= 2 && i + 2 < n) {
            // Richardson refinement from the double-spacing stencil
            const double wide = (d_at(i + 2) - 2.0 * d_at(i) + d_at(i - 2)) / (4.0 * dc * dc);
            d2 = (4.0 * s.d_second - wide) / 3.0;
        }
        if (d2 > curve.noise_floor) {
            s.convexity = Convexity::Convex;
        } else if (d2 < -curve.noise_floor) {
            s.convexity = Convexity::Concave;
        } else {
            s.convexity = Convexity::Indeterminate;
        }
    }
    return curve;
}

BoussinesqWindow threshold_boussinesq(double p) {
    if (!(p > 1.0)) {
        throw validation_error("threshold_boussinesq: p must be > 1");
    }
    BoussinesqWindow w;
    w.c_sq_low = (p - 1.0) / 4.0;
    w.c_sq_high = 1.0;
    w.empty = !(w.c_sq_low < w.c_sq_high); // p >= 5
    return w;
}

double threshold_klein_gordon(double p) {
    if (!(p > 1.0)) {
        throw validation_error("threshold_klein_gordon: p must be > 1");
    }
    return (p - 1.0) / (p + 3.0);
}

BlowupData build_blowup_data(const TravelingWave& wave, const PDEModel& model, double lambda,
                             double h, double max_filter_distance_rel) {
    if (!(lambda > 1.0)) {
        throw validation_error("build_blowup_data: lambda must be > 1");
    }
    const Grid& g = wave.profile.grid();
    const double xi1 = g.xi(1);
    if (!(h >= xi1 * (1.0 - 1.0e-12))) {
        throw validation_error(
            "build_blowup_data: h below the first nonzero wavenumber makes the filter vacuous");
    }
    Spectrum phi_hat = wave.profile.spectrum();
    Spectrum kept = phi_hat;
    double removed_sq = 0.0;
    for (std::size_t k = 0; k < phi_hat.size(); ++k) {
        const double xi = g.xi(k);
        if (std::abs(xi) < h) {
            removed_sq += bin_weight(g, k) * std::pow(1.0 + xi * xi, model.s0()) *
                          std::norm(phi_hat[k]);
            kept[k] = 0.0;
        }
    }
    const double filter_distance = std::sqrt(removed_sq);
    const double phi_norm = sobolev_norm(g, phi_hat, model.s0());
    if (filter_distance > max_filter_distance_rel * phi_norm) {
        throw validation_error(
            "build_blowup_data: high-pass cut h removes " + std::to_string(filter_distance) +
            " of the profile (cap " + std::to_string(max_filter_distance_rel * phi_norm) + ")");
    }
    for (auto& z : kept) z *= lambda;
    GridFunction u0 = GridFunction::from_spectrum(g, kept);
    std::vector<double> w0(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) w0[i] = -wave.c * u0[i];
    SystemState state(u0, GridFunction(g, std::move(w0)), 0.0);
    return {std::move(state), filter_distance};
}

namespace {

GridFunction smooth_noise(const Grid& g, double s0, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spectrum spec(g.num_bins(), {0.0, 0.0});
    const double xi_cut = std::max(2.0, 0.1 * g.xi(g.num_bins() - 1));
    for (std::size_t k = 1; k + 1 < spec.size(); ++k) {
        const double xi = g.xi(k);
        const double envelope = std::exp(-(xi * xi) / (xi_cut * xi_cut));
        spec[k] = std::complex<double>(gauss(rng), gauss(rng)) * envelope;
    }
    GridFunction noise = GridFunction::from_spectrum(g, spec);
    const double norm = sobolev_norm(noise, s0);
    if (norm > 0.0) {
        for (double& v : noise.values()) v /= norm;
    }
    return noise;
}

} // namespace

StabilityReport stability_experiment(const PDEModel& model, double c,
                                     const Perturbation& perturbation, const Grid& grid,
                                     const StabilityOptions& opts) {
    require_admissible(model, c, "stability_experiment");
    const TravelingWave wave = solve_wave_fixed_point(model, c, grid, opts.solver);
    const double d_c = dee_from_wave(wave, model);

    GridFunction base = wave.profile;
    if (perturbation.highpass_h > 0.0) {
        base = build_blowup_data(wave, model, std::max(perturbation.lambda, 1.0 + 1.0e-12),
                                 perturbation.highpass_h)
                   .state.u;
        // undo the lambda baked into the construction; it is reapplied below
        for (double& v : base.values()) v /= std::max(perturbation.lambda, 1.0 + 1.0e-12);
    }
    GridFunction u0 = base;
    for (double& v : u0.values()) v *= perturbation.lambda;
    if (perturbation.epsilon != 0.0) {
        const GridFunction noise = smooth_noise(grid, model.s0(), perturbation.seed);
        for (std::size_t i = 0; i < u0.size(); ++i) {
            u0.values()[i] += perturbation.epsilon * noise[i];
        }
    }
    std::vector<double> w0(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
        w0[i] = -c * perturbation.lambda * base[i];
    }
    SystemState state0(u0, GridFunction(grid, std::move(w0)), 0.0);

    double dt = opts.dt;
    if (dt <= 0.0) dt = stable_step_bounds(grid, model, state0.u).suggested;
    const std::size_t total_steps =
        static_cast<std::size_t>(std::llround(opts.t_end / dt));
    std::size_t stride = opts.snapshot_stride;
    if (stride == 0) stride = std::max<std::size_t>(1, total_steps / 400);

    EvolveOptions evolve_opts;
    evolve_opts.snapshot_stride = stride;
    evolve_opts.blowup_factor = opts.blowup_factor;
    evolve_opts.diag_c = c;
    Trajectory traj = evolve(state0, model, dt, opts.t_end, evolve_opts);

    StabilityReport report(std::move(traj));
    report.c = c;
    report.perturbation = perturbation;
    report.t_end = opts.t_end;
    report.d_c = d_c;
    {
        // x-norm of the traveling-wave pair (phi, -c phi)
        std::vector<double> wphi(grid.n());
        for (std::size_t i = 0; i < grid.n(); ++i) wphi[i] = -c * wave.profile[i];
        report.wave_x_norm =
            x_norm(SystemState(wave.profile, GridFunction(grid, std::move(wphi)), 0.0), model);
    }

    for (std::size_t i = 0; i < report.trajectory.snapshots.size(); ++i) {
        const SystemState snap = report.trajectory.snapshot_state(i);
        if (!snap.u.all_finite() || !snap.w.all_finite()) break;
        const double dist = orbital_distance(snap, wave, model);
        report.distance_t.push_back(snap.t);
        report.distance.push_back(dist);
    }
    if (report.distance.empty()) {
        throw numerical_error("stability_experiment: no usable snapshots recorded");
    }
    report.initial_distance = report.distance.front();
    report.max_distance = *std::max_element(report.distance.begin(), report.distance.end());
    report.ratio = report.max_distance / std::max(report.initial_distance, 1.0e-300);

    // Sigma_-(c) conditions along the per-step series
    const auto& s = report.trajectory.series;
    bool all1 = true, all2 = true;
    double worst53 = 0.0;
    for (std::size_t i = 0; i < s.Ic.size(); ++i) {
        if (!std::isfinite(s.Ic[i]) || !std::isfinite(s.Q[i])) break;
        const bool cond1 = 2.0 * s.Ic[i] - s.Q[i] < 0.0;
        const bool cond2 = s.E[i] + c * s.M[i] < d_c;
        if (i == 0) {
            report.sigma_minus_initial_1 = cond1;
            report.sigma_minus_initial_2 = cond2;
        }
        all1 = all1 && cond1;
        all2 = all2 && cond2;
        if (cond1) {
            worst53 = std::max(worst53,
                               (model.p() + 1.0) / (model.p() - 1.0) * d_c - s.Ic[i]);
        }
    }
    report.sigma_minus_persisted = all1 && all2;
    report.lemma53_max_violation = worst53;

    if (report.trajectory.status == RunStatus::BlewUp) {
        report.outcome = StabilityOutcome::BlewUp;
        report.t_star = report.trajectory.t_star;
    } else if (report.ratio <= opts.stay_close_ratio ||
               report.max_distance <= opts.stay_close_abs_rel * report.wave_x_norm) {
        report.outcome = StabilityOutcome::StayedClose;
    } else {
        report.outcome = StabilityOutcome::Departed;
    }
    return report;
}

LevineSeries levine_monitor(const Trajectory& traj, const PDEModel& model) {
    const auto& s = traj.series;
    LevineSeries out;
    std::vector<double> t, h;
    if (!s.levine_H.empty()) {
        t = s.t;
        h = s.levine_H;
    } else {
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            const SystemState state = traj.snapshot_state(i);
            if (!state.u.all_finite()) break;
            const GridFunction v = primitive_x(state.u);
            t.push_back(state.t);
            h.push_back(0.5 * b_half_inv_norm_sq(v, model));
        }
    }
    while (!h.empty() && !std::isfinite(h.back())) {
        h.pop_back();
        t.pop_back();
    }
    if (h.size() < 3) return out;
    const double p = model.p();
    for (std::size_t i = 1; i + 1 < h.size(); ++i) {
        const double dt_l = t[i] - t[i - 1];
        const double dt_r = t[i + 1] - t[i];
        if (std::abs(dt_l - dt_r) > 1.0e-9 * std::max(dt_l, dt_r)) continue;
        const double h1 = (h[i + 1] - h[i - 1]) / (dt_l + dt_r);
        const double h2 = (h[i + 1] - 2.0 * h[i] + h[i - 1]) / (dt_l * dt_r);
        out.t.push_back(t[i]);
        out.H.push_back(h[i]);
        out.H_prime.push_back(h1);
        out.H_second.push_back(h2);
        out.condition.push_back(h[i] * h2 - (p + 3.0) / 4.0 * h1 * h1);
    }
    return out;
}

BlowupReport blowup_experiment(const PDEModel& model, double c, const Grid& grid,
                               const BlowupOptions& opts) {
    require_admissible(model, c, "blowup_experiment");
    const TravelingWave wave = solve_wave_fixed_point(model, c, grid, opts.solver);
    const double d_c = dee_from_wave(wave, model);
    const double h = opts.h > 0.0 ? opts.h : grid.xi(1);
    BlowupData data = build_blowup_data(wave, model, opts.lambda, h);

    const double e0 = energy(data.state, model);
    const double m0 = momentum(data.state, model);
    const double ic0 = functional_Ic(data.state.u, model, c);
    const double q0 = functional_Q(data.state.u, model.p());
    const double ecm0 = e0 + c * m0;
    const double cond0 = 2.0 * ic0 - q0;
    const bool pre_ok = (ecm0 < d_c) && (cond0 < 0.0);
    if (!pre_ok) {
        throw validation_error(
            "blowup_experiment: blow-up hypotheses fail for this data (E+cM - d = " +
            std::to_string(ecm0 - d_c) + ", 2I_c - Q = " + std::to_string(cond0) +
            "); enlarge the box or lambda");
    }

    double dt = opts.dt;
    if (dt <= 0.0) dt = stable_step_bounds(grid, model, data.state.u).suggested;

    EvolveOptions evolve_opts;
    evolve_opts.blowup_factor = opts.blowup_factor;
    evolve_opts.diag_c = c;
    evolve_opts.track_levine = true;
    evolve_opts.snapshot_stride = 0;
    Trajectory traj = evolve(data.state, model, dt, opts.t_end, evolve_opts);

    BlowupReport report(std::move(traj));
    report.c = c;
    report.d_c = d_c;
    report.filter_distance = data.filter_distance;
    report.energy_initial = e0;
    report.ecm_initial = ecm0;
    report.two_Ic_minus_Q_initial = cond0;
    report.preconditions_ok = pre_ok;

    const auto& s = report.trajectory.series;
    bool all = true;
    double worst53 = 0.0;
    for (std::size_t i = 0; i < s.Ic.size(); ++i) {
        if (!std::isfinite(s.Ic[i]) || !std::isfinite(s.Q[i])) break;
        const bool cond1 = 2.0 * s.Ic[i] - s.Q[i] < 0.0;
        const bool cond2 = s.E[i] + c * s.M[i] < d_c;
        all = all && cond1 && cond2;
        if (cond1) {
            worst53 = std::max(worst53,
                               (model.p() + 1.0) / (model.p() - 1.0) * d_c - s.Ic[i]);
        }
    }
    report.sigma_minus_persisted = all;
    report.lemma53_max_violation = worst53;
    report.levine = levine_monitor(report.trajectory, model);

    if (report.trajectory.status == RunStatus::BlewUp) {
        report.outcome = StabilityOutcome::BlewUp;
        report.t_star = report.trajectory.t_star;
    } else {
        report.outcome = StabilityOutcome::Departed;
    }
    return report;
}

std::string outcome_name(StabilityOutcome s) {
    switch (s) {
        case StabilityOutcome::StayedClose: return "StayedClose";
        case StabilityOutcome::Departed: return "Departed";
        case StabilityOutcome::BlewUp: return "BlewUp";
    }
    return "Unknown";
}

std::string convexity_name(Convexity c) {
    switch (c) {
        case Convexity::Convex: return "Convex";
        case Convexity::Concave: return "Concave";
        case Convexity::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

} // namespace nwl
