#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nwl/errors.hpp"
#include "nwl/functionals.hpp"
#include "nwl/stability.hpp"
#include "nwl/waves.hpp"
#include "test_util.hpp"

using namespace nwl;
using test_util::rel_diff;

namespace {

SystemState wave_state(const TravelingWave& wave, double lambda = 1.0) {
    const Grid& g = wave.profile.grid();
    std::vector<double> u(g.n()), w(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        u[i] = lambda * wave.profile[i];
        w[i] = -wave.c * lambda * wave.profile[i];
    }
    return SystemState(GridFunction(g, std::move(u)), GridFunction(g, std::move(w)), 0.0);
}

// independent oracle: scan every grid shift by direct evaluation
double brute_force_distance(const SystemState& state, const TravelingWave& wave,
                            const PDEModel& model) {
    const Grid& g = state.u.grid();
    const std::size_t n = g.n();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> du(n), dw(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double phi = wave.profile[(i + n - j) % n];
            du[i] = state.u[i] - phi;
            dw[i] = state.w[i] + wave.c * phi;
        }
        const double d = sobolev_norm(GridFunction(g, std::move(du)), model.s0()) +
                         sobolev_norm(GridFunction(g, std::move(dw)),
                                      model.s0() - model.rho() / 2.0);
        best = std::min(best, d);
    }
    return best;
}

} // namespace

TEST_CASE("orbital distance vanishes on the translate family") {
    const Grid g = make_grid(512, 80.0);
    const PDEModel m = boussinesq_model(3.0);
    const TravelingWave wave = solve_wave_fixed_point(m, 0.4, g);

    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> y_dist(0.0, 80.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double y0 = y_dist(rng);
        const GridFunction shifted = spectral_shift(wave.profile, y0);
        std::vector<double> w(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) w[i] = -wave.c * shifted[i];
        const SystemState st(shifted, GridFunction(g, std::move(w)), 0.0);
        CHECK(orbital_distance(st, wave, m) <= 1e-8);
    }
}

TEST_CASE("orbital distance bounded by the perturbation norm") {
    const Grid g = make_grid(512, 80.0);
    const PDEModel m = boussinesq_model(3.0);
    const TravelingWave wave = solve_wave_fixed_point(m, 0.4, g);

    const GridFunction bump = GridFunction::sample(g, [&](double x) {
        return 0.01 * std::exp(-0.25 * std::pow(x - 30.0, 2));
    });
    std::vector<double> u(g.n()), w(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        u[i] = wave.profile[i] + bump[i];
        w[i] = -wave.c * wave.profile[i];
    }
    const SystemState st(GridFunction(g, u), GridFunction(g, w), 0.0);
    CHECK(orbital_distance(st, wave, m) <= sobolev_norm(bump, m.s0()) + 1e-8);
}

TEST_CASE("orbital distance of a scaled wave matches the scaling gap") {
    const Grid g = make_grid(256, 60.0);
    const PDEModel m = boussinesq_model(3.0);
    const TravelingWave wave = solve_wave_fixed_point(m, 0.3, g);
    const SystemState st = wave_state(wave, 1.1);

    const double dist = orbital_distance(st, wave, m);
    const double expected = 0.1 * x_norm(wave_state(wave), m);
    CHECK(std::abs(dist - expected) < 1e-6);

    // brute-force scan over all grid shifts is never beaten by more than roundoff
    const double brute = brute_force_distance(st, wave, m);
    CHECK(dist <= brute + 1e-10);
    CHECK(rel_diff(dist, brute) < 1e-9);
}

TEST_CASE("orbital distance refinement is lower semicontinuous") {
    const Grid g = make_grid(256, 60.0);
    const PDEModel m = boussinesq_model(3.0);
    const TravelingWave wave = solve_wave_fixed_point(m, 0.3, g);

    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 5; ++trial) {
        const GridFunction noise = test_util::random_field(g, rng, 4.0);
        std::vector<double> u(g.n()), w(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) {
            u[i] = wave.profile[i] + 0.02 * noise[i];
            w[i] = -wave.c * wave.profile[i];
        }
        const SystemState st(GridFunction(g, u), GridFunction(g, w), 0.0);
        const double d1 = orbital_distance(st, wave, m, 1);
        const double d2 = orbital_distance(st, wave, m, 2);
        CHECK(d2 <= d1 + 1e-10);
    }
}

TEST_CASE("dc_curve matches the Boussinesq scaling law") {
    const Grid g = make_grid(512, 80.0);
    const PDEModel m = boussinesq_model(3.0);
    const auto c_values = uniform_c_grid(0.0, 0.4, 0.02);
    const DcCurve curve = dc_curve(m, c_values, g, {});

    const double d0 = curve.samples.front().d;
    for (const auto& s : curve.samples) {
        CHECK(rel_diff(s.d / d0, std::pow(1.0 - s.c * s.c, 1.5)) < 1e-3);
        // pointwise d3 identity d = 2^{2/(p-1)} (p-1)/(p+1) m1^{(p+1)/(p-1)}
        CHECK(rel_diff(s.d, 2.0 * 0.5 * s.m1 * s.m1) < 1e-8);
    }
    // Lemma 4.3: central-difference d' matches M(Phi_c) at interior samples
    for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i) {
        CHECK(rel_diff(curve.samples[i].d_prime, curve.samples[i].d_prime_from_M) < 1e-3);
    }
    // d(c) is decreasing and concave-then-convex; here all samples sit below
    // the p=3 convexity threshold c^2 = 1/2, hence Concave
    for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i) {
        CHECK(curve.samples[i].convexity == Convexity::Concave);
    }
}

TEST_CASE("dc_curve convexity flip for Boussinesq p=2") {
    const Grid g = make_grid(512, 160.0); // p=2 profiles are twice as wide
    const PDEModel m = boussinesq_model(2.0);
    const auto c_values = uniform_c_grid(0.38, 0.62, 0.02);
    const DcCurve curve = dc_curve(m, c_values, g, {});

    // flip at c^2 = (p-1)/4, i.e. c = 0.5
    double flip_c = 0.0;
    for (std::size_t i = 1; i + 2 < curve.samples.size(); ++i) {
        if (curve.samples[i].convexity == Convexity::Concave &&
            curve.samples[i + 1].convexity == Convexity::Convex) {
            flip_c = 0.5 * (curve.samples[i].c + curve.samples[i + 1].c);
        }
    }
    CHECK(flip_c > 0.0);
    CHECK(std::abs(flip_c - 0.5) <= 0.02 + 1e-12);
}

TEST_CASE("dc_curve input validation") {
    const Grid g = make_grid(256, 60.0);
    const PDEModel m = boussinesq_model(3.0);
    CHECK_THROWS_AS(dc_curve(m, {0.0, 0.1}, g, {}), validation_error);
    CHECK_THROWS_AS(dc_curve(m, {0.0, 0.1, 0.3}, g, {}), validation_error);
    CHECK_THROWS_AS(dc_curve(m, {0.8, 0.9, 1.0}, g, {}), validation_error);
}

TEST_CASE("closed-form thresholds are exact") {
    const auto w2 = threshold_boussinesq(2.0);
    CHECK(w2.c_sq_low == 0.25);
    CHECK(w2.c_sq_high == 1.0);
    CHECK_FALSE(w2.empty);

    CHECK(threshold_klein_gordon(2.0) == 0.2);
    CHECK(threshold_klein_gordon(3.0) == 1.0 / 3.0);

    const auto w5 = threshold_boussinesq(5.0);
    CHECK(w5.empty);

    CHECK_THROWS_AS(threshold_boussinesq(1.0), validation_error);
    CHECK_THROWS_AS(threshold_klein_gordon(0.5), validation_error);
}

TEST_CASE("build_blowup_data construction") {
    const Grid g = make_grid(1024, 200.0);
    const PDEModel m = klein_gordon_model(3.0);
    const TravelingWave wave = solve_wave_fixed_point(m, 0.1, g);

    SUBCASE("rejects lambda <= 1 and vacuous h") {
        CHECK_THROWS_AS(build_blowup_data(wave, m, 1.0, g.xi(1)), validation_error);
        CHECK_THROWS_AS(build_blowup_data(wave, m, 1.05, 0.5 * g.xi(1)), validation_error);
    }
    SUBCASE("rejects h that removes too much of the profile") {
        CHECK_THROWS_AS(build_blowup_data(wave, m, 1.05, 5.0), validation_error);
    }
    SUBCASE("construction approaches the scaled wave as lambda -> 1, box -> inf") {
        const BlowupData data = build_blowup_data(wave, m, 1.0 + 1e-9, g.xi(1));
        // u0 = lambda * highpass(phi): distance to phi is the reported filter norm
        std::vector<double> diff(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) {
            diff[i] = data.state.u[i] / (1.0 + 1e-9) - wave.profile[i];
        }
        CHECK(rel_diff(sobolev_norm(GridFunction(g, diff), m.s0()), data.filter_distance) <
              1e-6);
        // doubling the box halves the removed mean-mode mass
        const Grid g2 = make_grid(2048, 400.0);
        const TravelingWave wave2 = solve_wave_fixed_point(m, 0.1, g2);
        const BlowupData data2 = build_blowup_data(wave2, m, 1.0 + 1e-9, g2.xi(1));
        CHECK(data2.filter_distance < data.filter_distance);
    }
    SUBCASE("momentum lower bound of the construction") {
        // -cM(U0) > 2c^2/(1-c^2) (p+1)/(p-1) d(c) for lambda = 1.05
        const BlowupData data = build_blowup_data(wave, m, 1.05, g.xi(1));
        const double c = 0.1;
        const double d_c = dee_from_wave(wave, m);
        const double lhs = -c * momentum(data.state, m);
        const double rhs = 2.0 * c * c / (1.0 - c * c) * 2.0 * d_c;
        CHECK(lhs > rhs);
    }
}

TEST_CASE("blowup data lies in Sigma_- on a large box") {
    // box large enough that the mean-mode filtering does not spoil E + cM < d
    const Grid g = make_grid(4096, 1600.0);
    const PDEModel m = klein_gordon_model(3.0);
    const TravelingWave wave = solve_wave_fixed_point(m, 0.1, g);
    const double d_c = dee_from_wave(wave, m);
    const BlowupData data = build_blowup_data(wave, m, 1.05, g.xi(1));
    const auto conds = sigma_minus_check(data.state, m, 0.1, d_c);
    CHECK(conds.first);
    CHECK(conds.second);
}

TEST_CASE("stability_experiment: unperturbed wave stays put") {
    const Grid g = make_grid(512, 100.0);
    const PDEModel m = klein_gordon_model(3.0);
    StabilityOptions opts;
    opts.t_end = 5.0;
    opts.dt = 0.02;
    const StabilityReport rep = stability_experiment(m, 0.5, Perturbation{}, g, opts);
    CHECK(rep.outcome == StabilityOutcome::StayedClose);
    CHECK(rep.max_distance <= 1e-5 * rep.wave_x_norm);
    CHECK(rep.ratio >= 1.0 - 1e-12);
}

TEST_CASE("stability_experiment: supercritical velocity stays close") {
    const Grid g = make_grid(512, 100.0);
    const PDEModel m = klein_gordon_model(3.0);
    StabilityOptions opts;
    opts.t_end = 20.0;
    opts.dt = 0.02;
    Perturbation pert;
    pert.lambda = 1.01;
    const StabilityReport rep = stability_experiment(m, 0.8, pert, g, opts);
    CHECK(rep.outcome == StabilityOutcome::StayedClose);
    CHECK(rep.ratio <= 10.0);
}

TEST_CASE("stability_experiment: subcritical velocity blows up inside Sigma_-") {
    const Grid g = make_grid(512, 100.0);
    const PDEModel m = klein_gordon_model(3.0);
    StabilityOptions opts;
    opts.t_end = 50.0;
    opts.dt = 0.02;
    Perturbation pert;
    pert.lambda = 1.05;
    const StabilityReport rep = stability_experiment(m, 0.1, pert, g, opts);
    CHECK(rep.outcome == StabilityOutcome::BlewUp);
    CHECK(rep.t_star > 0.0);
    CHECK(rep.t_star < 50.0);
    CHECK(rep.sigma_minus_initial_1);
    CHECK(rep.sigma_minus_initial_2);
    CHECK(rep.sigma_minus_persisted);
    // Lemma 5.3: (p+1)/(p-1) d(c) < I_c whenever 2I_c - Q < 0
    CHECK(rep.lemma53_max_violation <= 1e-9);
}

TEST_CASE("levine monitor on a zero trajectory") {
    const Grid g = make_grid(256, 40.0);
    const PDEModel m = klein_gordon_model(3.0);
    const SystemState zero(GridFunction::zeros(g), GridFunction::zeros(g), 0.0);
    EvolveOptions opts;
    opts.track_levine = true;
    const Trajectory traj = evolve(zero, m, 0.01, 0.5, opts);
    const LevineSeries series = levine_monitor(traj, m);
    REQUIRE(!series.H.empty());
    for (double h : series.H) CHECK(h == 0.0);
    for (double c : series.condition) CHECK(c == 0.0);
}

TEST_CASE("blowup_experiment refuses data violating the hypotheses") {
    // on a short box the mean-mode filtering pushes E + cM above d(c)
    const Grid g = make_grid(512, 100.0);
    const PDEModel m = klein_gordon_model(3.0);
    BlowupOptions opts;
    opts.lambda = 1.05;
    CHECK_THROWS_AS(blowup_experiment(m, 0.1, g, opts), validation_error);
}

TEST_CASE("blowup_experiment: Theorem 5.1(ii) run with Levine positivity") {
    const Grid g = make_grid(4096, 1600.0);
    const PDEModel m = klein_gordon_model(3.0);
    BlowupOptions opts;
    opts.lambda = 1.05;
    opts.t_end = 40.0;
    opts.dt = 0.02;
    const BlowupReport rep = blowup_experiment(m, 0.1, g, opts);
    CHECK(rep.preconditions_ok);
    CHECK(rep.outcome == StabilityOutcome::BlewUp);
    CHECK(rep.sigma_minus_persisted);
    CHECK(rep.lemma53_max_violation <= 1e-9);

    // H'' > 0 on a sustained suffix of the pre-threshold samples
    const auto& h2 = rep.levine.H_second;
    REQUIRE(h2.size() > 20);
    std::size_t first_pos = h2.size();
    for (std::size_t i = h2.size(); i-- > 0;) {
        if (h2[i] <= 0.0) break;
        first_pos = i;
    }
    CHECK(first_pos < h2.size() - 10); // positive over at least the last 10 samples
    CHECK(first_pos <= static_cast<std::size_t>(0.9 * h2.size()));
}
