#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwl/evolution.hpp"
#include "nwl/functionals.hpp"
#include "nwl/model.hpp"
#include "nwl/waves.hpp"

namespace nwl {

// --- orbital distance -------------------------------------------------------

struct OrbitalDistanceResult {
    double distance = 0.0;
    double shift = 0.0; // y minimizing the distance
};

// inf over translates y of ||u - phi_c(.-y)||_{H^{s0}} + ||w + c phi_c(.-y)||_{H^{s0-rho/2}}.
// Coarse search on the shift lattice (refine subdivisions per grid cell, via
// zero-padded cross-correlation), then a local quadratic fit.
OrbitalDistanceResult orbital_distance_detailed(const SystemState& state,
                                                const TravelingWave& wave,
                                                const PDEModel& model,
                                                std::size_t refine = 1);
double orbital_distance(const SystemState& state, const TravelingWave& wave,
                        const PDEModel& model, std::size_t refine = 1);

// --- d(c) curves ------------------------------------------------------------

enum class Convexity { Convex, Concave, Indeterminate };

struct DcSample {
    double c = 0.0;
    double m1 = 0.0;
    double d = 0.0;
    double d_prime = 0.0;        // central differences
    double d_prime_from_M = 0.0; // Lemma 4.3: M(Phi_c)
    double d_second = 0.0;       // central differences (Richardson fallback)
    Convexity convexity = Convexity::Indeterminate;
};

struct DcCurve {
    std::vector<DcSample> samples;
    double c_step = 0.0;
    double noise_floor = 0.0;
};

struct DcCurveOptions {
    WaveSolverOptions solver;
    std::size_t workers = 0; // 0 -> hardware concurrency
};

DcCurve dc_curve(const PDEModel& model, const std::vector<double>& c_values, const Grid& grid,
                 const DcCurveOptions& opts = {});
std::vector<double> uniform_c_grid(double c_min, double c_max, double c_step);

// --- closed-form thresholds -------------------------------------------------

struct BoussinesqWindow {
    double c_sq_low = 0.0;  // (p-1)/4
    double c_sq_high = 1.0;
    bool empty = false;     // p >= 5 leaves no stability window
};

BoussinesqWindow threshold_boussinesq(double p);
double threshold_klein_gordon(double p); // (p-1)/(p+3)

// --- blow-up construction and experiments -----------------------------------

struct BlowupData {
    SystemState state;
    double filter_distance = 0.0; // ||(v0)_x - phi_c||_{H^{s0}}
};

// U0 = (lambda (v0)_x, -c lambda (v0)_x) with v0_hat = phi_hat / (i xi) above
// the high-pass cut |xi| >= h.
BlowupData build_blowup_data(const TravelingWave& wave, const PDEModel& model, double lambda,
                             double h, double max_filter_distance_rel = 0.5);

enum class StabilityOutcome { StayedClose, Departed, BlewUp };

struct Perturbation {
    double lambda = 1.0;   // scaling factor, > 0
    double epsilon = 0.0;  // additive H^{s0}-normalized noise amplitude
    std::uint64_t seed = 0;
    double highpass_h = 0.0; // > 0: scale the |xi| >= h filtered profile instead
};

struct StabilityOptions {
    double t_end = 50.0;
    double dt = 0.0; // 0 -> suggested stable step
    std::size_t snapshot_stride = 0; // 0 -> aims at ~400 snapshots
    double stay_close_ratio = 10.0;
    // distances below this fraction of ||Phi_c||_X count as "stayed close"
    // regardless of the ratio (the unperturbed run divides noise by noise)
    double stay_close_abs_rel = 1.0e-4;
    double blowup_factor = 1.0e6;
    WaveSolverOptions solver;
};

struct StabilityReport {
    double c = 0.0;
    Perturbation perturbation;
    double t_end = 0.0;
    double d_c = 0.0;
    double wave_x_norm = 0.0;
    double initial_distance = 0.0;
    double max_distance = 0.0;
    double ratio = 1.0;
    StabilityOutcome outcome = StabilityOutcome::StayedClose;
    double t_star = 0.0; // meaningful for BlewUp
    bool sigma_minus_initial_1 = false; // 2 I_c - Q < 0 at t = 0
    bool sigma_minus_initial_2 = false; // E + cM < d(c) at t = 0
    bool sigma_minus_persisted = false; // both conditions held at every recorded step
    double lemma53_max_violation = 0.0; // max of (p+1)/(p-1) d(c) - I_c over steps
    std::vector<double> distance_t;
    std::vector<double> distance;
    Trajectory trajectory;

    explicit StabilityReport(Trajectory traj) : trajectory(std::move(traj)) {}
};

StabilityReport stability_experiment(const PDEModel& model, double c,
                                     const Perturbation& perturbation, const Grid& grid,
                                     const StabilityOptions& opts = {});

struct LevineSeries {
    std::vector<double> t; // interior sample times (centered differences)
    std::vector<double> H;
    std::vector<double> H_prime;
    std::vector<double> H_second;
    std::vector<double> condition; // H H'' - (p+3)/4 (H')^2
};

LevineSeries levine_monitor(const Trajectory& traj, const PDEModel& model);

struct BlowupOptions {
    double lambda = 1.05;
    double h = 0.0; // 0 -> first nonzero wavenumber
    double t_end = 100.0;
    double dt = 0.0;
    double blowup_factor = 1.0e6;
    WaveSolverOptions solver;
};

struct BlowupReport {
    double c = 0.0;
    double d_c = 0.0;
    double filter_distance = 0.0;
    double energy_initial = 0.0;
    double ecm_initial = 0.0;
    double two_Ic_minus_Q_initial = 0.0;
    bool preconditions_ok = false;
    StabilityOutcome outcome = StabilityOutcome::Departed;
    double t_star = 0.0;
    bool sigma_minus_persisted = false;
    double lemma53_max_violation = 0.0;
    LevineSeries levine;
    Trajectory trajectory;

    explicit BlowupReport(Trajectory traj) : trajectory(std::move(traj)) {}
};

// Theorem 4.8 / 5.1 construction: solve the wave, build the filtered scaled
// data, verify the blow-up hypotheses (run refused if they fail), evolve.
BlowupReport blowup_experiment(const PDEModel& model, double c, const Grid& grid,
                               const BlowupOptions& opts = {});

std::string outcome_name(StabilityOutcome s);
std::string convexity_name(Convexity c);

} // namespace nwl
