#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nwl/functionals.hpp"
#include "nwl/grid_function.hpp"
#include "nwl/model.hpp"

namespace nwl {

// Per-mode exact solve of the linearized system u_hat' = i xi w_hat,
// w_hat' = i xi l(xi) u_hat over one step dt: a rotation at frequency
// omega = |xi| sqrt(l(xi)). The xi = 0 mode (and the Nyquist mode, whose
// derivative is zeroed) reduce to the identity.
struct LinearPropagator {
    std::vector<double> cos_wdt;       // cos(omega dt)
    std::vector<double> sin_xi_over_w; // sin(omega dt) * xi / omega
    std::vector<double> sin_xi_l_over_w; // sin(omega dt) * xi * l / omega
};

LinearPropagator linear_propagator(const Grid& grid, const PDEModel& model, double dt);

enum class RunStatus { Completed, BlewUp, Aborted };

struct StepSeries {
    std::vector<double> t;
    std::vector<double> E;
    std::vector<double> M;
    std::vector<double> x_norm;
    std::vector<double> sup_norm;
    std::vector<double> Ic;     // only when EvolveOptions::diag_c is set
    std::vector<double> Q;      // only when EvolveOptions::diag_c is set
    std::vector<double> levine_H; // only when EvolveOptions::track_levine
};

struct Snapshot {
    double t;
    std::vector<double> u;
    std::vector<double> w;
};

struct Trajectory {
    Grid grid;
    double dt = 0.0;
    StepSeries series;
    std::vector<Snapshot> snapshots;
    RunStatus status = RunStatus::Completed;
    double t_star = 0.0;       // last stable time for BlewUp runs
    std::string abort_reason;

    explicit Trajectory(const Grid& g) : grid(g) {}

    SystemState snapshot_state(std::size_t i) const;
};

struct EvolveOptions {
    std::size_t snapshot_stride = 0; // 0 -> no snapshots beyond first/last
    double blowup_factor = 1.0e6;    // threshold on x_norm growth
    bool dealias = true;
    bool linear_only = false;        // drop the nonlinear term (test hook)
    std::optional<double> diag_c;    // record I_c and Q per step
    bool track_levine = false;       // record H = 1/2 ||B^{-1/2}v||^2 per step
};

// Suggested step and the refusal bound derived from the collocation estimate
// max_k |xi_k b(xi_k)| * p * max|u0|^{p-1}.
struct StepBounds {
    double suggested;
    double refuse_above;
};
StepBounds stable_step_bounds(const Grid& grid, const PDEModel& model, const GridFunction& u0);

Trajectory evolve(const SystemState& u0, const PDEModel& model, double dt, double t_end,
                  const EvolveOptions& opts = {});

// Max relative drift of (E, M) over the recorded (finite) samples.
std::pair<double, double> conserved_drift(const Trajectory& traj);

// Spectral antiderivative: v with v_x = u and zero mean; u must have zero mean.
GridFunction primitive_x(const GridFunction& u);

} // namespace nwl
