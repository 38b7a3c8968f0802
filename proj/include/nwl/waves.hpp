#pragma once

#include <cstddef>

#include "nwl/grid_function.hpp"
#include "nwl/model.hpp"

namespace nwl {

struct WaveDiagnostics {
    double residual_l2 = 0.0;
    std::size_t iterations = 0;
    double stabilizing_factor_final = 1.0; // Petviashvili M at the last iterate
    double Ic = 0.0;
    double Q = 0.0;
    double m1 = 0.0;
    double d = 0.0;
    double tail_mass = 0.0;
};

// A traveling-wave profile phi_c with velocity c and its diagnostics.
// Profiles are centered (maximum at the box midpoint) and nonnegative.
struct TravelingWave {
    double c = 0.0;
    GridFunction profile;
    WaveDiagnostics diag;
    bool converged = false;
    double residual_l2 = 0.0; // duplicate of diag.residual_l2 for quick access

    TravelingWave(double c_, GridFunction profile_) : c(c_), profile(std::move(profile_)) {}
};

struct WaveSolverOptions {
    std::size_t max_iter = 2000;
    double tol = 1.0e-12;          // L2 update and |M-1| at convergence
    double gamma_exp = 0.0;        // 0 -> use p/(p-1)
    double initial_width = 0.0;    // 0 -> from the operator symbol near xi = 0
    bool dealias = true;
};

// L2 norm of (L - c^2 I) B^{-1} phi + sigma |phi|^{p-1} phi.
double ode_residual(const GridFunction& phi, const PDEModel& model, double c);

// Closed-form sech profiles of the three classical examples.
TravelingWave exact_boussinesq_wave(double p, double c, const Grid& grid);
TravelingWave exact_improved_boussinesq_wave(double p, double c, const Grid& grid);
TravelingWave exact_double_dispersion_wave(double p, double c, double a1, double a2,
                                           const Grid& grid, Regime regime);

// Models matching the exact families, for diagnostics and evolution runs.
PDEModel boussinesq_model(double p);
PDEModel improved_boussinesq_model(double p);
PDEModel double_dispersion_model(double p, double a1, double a2, Regime regime);
// L = I, B = (1 - d^2/dx^2)^{-1}: the regularized Klein-Gordon family.
PDEModel klein_gordon_model(double p);

// Stabilized (Petviashvili) fixed point for A phi = |phi|^{p-1} phi with
// A = (l - c^2)/b in regime A and (c^2 - l)/b in regime B.
TravelingWave solve_wave_fixed_point(const PDEModel& model, double c, const Grid& grid,
                                     const WaveSolverOptions& opts = {});

struct MinimizerOptions {
    std::size_t max_iter = 40000;
    double tol = 1.0e-13;     // relative change of the objective
    double q_target = 1.0;    // constraint Q(psi) = q_target
    double initial_step = 1.0;
};

struct MinimizerResult {
    GridFunction psi;
    double m1 = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// inf { I_c(psi) : Q(psi) = q_target } by preconditioned projected descent
// (J_c in regime B).
MinimizerResult minimize_m1(const PDEModel& model, double c, const Grid& grid,
                            const MinimizerOptions& opts = {});

} // namespace nwl
