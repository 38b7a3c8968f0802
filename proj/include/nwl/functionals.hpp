#pragma once

#include <utility>

#include "nwl/grid_function.hpp"
#include "nwl/model.hpp"

namespace nwl {

struct TravelingWave;

// One state (u, w) of the first-order system u_t = w_x, w_t = Lu_x + B(g(u))_x.
struct SystemState {
    GridFunction u;
    GridFunction w;
    double t = 0.0;

    SystemState(GridFunction u_, GridFunction w_, double t_ = 0.0)
        : u(std::move(u_)), w(std::move(w_)), t(t_) {
        require_same_grid(u.grid(), w.grid(), "system state");
    }
};

struct FunctionalReport {
    double Ic = 0.0;
    double Q = 0.0;
    double E = 0.0;
    double M = 0.0;
    double EcM = 0.0;
    double x_norm = 0.0;
    double two_Ic_minus_Q = 0.0;
};

// I_c(psi) = 1/2 * integral (l(xi) - c^2) b^{-1}(xi) |psi_hat|^2
double functional_Ic(const GridFunction& psi, const PDEModel& model, double c);
// J_c = -I_c
double functional_Jc(const GridFunction& psi, const PDEModel& model, double c);
// Q(psi) = integral |psi|^{p+1}
double functional_Q(const GridFunction& psi, double p);

double energy(const SystemState& state, const PDEModel& model);
double momentum(const SystemState& state, const PDEModel& model);

// ||u||_{H^{s0}} + ||w||_{H^{s0 - rho/2}}
double x_norm(const SystemState& state, const PDEModel& model);

FunctionalReport functional_report(const SystemState& state, const PDEModel& model, double c);

// Sigma_-(c) membership: (E + cM < d_c, 2 I_c(u) - Q(u) < 0).
std::pair<bool, bool> sigma_minus_check(const SystemState& state, const PDEModel& model,
                                        double c, double d_c);

// ||B^{-1/2} psi||^2_{L2}; M(Phi_c) = -c * this for a traveling-wave state.
double b_half_inv_norm_sq(const GridFunction& psi, const PDEModel& model);

// d(c) = (p-1)/(p+1) * I_c(phi_c); rejects non-converged waves and waves whose
// Euler-Lagrange pairing 2 I_c = Q fails beyond tolerance.
double dee_from_wave(const TravelingWave& wave, const PDEModel& model);
// m1 = (Q(phi_c) / 2^{(p+1)/(p-1)})^{(p-1)/(p+1)}
double m1_from_wave(const TravelingWave& wave, const PDEModel& model);

} // namespace nwl
