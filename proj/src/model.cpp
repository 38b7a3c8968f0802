#include "nwl/model.hpp"

#include <cmath>
#include <string>

#include "nwl/errors.hpp"

namespace nwl {

namespace {
constexpr double kVelocityGuard = 1.0e-9; // keeps gamma_c away from zero
}

PDEModel::PDEModel(SymbolSpec l_spec, SymbolSpec b_spec, double p, int sigma)
    : l_(std::move(l_spec)), b_(std::move(b_spec)), p_(p), sigma_(sigma) {
    if (!(p_ > 1.0)) {
        throw validation_error("model: p must be > 1");
    }
    if (sigma_ != 1 && sigma_ != -1) {
        throw validation_error("model: sigma must be +1 or -1");
    }
    rho_ = l_.order();
    r_ = -b_.order();
    if (r_ < 0.0) {
        throw validation_error("model: order of B must be <= 0 (r >= 0 violated)");
    }
    const bool case_i = rho_ > -2.0 && r_ + rho_ / 2.0 >= 1.0;
    const bool case_ii = rho_ <= -2.0 && r_ >= 2.0;
    if (!case_i && !case_ii) {
        throw validation_error(
            "model: parameter admissibility failed (need rho > -2 with r + rho/2 >= 1, "
            "or rho <= -2 with r >= 2); got rho = " + std::to_string(rho_) +
            ", r = " + std::to_string(r_));
    }
    if (sigma_ == -1 && rho_ < 0.0) {
        throw validation_error("model: sigma = -1 requires rho >= 0 (regime A)");
    }
    if (sigma_ == 1 && rho_ > 0.0) {
        throw validation_error("model: sigma = +1 requires rho <= 0 (regime B)");
    }
    regime_ = (sigma_ == -1) ? Regime::A : Regime::B;
    s0_ = (regime_ == Regime::A) ? (r_ + rho_) / 2.0 : r_ / 2.0;
    if (s0_ < 0.5 - 1.0e-12) {
        throw validation_error("model: s0 = " + std::to_string(s0_) + " < 1/2");
    }

    const CoercivityConstants cl = coercivity_constants(l_);
    const CoercivityConstants cb = coercivity_constants(b_);
    c1_sq_ = cl.low;
    c2_sq_ = cl.high;
    c3_sq_ = cb.low;
    c4_sq_ = cb.high;

    weak_stability_only_ = std::abs(s0_ - 0.5) < 1.0e-12;
    smoothness_warning_ = p_ < std::ceil(s0_) + 1.0 - 1.0e-12;
}

PDEModel build_model(const SymbolSpec& l_spec, const SymbolSpec& b_spec, double p, int sigma) {
    return PDEModel(l_spec, b_spec, p, sigma);
}

MultiplierTable PDEModel::wave_operator(const Grid& grid, double c) const {
    const double c2 = c * c;
    if (regime_ == Regime::A) {
        return MultiplierTable::from_function(
            grid, [&](double xi) { return (l_.eval(xi) - c2) / b_.eval(xi); });
    }
    return MultiplierTable::from_function(
        grid, [&](double xi) { return (c2 - l_.eval(xi)) / b_.eval(xi); });
}

RegimeInfo classify_regime(const PDEModel& model, double c) {
    const double c2 = c * c;
    RegimeInfo info;
    info.regime = model.regime();
    if (model.regime() == Regime::A) {
        info.velocity_bound_sq = model.c1_sq();
        info.admissible = c2 < model.c1_sq() - kVelocityGuard;
    } else {
        info.velocity_bound_sq = model.c2_sq();
        info.admissible = c2 > model.c2_sq() + kVelocityGuard;
    }
    return info;
}

void require_admissible(const PDEModel& model, double c, const char* where) {
    const RegimeInfo info = classify_regime(model, c);
    if (!info.admissible) {
        const char* rel = (info.regime == Regime::A) ? "c^2 < " : "c^2 > ";
        throw validation_error(std::string(where) +
                               ": velocity outside admissible range (need " + rel +
                               std::to_string(info.velocity_bound_sq) + ", got c = " +
                               std::to_string(c) + ")");
    }
}

std::string regime_name(Regime r) { return r == Regime::A ? "A" : "B"; }

} // namespace nwl
