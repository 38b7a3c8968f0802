#pragma once

#include <string>

#include "nwl/grid.hpp"
#include "nwl/symbol.hpp"

namespace nwl {

enum class Regime { A, B }; // A: rho >= 0, sigma = -1; B: rho <= 0, sigma = +1

// The pair (L, B) with exponent p and nonlinearity sign sigma, plus derived
// constants. L has symbol l(xi) of order rho; B has symbol b(xi) of order -r.
class PDEModel {
public:
    PDEModel(SymbolSpec l_spec, SymbolSpec b_spec, double p, int sigma);

    const SymbolSpec& l_spec() const { return l_; }
    const SymbolSpec& b_spec() const { return b_; }
    double p() const { return p_; }
    int sigma() const { return sigma_; }

    double rho() const { return rho_; }
    double r() const { return r_; }
    double s0() const { return s0_; }
    Regime regime() const { return regime_; }

    double c1_sq() const { return c1_sq_; }
    double c2_sq() const { return c2_sq_; }
    double c3_sq() const { return c3_sq_; }
    double c4_sq() const { return c4_sq_; }

    // Remark 4.5 boundary case s0 = 1/2: only a weaker stability notion is
    // available; such models run identically but carry this flag.
    bool weak_stability_only() const { return weak_stability_only_; }
    // p below ceil(s0)+1 breaks the smoothness assumption behind the Cauchy
    // theory; evolution runs warn rather than refuse.
    bool smoothness_warning() const { return smoothness_warning_; }

    // Table of (l(xi) - c^2) / b(xi) in regime A, (c^2 - l(xi)) / b(xi) in B;
    // strictly positive for admissible c.
    MultiplierTable wave_operator(const Grid& grid, double c) const;

private:
    SymbolSpec l_, b_;
    double p_;
    int sigma_;
    double rho_, r_, s0_;
    Regime regime_;
    double c1_sq_, c2_sq_, c3_sq_, c4_sq_;
    bool weak_stability_only_ = false;
    bool smoothness_warning_ = false;
};

PDEModel build_model(const SymbolSpec& l_spec, const SymbolSpec& b_spec, double p, int sigma);

struct RegimeInfo {
    Regime regime;
    // Admissible velocities: c^2 < c1^2 in regime A, c^2 > c2^2 in regime B.
    double velocity_bound_sq;
    bool admissible;
};

RegimeInfo classify_regime(const PDEModel& model, double c);
void require_admissible(const PDEModel& model, double c, const char* where);

std::string regime_name(Regime r);

} // namespace nwl
