#pragma once

#include "flatcrit/envelope.hpp"

namespace flatcrit {

/// Closed-form value of the criterion integral over the envelope's horizon:
/// integral of delta'^2 dt, summed piecewise. Divergence of the improper
/// integral certifies the unique-ergodicity hypothesis; the tool only reports
/// finite-horizon values and their growth.
double criterion_integral(const SystoleEnvelope& env);
double criterion_integral_to(const SystoleEnvelope& env, double t);

struct GrowthConstant {
    double value = 0;       // sup over [t0, T] of d'(t) - (1/2) log t
    double argmax = 0;
    bool stable = false;    // false when the sup sits at the horizon (still growing)
};

/// Fit of the sharpened excursion constant with coefficient exactly 1/2.
GrowthConstant cheung_eskin_C(const SystoleEnvelope& env, double t0);

/// Finite-horizon surrogate for the logarithmic-law statistic:
/// sup over [t0, T] of d'(t) / log t.
double log_law_stat(const SystoleEnvelope& env, double t0);

struct MasurSmillieFit {
    double k = 0;        // max of D * delta over gated samples
    int gated = 0;       // samples with D above the applicability gate sqrt(2/pi)
    int violations = 0;  // gated samples with D * delta > k0 (when k0 given)
};

/// Empirical fit of the constant in D <= K / delta, gated by D > sqrt(2/pi).
MasurSmillieFit masur_smillie_check(const std::vector<std::pair<double, double>>& delta_diameter,
                                    double k0 = -1);

struct ThicknessProfile {
    std::vector<double> t;      // strictly increasing grid
    std::vector<double> eps;    // > 0
    std::vector<int> components;
    std::vector<double> sum_diameters;
    std::vector<double> delta;  // > 0

    void check() const;
    static ThicknessProfile from_csv(const std::string& text);
};

/// Trapezoid quadrature of (eps^{-2} sum_D + (C-1)/delta)^{-2} on the grid.
double thickness_criterion(const ThicknessProfile& profile);

}  // namespace flatcrit
