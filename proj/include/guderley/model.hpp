#pragma once

// Closed-form layer of the converging-shock phase plane: gas parameters,
// the post-shock jump state, and the functions F, G, D of the similarity
// ODE dC/dV = F/G together with their partial derivatives.

#include <cmath>
#include <string>

#include "guderley/errors.hpp"

namespace guderley {

struct PhasePoint {
    double V = 0.0;  // scaled velocity
    double C = 0.0;  // scaled sound speed, >= 0 for physical states
};

// z is the canonical similarity parameter; lambda and the a-coefficients
// are derived from it.
struct GasConfig {
    double gamma = 0.0;
    int m = 0;  // 1 cylindrical, 2 spherical
    double z = 0.0;
    double lambda = 0.0;  // m*gamma*z + 1
    double a1 = 0.0;      // 1 + m(gamma-1)/2
    double a2 = 0.0;      // [m(gamma-1) + m z gamma (gamma-3)]/2
    double a3 = 0.0;      // m z gamma (gamma-1)/2
    double q = 0.0;       // 2(lambda-1)/(m+1)
};

/// Largest admissible similarity parameter: the two sonic triple points
/// coincide at z_max and move apart below it. The expanded form
/// 1/(gamma + 2 + 2 sqrt(2 gamma)) equals 1/(sqrt(gamma)+sqrt(2))^2 and
/// avoids squaring a rounded sum (exact 1/8 at gamma = 2).
inline double z_max(double gamma) {
    return 1.0 / (gamma + 2.0 + 2.0 * std::sqrt(2.0 * gamma));
}

inline void validate_gamma_m(double gamma, int m) {
    if (!(gamma > 1.0) || !(gamma <= 3.0))
        throw_domain("gamma = " + std::to_string(gamma) + " violates gamma in (1, 3]");
    if (m != 1 && m != 2)
        throw_domain("m = " + std::to_string(m) + " violates m in {1, 2}");
}

inline GasConfig make_config(double gamma, int m, double z) {
    validate_gamma_m(gamma, m);
    if (!(z > 0.0) || !(z <= z_max(gamma)))
        throw_domain("z = " + std::to_string(z) + " violates z in (0, z_M(gamma)] with z_M = " +
                     std::to_string(z_max(gamma)));
    GasConfig cfg;
    cfg.gamma = gamma;
    cfg.m = m;
    cfg.z = z;
    cfg.lambda = m * gamma * z + 1.0;
    cfg.a1 = 1.0 + m * (gamma - 1.0) / 2.0;
    cfg.a2 = (m * (gamma - 1.0) + m * z * gamma * (gamma - 3.0)) / 2.0;
    cfg.a3 = m * z * gamma * (gamma - 1.0) / 2.0;
    cfg.q = 2.0 * (cfg.lambda - 1.0) / (m + 1);
    return cfg;
}

struct JumpState {
    PhasePoint p1;
    double R1 = 0.0;
};

/// Post-shock state behind a strong shock running into quiescent gas,
/// from the Rankine-Hugoniot relations with upstream (V,C,R) = (0,0,1).
inline JumpState jump_state(double gamma) {
    if (!(gamma > 1.0) || !(gamma <= 3.0))
        throw_domain("gamma = " + std::to_string(gamma) + " violates gamma in (1, 3]");
    JumpState s;
    s.p1.V = -2.0 / (gamma + 1.0);
    s.p1.C = std::sqrt(2.0 * gamma * (gamma - 1.0)) / (gamma + 1.0);
    s.R1 = (gamma + 1.0) / (gamma - 1.0);
    return s;
}

inline void check_not_singular(double V) {
    if (std::abs(1.0 + V) < 1e-14)
        throw_domain("evaluation at V = " + std::to_string(V) + " hits the 1+V = 0 singularity");
}

struct FGDValues {
    double F = 0.0, G = 0.0, D = 0.0;
};

inline FGDValues eval_fgd(const GasConfig& cfg, PhasePoint p) {
    check_not_singular(p.V);
    const double opv = 1.0 + p.V;
    const double C2 = p.C * p.C;
    FGDValues r;
    r.D = opv * opv - C2;
    r.G = C2 * ((cfg.m + 1) * p.V + 2.0 * cfg.m * cfg.z) - p.V * opv * (cfg.lambda + p.V);
    r.F = p.C * (C2 * (1.0 + cfg.m * cfg.z / opv) - cfg.a1 * opv * opv + cfg.a2 * opv - cfg.a3);
    return r;
}

struct Partials {
    double F_C = 0.0, F_V = 0.0, G_C = 0.0, G_V = 0.0;
};

// Generic partial derivatives of F and G. At sonic points (C = 1+V) these
// reduce to the simplified closed forms used in the series construction.
inline Partials eval_partials(const GasConfig& cfg, PhasePoint p) {
    check_not_singular(p.V);
    const double opv = 1.0 + p.V;
    const double C2 = p.C * p.C;
    Partials d;
    d.G_C = 2.0 * p.C * ((cfg.m + 1) * p.V + 2.0 * cfg.m * cfg.z);
    d.G_V = (cfg.m + 1) * C2 - 3.0 * p.V * p.V - 2.0 * (cfg.lambda + 1.0) * p.V - cfg.lambda;
    d.F_C = 3.0 * C2 * (1.0 + cfg.m * cfg.z / opv) - cfg.a1 * opv * opv + cfg.a2 * opv - cfg.a3;
    d.F_V = p.C * (-C2 * cfg.m * cfg.z / (opv * opv) - 2.0 * cfg.a1 * opv + cfg.a2);
    return d;
}

struct FGFactors {
    double g1 = 0.0;  // (m+1)V + 2mz
    double g2 = 0.0;  // V(1+V)(lambda+V)
    double f1 = 0.0;  // 1 + mz/(1+V)
    double f2 = 0.0;  // a1(1+V)^2 - a2(1+V) + a3
    double q = 0.0;   // g1 f2 - f1 g2, a cubic polynomial in V
};

// Decomposition G = C^2 g1 - g2 and F = C (C^2 f1 - f2). The combination
// q(V) = g1 f2 - f1 g2 is polynomial because g2 carries the (1+V) factor
// that cancels the pole of f1.
inline FGFactors fg_decomposition(const GasConfig& cfg, double V) {
    check_not_singular(V);
    const double opv = 1.0 + V;
    FGFactors r;
    r.g1 = (cfg.m + 1) * V + 2.0 * cfg.m * cfg.z;
    r.g2 = V * opv * (cfg.lambda + V);
    r.f1 = 1.0 + cfg.m * cfg.z / opv;
    r.f2 = cfg.a1 * opv * opv - cfg.a2 * opv + cfg.a3;
    r.q = r.g1 * r.f2 - V * (cfg.lambda + V) * (opv + cfg.m * cfg.z);
    return r;
}

}  // namespace guderley
