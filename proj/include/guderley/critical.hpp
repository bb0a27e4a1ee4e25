#pragma once

// Critical points of the phase-plane system (triple points on the sonic
// line, stationary double points) and the parameter thresholds that carve
// the admissible z-windows for each adiabatic index.

#include <cmath>
#include <optional>
#include <string>

#include "guderley/model.hpp"

namespace guderley {

/// w(z) = sqrt(1 - 2(gamma+2)z + (gamma-2)^2 z^2) = V8 - V6. Evaluated in
/// the factored form (1 - z/z_M)(1 - z (gamma+2-2 sqrt(2 gamma))) and
/// snapped to zero at the double root, where the square root would
/// otherwise amplify rounding into ~1e-8.
inline double w_of(double gamma, double z) {
    const double root = 2.0 * std::sqrt(2.0 * gamma);
    double f1 = 1.0 - z * (gamma + 2.0 + root);
    const double f2 = 1.0 - z * (gamma + 2.0 - root);
    if (std::abs(f1) < 1e-13) f1 = 0.0;  // z indistinguishable from z_M
    if (f1 < 0.0)
        throw_anomaly("negative radicand in w(z): z = " + std::to_string(z) + " exceeds z_M");
    return std::sqrt(f1 * f2);
}

struct CriticalPoints {
    PhasePoint P0, P1, P2, P3, P4, P5, P6, P7, P8, P9;
    double w = 0.0;
    double R1 = 0.0;
};

inline CriticalPoints critical_points(const GasConfig& cfg) {
    CriticalPoints cp;
    cp.w = w_of(cfg.gamma, cfg.z);
    const JumpState js = jump_state(cfg.gamma);
    cp.P1 = js.p1;
    cp.R1 = js.R1;
    cp.P0 = {0.0, 0.0};
    cp.P2 = {-1.0, 0.0};
    cp.P3 = {-cfg.lambda, 0.0};

    const double V6 = (-1.0 + (cfg.gamma - 2.0) * cfg.z - cp.w) / 2.0;
    const double V8 = (-1.0 + (cfg.gamma - 2.0) * cfg.z + cp.w) / 2.0;
    cp.P6 = {V6, 1.0 + V6};
    cp.P7 = {V6, -(1.0 + V6)};
    cp.P8 = {V8, 1.0 + V8};
    cp.P9 = {V8, -(1.0 + V8)};

    // Double points: V4 = V5 = -2 lambda / (gamma + 1 + m(gamma-1)), with
    // C4 = H(V4) on the G = 0 branch.
    const double V4 = -2.0 * cfg.lambda / (cfg.gamma + 1.0 + cfg.m * (cfg.gamma - 1.0));
    const double h2 = V4 * (1.0 + V4) * (cfg.lambda + V4) / ((cfg.m + 1) * V4 + 2.0 * cfg.m * cfg.z);
    const double H = std::sqrt(h2);
    cp.P4 = {V4, H};
    cp.P5 = {V4, -H};
    return cp;
}

// gamma_1 = 1 + sqrt(2): P1 lies on C = sqrt(-V).
inline double gamma_one() { return 1.0 + std::sqrt(2.0); }

/// k(gamma, z_M) = gamma / (2 + sqrt(2 gamma)); slope constant of the
/// steepest left-side barrier parabola.
inline double k_at_zmax(double gamma) { return gamma / (2.0 + std::sqrt(2.0 * gamma)); }

/// k(gamma, z) = -(1+V6)^2 / V6 = -C6^2 / V6.
inline double k_of(double gamma, double z) {
    const double V6 = (-1.0 + (gamma - 2.0) * z - w_of(gamma, z)) / 2.0;
    const double C6 = 1.0 + V6;
    return -C6 * C6 / V6;
}

namespace detail {

// gamma_star solves C1(g)^2 = -k(g, z_M) V1(g) on [1.6, 1.8]; no closed
// form, so bracketed bisection to 1e-13, computed once per process.
inline double gamma_star_residual(double g) {
    const double C1sq = 2.0 * g * (g - 1.0) / ((g + 1.0) * (g + 1.0));
    const double V1 = -2.0 / (g + 1.0);
    return C1sq + k_at_zmax(g) * V1;
}

inline double compute_gamma_star() {
    double a = 1.6, b = 1.8;
    double fa = gamma_star_residual(a);
    while (b - a > 1e-13) {
        const double mid = 0.5 * (a + b);
        const double fm = gamma_star_residual(mid);
        if ((fa < 0.0) == (fm < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

inline double gamma_star() {
    static const double value = detail::compute_gamma_star();
    return value;
}

struct ParameterWindows {
    double z_M = 0.0;
    double z_m = 0.0;
    std::optional<double> z_g;  // gamma in (1, 2]
    std::optional<double> z_1;  // gamma in (gamma_star, gamma_1]
    std::optional<double> z_2;  // gamma in (gamma_1, 3]
    double gamma_star = 0.0;
    double gamma_1 = 0.0;
};

inline ParameterWindows parameter_windows(double gamma, int m) {
    validate_gamma_m(gamma, m);
    ParameterWindows w;
    w.z_M = z_max(gamma);
    w.z_m = (gamma - 1.0) / ((2.0 * gamma - 1.0) * (gamma + 1.0));
    w.gamma_star = gamma_star();
    w.gamma_1 = gamma_one();
    if (gamma <= 2.0) {
        if (m == 1) {
            w.z_g = (std::sqrt(gamma * gamma + (gamma - 1.0) * (gamma - 1.0)) - gamma) /
                    (gamma * (gamma - 1.0));
        } else {
            const double b = 2.0 * gamma * gamma - gamma + 1.0;
            const double c = 4.0 * gamma * (gamma - 1.0) + 8.0 / 3.0;
            w.z_g = (std::sqrt(b * b + 2.0 * gamma * (gamma - 1.0) * c) - b) / (gamma * c);
        }
    }
    if (gamma > w.gamma_star && gamma <= w.gamma_1)
        w.z_1 = (std::sqrt(5.0) - 1.0) / (2.0 * (1.0 + std::sqrt(5.0) + gamma));
    if (gamma > w.gamma_1)
        w.z_2 = (std::sqrt(33.0) - 3.0) / (6.0 + 2.0 * std::sqrt(33.0) + 4.0 * gamma);
    return w;
}

/// The z value at which C8(z) = c; used for the auxiliary anchors
/// z-tilde_m (c = sqrt(2-sqrt(2))) and z-hat_m (c = sqrt(3)/2).
inline double z_for_c8(double gamma, double c) {
    return c * (1.0 - c) / (gamma * (1.0 - c) + 2.0 * c);
}

inline double z_tilde_m(double gamma) { return z_for_c8(gamma, std::sqrt(2.0 - std::sqrt(2.0))); }
inline double z_hat_m(double gamma) { return z_for_c8(gamma, std::sqrt(3.0) / 2.0); }

struct C8Derivatives {
    double C8 = 0.0;
    double first = 0.0;
    double second = 0.0;
};

// C8(z) = (1 + (gamma-2) z + w(z))/2 and its z-derivatives through w;
// the second derivative carries the w^-3 singularity at z_M.
inline C8Derivatives c8_derivatives(double gamma, double z) {
    if (!(z > 0.0) || !(z < z_max(gamma)))
        throw_domain("c8_derivatives requires z in (0, z_M); w(z_M) = 0 makes C8'' singular");
    C8Derivatives d;
    const double w = w_of(gamma, z);
    const double g2 = gamma - 2.0;
    d.C8 = (1.0 + g2 * z + w) / 2.0;
    const double wp = (g2 * g2 * z - (gamma + 2.0)) / w;
    d.first = (g2 + wp) / 2.0;
    d.second = -4.0 * gamma / (w * w * w);
    return d;
}

}  // namespace guderley
