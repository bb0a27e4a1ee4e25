#pragma once

// Machine-checkable forms of the barrier polynomials and slope
// inequalities used to confine trajectories in the phase plane. These are
// falsification tests on sampled grids, not interval proofs.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "guderley/shooting.hpp"

namespace guderley {

enum class BarrierName { Bk, BkM, B1, B32, Bs, Delta, SlopeP6, SlopeZ1, SlopeZ2, C8Concavity };

inline const char* barrier_name(BarrierName n) {
    switch (n) {
        case BarrierName::Bk: return "Bk";
        case BarrierName::BkM: return "BkM";
        case BarrierName::B1: return "B1";
        case BarrierName::B32: return "B32";
        case BarrierName::Bs: return "Bs";
        case BarrierName::Delta: return "Delta";
        case BarrierName::SlopeP6: return "SlopeP6";
        case BarrierName::SlopeZ1: return "SlopeZ1";
        case BarrierName::SlopeZ2: return "SlopeZ2";
        case BarrierName::C8Concavity: return "C8Concavity";
    }
    return "unknown";
}

struct BarrierReport {
    BarrierName name = BarrierName::Bk;
    double domain_lo = 0.0, domain_hi = 0.0;  // V or z interval sampled
    int samples = 0;
    double min_margin = 0.0;  // smallest signed margin; > 0 means the claim held
    bool passed = false;
    std::string detail;
};

inline constexpr double kMarginFloor = 1e-12;

inline BarrierReport make_report(BarrierName name, double lo, double hi, int samples,
                                 double min_margin, std::string detail = {}) {
    BarrierReport r;
    r.name = name;
    r.domain_lo = lo;
    r.domain_hi = hi;
    r.samples = samples;
    r.min_margin = min_margin;
    r.passed = min_margin > kMarginFloor;
    r.detail = std::move(detail);
    return r;
}

/// The parabola-comparison polynomial: 2/sqrt(-kappa V) * [F + (1/2)
/// sqrt(kappa/-V) G] evaluated on C = sqrt(-kappa V).
inline double frak_b(double V, const GasConfig& cfg, double kappa) {
    check_not_singular(V);
    if (!(kappa > 0.0)) throw_domain("frak_b requires kappa > 0");
    const double g = cfg.gamma;
    const int m = cfg.m;
    return (m - 1 - m * g) * V * V +
           (-2.0 - m * (g - 1.0) + m * g * (g - 2.0) * cfg.z + (m - 1) * kappa) * V +
           2.0 * m * kappa * cfg.z / (1.0 + V) - 1.0 - m * g * cfg.z;
}

/// Line-comparison function for the B_s = -sqrt(gamma/2) V barrier:
/// F + sqrt(gamma/2) G = -m sqrt(gamma/2) V^2 frak_b_s on that line.
inline double frak_b_s(double V, const GasConfig& cfg) {
    check_not_singular(V);
    const double g = cfg.gamma;
    return (-g + 0.5) * V + cfg.z * g * V / (2.0 * (1.0 + V)) +
           (g * cfg.z - 1.0) * (g - 1.0) / 2.0 - cfg.z * g;
}

/// Explicit upper bound delta(V1; z) for log C(V1; gamma, z, P6), valid for
/// gamma in (1,2] and z in [z_m, z_g].
inline double delta_bound(double gamma, int m, double z) {
    validate_gamma_m(gamma, m);
    if (gamma > 2.0) throw_domain("delta_bound requires gamma in (1, 2]");
    const ParameterWindows w = parameter_windows(gamma, m);
    if (!(z >= w.z_m * (1.0 - 1e-12)) || !(z <= *w.z_g * (1.0 + 1e-12)))
        throw_domain("delta_bound requires z in [z_m, z_g]");
    const GasConfig cfg = make_config(gamma, m, z);
    const CriticalPoints cp = critical_points(cfg);
    const double V1 = cp.P1.V, V6 = cp.P6.V;
    const double mm = m;
    const double den = 2.0 * mm * z - mm - 1.0;  // < 0
    const double t1 = ((mm * mm - mm) * z + (mm + 1.0)) / (den * (mm + 1.0)) *
                      std::log(((mm + 1.0) * V6 + 2.0 * mm * z) / ((mm + 1.0) * V1 + 2.0 * mm * z));
    const double t2 = mm * z / den * std::log((1.0 + V1) / (1.0 + V6));
    return t1 + t2 + std::log(1.0 + V6);
}

/// C8 C8'' + (C8')^2, strictly negative on (0, z_M); the concavity input to
/// the upper-solution arguments.
inline double c8_concavity(double gamma, double z) {
    const C8Derivatives d = c8_derivatives(gamma, z);
    return d.C8 * d.second + d.first * d.first;
}

/// Slope inequalities at the triple points. P6: c1 < (1+V6)/(2 V6) for
/// gamma in (1,2], z in [z_g, z_M]. P8: at z = z_1 (or z_2) the slope lies
/// below the barrier parabola's, checked in the equivalent positive form
/// -kappa G_C/V8 + (2 kappa/C8)(F_C - G_V) - 4 F_V > 0.
inline BarrierReport slope_inequalities(const GasConfig& cfg, TriplePoint which) {
    const ParameterWindows w = parameter_windows(cfg.gamma, cfg.m);
    if (which == TriplePoint::P6) {
        if (cfg.gamma > 2.0) throw_domain("P6 slope inequality requires gamma in (1, 2]");
        if (!(cfg.z >= *w.z_g * (1.0 - 1e-12)))
            throw_domain("P6 slope inequality requires z in [z_g, z_M]");
        const CriticalPoints cp = critical_points(cfg);
        const SlopeRoots s = sonic_slopes(cfg, TriplePoint::P6);
        const double bound = (1.0 + cp.P6.V) / (2.0 * cp.P6.V);
        return make_report(BarrierName::SlopeP6, cfg.z, cfg.z, 1, bound - s.c1_neg,
                           "c1 < (1+V6)/(2V6)");
    }
    double kappa = 0.0;
    BarrierName name;
    if (cfg.gamma > w.gamma_star && cfg.gamma <= w.gamma_1) {
        kappa = 1.0;
        name = BarrierName::SlopeZ1;
        if (!w.z_1 || std::abs(cfg.z - *w.z_1) > 1e-12)
            throw_domain("P8 slope inequality requires z = z_1(gamma)");
    } else if (cfg.gamma > w.gamma_1) {
        kappa = 1.5;
        name = BarrierName::SlopeZ2;
        if (!w.z_2 || std::abs(cfg.z - *w.z_2) > 1e-12)
            throw_domain("P8 slope inequality requires z = z_2(gamma)");
    } else {
        throw_domain("P8 slope inequality requires gamma > gamma_star");
    }
    const CriticalPoints cp = critical_points(cfg);
    const Partials d = eval_partials(cfg, cp.P8);
    const SlopeRoots s = sonic_slopes(cfg, TriplePoint::P8);
    const double positive_form =
        -kappa * d.G_C / cp.P8.V + 2.0 * kappa / cp.P8.C * (d.F_C - d.G_V) - 4.0 * d.F_V;
    const double slope_margin = -1.0 / (2.0 * std::sqrt(-cp.P8.V)) - s.c1_neg;
    return make_report(name, cfg.z, cfg.z, 1, std::min(positive_form, slope_margin),
                       "equivalent positive form and direct slope margin");
}

namespace detail {

// Margins over the open interval (V_lo, V_hi): barriers hold strictly in
// the interior, with equality possible at the endpoints (P1 sits on B_s at
// gamma = 2 and on B_kM at gamma = gamma_star).
inline double interp_barrier_margin(const Trajectory& traj, double V_lo, double V_hi,
                                    bool barrier_is_lower, double kappa_or_slope, bool is_line,
                                    int& samples) {
    double min_margin = std::numeric_limits<double>::infinity();
    samples = 0;
    for (const TrajectoryNode& n : traj.nodes) {
        if (n.V <= V_lo + 1e-12 || n.V >= V_hi - 1e-12) continue;
        const double B = is_line ? -std::sqrt(kappa_or_slope) * n.V
                                 : std::sqrt(std::max(0.0, -kappa_or_slope * n.V));
        const double margin = barrier_is_lower ? n.C - B : B - n.C;
        min_margin = std::min(min_margin, margin);
        ++samples;
    }
    if (samples == 0) min_margin = 0.0;
    return min_margin;
}

}  // namespace detail

/// Pointwise comparison of a computed trajectory against every barrier
/// curve applicable to its regime.
inline std::vector<BarrierReport> check_trajectory_barriers(const Trajectory& traj) {
    const GasConfig& cfg = traj.exp.cfg;
    const ParameterWindows w = parameter_windows(cfg.gamma, cfg.m);
    const CriticalPoints cp = critical_points(cfg);
    std::vector<BarrierReport> reports;
    int samples = 0;

    if (traj.side == Side::Left) {
        const double V1 = cp.P1.V;
        if (cfg.gamma <= 2.0 && traj.exp.which == TriplePoint::P6 && w.z_g &&
            cfg.z >= *w.z_g * (1.0 - 1e-12)) {
            const double k = k_of(cfg.gamma, cfg.z);
            const double m =
                detail::interp_barrier_margin(traj, V1, cp.P6.V, true, k, false, samples);
            reports.push_back(make_report(BarrierName::Bk, V1, cp.P6.V, samples, m,
                                          "lower barrier sqrt(-k(gamma,z) V)"));
        }
        if (cfg.gamma <= w.gamma_star) {
            const double kM = k_at_zmax(cfg.gamma);
            const double m =
                detail::interp_barrier_margin(traj, V1, cp.P6.V, false, kM, false, samples);
            reports.push_back(make_report(BarrierName::BkM, V1, cp.P6.V, samples, m,
                                          "upper barrier sqrt(-k(gamma,z_M) V)"));
        }
        if (cfg.gamma >= 2.0) {
            // domain can be empty once C8(z) is large enough; the claim is
            // vacuous there and the exclusion holds trivially
            const double V_hi = -std::sqrt(2.0 / cfg.gamma) * cp.P8.C;
            if (V_hi > V1 + 1e-9) {
                const double m = detail::interp_barrier_margin(traj, V1, V_hi, true,
                                                               cfg.gamma / 2.0, true, samples);
                reports.push_back(make_report(BarrierName::Bs, V1, V_hi, samples, m,
                                              "lower barrier -sqrt(gamma/2) V"));
            }
        }
    } else {
        const double V_star = traj.exp.star.V;
        const bool p6_regime =
            traj.exp.which == TriplePoint::P6 && cfg.gamma <= 2.0 && w.z_g && cfg.z > *w.z_g;
        if (p6_regime || (w.z_1 && cfg.z > *w.z_1 && cfg.gamma <= w.gamma_1)) {
            const double m =
                detail::interp_barrier_margin(traj, V_star, 0.0, false, 1.0, false, samples);
            reports.push_back(
                make_report(BarrierName::B1, V_star, 0.0, samples, m, "upper barrier sqrt(-V)"));
        } else if (cfg.gamma > w.gamma_1 && w.z_2 && cfg.z > *w.z_2) {
            const double m =
                detail::interp_barrier_margin(traj, V_star, 0.0, false, 1.5, false, samples);
            reports.push_back(make_report(BarrierName::B32, V_star, 0.0, samples, m,
                                          "upper barrier sqrt(-3V/2)"));
        }
    }
    return reports;
}

/// Grid-sampled sign checks of the barrier comparison functions over their
/// stated (V, z) domains for one gas. Margins are signed so that positive
/// means the paper's strict inequality held at every sample.
inline std::vector<BarrierReport> verify_barrier_signs(double gamma, int m, int n_per_axis = 1000) {
    validate_gamma_m(gamma, m);
    const ParameterWindows w = parameter_windows(gamma, m);
    const JumpState js = jump_state(gamma);
    std::vector<BarrierReport> reports;
    const int nz = std::max(8, n_per_axis / 32);

    auto v_grid_min = [&](BarrierName name, double z_lo, double z_hi, auto v_range,
                          auto value, bool want_positive, const char* note) {
        double min_margin = std::numeric_limits<double>::infinity();
        int count = 0;
        for (int iz = 0; iz <= nz; ++iz) {
            const double z = z_lo + (z_hi - z_lo) * iz / nz;
            const GasConfig cfg = make_config(gamma, m, std::min(z, w.z_M));
            const auto [V_lo, V_hi] = v_range(cfg);
            if (!(V_hi - V_lo > 1e-9)) continue;  // interval collapsed (e.g. V6 -> V1 at z_m)
            for (int iv = 0; iv < n_per_axis; ++iv) {
                // stop short of open endpoints
                const double V = V_lo + (V_hi - V_lo) * (iv + 0.0) / n_per_axis;
                const double val = value(cfg, V);
                min_margin = std::min(min_margin, want_positive ? val : -val);
                ++count;
            }
        }
        reports.push_back(make_report(name, z_lo, z_hi, count, min_margin, note));
    };

    if (gamma <= 2.0) {
        // frak_b with kappa = k(gamma, z): > 0 on [V1, V6)
        v_grid_min(
            BarrierName::Bk, w.z_m, w.z_M,
            [&](const GasConfig& cfg) {
                return std::pair{js.p1.V, critical_points(cfg).P6.V};
            },
            [&](const GasConfig& cfg, double V) {
                return frak_b(V, cfg, k_of(cfg.gamma, cfg.z));
            },
            true, "frak_B_k > 0 on [V1, V6), z in [z_m, z_M]");
        // frak_b with kappa = k(gamma, z_M) dominates and stays positive;
        // the domination margin degenerates to equality exactly at z_M, so
        // that endpoint stays out of the sampled grid
        v_grid_min(
            BarrierName::BkM, w.z_m, w.z_M * (1.0 - 1e-9),
            [&](const GasConfig& cfg) {
                return std::pair{js.p1.V, critical_points(cfg).P6.V};
            },
            [&](const GasConfig& cfg, double V) {
                return std::min(frak_b(V, cfg, k_at_zmax(cfg.gamma)),
                                frak_b(V, cfg, k_at_zmax(cfg.gamma)) -
                                    frak_b(V, cfg, k_of(cfg.gamma, cfg.z)));
            },
            true, "frak_B_kM >= frak_B_k > 0 on [V1, V6), z in [z_m, z_M)");
        // B1 negative on the right of P6 for z in (z_g, z_M]
        v_grid_min(
            BarrierName::B1, *w.z_g * (1 + 1e-9), w.z_M,
            [&](const GasConfig& cfg) {
                const PhasePoint p6 = critical_points(cfg).P6;
                return std::pair{-p6.C * p6.C * (1.0 - 1e-9), -1e-9};
            },
            [&](const GasConfig& cfg, double V) { return frak_b(V, cfg, 1.0); }, false,
            "frak_B_1 < 0 on (-C6^2, 0), z in (z_g, z_M]");
    }
    if (gamma >= 2.0) {
        // frak_b_s positive left of -sqrt(2/gamma) C8
        v_grid_min(
            BarrierName::Bs, w.z_M * 1e-3, w.z_M,
            [&](const GasConfig& cfg) {
                const PhasePoint p8 = critical_points(cfg).P8;
                return std::pair{js.p1.V, -std::sqrt(2.0 / gamma) * p8.C * (1.0 + 1e-12)};
            },
            [&](const GasConfig& cfg, double V) { return frak_b_s(V, cfg); }, true,
            "frak_B > 0 on [V1, -sqrt(2/gamma) C8), z in (0, z_M]");
    }
    if (w.z_1) {
        v_grid_min(
            BarrierName::B1, *w.z_1 * (1 + 1e-9), w.z_M,
            [&](const GasConfig& cfg) {
                const PhasePoint p8 = critical_points(cfg).P8;
                return std::pair{-p8.C * p8.C * (1.0 - 1e-9), -1e-9};
            },
            [&](const GasConfig& cfg, double V) { return frak_b(V, cfg, 1.0); }, false,
            "frak_B_1 < 0 on (-C8^2, 0), z in (z_1, z_M]");
        // left-side positivity on (z_tilde_m, z_1]
        v_grid_min(
            BarrierName::B1, z_tilde_m(gamma) * (1 + 1e-9), *w.z_1,
            [&](const GasConfig& cfg) {
                const PhasePoint p8 = critical_points(cfg).P8;
                return std::pair{js.p1.V, -p8.C * p8.C * (1.0 - 1e-12)};
            },
            [&](const GasConfig& cfg, double V) { return frak_b(V, cfg, 1.0); }, true,
            "frak_B_1 > 0 on [V1, -C8^2), z in (z~_m, z_1]");
    }
    if (w.z_2) {
        v_grid_min(
            BarrierName::B32, *w.z_2 * (1 + 1e-9), w.z_M,
            [&](const GasConfig& cfg) {
                const PhasePoint p8 = critical_points(cfg).P8;
                return std::pair{-2.0 / 3.0 * p8.C * p8.C * (1.0 - 1e-9), -1e-9};
            },
            [&](const GasConfig& cfg, double V) { return frak_b(V, cfg, 1.5); }, false,
            "frak_B_3/2 < 0 on (-(2/3) C8^2, 0), z in (z_2, z_M]");
        v_grid_min(
            BarrierName::B32, z_hat_m(gamma) * (1 + 1e-9), *w.z_2,
            [&](const GasConfig& cfg) {
                const PhasePoint p8 = critical_points(cfg).P8;
                return std::pair{js.p1.V, -2.0 / 3.0 * p8.C * p8.C * (1.0 - 1e-12)};
            },
            [&](const GasConfig& cfg, double V) { return frak_b(V, cfg, 1.5); }, true,
            "frak_B_3/2 > 0 on [V1, -(2/3) C8^2), z in (z^_m, z_2]");
    }

    // Exclusion geometry and concavity, sampled in z only.
    if (gamma < w.gamma_star) {
        double min_margin = std::numeric_limits<double>::infinity();
        const double z_hi = w.z_M * (1.0 - 1e-9);
        for (int i = 0; i <= n_per_axis; ++i) {
            const double z = w.z_m + (z_hi - w.z_m) * i / n_per_axis;
            const GasConfig cfg = make_config(gamma, m, z);
            const CriticalPoints cp = critical_points(cfg);
            min_margin = std::min(
                min_margin, cp.P8.C - std::sqrt(-k_at_zmax(gamma) * cp.P6.V));
        }
        reports.push_back(make_report(BarrierName::BkM, w.z_m, z_hi, n_per_axis + 1, min_margin,
                                      "sqrt(-k(gamma,z_M) V6(z)) < C8(z) on [z_m, z_M)"));
    }
    if (gamma > 2.0) {
        // strict only above gamma = 2: at gamma = 2 the combination is
        // identically zero and P6 lies on the barrier line itself
        double min_margin = std::numeric_limits<double>::infinity();
        const double z_lo = w.z_M * 1e-3, z_hi = w.z_M * (1.0 - 1e-9);
        for (int i = 0; i <= n_per_axis; ++i) {
            const double z = z_lo + (z_hi - z_lo) * i / n_per_axis;
            const GasConfig cfg = make_config(gamma, m, z);
            const CriticalPoints cp = critical_points(cfg);
            min_margin =
                std::min(min_margin, -(cp.P6.V + std::sqrt(2.0 / gamma) * cp.P8.C));
        }
        reports.push_back(make_report(BarrierName::Bs, z_lo, z_hi, n_per_axis + 1, min_margin,
                                      "V6(z) + sqrt(2/gamma) C8(z) < 0 on (0, z_M)"));
    }
    {
        double min_margin = std::numeric_limits<double>::infinity();
        const double z_lo = w.z_M * 1e-3, z_hi = w.z_M * (1.0 - 1e-9);
        for (int i = 0; i <= n_per_axis; ++i) {
            const double z = z_lo + (z_hi - z_lo) * i / n_per_axis;
            min_margin = std::min(min_margin, -c8_concavity(gamma, z));
        }
        reports.push_back(make_report(BarrierName::C8Concavity, z_lo, z_hi, n_per_axis + 1,
                                      min_margin, "C8 C8'' + (C8')^2 < 0 on (0, z_M)"));
    }
    if (gamma <= 2.0) {
        const double margin = std::log(js.p1.C) - delta_bound(gamma, m, *w.z_g);
        reports.push_back(make_report(BarrierName::Delta, *w.z_g, *w.z_g, 1, margin,
                                      "delta(V1; z_g) < log C1"));
    }
    return reports;
}

}  // namespace guderley
