#pragma once

// Conversion of a converged phase-plane solution into similarity profiles
// V(x), C(x), R(x) on x in [-1, 0) and physical fields u, c, rho with the
// collapsing shock path r_shock = (-t)^(1/lambda).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "guderley/barriers.hpp"

namespace guderley {

namespace detail {

// Cubic Hermite interpolation over the trajectory's (V, C, lnx) nodes,
// using the exact ODE slopes stored at the nodes. The ln(-x) <-> V map is
// strictly monotone, so per-interval Newton inverts it safely.
struct HermiteTable {
    std::vector<double> V, C, lnx, dCdV, dLdV;  // dLdV = d ln(-x)/dV

    static double hermite(double t, double h, double y0, double y1, double d0, double d1) {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
    }

    static double hermite_deriv(double t, double h, double y0, double y1, double d0, double d1) {
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 +
                (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * d1) / h;
    }

    std::size_t interval_by_lnx(double L) const {
        // lnx strictly decreasing in V
        std::size_t lo = 0, hi = lnx.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (lnx[mid] >= L)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    struct Row {
        double V = 0.0, C = 0.0;
    };

    Row at_lnx(double L) const {
        const std::size_t i = interval_by_lnx(L);
        const double h = V[i + 1] - V[i];
        // invert lnx(V) = L with Newton on the Hermite cubic, bisection fallback
        double t = (lnx[i + 1] - lnx[i]) != 0.0 ? (L - lnx[i]) / (lnx[i + 1] - lnx[i]) : 0.5;
        t = std::clamp(t, 0.0, 1.0);
        double ta = 0.0, tb = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double f = hermite(t, h, lnx[i], lnx[i + 1], dLdV[i], dLdV[i + 1]) - L;
            if (f > 0.0)
                ta = t;  // lnx decreasing in t
            else
                tb = t;
            const double fp = hermite_deriv(t, h, lnx[i], lnx[i + 1], dLdV[i], dLdV[i + 1]);
            double tn = t - f / (fp * h);
            if (!(tn > ta && tn < tb)) tn = 0.5 * (ta + tb);
            if (std::abs(tn - t) < 1e-16) {
                t = tn;
                break;
            }
            t = tn;
        }
        Row r;
        r.V = V[i] + t * h;
        r.C = hermite(t, h, C[i], C[i + 1], dCdV[i], dCdV[i + 1]);
        return r;
    }
};

inline double lnx_slope_or_limit(const ShootResult& res, const TrajectoryNode& n) {
    const GasConfig& cfg = res.left.exp.cfg;
    if (std::abs(n.V - res.left.exp.star.V) < 1e-12)
        return -cfg.lambda * sonic_x_ratio(res.left.exp);
    const FGDValues f = eval_fgd(cfg, {n.V, n.C});
    return -cfg.lambda * f.D / f.G;
}

inline HermiteTable merge_trajectories(const ShootResult& res) {
    HermiteTable tab;
    auto push = [&](const TrajectoryNode& n) {
        if (!tab.V.empty() && !(n.V > tab.V.back())) return;
        tab.V.push_back(n.V);
        tab.C.push_back(n.C);
        tab.lnx.push_back(n.lnx);
        tab.dCdV.push_back(n.dCdV);
        tab.dLdV.push_back(lnx_slope_or_limit(res, n));
    };
    for (const auto& n : res.left.nodes) push(n);
    for (const auto& n : res.right.nodes) push(n);
    return tab;
}

// Fallback density path: d lnR / d ln(-x) = [(m+1)V + G/D] / (lambda (1+V))
// integrated on the uniform ln(-x) grid, anchored at R(-1) = R1. Used when
// the entropy-relation exponent degenerates, and as a cross-check
// otherwise. G/D is 0/0 at the sonic point; near it the removable limit
// along the analytic branch replaces the raw quotient.
inline std::vector<double> continuity_density(const ShootResult& res, const HermiteTable& tab,
                                              const std::vector<double>& x,
                                              const std::vector<double>& V,
                                              const std::vector<double>& C, double R1) {
    const GasConfig& cfg = res.left.exp.cfg;
    const double V_star = res.left.exp.star.V;
    const double gd_limit = 1.0 / sonic_x_ratio(res.left.exp);
    auto rhs = [&](double Vv, double Cv) {
        const double gd = std::abs(Vv - V_star) < 1e-4
                              ? gd_limit
                              : [&] {
                                    const FGDValues f = eval_fgd(cfg, {Vv, Cv});
                                    return f.G / f.D;
                                }();
        return ((cfg.m + 1) * Vv + gd) / (cfg.lambda * (1.0 + Vv));
    };
    const std::size_t rows = x.size();
    std::vector<double> R(rows);
    R[0] = R1;
    double lnR = std::log(R1);
    for (std::size_t i = 1; i < rows; ++i) {
        const double La = std::log(-x[i - 1]), Lb = std::log(-x[i]);
        const auto mid = tab.at_lnx(0.5 * (La + Lb));
        const double fa = rhs(V[i - 1], C[i - 1]);
        const double fm = rhs(mid.V, mid.C);
        const double fb = rhs(V[i], C[i]);
        lnR += (Lb - La) / 6.0 * (fa + 4.0 * fm + fb);
        R[i] = std::exp(lnR);
    }
    return R;
}

}  // namespace detail

struct PhysicalState {
    double u = 0.0;    // velocity
    double c = 0.0;    // sound speed
    double rho = 0.0;  // density
    double p = 0.0;    // pressure, rho c^2 / gamma
};

struct CollapseLimits {
    double uhat = 0.0;  // lim V(x)/x
    double chat = 0.0;  // lim C(x)/x
    double R0 = 0.0;    // lim R(x)
};

struct SimilarityProfile {
    ShootResult result;
    std::vector<double> x;  // increasing from -1 toward 0
    std::vector<double> V, C, R;
    double x_sonic = 0.0;
    double entropy_const = 0.0;
    double q = 0.0;
    double x_min = 0.0;
    bool degenerate_exponent = false;  // R integrated from the continuity ODE
    detail::HermiteTable table;        // trajectory-resolution interpolant
};

/// Quiescent upstream state for x < -1.
inline PhasePoint pre_shock_state_vc() { return {0.0, 0.0}; }
inline double pre_shock_density() { return 1.0; }

inline SimilarityProfile build_profile(const ShootResult& result, double x_min, int n) {
    if (!(x_min > 0.0) || !(x_min < 1.0)) throw_domain("x_min must lie in (0, 1)");
    if (n < 64) throw_domain("build_profile requires n >= 64");
    if (!result.left.x_attached || !result.right.x_attached)
        throw_anomaly("build_profile requires x-attached trajectories");

    SimilarityProfile prof;
    prof.result = result;
    prof.x_min = x_min;
    const GasConfig cfg = make_config(result.gamma, result.m, result.z_std);
    const JumpState js = jump_state(result.gamma);
    prof.q = cfg.q;
    const double expnt = cfg.q + 1.0 - cfg.gamma;
    prof.degenerate_exponent = std::abs(expnt) < 1e-6;
    prof.entropy_const = std::pow(js.R1, expnt) * js.p1.C * js.p1.C *
                         std::pow(1.0 + js.p1.V, cfg.q);

    prof.table = detail::merge_trajectories(result);
    const detail::HermiteTable& tab = prof.table;
    for (std::size_t i = 1; i < tab.lnx.size(); ++i)
        if (!(tab.lnx[i] < tab.lnx[i - 1]))
            throw_anomaly("non-monotone ln(-x) parameterization");
    if (std::log(x_min) < tab.lnx.back())
        throw_domain("x_min beyond the sampled trajectory range");

    prof.x_sonic = -std::exp(result.left.nodes.back().lnx);

    const int rows = n;
    prof.x.resize(rows);
    prof.V.resize(rows);
    prof.C.resize(rows);
    prof.R.resize(rows);
    const double L0 = 0.0, L1 = std::log(x_min);
    for (int i = 0; i < rows; ++i) {
        const double L = L0 + (L1 - L0) * i / (rows - 1);
        prof.x[i] = -std::exp(L);
        if (i == 0) {
            prof.x[i] = -1.0;
            prof.V[i] = js.p1.V;
            prof.C[i] = js.p1.C;
        } else {
            const auto row = tab.at_lnx(L);
            prof.V[i] = row.V;
            prof.C[i] = row.C;
        }
    }

    if (!prof.degenerate_exponent) {
        for (int i = 0; i < rows; ++i) {
            const double cx = prof.C[i] / prof.x[i];
            prof.R[i] = std::pow(prof.entropy_const /
                                     (cx * cx * std::pow(1.0 + prof.V[i], cfg.q)),
                                 1.0 / expnt);
        }
    } else {
        prof.R = detail::continuity_density(result, tab, prof.x, prof.V, prof.C, js.R1);
    }
    return prof;
}

/// Aitken-extrapolated limits of V/x, C/x, R at collapse, with a Cauchy
/// criterion across the last three grid refinements. The stencil samples
/// at |x|, 2|x|, 4|x| so the genuine approach rate dominates row-to-row
/// interpolation noise in the extrapolation denominator.
inline CollapseLimits collapse_limits(const SimilarityProfile& prof) {
    if (!(prof.x_min <= 1e-4)) throw_domain("collapse_limits requires x_min <= 1e-4");
    const std::size_t nrows = prof.x.size();
    const double dL = std::log(prof.x_min) / (nrows - 1);
    const std::size_t k =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::round(std::log(2.0) / -dL)));
    if (nrows < 2 * k + 1) throw_domain("profile grid too coarse for collapse extrapolation");
    auto extrapolate = [&](auto value, const char* what) {
        const double r0 = value(nrows - 1 - 2 * k), r1 = value(nrows - 1 - k),
                     r2 = value(nrows - 1);
        if (!(std::abs(r2 - r1) <= 1e-5 * std::max(1.0, std::abs(r2))))
            throw_anomaly(std::string("collapse limit of ") + what + " is not Cauchy");
        const double d1 = r1 - r0, d2 = r2 - r1;
        const double den = d2 - d1;
        return std::abs(den) > 1e-10 * std::max(std::abs(d1), std::abs(d2))
                   ? r2 - d2 * d2 / den
                   : r2;
    };
    CollapseLimits lim;
    lim.uhat = extrapolate([&](std::size_t i) { return prof.V[i] / prof.x[i]; }, "V(x)/x");
    lim.chat = extrapolate([&](std::size_t i) { return prof.C[i] / prof.x[i]; }, "C(x)/x");
    lim.R0 = extrapolate([&](std::size_t i) { return prof.R[i]; }, "R(x)");
    return lim;
}

/// Field evaluation at (t, r) with t < 0, r > 0; pre-shock constants apply
/// for x < -1 and interpolation refuses to extrapolate past x_min.
inline PhysicalState physical_state(const SimilarityProfile& prof, double t, double r) {
    if (!(t < 0.0)) throw_domain("physical_state requires t < 0 (pre-collapse)");
    if (!(r > 0.0)) throw_domain("physical_state requires r > 0");
    const double lambda = prof.result.lambda_std;
    const double x = t / std::pow(r, lambda);
    PhysicalState s;
    if (x < -1.0) {
        s.u = 0.0;
        s.c = 0.0;
        s.rho = pre_shock_density();
        s.p = 0.0;
        return s;
    }
    if (x > -prof.x_min)
        throw_domain("x inside the sampled cutoff; rebuild the profile with smaller x_min");
    const auto row = prof.table.at_lnx(std::log(-x));
    const std::size_t nrows = prof.x.size();
    // R by local interpolation in ln(-x) (linear on lnR between grid rows)
    const double L = std::log(-x);
    const double hL = std::log(prof.x_min) / (nrows - 1);
    std::size_t i = std::min<std::size_t>(nrows - 2, static_cast<std::size_t>(L / hL));
    const double tfrac = (L - i * hL) / hL;
    const double lnR =
        (1.0 - tfrac) * std::log(prof.R[i]) + tfrac * std::log(prof.R[i + 1]);
    s.u = -(r / (lambda * t)) * row.V;
    s.c = -(r / (lambda * t)) * row.C;
    s.rho = std::exp(lnR);
    s.p = s.rho * s.c * s.c / prof.result.gamma;
    return s;
}

struct RhResiduals {
    double mass = 0.0, velocity = 0.0, sound = 0.0;
    double lax_margin = 0.0;
};

/// Residuals of the jump relations at x = -1 against the quiescent
/// upstream state (V0, C0, R0) = (0, 0, 1).
inline RhResiduals rh_check(const SimilarityProfile& prof) {
    const double g = prof.result.gamma;
    const double V0 = 0.0, C0 = 0.0, R0 = 1.0;
    const double V1 = prof.V.front(), C1 = prof.C.front(), R1 = prof.R.front();
    RhResiduals r;
    r.velocity = (1.0 + V1) - ((g - 1.0) / (g + 1.0) * (1.0 + V0) +
                               2.0 * C0 * C0 / ((g + 1.0) * (1.0 + V0)));
    r.sound = C1 * C1 - (C0 * C0 + (g - 1.0) / 2.0 * ((1.0 + V0) * (1.0 + V0) -
                                                      (1.0 + V1) * (1.0 + V1)));
    r.mass = R1 * (1.0 + V1) - R0 * (1.0 + V0);
    r.lax_margin = (1.0 + V0) * (1.0 + V0) - C0 * C0;
    return r;
}

}  // namespace guderley
