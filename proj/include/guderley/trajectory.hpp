#pragma once

// Propagation of the sonic-series solution through the phase plane, with
// ln(-x) co-integrated as a function of V. Inside [V*-eps, V*+eps] the
// series is the solution; the integrator only ever sees V outside that
// band, where F/G is regular.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "guderley/rk45.hpp"
#include "guderley/series.hpp"

namespace guderley {

enum class Side { Left, Right };
enum class TrajStatus { ReachedTarget, HitCAxis, HitVAxis, Blowup, StepFailure };

inline const char* traj_status_name(TrajStatus s) {
    switch (s) {
        case TrajStatus::ReachedTarget: return "reached_target";
        case TrajStatus::HitCAxis: return "hit_c_axis";
        case TrajStatus::HitVAxis: return "hit_v_axis";
        case TrajStatus::Blowup: return "blowup";
        case TrajStatus::StepFailure: return "step_failure";
    }
    return "unknown";
}

struct TrajectoryNode {
    double V = 0.0;
    double C = 0.0;
    double lnx = 0.0;  // ln(-x); filled by attach_x
    double dCdV = 0.0;
};

struct Trajectory {
    Side side = Side::Left;
    TrajStatus status = TrajStatus::ReachedTarget;
    bool unguarded = false;   // z outside the barrier-guaranteed window
    bool x_attached = false;
    std::vector<TrajectoryNode> nodes;  // strictly increasing V
    SonicExpansion exp;
    double err_estimate = 0.0;  // accumulated local error of C along the sweep
};

inline constexpr double kBlowupC = 1e6;
inline constexpr double kVAxisC = 1e-12;
inline constexpr double kRightStopV = -1e-10;
// Switch to s = ln(-V), ln C state beyond here: ln(-x) has 1/V-type
// curvature toward the origin that uniform-V sampling cannot resolve.
inline constexpr double kRightSwitchV = -0.2;

namespace detail {

inline rk::Rhs phase_rhs_in_v(const GasConfig& cfg) {
    return [cfg](double V, const rk::State& y) -> rk::State {
        const FGDValues f = eval_fgd(cfg, {V, y[0]});
        return {f.F / f.G, -cfg.lambda * f.D / f.G};
    };
}

// Near the origin the independent variable switches to s = ln(-V) and the
// state to (ln C, ln(-x)): V and C decay exponentially together there, so
// both components are almost linear in s and the dense output stays at
// integrator accuracy between the (large) accepted steps.
inline rk::Rhs phase_rhs_in_s(const GasConfig& cfg) {
    return [cfg](double s, const rk::State& y) -> rk::State {
        const double V = -std::exp(s);
        const double C = std::exp(y[0]);
        const FGDValues f = eval_fgd(cfg, {V, C});
        return {V * f.F / (f.G * C), -cfg.lambda * V * f.D / f.G};
    };
}

inline TrajectoryNode make_node(const GasConfig& cfg, double V, double C, double lnx) {
    const FGDValues f = eval_fgd(cfg, {V, C});
    return {V, C, lnx, f.F / f.G};
}

// Uniformly refill the accepted-step skeleton via dense output so the
// trajectory carries at least min_nodes samples. In the s-phase the state
// component 0 is ln C.
inline void fill_nodes(const GasConfig& cfg, const rk::IntegrationResult& r, bool t_is_s,
                       int min_nodes, std::vector<TrajectoryNode>& out) {
    if (r.steps.size() < 2) return;
    const double t0 = r.steps.front().t;
    const double t1 = r.t_end;
    const int n = std::max<int>(min_nodes, static_cast<int>(r.steps.size()));
    const double dt = (t1 - t0) / n;
    std::size_t seg = 1;
    auto to_V = [&](double t) { return t_is_s ? -std::exp(t) : t; };
    auto to_C = [&](double y0) { return t_is_s ? std::exp(y0) : y0; };
    {
        const auto& s0 = r.steps.front();
        out.push_back(make_node(cfg, to_V(s0.t), to_C(s0.y[0]), s0.y[1]));
    }
    for (int i = 1; i <= n; ++i) {
        const double t = i == n ? t1 : t0 + i * dt;
        while (seg + 1 < r.steps.size() && (dt > 0 ? r.steps[seg].t < t : r.steps[seg].t > t))
            ++seg;
        const auto& rec = r.steps[seg];
        const bool at_step = std::abs(rec.t - t) < 1e-14 * std::max(1.0, std::abs(t));
        rk::State y = at_step ? rec.y : rec.dense.eval(t);
        if (i == n) y = r.y_end;
        out.push_back(make_node(cfg, to_V(t), to_C(y[0]), y[1]));
    }
}

inline void dedupe_sort(std::vector<TrajectoryNode>& nodes) {
    std::sort(nodes.begin(), nodes.end(),
              [](const TrajectoryNode& a, const TrajectoryNode& b) { return a.V < b.V; });
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](const TrajectoryNode& a, const TrajectoryNode& b) {
                                return std::abs(a.V - b.V) < 1e-15;
                            }),
                nodes.end());
}

inline bool in_guarded_window(const GasConfig& cfg, TriplePoint which) {
    const ParameterWindows w = parameter_windows(cfg.gamma, cfg.m);
    if (which == TriplePoint::P6)
        return cfg.gamma <= 2.0 && w.z_g && cfg.z > *w.z_g;
    if (w.z_1) return cfg.z > *w.z_1;
    if (w.z_2) return cfg.z > *w.z_2;
    return false;
}

// Nodes across the series band get lnx = NaN until attach_x runs. The band
// edge itself belongs to the integrated part, so start one step inside.
inline std::vector<TrajectoryNode> series_band_nodes(const SonicExpansion& exp, Side side,
                                                     int count = 64) {
    std::vector<TrajectoryNode> nodes;
    const double sgn = side == Side::Left ? -1.0 : 1.0;
    for (int i = count - 1; i >= 0; --i) {
        const double V = exp.star.V + sgn * exp.handoff * i / count;
        const SeriesEval s = eval_expansion(exp, V);
        nodes.push_back({V, s.C, std::numeric_limits<double>::quiet_NaN(), s.dCdV});
    }
    return nodes;
}

}  // namespace detail

/// Finite limit of D/G at the sonic point along the analytic branch.
inline double sonic_x_ratio(const SonicExpansion& exp) {
    const Partials d = eval_partials(exp.cfg, exp.star);
    const double c1 = exp.c[1];
    const double den = d.G_V + d.G_C * c1;
    if (std::abs(den) < 1e-12)
        throw_anomaly("degenerate denominator G_V + G_C c1 in sonic x-ratio");
    const double D_V = 2.0 * (1.0 + exp.star.V);
    const double D_C = -2.0 * exp.star.C;
    return (D_V + D_C * c1) / den;
}

/// Extend the analytic solution to the left, from V*-eps down to V_target
/// (usually V1). Interior nodes satisfy F>0, G<0, D<0. Near z = z_m the
/// triple point sits almost on top of V1, so the handoff shrinks to keep
/// the integrated leg nonempty.
inline Trajectory propagate_left(const SonicExpansion& exp, double V_target,
                                 IntegratorOptions opt = {}) {
    Trajectory traj;
    traj.side = Side::Left;
    traj.exp = exp;
    traj.unguarded = !detail::in_guarded_window(exp.cfg, exp.which);
    const double gap = exp.star.V - V_target;
    if (!(gap > 1e-12))
        throw_domain("propagate_left requires V_target < V* (gap = " + std::to_string(gap) + ")");
    traj.exp.handoff = std::min(exp.handoff, gap / 4.0);
    const double V_start = exp.star.V - traj.exp.handoff;

    const SeriesEval s0 = eval_expansion(exp, V_start);
    std::vector<rk::EventSpec> events;
    events.push_back({[](double, const rk::State& y) { return y[0] - kBlowupC; }, 0});
    events.push_back({[](double, const rk::State& y) { return y[0] - kVAxisC; }, 1});

    const auto r = rk::integrate(detail::phase_rhs_in_v(exp.cfg), V_start, V_target,
                                 {s0.C, 0.0}, opt, events);
    traj.err_estimate = r.err_accum;
    switch (r.reason) {
        case rk::StopReason::ReachedEnd: traj.status = TrajStatus::ReachedTarget; break;
        case rk::StopReason::StepUnderflow: traj.status = TrajStatus::StepFailure; break;
        case rk::StopReason::Event:
            traj.status = r.event_id == 0 ? TrajStatus::Blowup : TrajStatus::HitVAxis;
            break;
    }

    detail::fill_nodes(exp.cfg, r, false, opt.min_nodes, traj.nodes);
    auto band = detail::series_band_nodes(traj.exp, Side::Left);
    traj.nodes.insert(traj.nodes.end(), band.begin(), band.end());
    detail::dedupe_sort(traj.nodes);
    return traj;
}

/// Extend the analytic solution to the right, toward the origin. Interior
/// nodes satisfy F<0, G>0, D>0 (the sonic-line crossing flips D).
inline Trajectory propagate_right(const SonicExpansion& exp, IntegratorOptions opt = {},
                                  double stop_V = kRightStopV) {
    Trajectory traj;
    traj.side = Side::Right;
    traj.exp = exp;
    traj.unguarded = !detail::in_guarded_window(exp.cfg, exp.which);
    const double V_start = exp.star.V + exp.handoff;
    const SeriesEval s0 = eval_expansion(exp, V_start);

    std::vector<rk::EventSpec> events;
    events.push_back({[](double, const rk::State& y) { return y[0] - kBlowupC; }, 0});
    events.push_back({[](double, const rk::State& y) { return y[0] - kVAxisC; }, 1});

    traj.status = TrajStatus::ReachedTarget;
    rk::State y = {s0.C, 0.0};

    if (V_start < kRightSwitchV) {
        const auto r = rk::integrate(detail::phase_rhs_in_v(exp.cfg), V_start, kRightSwitchV, y,
                                     opt, events);
        traj.err_estimate += r.err_accum;
        detail::fill_nodes(exp.cfg, r, false, opt.min_nodes / 2, traj.nodes);
        y = r.y_end;
        if (r.reason != rk::StopReason::ReachedEnd) {
            traj.status = r.reason == rk::StopReason::StepUnderflow ? TrajStatus::StepFailure
                          : r.event_id == 0                         ? TrajStatus::Blowup
                                                                    : TrajStatus::HitVAxis;
        }
    }

    if (traj.status == TrajStatus::ReachedTarget) {
        const double s_from = std::log(-std::max(V_start, kRightSwitchV));
        const double s_to = std::log(-stop_V);
        std::vector<rk::EventSpec> log_events;
        log_events.push_back(
            {[](double, const rk::State& y) { return y[0] - std::log(kBlowupC); }, 0});
        log_events.push_back(
            {[](double, const rk::State& y) { return y[0] - std::log(kVAxisC); }, 1});
        rk::State ylog = {std::log(y[0]), y[1]};
        const auto r =
            rk::integrate(detail::phase_rhs_in_s(exp.cfg), s_from, s_to, ylog, opt, log_events);
        traj.err_estimate += r.err_accum;
        detail::fill_nodes(exp.cfg, r, true, 2 * opt.min_nodes, traj.nodes);
        if (r.reason != rk::StopReason::ReachedEnd) {
            traj.status = r.reason == rk::StopReason::StepUnderflow ? TrajStatus::StepFailure
                          : r.event_id == 0                         ? TrajStatus::Blowup
                                                                    : TrajStatus::HitVAxis;
        }
    }

    auto band = detail::series_band_nodes(exp, Side::Right);
    traj.nodes.insert(traj.nodes.end(), band.begin(), band.end());
    detail::dedupe_sort(traj.nodes);
    return traj;
}

enum class XAnchor { ShockAtMinusOne, SonicValue };

namespace detail {

// Adaptive Simpson quadrature of d ln(-x)/dV across the series band, where
// D/G is a removable 0/0 at V*.
inline double band_integrand(const SonicExpansion& exp, double ratio0, double V) {
    if (std::abs(V - exp.star.V) < 1e-7) return -exp.cfg.lambda * ratio0;
    const SeriesEval s = eval_expansion(exp, V);
    const FGDValues f = eval_fgd(exp.cfg, {V, s.C});
    return -exp.cfg.lambda * f.D / f.G;
}

inline double simpson_rec(const SonicExpansion& exp, double ratio0, double a, double fa, double b,
                          double fb, double fm, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = band_integrand(exp, ratio0, lm);
    const double frm = band_integrand(exp, ratio0, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-13)
        return left + right;
    return simpson_rec(exp, ratio0, a, fa, m, fm, flm, left, depth - 1) +
           simpson_rec(exp, ratio0, m, fm, b, fb, frm, right, depth - 1);
}

inline double band_quad(const SonicExpansion& exp, double ratio0, double a, double b) {
    const double fa = band_integrand(exp, ratio0, a);
    const double fb = band_integrand(exp, ratio0, b);
    const double fm = band_integrand(exp, ratio0, 0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(exp, ratio0, a, fa, b, fb, fm, whole, 40);
}

}  // namespace detail

/// Fill and normalize ln(-x) along a completed trajectory. Left side with
/// ShockAtMinusOne anchors ln(-x)(V1) = 0; the right side is anchored to
/// the left branch's sonic value for a C^1 join at V*.
inline Trajectory attach_x(Trajectory traj, XAnchor anchor, double sonic_lnx = 0.0) {
    if (traj.nodes.size() < 2) throw_domain("attach_x requires a completed trajectory");
    if (anchor == XAnchor::ShockAtMinusOne &&
        (traj.side != Side::Left || traj.status != TrajStatus::ReachedTarget))
        throw_domain("shock anchoring requires a left trajectory that reached V1");
    const SonicExpansion& exp = traj.exp;
    const double ratio0 = sonic_x_ratio(exp);
    const double Vs = exp.star.V;

    // Series-band nodes still carry lnx = NaN; everything else came from
    // the co-integrated system, relative to the band edge (lnx = 0 there).
    std::vector<std::size_t> band_idx;
    for (std::size_t i = 0; i < traj.nodes.size(); ++i)
        if (std::isnan(traj.nodes[i].lnx)) band_idx.push_back(i);

    if (traj.side == Side::Left) {
        // Band nodes ascend from the edge V*-eps toward V*.
        double acc = 0.0;
        double prevV = Vs - exp.handoff;
        for (std::size_t i : band_idx) {
            acc += detail::band_quad(exp, ratio0, prevV, traj.nodes[i].V);
            traj.nodes[i].lnx = acc;
            prevV = traj.nodes[i].V;
        }
        const double shift = anchor == XAnchor::ShockAtMinusOne
                                 ? -traj.nodes.front().lnx  // front is V_target = V1
                                 : sonic_lnx - traj.nodes.back().lnx;
        for (auto& n : traj.nodes) n.lnx += shift;
        if (anchor == XAnchor::ShockAtMinusOne) traj.nodes.front().lnx = 0.0;
    } else {
        if (anchor == XAnchor::ShockAtMinusOne)
            throw_domain("right trajectory cannot anchor at the shock");
        double acc = sonic_lnx;
        double prevV = Vs;
        for (std::size_t i : band_idx) {
            acc += detail::band_quad(exp, ratio0, prevV, traj.nodes[i].V);
            traj.nodes[i].lnx = acc;
            prevV = traj.nodes[i].V;
        }
        // Integrated nodes were seeded with lnx = 0 at V*+eps.
        const double edge_lnx = acc + detail::band_quad(exp, ratio0, prevV, Vs + exp.handoff);
        std::vector<bool> is_band(traj.nodes.size(), false);
        for (std::size_t i : band_idx) is_band[i] = true;
        for (std::size_t i = 0; i < traj.nodes.size(); ++i)
            if (!is_band[i]) traj.nodes[i].lnx += edge_lnx;
    }
    traj.x_attached = true;
    return traj;
}

}  // namespace guderley
