#pragma once

// Locates z_std(gamma, m): the similarity parameter whose sonic-series
// solution, extended left, hits the post-shock point P1 exactly. The
// branch dispatch follows the sign of the residual at z = z_M, where the
// two triple points coincide.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "guderley/trajectory.hpp"

namespace guderley {

struct RegimePlanItem {
    TriplePoint which = TriplePoint::P6;
    double z_lo = 0.0;  // open endpoint
    double z_hi = 0.0;  // closed endpoint, always z_M
};

/// Candidate (triple point, z-window) pairs in trial order.
inline std::vector<RegimePlanItem> select_regime(double gamma, int m) {
    const ParameterWindows w = parameter_windows(gamma, m);
    std::vector<RegimePlanItem> plan;
    if (gamma <= w.gamma_star) {
        plan.push_back({TriplePoint::P6, *w.z_g, w.z_M});
    } else if (gamma < 2.0) {
        // branch undetermined here; P6 tried first, P8 as fallback
        plan.push_back({TriplePoint::P6, *w.z_g, w.z_M});
        plan.push_back({TriplePoint::P8, *w.z_1, w.z_M});
    } else if (gamma <= w.gamma_1) {
        plan.push_back({TriplePoint::P8, *w.z_1, w.z_M});
    } else {
        plan.push_back({TriplePoint::P8, *w.z_2, w.z_M});
    }
    return plan;
}

/// C(V1; gamma, z, P*) - C1. Positive = upper solution, negative = lower.
inline double left_residual(double gamma, int m, double z, TriplePoint which,
                            IntegratorOptions opt = {}) {
    const GasConfig cfg = make_config(gamma, m, z);
    const JumpState js = jump_state(gamma);
    const SonicExpansion exp = expand(cfg, which);
    // at z = z_m the P6 triple point sits exactly on the vertical through P1
    if (exp.star.V - js.p1.V <= 1e-12) return exp.star.C - js.p1.C;
    const Trajectory traj = propagate_left(exp, js.p1.V, opt);
    if (traj.status != TrajStatus::ReachedTarget)
        throw_anomaly(std::string("left propagation failed: ") + traj_status_name(traj.status) +
                      " at gamma = " + std::to_string(gamma) + ", z = " + std::to_string(z));
    return traj.nodes.front().C - js.p1.C;
}

struct BracketPoint {
    double z = 0.0;
    double residual = 0.0;
};

struct ShootResult {
    double gamma = 0.0;
    int m = 0;
    double z_std = 0.0;
    double lambda_std = 0.0;
    TriplePoint triple = TriplePoint::P6;
    double residual = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    int iterations = 0;
    std::vector<BracketPoint> bracket_history;
    Trajectory left, right;  // x-attached at z_std
    double tol = 0.0;
    IntegratorOptions integrator;
};

namespace detail {

// Rebuild both trajectories at the converged z and attach the shock-anchored
// x-parameterization.
inline void finalize_result(ShootResult& res) {
    const GasConfig cfg = make_config(res.gamma, res.m, res.z_std);
    const JumpState js = jump_state(res.gamma);
    const SonicExpansion exp = expand(cfg, res.triple);
    res.left = attach_x(propagate_left(exp, js.p1.V, res.integrator), XAnchor::ShockAtMinusOne);
    const double sonic_lnx = res.left.nodes.back().lnx;
    res.right = attach_x(propagate_right(exp, res.integrator), XAnchor::SonicValue, sonic_lnx);
    res.residual = res.left.nodes.front().C - js.p1.C;
    res.lambda_std = res.m * res.gamma * res.z_std + 1.0;
}

// Bisection hardened with secant acceleration on a sign-changing bracket.
// Terminates when the bracket width reaches tol in z and the residual at
// the returned point is within 10 tol.
inline bool refine_root(double gamma, int m, TriplePoint which, double a, double fa, double b,
                        double fb, double tol, const IntegratorOptions& opt, double& z_out,
                        double& f_out, std::vector<BracketPoint>& history) {
    double best_z = std::abs(fa) < std::abs(fb) ? a : b;
    double best_f = std::abs(fa) < std::abs(fb) ? fa : fb;
    bool use_secant = true;
    for (int it = 0; it < 200; ++it) {
        if (b - a <= tol && std::abs(best_f) <= 10.0 * tol) {
            z_out = best_z;
            f_out = best_f;
            return true;
        }
        double zc = 0.5 * (a + b);
        if (use_secant && fb != fa) {
            const double zs = b - fb * (b - a) / (fb - fa);
            const double margin = 0.01 * (b - a);
            if (zs > a + margin && zs < b - margin) zc = zs;
        }
        use_secant = !use_secant;  // alternate, so the bracket provably shrinks
        const double fc = left_residual(gamma, m, zc, which, opt);
        history.push_back({zc, fc});
        if (std::abs(fc) < std::abs(best_f)) {
            best_z = zc;
            best_f = fc;
        }
        if ((fa < 0.0) == (fc < 0.0)) {
            a = zc;
            fa = fc;
        } else {
            b = zc;
            fb = fc;
        }
    }
    z_out = best_z;
    f_out = best_f;
    return std::abs(best_f) <= 10.0 * tol;
}

}  // namespace detail

/// Try to bracket and solve within one plan item. Returns false when the
/// residual does not change sign over the window.
inline bool attempt_bracket(double gamma, int m, const RegimePlanItem& item, double tol,
                            const IntegratorOptions& opt, double res_at_zM, ShootResult& out) {
    const double z_lo = item.z_lo * (1.0 + 1e-9);  // respect the open endpoint
    const double f_lo = left_residual(gamma, m, z_lo, item.which, opt);
    out.bracket_history.push_back({z_lo, f_lo});
    if ((f_lo < 0.0) == (res_at_zM < 0.0)) return false;
    double z_root = 0.0, f_root = 0.0;
    const bool ok = detail::refine_root(gamma, m, item.which, z_lo, f_lo, item.z_hi, res_at_zM,
                                        tol, opt, z_root, f_root, out.bracket_history);
    if (!ok)
        throw_anomaly("root refinement stalled in (" + std::to_string(z_lo) + ", " +
                      std::to_string(item.z_hi) + "] for gamma = " + std::to_string(gamma));
    out.z_std = z_root;
    out.triple = item.which;
    out.window_lo = item.z_lo;
    out.window_hi = item.z_hi;
    return true;
}

inline ShootResult solve_zstd(double gamma, int m, double tol = 1e-11,
                              IntegratorOptions opt = {}) {
    validate_gamma_m(gamma, m);
    if (!(tol >= 1e-12)) throw_domain("solver tolerance must be >= 1e-12");
    const std::vector<RegimePlanItem> plan = select_regime(gamma, m);
    const double z_M = plan.front().z_hi;

    ShootResult res;
    res.gamma = gamma;
    res.m = m;
    res.tol = tol;
    res.integrator = opt;

    const double res_zM = left_residual(gamma, m, z_M, plan.front().which, opt);
    res.bracket_history.push_back({z_M, res_zM});

    if (std::abs(res_zM) <= tol) {
        res.z_std = z_M;
        res.triple = plan.front().which;
        res.window_lo = plan.front().z_lo;
        res.window_hi = z_M;
    } else {
        bool solved = false;
        for (const RegimePlanItem& item : plan) {
            if (attempt_bracket(gamma, m, item, tol, opt, res_zM, res)) {
                solved = true;
                break;
            }
        }
        if (!solved) {
            std::string scan = "residual scan:";
            for (const auto& p : res.bracket_history)
                scan += " (" + std::to_string(p.z) + ", " + std::to_string(p.residual) + ")";
            throw_no_bracket("no sign change over the planned window(s) for gamma = " +
                             std::to_string(gamma) + ", m = " + std::to_string(m) + "; " + scan);
        }
    }
    res.iterations = static_cast<int>(res.bracket_history.size());
    detail::finalize_result(res);
    return res;
}

struct ScanPoint {
    double z = 0.0;
    double residual = 0.0;
    bool ok = false;
    std::string error;
};

/// The diagnostic scan window for a triple point: (z_g, z_M] at P6 for
/// gamma <= 2, (z_1, z_M] or (z_2, z_M] at P8 above gamma_star.
inline RegimePlanItem scan_window(double gamma, int m, TriplePoint which) {
    const ParameterWindows w = parameter_windows(gamma, m);
    if (which == TriplePoint::P6) {
        if (!w.z_g)
            throw_domain("P6 scan window requires gamma in (1, 2]");
        return {TriplePoint::P6, *w.z_g, w.z_M};
    }
    if (w.z_1) return {TriplePoint::P8, *w.z_1, w.z_M};
    if (w.z_2) return {TriplePoint::P8, *w.z_2, w.z_M};
    throw_domain("P8 scan window requires gamma > gamma_star");
}

/// Uniform residual scan over the regime window, for diagnostics and
/// uniqueness audits. Individual failures are recorded, not thrown.
inline std::vector<ScanPoint> scan_residual(double gamma, int m, TriplePoint which, int n,
                                            IntegratorOptions opt = {}) {
    if (n < 16) throw_domain("scan_residual requires n >= 16");
    const RegimePlanItem item = scan_window(gamma, m, which);
    std::vector<ScanPoint> out(n);
    const double lo = item.z_lo * (1.0 + 1e-9);
    for (int i = 0; i < n; ++i) {
        ScanPoint& p = out[i];
        p.z = lo + (item.z_hi - lo) * i / (n - 1);
        try {
            p.residual = left_residual(gamma, m, p.z, which, opt);
            p.ok = true;
        } catch (const Error& e) {
            p.error = e.what();
        }
    }
    return out;
}

struct SweepItem {
    double gamma = 0.0;
    int m = 0;
    bool ok = false;
    ShootResult result;
    std::string error;
};

/// Parallel map of solve_zstd over a gamma grid; output order matches the
/// input, failures are isolated per item.
inline std::vector<SweepItem> sweep(std::span<const double> gammas, int m, double tol = 1e-11,
                                    int threads = 0, IntegratorOptions opt = {}) {
    std::vector<SweepItem> items(gammas.size());
    std::atomic<std::size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nthreads =
        std::min<std::size_t>(gammas.size(), threads > 0 ? threads : hw);
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < gammas.size(); i = next.fetch_add(1)) {
            items[i].gamma = gammas[i];
            items[i].m = m;
            try {
                items[i].result = solve_zstd(gammas[i], m, tol, opt);
                items[i].ok = true;
            } catch (const std::exception& e) {
                items[i].error = e.what();
            }
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return items;
}

}  // namespace guderley
