#pragma once

// Local analytic solution of dC/dV = F/G through a sonic triple point.
// The slope at the triple point solves a quadratic; the negative branch is
// the analytic (secondary) direction. Higher coefficients follow from a
// linear recurrence A_l c_l = B_l whose right side collects restricted
// triple convolutions of the lower-order coefficients.
//
// Coefficients grow like K^l, and rounding in the recurrence compounds
// with a comparable gain per order. The chain is therefore evaluated in
// extended precision internally; the public surface stays double.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "guderley/critical.hpp"
#include "guderley/model.hpp"

namespace guderley {

enum class TriplePoint { P6, P8 };

inline const char* triple_point_name(TriplePoint t) {
    return t == TriplePoint::P6 ? "P6" : "P8";
}

inline PhasePoint triple_point_of(const GasConfig& cfg, TriplePoint which) {
    const CriticalPoints cp = critical_points(cfg);
    return which == TriplePoint::P6 ? cp.P6 : cp.P8;
}

// The slope quadratic at P6 has real roots only for z >= z_m; P8 admits
// the full window (0, z_M].
inline void validate_sonic_window(const GasConfig& cfg, TriplePoint which) {
    if (which == TriplePoint::P6) {
        const double zm = (cfg.gamma - 1.0) / ((2.0 * cfg.gamma - 1.0) * (cfg.gamma + 1.0));
        if (cfg.z < zm * (1.0 - 1e-14))
            throw_domain("P6 expansion requires z in [z_m, z_M]; z = " + std::to_string(cfg.z) +
                         " < z_m = " + std::to_string(zm));
    }
}

namespace series_detail {

// All quantities entering the recurrence, rebuilt from the exact (gamma,
// m, z) inputs in the working scalar type.
template <typename T>
struct Frame {
    T lam, a1, a2, a3, mz;
    T Vs, Cs;                  // triple point
    T F_C, F_V, G_C, G_V;      // partials there
    int m;

    Frame(const GasConfig& cfg, TriplePoint which) {
        const T g = cfg.gamma;
        const T z = cfg.z;
        m = cfg.m;
        mz = T(m) * z;
        lam = mz * g + T(1);
        a1 = T(1) + T(m) * (g - T(1)) / T(2);
        a2 = (T(m) * (g - T(1)) + mz * g * (g - T(3))) / T(2);
        a3 = mz * g * (g - T(1)) / T(2);
        using std::sqrt;
        using std::abs;
        const T root = T(2) * sqrt(T(2) * g);
        T f1 = T(1) - z * (g + T(2) + root);
        const T f2 = T(1) - z * (g + T(2) - root);
        if (abs(f1) < T(1e-13)) f1 = T(0);  // z indistinguishable from z_M
        const T w = sqrt(f1 * f2);
        Vs = (T(-1) + (g - T(2)) * z + (which == TriplePoint::P6 ? -w : w)) / T(2);
        Cs = T(1) + Vs;
        const T opv = Cs;
        const T C2 = Cs * Cs;
        G_C = T(2) * Cs * (T(m + 1) * Vs + T(2) * mz);
        G_V = T(m + 1) * C2 - T(3) * Vs * Vs - T(2) * (lam + T(1)) * Vs - lam;
        F_C = T(3) * C2 * (T(1) + mz / opv) - a1 * opv * opv + a2 * opv - a3;
        F_V = Cs * (-C2 * mz / (opv * opv) - T(2) * a1 * opv + a2);
    }

    T slope_discriminant() const { return (F_C - G_V) * (F_C - G_V) + T(4) * F_V * G_C; }
};

// sum_{i+j+k = total, 0 <= i,j,k <= cap} c_i c_j c_k
template <typename T>
T restricted_triple_sum(const std::vector<T>& c, int total, int cap) {
    T acc = T(0);
    const int n = static_cast<int>(c.size());
    for (int i = 0; i <= cap && i <= total; ++i) {
        if (i >= n) break;
        const int rem = total - i;
        for (int j = 0; j <= cap && j <= rem; ++j) {
            const int k = rem - j;
            if (k < 0 || k > cap) continue;
            if (j >= n || k >= n) continue;
            acc += c[i] * c[j] * c[k];
        }
    }
    return acc;
}

template <typename T>
struct AB {
    T A, B;
};

template <typename T>
AB<T> recurrence_ab(const Frame<T>& f, const std::vector<T>& c, int ell) {
    const T c1 = c[1];
    AB<T> r;
    r.A = f.Cs * (f.F_C - f.G_C * c1 - T(ell) * (f.G_V + f.G_C * c1));

    std::vector<T> head(c.begin(), c.begin() + ell);  // c_0 .. c_{ell-1}
    const T S_p1 = restricted_triple_sum(head, ell + 1, ell - 1);
    const T S_0 = restricted_triple_sum(head, ell, ell - 1);
    const T S_m1 = restricted_triple_sum(head, ell - 1, ell - 1);
    const T c_m1 = c[ell - 1];
    const T c_m2 = ell - 2 >= 0 ? c[ell - 2] : T(0);
    const T c_m3 = ell - 3 >= 0 ? c[ell - 3] : T(0);
    const T opv = T(1) + f.Vs;
    const T lam = f.lam;

    r.B = (opv * (T(f.m + 1) * f.Vs + T(2) * f.mz) / T(3)) * T(ell + 1) * S_p1 -
          ((opv + f.mz) - (T(f.m + 1) * (T(1) + T(2) * f.Vs) + T(2) * f.mz) / T(3) * T(ell)) * S_0 -
          (T(1) - T(f.m + 1) * T(ell - 1) / T(3)) * S_m1 -
          ((T(6) * f.Vs * f.Vs + (T(3) * lam + T(6)) * f.Vs + T(2) * lam + T(1)) * T(ell - 1) -
           T(3) * f.a1 * opv * opv + T(2) * f.a2 * opv - f.a3) * c_m1 -
          ((lam + T(2) + T(4) * f.Vs) * T(ell - 2) - T(3) * f.a1 * opv + f.a2) * c_m2 -
          (T(ell - 3) - f.a1) * c_m3;
    return r;
}

}  // namespace series_detail

struct SlopeRoots {
    double c1_neg = 0.0;  // analytic branch, always < 0
    double c1_pos = 0.0;
    double R = 0.0;  // sqrt of the quadratic discriminant
};

inline SlopeRoots sonic_slopes(const GasConfig& cfg, TriplePoint which) {
    validate_sonic_window(cfg, which);
    const series_detail::Frame<double> f(cfg, which);
    const double disc = f.slope_discriminant();
    if (disc < 0.0)
        throw_anomaly("negative slope discriminant at " + std::string(triple_point_name(which)) +
                      " (z outside the admissible window)");
    SlopeRoots r;
    r.R = std::sqrt(disc);
    // G_C < 0 at both triple points, so +R picks the negative root.
    r.c1_neg = (f.F_C - f.G_V + r.R) / (2.0 * f.G_C);
    r.c1_pos = (f.F_C - f.G_V - r.R) / (2.0 * f.G_C);
    return r;
}

struct RecurrenceAB {
    double A = 0.0;
    double B = 0.0;
};

/// Coefficients of the order-l recurrence A_l c_l = B_l, given c_0..c_{l-1}
/// (coefficients with negative index are zero by convention).
inline RecurrenceAB recurrence_ab(const GasConfig& cfg, TriplePoint which,
                                  std::span<const double> coeffs, int ell) {
    if (ell < 2) throw_domain("recurrence_ab requires ell >= 2");
    if (static_cast<int>(coeffs.size()) < ell)
        throw_domain("recurrence_ab needs coefficients c_0..c_{ell-1}");
    validate_sonic_window(cfg, which);
    const series_detail::Frame<double> f(cfg, which);
    const std::vector<double> c(coeffs.begin(), coeffs.end());
    const auto ab = series_detail::recurrence_ab(f, c, ell);
    if (std::abs(ab.A) < 1e-12 * std::abs(f.Cs) * ell)
        throw_anomaly("non-vanishing condition violated at order " + std::to_string(ell));
    return {ab.A, ab.B};
}

struct SonicExpansion {
    GasConfig cfg;
    TriplePoint which = TriplePoint::P6;
    PhasePoint star;
    std::vector<double> c;      // c[0] = C*, c[1] < 0
    double K_est = 0.0;         // smallest K with |c_l| <= K^(l-1)/l^3 on [2, N]
    double radius_est = 0.0;    // 1 / sup tail ratio, floored at 1e-6
    int N = 0;                  // truncation order (c.size() - 1)
    double handoff = 0.0;       // epsilon for integrator handoff
};

struct SeriesEval {
    double C = 0.0;
    double dCdV = 0.0;
};

inline SeriesEval eval_truncated(const std::vector<double>& c, double Vstar, double V, int order) {
    const double v = V - Vstar;
    double val = 0.0, der = 0.0;
    for (int l = order; l >= 1; --l) {
        val = val * v + c[l];
        der = der * v + l * c[l];
    }
    val = val * v + c[0];
    return {val, der};
}

inline SeriesEval eval_expansion(const SonicExpansion& exp, double V) {
    if (std::abs(V - exp.star.V) > 0.5 * exp.radius_est)
        throw_domain("series evaluation at V = " + std::to_string(V) +
                     " outside |V - V*| <= radius_est/2");
    return eval_truncated(exp.c, exp.star.V, V, exp.N);
}

namespace series_detail {

inline void fit_growth_and_radius(SonicExpansion& e) {
    // Smallest K with |c_l| <= K^(l-1)/l^3 across l in [2, N].
    double K = 1.0;
    for (int l = 2; l <= e.N; ++l) {
        const double a = std::abs(e.c[l]) * std::pow(l, 3.0);
        if (a > 0.0) K = std::max(K, std::pow(a, 1.0 / (l - 1)));
    }
    e.K_est = K;
    double ratio = 0.0;
    for (int l = e.N / 2 + 1; l < e.N; ++l) {
        if (std::abs(e.c[l]) > 1e-280)
            ratio = std::max(ratio, std::abs(e.c[l + 1] / e.c[l]));
    }
    e.radius_est = ratio > 0.0 ? std::max(1.0 / ratio, 1e-6) : 1.0;
}

inline double compute_handoff(const SonicExpansion& e) {
    double eps = std::min(e.radius_est / 4.0, 1e-2);
    const double w = w_of(e.cfg.gamma, e.cfg.z);
    if (w > 0.0) eps = std::min(eps, w / 8.0);  // V8 - V6 = w
    return eps;
}

}  // namespace series_detail

/// Build the truncated expansion, doubling N until two consecutive
/// truncations agree at the handoff points to 1e-11.
inline SonicExpansion expand(const GasConfig& cfg, TriplePoint which, int N = 40) {
    if (N < 8) throw_domain("expand requires N >= 8");
    validate_sonic_window(cfg, which);
    using Ext = long double;
    const series_detail::Frame<Ext> frame(cfg, which);
    if (frame.slope_discriminant() < Ext(0))
        throw_anomaly("negative slope discriminant at " + std::string(triple_point_name(which)));
    SonicExpansion e;
    e.cfg = cfg;
    e.which = which;
    e.star = {static_cast<double>(frame.Vs), static_cast<double>(frame.Cs)};

    std::vector<Ext> chain = {frame.Cs, (frame.F_C - frame.G_V +
                                         std::sqrt(frame.slope_discriminant())) /
                                            (Ext(2) * frame.G_C)};
    e.c = {static_cast<double>(chain[0]), static_cast<double>(chain[1])};

    auto extend_to = [&](int upto) {
        for (int l = static_cast<int>(chain.size()); l <= upto; ++l) {
            const auto ab = series_detail::recurrence_ab(frame, chain, l);
            if (std::abs(static_cast<double>(ab.A)) < 1e-12 * std::abs(e.star.C) * l)
                throw_anomaly("non-vanishing condition violated at order " + std::to_string(l));
            const Ext cl = ab.B / ab.A;
            if (std::abs(static_cast<double>(cl)) > 1e300)
                throw_anomaly("series coefficient overflow at order " + std::to_string(l));
            chain.push_back(cl);
            e.c.push_back(static_cast<double>(cl));
        }
        e.N = static_cast<int>(e.c.size()) - 1;
    };

    constexpr int kMaxOrder = 640;
    while (true) {
        extend_to(N);
        series_detail::fit_growth_and_radius(e);
        e.handoff = series_detail::compute_handoff(e);
        const double scale = std::max(1.0, std::abs(e.star.C));
        bool converged = true;
        for (const double side : {-1.0, 1.0}) {
            const double V = e.star.V + side * e.handoff;
            const double full = eval_truncated(e.c, e.star.V, V, e.N).C;
            const double half = eval_truncated(e.c, e.star.V, V, e.N / 2).C;
            if (std::abs(full - half) > 1e-11 * scale) converged = false;
        }
        if (converged) break;
        if (N >= kMaxOrder)
            throw_anomaly("series truncation did not stabilize by order " + std::to_string(kMaxOrder));
        N *= 2;
    }
    return e;
}

}  // namespace guderley
