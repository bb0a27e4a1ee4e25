#pragma once

// Embedded Dormand-Prince 5(4) pair with PI step-size control, continuous
// (dense) output, and sign-change event location by bisection on the dense
// interpolant.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "guderley/errors.hpp"

namespace guderley {

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double min_step = 1e-13;
    double max_step = 0.0;  // 0 = span/4
    int min_nodes = 256;
};

namespace rk {

using State = std::array<double, 2>;
using Rhs = std::function<State(double, const State&)>;

struct DenseStep {
    double t0 = 0.0, h = 0.0;
    std::array<State, 5> cont;  // quartic interpolant coefficients

    State eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State y;
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = cont[0][i] +
                   th * (cont[1][i] + th1 * (cont[2][i] + th * (cont[3][i] + th1 * cont[4][i])));
        return y;
    }
};

struct StepRecord {
    double t = 0.0;
    State y{};
    DenseStep dense;  // dense interpolant of the step ending at t
};

enum class StopReason { ReachedEnd, Event, StepUnderflow };

struct EventSpec {
    std::function<double(double, const State&)> fn;
    int id = 0;
};

struct IntegrationResult {
    StopReason reason = StopReason::ReachedEnd;
    int event_id = -1;
    double t_end = 0.0;
    State y_end{};
    std::vector<StepRecord> steps;     // accepted steps, first entry = initial state
    double err_accum = 0.0;            // sum of local error estimates (component 0)
};

// Dormand-Prince coefficients.
inline constexpr double A21 = 1.0 / 5;
inline constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
inline constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
inline constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                        A54 = -212.0 / 729;
inline constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                        A64 = 49.0 / 176, A65 = -5103.0 / 18656;
inline constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                        B5 = -2187.0 / 6784, B6 = 11.0 / 84;
inline constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                        E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
inline constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                        D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                        D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

inline IntegrationResult integrate(const Rhs& f, double t0, double t1, State y0,
                                   const IntegratorOptions& opt,
                                   const std::vector<EventSpec>& events = {}) {
    IntegrationResult out;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double hmax = opt.max_step > 0.0 ? opt.max_step : span / 4.0;

    double t = t0;
    State y = y0;
    State k1 = f(t, y);
    out.steps.push_back({t, y, {}});

    std::vector<double> ev_prev(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) ev_prev[i] = events[i].fn(t, y);

    double h = dir * std::min(1e-3 * span + opt.min_step, hmax);
    double facold = 1e-4;
    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    bool last = false;

    auto axpy = [](State& acc, double a, const State& v) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * v[i];
    };

    while (true) {
        if (std::abs(h) < opt.min_step) {
            out.reason = StopReason::StepUnderflow;
            break;
        }
        if (dir * (t + h - t1) >= 0.0) {
            h = t1 - t;
            last = true;
        }

        State k2, k3, k4, k5, k6, k7, ytmp;
        auto stage = [&](double c, std::initializer_list<std::pair<double, const State*>> terms) {
            ytmp = y;
            for (auto& [a, k] : terms) axpy(ytmp, h * a, *k);
            return f(t + c * h, ytmp);
        };
        k2 = stage(0.2, {{A21, &k1}});
        k3 = stage(0.3, {{A31, &k1}, {A32, &k2}});
        k4 = stage(0.8, {{A41, &k1}, {A42, &k2}, {A43, &k3}});
        k5 = stage(8.0 / 9, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}});
        k6 = stage(1.0, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}});

        State ynew = y;
        axpy(ynew, h * B1, k1);
        axpy(ynew, h * B3, k3);
        axpy(ynew, h * B4, k4);
        axpy(ynew, h * B5, k5);
        axpy(ynew, h * B6, k6);
        k7 = f(t + h, ynew);

        double err = 0.0;
        State errv{};
        for (std::size_t i = 0; i < y.size(); ++i) {
            errv[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                           E7 * k7[i]);
            const double sci = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double e = errv[i] / sci;
            err += e * e;
        }
        err = std::sqrt(err / y.size());
        if (!std::isfinite(err)) err = 2.0;

        const double fac11 = std::pow(std::max(err, 1e-20), expo1);
        if (err <= 1.0) {
            // accept
            DenseStep ds;
            ds.t0 = t;
            ds.h = h;
            State dy;
            for (std::size_t i = 0; i < y.size(); ++i) dy[i] = ynew[i] - y[i];
            for (std::size_t i = 0; i < y.size(); ++i) {
                ds.cont[0][i] = y[i];
                ds.cont[1][i] = dy[i];
                ds.cont[2][i] = h * k1[i] - dy[i];
                ds.cont[3][i] = dy[i] - h * k7[i] - ds.cont[2][i];
                ds.cont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] +
                                     D6 * k6[i] + D7 * k7[i]);
            }
            out.err_accum += std::abs(errv[0]);

            // event check on [t, t+h]
            int fired = -1;
            double t_event = t + h;
            for (std::size_t i = 0; i < events.size(); ++i) {
                const double g1 = events[i].fn(t + h, ynew);
                if (ev_prev[i] == 0.0 || (ev_prev[i] < 0.0) == (g1 < 0.0)) {
                    ev_prev[i] = g1;
                    continue;
                }
                // bisect the dense interpolant to 1e-12 in t
                double a = t, b = t + h, ga = ev_prev[i];
                for (int it = 0; it < 80 && std::abs(b - a) > 1e-12; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double gm = events[i].fn(mid, ds.eval(mid));
                    if ((ga < 0.0) == (gm < 0.0)) {
                        a = mid;
                        ga = gm;
                    } else {
                        b = mid;
                    }
                }
                const double tc = 0.5 * (a + b);
                if (fired < 0 || dir * (tc - t_event) < 0.0) {
                    fired = events[i].id;
                    t_event = tc;
                }
                ev_prev[i] = g1;
            }

            if (fired >= 0) {
                State ye = ds.eval(t_event);
                out.steps.push_back({t_event, ye, ds});
                out.reason = StopReason::Event;
                out.event_id = fired;
                out.t_end = t_event;
                out.y_end = ye;
                return out;
            }

            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            out.steps.push_back({t, y, ds});
            if (last) {
                out.reason = StopReason::ReachedEnd;
                break;
            }
            facold = std::max(err, 1e-4);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(0.2, std::min(5.0, safe / fac));
            h = dir * std::min(std::abs(h) * fac, hmax);
        } else {
            const double fac = std::max(0.2, safe / fac11);
            h *= fac;
            last = false;
        }
    }
    out.t_end = t;
    out.y_end = y;
    return out;
}

}  // namespace rk
}  // namespace guderley
