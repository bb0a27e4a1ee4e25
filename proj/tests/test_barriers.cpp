#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "guderley/barriers.hpp"

using namespace guderley;

TEST_CASE("frak_b vanishes where the barrier parabola meets a triple point") {
    SECTION("kappa = k(gamma, z) at V6") {
        for (double gamma : {1.2, 1.6, 2.0}) {
            for (int m : {1, 2}) {
                const ParameterWindows w = parameter_windows(gamma, m);
                const double z = 0.5 * (w.z_m + w.z_M);
                const GasConfig cfg = make_config(gamma, m, z);
                const double V6 = critical_points(cfg).P6.V;
                CHECK(std::abs(frak_b(V6, cfg, k_of(gamma, z))) < 1e-11);
            }
        }
    }
    SECTION("kappa = 1 at V = -C8(z1)^2") {
        for (double gamma : {1.75, 2.1, 2.4}) {
            for (int m : {1, 2}) {
                const ParameterWindows w = parameter_windows(gamma, m);
                REQUIRE(w.z_1.has_value());
                const GasConfig cfg = make_config(gamma, m, *w.z_1);
                const double C8 = critical_points(cfg).P8.C;
                CHECK(std::abs(frak_b(-C8 * C8, cfg, 1.0)) < 1e-11);
            }
        }
    }
}

TEST_CASE("frak_b identity against F and G on the parabola") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ug(1.05, 3.0), uz(0.1, 1.0), uv(-0.9, -0.05),
        uk(0.5, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double gamma = ug(rng);
        const int m = 1 + (i % 2);
        const GasConfig cfg = make_config(gamma, m, uz(rng) * z_max(gamma));
        const double V = uv(rng);
        const double kappa = uk(rng);
        const double C = std::sqrt(-kappa * V);
        const FGDValues f = eval_fgd(cfg, {V, C});
        const double lhs = std::sqrt(kappa * (-V)) * frak_b(V, cfg, kappa) / 2.0;
        const double rhs = f.F + 0.5 * std::sqrt(kappa / (-V)) * f.G;
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-13));
    }
    CHECK_THROWS_AS(frak_b(-1.0, make_config(1.5, 1, 0.1), 1.0), Error);
    CHECK_THROWS_AS(frak_b(-0.5, make_config(1.5, 1, 0.1), 0.0), Error);
}

TEST_CASE("frak_b_s vanishes at P8(z_M) and is positive at V1") {
    for (double gamma : {2.0, 2.5, 3.0}) {
        const double zM = z_max(gamma);
        const GasConfig cfg = make_config(gamma, 1, zM);
        const double V8 = critical_points(cfg).P8.V;
        CHECK(std::abs(frak_b_s(V8, cfg)) < 1e-11);
    }
    const GasConfig cfg = make_config(2.5, 1, 0.05);
    CHECK(frak_b_s(jump_state(2.5).p1.V, cfg) > 0.0);
}

TEST_CASE("frak_b_s identity on the line C = -sqrt(gamma/2) V") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ug(2.0, 3.0), uz(0.1, 1.0), uv(-0.9, -0.1);
    for (int i = 0; i < 100; ++i) {
        const double gamma = ug(rng);
        const int m = 1 + (i % 2);
        const GasConfig cfg = make_config(gamma, m, uz(rng) * z_max(gamma));
        const double V = uv(rng);
        const double C = -std::sqrt(gamma / 2.0) * V;
        const FGDValues f = eval_fgd(cfg, {V, C});
        const double lhs = f.F + std::sqrt(gamma / 2.0) * f.G;
        const double rhs = -m * std::sqrt(gamma / 2.0) * V * V * frak_b_s(V, cfg);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-13));
    }
}

TEST_CASE("delta bound dominates the computed solution and increases in z") {
    for (int m : {1, 2}) {
        for (double gamma : {1.3, 1.7, 2.0}) {
            const ParameterWindows w = parameter_windows(gamma, m);
            const double C1 = jump_state(gamma).p1.C;

            // delta(V1; z_g) < log C1 (the z_g lower-solution inequality)
            CHECK(delta_bound(gamma, m, *w.z_g) < std::log(C1));

            // increasing in z over [z_m, z_g]
            double prev = -1e300;
            for (int i = 0; i <= 50; ++i) {
                const double z = w.z_m + (*w.z_g - w.z_m) * i / 50.0;
                const double d = delta_bound(gamma, m, z);
                CHECK(d > prev);
                prev = d;
            }

            // log C(V1) < delta(V1; z) for sampled z
            for (double frac : {0.25, 0.75, 1.0}) {
                const double z = w.z_m + (*w.z_g - w.z_m) * frac;
                const double cv1 = left_residual(gamma, m, z, TriplePoint::P6) + C1;
                CHECK(std::log(cv1) < delta_bound(gamma, m, z));
            }
        }
    }
    CHECK_THROWS_AS(delta_bound(2.5, 1, 0.05), Error);
    CHECK_THROWS_AS(delta_bound(1.5, 1, z_max(1.5)), Error);
}

TEST_CASE("delta bound agrees with direct quadrature of f1/g1") {
    const double gamma = 1.6;
    const int m = 2;
    const ParameterWindows w = parameter_windows(gamma, m);
    const double z = 0.5 * (w.z_m + *w.z_g);
    const GasConfig cfg = make_config(gamma, m, z);
    const CriticalPoints cp = critical_points(cfg);
    // composite Simpson for -int_{V1}^{V6} f1/g1 dV + log C6
    const int n = 20000;
    const double a = cp.P1.V, b = cp.P6.V;
    const double h = (b - a) / n;
    auto f = [&](double V) {
        const FGFactors d = fg_decomposition(cfg, V);
        return d.f1 / d.g1;
    };
    double integral = f(a) + f(b);
    for (int i = 1; i < n; ++i) integral += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    integral *= h / 3.0;
    const double expected = -integral + std::log(cp.P6.C);
    CHECK(delta_bound(gamma, m, z) == Catch::Approx(expected).epsilon(1e-10));
}

TEST_CASE("slope inequalities at the triple points") {
    SECTION("P6 for gamma in (1,2], z in [z_g, z_M]") {
        for (const auto& [gamma, m] : {std::pair{1.5, 1}, {1.2, 2}, {2.0, 1}}) {
            const BarrierReport r =
                slope_inequalities(make_config(gamma, m, z_max(gamma)), TriplePoint::P6);
            CHECK(r.passed);
            CHECK(r.name == BarrierName::SlopeP6);
        }
    }
    SECTION("P8 at z = z_1 and z = z_2") {
        const ParameterWindows w2 = parameter_windows(2.0, 2);
        const BarrierReport r1 =
            slope_inequalities(make_config(2.0, 2, *w2.z_1), TriplePoint::P8);
        CHECK(r1.passed);
        CHECK(r1.name == BarrierName::SlopeZ1);

        const ParameterWindows w3 = parameter_windows(3.0, 1);
        const BarrierReport r2 =
            slope_inequalities(make_config(3.0, 1, *w3.z_2), TriplePoint::P8);
        CHECK(r2.passed);
        CHECK(r2.name == BarrierName::SlopeZ2);
    }
    SECTION("domain guards") {
        CHECK_THROWS_AS(slope_inequalities(make_config(2.5, 1, 0.1), TriplePoint::P6), Error);
        CHECK_THROWS_AS(slope_inequalities(make_config(2.5, 1, 0.1), TriplePoint::P8), Error);
        const ParameterWindows w = parameter_windows(1.5, 1);
        CHECK_THROWS_AS(
            slope_inequalities(make_config(1.5, 1, 0.5 * *w.z_g), TriplePoint::P6), Error);
    }
}

TEST_CASE("C8 concavity combination is negative and blows up at z_M") {
    CHECK(c8_concavity(2.0, 0.05) < 0.0);
    for (double gamma : {1.3, 2.1, 3.0})
        for (double frac : {0.1, 0.5, 0.9})
            CHECK(c8_concavity(gamma, frac * z_max(gamma)) < 0.0);

    // magnitude diverges like w^-3 approaching z_M
    const double zM = z_max(2.0);
    double prev = 0.0;
    for (double frac : {0.9, 0.99, 0.999, 0.9999}) {
        const double mag = std::abs(c8_concavity(2.0, frac * zM));
        CHECK(mag > prev);
        prev = mag;
    }
    CHECK_THROWS_AS(c8_concavity(2.0, zM), Error);
}

TEST_CASE("appendix polynomial sign claims on fine gamma grids") {
    const double g1 = gamma_one();
    const double gs = gamma_star();
    const int n = 2000;
    auto grid = [&](double lo, double hi, auto poly, bool positive) {
        for (int i = 1; i <= n; ++i) {
            const double g = lo + (hi - lo) * i / n;
            const double v = poly(g);
            if (positive)
                CHECK(v > 0.0);
            else
                CHECK(v < 0.0);
        }
    };
    // cubic controlling z_g < 1/8 for m = 2
    grid(1.0, 2.0, [](double g) { return -g * g * g - 7.0 * g * g + 106.0 / 3.0 * g - 36.0; },
         false);
    // quintic from the m = 2 lower-solution bound
    grid(1.0, 2.0,
         [](double g) {
             return 81.0 * (g - 1.0) * std::pow(g + 1.0, 4) - 8.0 * g * std::pow(3.0 * g - 1.0, 4);
         },
         false);
    // discriminant bound for the B1 left-side argument, m = 2
    grid(gs, g1,
         [](double g) {
             return 8.0 * (g - 2.0) * (g - 2.0) * g * g / 625.0 +
                    2.0 * (1.0 - 2.0 * g) * g * (g + 1.0) / 25.0 + (1.0 - 2.0 * g) * (2.0 - g);
         },
         false);
    const double s2 = std::sqrt(2.0);
    grid(gs, g1,
         [&](double g) {
             return (3.0 * s2 - 4.0) * g + 1.0 - s2 +
                    2.0 / 25.0 * (-(2.0 - s2) * g * g + (3.0 - 2.0 * s2) * g + 2.0 * s2 + 2.0);
         },
         true);
    grid(gs, g1,
         [&](double g) {
             return 2.0 * (3.0 * s2 - 4.0) * g + 3.0 - 3.0 * s2 +
                    4.0 / 25.0 * (-(2.0 - s2) * g * g + (3.0 - 2.0 * s2) * g + 2.0 * s2 + 2.0);
         },
         true);
    grid(g1, 3.0, [](double g) { return g * g * g - 17.0 * g * g + 40.0 * g - 14.0; }, false);
    grid(g1, 3.0,
         [](double g) {
             return -std::pow(g, 4) + 12.0 * g * g * g - 36.0 * g * g + 32.0 * g + 1.0;
         },
         true);
    grid(1.0, 2.0, [](double g) { return 2.0 * g * g * g - 12.0 * g * g + 23.0 * g - 11.0; },
         true);
    grid(1.0, 2.0,
         [](double g) {
             return -std::pow(g, 4) + 12.0 * g * g * g - 14.0 * g * g + 24.0 * g - 9.0;
         },
         true);
    grid(1.0, 2.0,
         [](double g) {
             return -36.0 * std::pow(g, 4) + 114.0 * g * g * g - 4.0 * g * g - 83.0 * g + 15.0;
         },
         true);
}

TEST_CASE("grid-sampled barrier sign claims pass for representative gases") {
    for (const auto& [gamma, m] :
         {std::pair{1.3, 1}, {1.3, 2}, {1.9, 1}, {2.2, 2}, {2.8, 1}, {3.0, 2}}) {
        const auto reports = verify_barrier_signs(gamma, m, 250);
        for (const auto& r : reports) {
            INFO("gamma=" << gamma << " m=" << m << " " << barrier_name(r.name) << " "
                          << r.detail << " margin=" << r.min_margin);
            CHECK(r.passed);
        }
    }
}

TEST_CASE("converged trajectories clear their regime barriers") {
    for (const auto& [gamma, m] : {std::pair{1.4, 2}, {2.5, 1}}) {
        const ShootResult r = solve_zstd(gamma, m);
        for (const auto& rep : check_trajectory_barriers(r.left)) {
            INFO("left " << barrier_name(rep.name) << " margin=" << rep.min_margin);
            CHECK(rep.passed);
            CHECK(rep.samples > 0);
        }
        for (const auto& rep : check_trajectory_barriers(r.right)) {
            INFO("right " << barrier_name(rep.name) << " margin=" << rep.min_margin);
            CHECK(rep.passed);
            CHECK(rep.samples > 0);
        }
    }
}
