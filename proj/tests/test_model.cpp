#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "guderley/critical.hpp"
#include "guderley/model.hpp"

using namespace guderley;

namespace {
double fgd_scale(PhasePoint p) {
    const double s = std::max({1.0, std::abs(p.V), std::abs(p.C)});
    return s * s * s;
}
}  // namespace

TEST_CASE("make_config populates derived fields") {
    const GasConfig cfg = make_config(2.0, 1, 0.1);
    CHECK(cfg.lambda == Catch::Approx(1.2).epsilon(1e-15));
    CHECK(cfg.a1 == Catch::Approx(1.5).epsilon(1e-15));
    CHECK(cfg.q == Catch::Approx(2.0 * 0.2 / 2.0).epsilon(1e-15));

    const GasConfig sph = make_config(2.0, 2, 0.125);  // z = z_M(2)
    CHECK(sph.lambda == Catch::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("make_config rejects out-of-range parameters") {
    CHECK_THROWS_AS(make_config(1.0, 1, 0.1), Error);
    CHECK_THROWS_AS(make_config(3.5, 1, 0.1), Error);
    CHECK_THROWS_AS(make_config(2.0, 3, 0.1), Error);
    CHECK_THROWS_AS(make_config(2.0, 1, 0.0), Error);
    CHECK_THROWS_AS(make_config(2.0, 1, 0.13), Error);  // > z_M(2) = 1/8
    try {
        make_config(1.0, 1, 0.1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
        CHECK(std::string(e.what()).find("gamma") != std::string::npos);
    }
}

TEST_CASE("lambda-z round trip and a1 positivity") {
    for (double gamma : {1.1, 1.7, 2.3, 3.0}) {
        for (int m : {1, 2}) {
            for (int i = 1; i <= 20; ++i) {
                const double z = z_max(gamma) * (i / 20.0);
                const GasConfig cfg = make_config(gamma, m, z);
                // exact up to the rounding of m*gamma*z + 1, which loses
                // relative precision in z as lambda - 1 -> 0
                const double z_back = (cfg.lambda - 1.0) / (m * gamma);
                CHECK(z_back == Catch::Approx(z).epsilon(1e-13));
                CHECK(cfg.a1 > 0.0);
            }
        }
    }
}

TEST_CASE("eval_fgd closed-form spot values") {
    const GasConfig cfg = make_config(2.0, 1, 0.1);

    SECTION("post-shock point for gamma = 2") {
        const FGDValues r = eval_fgd(cfg, {-2.0 / 3.0, 2.0 / 3.0});
        CHECK(r.D == Catch::Approx(-1.0 / 3.0).epsilon(1e-14));
        CHECK(r.F > 0.0);
        CHECK(r.G < 0.0);
    }

    SECTION("origin is a double point with D = 1") {
        const FGDValues r = eval_fgd(cfg, {0.0, 0.0});
        CHECK(r.F == 0.0);
        CHECK(r.G == 0.0);
        CHECK(r.D == 1.0);
    }

    SECTION("vanishing at the triple points") {
        for (double gamma : {1.2, 1.9, 2.6}) {
            for (int m : {1, 2}) {
                const GasConfig c = make_config(gamma, m, 0.7 * z_max(gamma));
                const CriticalPoints cp = critical_points(c);
                for (PhasePoint p : {cp.P6, cp.P8}) {
                    const FGDValues r = eval_fgd(c, p);
                    const double scale = fgd_scale(p);
                    CHECK(std::abs(r.F) < 1e-12 * scale);
                    CHECK(std::abs(r.G) < 1e-12 * scale);
                    CHECK(std::abs(r.D) < 1e-12 * scale);
                }
            }
        }
    }

    SECTION("singularity guard at V = -1") {
        CHECK_THROWS_AS(eval_fgd(cfg, {-1.0, 0.5}), Error);
    }
}

TEST_CASE("eval_partials identities at the sonic points") {
    for (double gamma : {1.3, 2.0, 2.8}) {
        for (int m : {1, 2}) {
            const double z = 0.6 * z_max(gamma);
            const GasConfig cfg = make_config(gamma, m, z);
            const CriticalPoints cp = critical_points(cfg);

            for (bool at_p6 : {true, false}) {
                const PhasePoint p = at_p6 ? cp.P6 : cp.P8;
                const Partials d = eval_partials(cfg, p);
                const double sum_g = d.G_C + d.G_V;
                const double sum_f = d.F_C + d.F_V;
                CHECK(sum_f == Catch::Approx(-(gamma - 1.0) / 2.0 * sum_g).margin(1e-12));
                const double expected = (at_p6 ? -1.0 : 1.0) * m * cp.w * p.C;
                CHECK(sum_g == Catch::Approx(expected).margin(1e-12));

                // the three algebraically distinct forms of F_V coincide here
                const double opv = 1.0 + p.V;
                const double fv1 = p.C * (-m * cfg.z - 2.0 * cfg.a1 * opv + cfg.a2);
                const double fv2 = -m * cfg.z * p.C - 2.0 * cfg.a1 * opv * opv + cfg.a2 * opv;
                const double fv3 = p.C * p.C - 3.0 * cfg.a1 * opv * opv +
                                   2.0 * cfg.a2 * opv - cfg.a3;
                CHECK(std::abs(d.F_V - fv1) < 1e-12);
                CHECK(std::abs(d.F_V - fv2) < 1e-12);
                CHECK(std::abs(d.F_V - fv3) < 1e-12);

                // and the sonic-simplified G_C, F_C match the generic forms
                CHECK(std::abs(d.G_C - 2.0 * p.V * (cfg.lambda + p.V)) < 1e-12);
                CHECK(std::abs(d.F_C - 2.0 * p.C * (p.C + (cfg.lambda - 1.0) / gamma)) < 1e-12);
            }
        }
    }
}

TEST_CASE("eval_partials matches finite differences at generic points") {
    const GasConfig cfg = make_config(1.7, 2, 0.08);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uv(-0.9, -0.1), uc(0.1, 1.0);
    for (int i = 0; i < 20; ++i) {
        const PhasePoint p{uv(rng), uc(rng)};
        const Partials d = eval_partials(cfg, p);
        const double h = 1e-6;
        const double fc = (eval_fgd(cfg, {p.V, p.C + h}).F - eval_fgd(cfg, {p.V, p.C - h}).F) /
                          (2.0 * h);
        const double gv = (eval_fgd(cfg, {p.V + h, p.C}).G - eval_fgd(cfg, {p.V - h, p.C}).G) /
                          (2.0 * h);
        const double fv = (eval_fgd(cfg, {p.V + h, p.C}).F - eval_fgd(cfg, {p.V - h, p.C}).F) /
                          (2.0 * h);
        CHECK(d.F_C == Catch::Approx(fc).epsilon(1e-6));
        CHECK(d.G_V == Catch::Approx(gv).epsilon(1e-6));
        CHECK(d.F_V == Catch::Approx(fv).epsilon(1e-6).margin(1e-8));
    }
}

TEST_CASE("jump_state closed forms and signs") {
    const JumpState s3 = jump_state(3.0);
    CHECK(s3.p1.C == Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));

    const JumpState s2 = jump_state(2.0);
    CHECK(s2.p1.V == Catch::Approx(-2.0 / 3.0).epsilon(1e-15));
    CHECK(s2.p1.C == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(s2.R1 == Catch::Approx(3.0).epsilon(1e-15));

    const JumpState s14 = jump_state(1.4);
    CHECK(s14.p1.V == Catch::Approx(-5.0 / 6.0).epsilon(1e-15));
    CHECK(s14.R1 == Catch::Approx(6.0).epsilon(1e-15));

    CHECK_THROWS_AS(jump_state(1.0), Error);
    CHECK_THROWS_AS(jump_state(3.2), Error);

    // D < 0, F > 0, G < 0 at P1 over (gamma, z) grids
    for (int ig = 1; ig <= 20; ++ig) {
        const double gamma = 1.0 + 2.0 * ig / 20.0;
        const JumpState js = jump_state(gamma);
        for (int m : {1, 2}) {
            for (int iz = 1; iz <= 10; ++iz) {
                const GasConfig cfg = make_config(gamma, m, z_max(gamma) * (iz / 10.0));
                const FGDValues r = eval_fgd(cfg, js.p1);
                CHECK(r.D < 0.0);
                CHECK(r.F > 0.0);
                CHECK(r.G < 0.0);
            }
        }
    }
}

TEST_CASE("jump state is monotone increasing in gamma") {
    double prevV = -1.0, prevC = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double gamma = 1.0 + 1e-6 + (2.0 - 1e-6) * i / 99.0;
        const JumpState js = jump_state(gamma);
        if (i > 0) {
            CHECK(js.p1.V > prevV);
            CHECK(js.p1.C > prevC);
        }
        prevV = js.p1.V;
        prevC = js.p1.C;
    }
}

TEST_CASE("fg_decomposition reconstructs F and G") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ug(1.05, 3.0), uz(0.05, 1.0), uv(-0.95, -0.01),
        uc(0.01, 1.5);
    for (int i = 0; i < 100; ++i) {
        const double gamma = ug(rng);
        const int m = 1 + (i % 2);
        const GasConfig cfg = make_config(gamma, m, uz(rng) * z_max(gamma));
        const double V = uv(rng), C = uc(rng);
        const FGFactors f = fg_decomposition(cfg, V);
        const FGDValues r = eval_fgd(cfg, {V, C});
        const double scale = std::max(1.0, std::abs(r.G));
        CHECK(std::abs(r.G - (C * C * f.g1 - f.g2)) < 1e-14 * scale);
        CHECK(std::abs(r.F - C * (C * C * f.f1 - f.f2)) < 1e-14 * std::max(1.0, std::abs(r.F)));
    }
}

TEST_CASE("q(V) vanishes at V4, V6, V8 and factors as the cubic") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ug(1.05, 3.0), uz(0.1, 0.98), uv(-0.95, -0.02);
    for (int i = 0; i < 40; ++i) {
        const double gamma = ug(rng);
        const int m = 1 + (i % 2);
        const GasConfig cfg = make_config(gamma, m, uz(rng) * z_max(gamma));
        const CriticalPoints cp = critical_points(cfg);
        for (double V : {cp.P4.V, cp.P6.V, cp.P8.V})
            CHECK(std::abs(fg_decomposition(cfg, V).q) < 1e-10);

        const double lead = m * ((m + 1) * (gamma - 1.0) + 2.0) / 2.0;
        const double V = uv(rng);
        const double expect = lead * (V - cp.P4.V) * (V - cp.P6.V) * (V - cp.P8.V);
        CHECK(fg_decomposition(cfg, V).q ==
              Catch::Approx(expect).epsilon(1e-10).margin(1e-12));
    }
}
