// Command-line front end: solve / sweep / profile / verify / portrait.
// Data outputs are deterministic (no timestamps, 17 significant digits).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "guderley/guderley.hpp"

namespace g = guderley;
using nlohmann::json;

namespace {

struct CommonArgs {
    double gamma = 0.0;
    int m = 2;
    double tol = 1e-11;
    double rtol = 1e-10;
    double atol = 1e-12;
    int threads = 0;
    std::string out;
    std::string cache;
};

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content << "\n";
    else
        g::write_file(out_path, content);
}

g::IntegratorOptions integrator_options(const CommonArgs& a) {
    g::IntegratorOptions opt;
    opt.rtol = a.rtol;
    opt.atol = a.atol;
    return opt;
}

// Advisory cache: key on (version, gamma, m, tolerances); a hit replays the
// stored JSON byte-for-byte.
std::optional<std::string> cache_lookup(const CommonArgs& a) {
    if (a.cache.empty()) return std::nullopt;
    const std::string path =
        a.cache + "/" + g::cache_key(a.gamma, a.m, a.tol, integrator_options(a)) + ".json";
    std::string content;
    if (g::read_file(path, content)) return content;
    return std::nullopt;
}

void cache_store(const CommonArgs& a, const std::string& content) {
    if (a.cache.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(a.cache, ec);
    if (ec) return;  // cache is advisory, never required
    const std::string path =
        a.cache + "/" + g::cache_key(a.gamma, a.m, a.tol, integrator_options(a)) + ".json";
    g::write_file(path, content);
}

int cmd_solve(const CommonArgs& a) {
    if (auto hit = cache_lookup(a)) {
        emit(a.out, *hit);
        return 0;
    }
    const g::ShootResult r = g::solve_zstd(a.gamma, a.m, a.tol, integrator_options(a));
    const std::string js = g::result_to_json(r);
    cache_store(a, js);
    emit(a.out, js);
    if (!a.out.empty())
        std::cout << "z_std=" << g::fmt17(r.z_std) << " lambda=" << g::fmt17(r.lambda_std)
                  << " triple_point=" << g::triple_point_name(r.triple)
                  << " residual=" << g::fmt17(r.residual) << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& a, double gamma_from, double gamma_to, double step) {
    if (!(step > 0.0)) g::throw_domain("sweep requires --step > 0");
    std::vector<double> gammas;
    for (double x = gamma_from; x <= gamma_to + 1e-12; x += step)
        gammas.push_back(std::min(x, gamma_to));
    for (double x : gammas) g::validate_gamma_m(x, a.m);

    const auto items = g::sweep(gammas, a.m, a.tol, a.threads, integrator_options(a));
    g::CsvWriter csv({"gamma", "m", "z_std", "lambda", "triple", "residual"});
    int failures = 0;
    for (const auto& it : items) {
        if (it.ok) {
            csv.row({g::fmt17(it.gamma), std::to_string(it.m), g::fmt17(it.result.z_std),
                     g::fmt17(it.result.lambda_std), g::triple_point_name(it.result.triple),
                     g::fmt17(it.result.residual)});
        } else {
            ++failures;
            std::cerr << "sweep item gamma=" << it.gamma << " failed: " << it.error << "\n";
        }
    }
    emit(a.out, csv.str());
    return failures == 0 ? 0 : 3;
}

int cmd_profile(const CommonArgs& a, double xmin, int grid_n, const std::string& meta_out,
                const std::string& traj_out) {
    const g::ShootResult r = g::solve_zstd(a.gamma, a.m, a.tol, integrator_options(a));
    const g::SimilarityProfile prof = g::build_profile(r, xmin, grid_n);
    std::optional<g::CollapseLimits> limits;
    if (xmin <= 1e-4) limits = g::collapse_limits(prof);
    emit(a.out, g::profile_to_csv(prof));
    const std::string meta = g::profile_metadata_json(prof, limits ? &*limits : nullptr);
    if (!meta_out.empty())
        g::write_file(meta_out, meta);
    else
        std::cout << meta << "\n";
    if (!traj_out.empty()) {
        std::string csv = g::trajectory_to_csv(r.left);
        // append the right side without its duplicated header
        const std::string right = g::trajectory_to_csv(r.right);
        csv += right.substr(right.find("\r\n") + 2);
        g::write_file(traj_out, csv);
    }
    return 0;
}

int cmd_verify(const CommonArgs& a, int samples, bool dump_series) {
    const g::ShootResult r = g::solve_zstd(a.gamma, a.m, a.tol, integrator_options(a));
    std::vector<g::BarrierReport> reports = g::verify_barrier_signs(a.gamma, a.m, samples);
    for (auto& rep : g::check_trajectory_barriers(r.left)) reports.push_back(rep);
    for (auto& rep : g::check_trajectory_barriers(r.right)) reports.push_back(rep);
    {
        const g::ParameterWindows w = g::parameter_windows(a.gamma, a.m);
        const g::GasConfig cfg = g::make_config(a.gamma, a.m, r.z_std);
        if (a.gamma <= 2.0 && r.triple == g::TriplePoint::P6 && r.z_std >= *w.z_g)
            reports.push_back(g::slope_inequalities(cfg, g::TriplePoint::P6));
        if (w.z_1)
            reports.push_back(g::slope_inequalities(g::make_config(a.gamma, a.m, *w.z_1),
                                                    g::TriplePoint::P8));
        if (w.z_2)
            reports.push_back(g::slope_inequalities(g::make_config(a.gamma, a.m, *w.z_2),
                                                    g::TriplePoint::P8));
    }
    emit(a.out, g::barrier_reports_to_json(reports));
    if (dump_series) {
        const g::GasConfig cfg = g::make_config(a.gamma, a.m, r.z_std);
        std::cerr << g::series_dump_json(g::expand(cfg, r.triple)) << "\n";
    }
    for (const auto& rep : reports)
        if (!rep.passed) return 3;
    return 0;
}

int cmd_portrait(const CommonArgs& a, double z) {
    const g::GasConfig cfg = g::make_config(a.gamma, a.m, z);
    const g::CriticalPoints cp = g::critical_points(cfg);
    const g::JumpState js = g::jump_state(a.gamma);
    g::CsvWriter csv({"layer", "V", "C"});

    const double V_lo = js.p1.V - 0.05;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double V = V_lo + (0.0 - V_lo) * i / n;
        if (V > -1.0) csv.row({"sonic_line", g::fmt17(V), g::fmt17(1.0 + V)});
    }
    for (int i = 0; i <= n; ++i) {
        const double V = V_lo + (0.0 - V_lo) * i / n;
        if (std::abs(1.0 + V) < 1e-9) continue;
        const g::FGFactors f = g::fg_decomposition(cfg, V);
        if (f.f1 != 0.0 && f.f2 / f.f1 >= 0.0)
            csv.row({"F_nullcline", g::fmt17(V), g::fmt17(std::sqrt(f.f2 / f.f1))});
        if (f.g1 != 0.0 && f.g2 / f.g1 >= 0.0)
            csv.row({"G_nullcline", g::fmt17(V), g::fmt17(std::sqrt(f.g2 / f.g1))});
    }
    const std::pair<const char*, g::PhasePoint> pts[] = {
        {"P0", cp.P0}, {"P1", cp.P1}, {"P2", cp.P2}, {"P3", cp.P3}, {"P4", cp.P4},
        {"P5", cp.P5}, {"P6", cp.P6}, {"P7", cp.P7}, {"P8", cp.P8}, {"P9", cp.P9}};
    for (const auto& [name, p] : pts)
        csv.row({std::string("critical:") + name, g::fmt17(p.V), g::fmt17(p.C)});

    const g::ParameterWindows w = g::parameter_windows(a.gamma, a.m);
    for (const g::TriplePoint which : {g::TriplePoint::P6, g::TriplePoint::P8}) {
        if (which == g::TriplePoint::P6 && z < w.z_m) continue;
        try {
            const g::SonicExpansion exp = g::expand(cfg, which);
            const g::Trajectory left = g::propagate_left(exp, js.p1.V, integrator_options(a));
            const g::Trajectory right = g::propagate_right(exp, integrator_options(a));
            const std::string tag = g::triple_point_name(which);
            for (const auto& nd : left.nodes)
                csv.row({"trajectory:" + tag + ":left", g::fmt17(nd.V), g::fmt17(nd.C)});
            for (const auto& nd : right.nodes)
                csv.row({"trajectory:" + tag + ":right", g::fmt17(nd.V), g::fmt17(nd.C)});
        } catch (const g::Error& e) {
            std::cerr << "portrait: skipping " << g::triple_point_name(which) << ": " << e.what()
                      << "\n";
        }
    }
    emit(a.out, csv.str());
    return 0;
}

// --config FILE provides defaults for any long flag, overridden by argv.
json load_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::string content;
            if (!g::read_file(argv[i + 1], content))
                g::throw_domain(std::string("cannot read config file: ") + argv[i + 1]);
            json j = json::parse(content, nullptr, false);
            if (j.is_discarded())
                g::throw_domain(std::string("config file is not valid JSON: ") + argv[i + 1]);
            return j;
        }
    }
    return json::object();
}

template <typename T>
void config_default(const json& cfg, const char* key, T& slot) {
    if (cfg.contains(key)) slot = cfg.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
    try {
        const json cfg = load_config(argc, argv);

        CLI::App app{"Self-similar converging shock solver"};
        app.require_subcommand(1);
        std::string config_path;
        app.add_option("--config", config_path, "JSON config file mirroring the flags");

        CommonArgs a;
        config_default(cfg, "gamma", a.gamma);
        config_default(cfg, "m", a.m);
        config_default(cfg, "tol", a.tol);
        config_default(cfg, "rtol", a.rtol);
        config_default(cfg, "atol", a.atol);
        config_default(cfg, "threads", a.threads);
        config_default(cfg, "out", a.out);
        config_default(cfg, "cache", a.cache);

        double gamma_from = 1.1, gamma_to = 3.0, step = 0.1;
        double xmin = 2e-6, z = 0.0;
        int grid_n = 512, samples = 1000;
        bool dump_series = false;
        std::string meta_out, traj_out;
        config_default(cfg, "gamma-from", gamma_from);
        config_default(cfg, "gamma-to", gamma_to);
        config_default(cfg, "step", step);
        config_default(cfg, "xmin", xmin);
        config_default(cfg, "grid-n", grid_n);
        config_default(cfg, "z", z);
        config_default(cfg, "samples", samples);

        auto add_common = [&](CLI::App* sub, bool needs_gamma) {
            sub->add_option("--config", config_path, "JSON config file mirroring the flags");
            auto* og = sub->add_option("--gamma", a.gamma, "adiabatic index in (1, 3]");
            if (needs_gamma && !cfg.contains("gamma")) og->required();
            sub->add_option("--m", a.m, "symmetry: 1 cylindrical, 2 spherical");
            sub->add_option("--tol", a.tol, "z tolerance for the shooting solver");
            sub->add_option("--rtol", a.rtol, "integrator relative tolerance");
            sub->add_option("--atol", a.atol, "integrator absolute tolerance");
            sub->add_option("--threads", a.threads, "worker threads (0 = hardware)");
            sub->add_option("--out", a.out, "output path (stdout when omitted)");
            sub->add_option("--cache", a.cache, "advisory result cache directory");
        };

        CLI::App* solve = app.add_subcommand("solve", "find z_std for one gas");
        add_common(solve, true);

        CLI::App* sweepc = app.add_subcommand("sweep", "solve over a gamma grid");
        add_common(sweepc, false);
        sweepc->add_option("--gamma-from", gamma_from, "first gamma");
        sweepc->add_option("--gamma-to", gamma_to, "last gamma");
        sweepc->add_option("--step", step, "gamma increment");

        CLI::App* profile = app.add_subcommand("profile", "similarity profiles V, C, R of x");
        add_common(profile, true);
        profile->add_option("--xmin", xmin, "smallest |x| sampled");
        profile->add_option("--grid-n", grid_n, "profile rows");
        profile->add_option("--meta-out", meta_out, "metadata JSON path");
        profile->add_option("--traj-out", traj_out, "trajectory CSV path (V,C,x,F,G,D)");

        CLI::App* verify = app.add_subcommand("verify", "barrier and inequality reports");
        add_common(verify, true);
        verify->add_option("--samples", samples, "grid samples per axis");
        verify->add_flag("--dump-series", dump_series, "dump sonic series coefficients to stderr");

        CLI::App* portrait = app.add_subcommand("portrait", "phase-portrait layers as CSV");
        add_common(portrait, true);
        portrait->add_option("--z", z, "similarity parameter for the portrait")->required();

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;  // malformed flags are config errors
        }

        // same domain rules as make_config, before any compute starts
        g::validate_gamma_m(app.got_subcommand(sweepc) ? 1.5 : a.gamma, a.m);

        if (app.got_subcommand(solve)) return cmd_solve(a);
        if (app.got_subcommand(sweepc)) return cmd_sweep(a, gamma_from, gamma_to, step);
        if (app.got_subcommand(profile)) return cmd_profile(a, xmin, grid_n, meta_out, traj_out);
        if (app.got_subcommand(verify)) return cmd_verify(a, samples, dump_series);
        if (app.got_subcommand(portrait)) return cmd_portrait(a, z);
        return 2;
    } catch (const g::Error& e) {
        std::cerr << g::error_to_json(e) << "\n";
        switch (e.kind()) {
            case g::ErrorKind::Domain: return 2;
            case g::ErrorKind::Anomaly: return 3;
            case g::ErrorKind::NoBracket: return 4;
        }
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":{\"kind\":\"internal\",\"message\":\"" << e.what() << "\"}}\n";
        return 3;
    }
}
