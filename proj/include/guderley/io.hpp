#pragma once

// Deterministic result emission: numbers carry 17 significant digits so
// doubles round-trip, CSV is RFC-4180 (CRLF, '.' decimal separator), and
// repeated runs produce byte-identical files.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "guderley/barriers.hpp"
#include "guderley/profile.hpp"

namespace guderley {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal ordered JSON emitter; enough for the result schemas.
class JsonWriter {
  public:
    JsonWriter& begin_object() { return token("{"); }
    JsonWriter& end_object() { return close("}"); }
    JsonWriter& begin_array() { return token("["); }
    JsonWriter& end_array() { return close("]"); }

    JsonWriter& key(const std::string& k) {
        sep();
        out_ += '"' + k + "\":";
        fresh_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return raw(fmt17(v)); }
    JsonWriter& value(int v) { return raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(const std::string& s) {
        std::string esc;
        for (char c : s) {
            if (c == '"' || c == '\\') esc += '\\';
            if (c == '\n') {
                esc += "\\n";
                continue;
            }
            esc += c;
        }
        return raw('"' + esc + '"');
    }

    const std::string& str() const { return out_; }

  private:
    JsonWriter& token(const std::string& t) {
        sep();
        out_ += t;
        fresh_ = true;
        return *this;
    }
    JsonWriter& close(const std::string& t) {
        out_ += t;
        fresh_ = false;
        return *this;
    }
    JsonWriter& raw(const std::string& t) {
        sep();
        out_ += t;
        fresh_ = false;
        return *this;
    }
    void sep() {
        if (!fresh_ && !out_.empty()) {
            const char back = out_.back();
            if (back != '{' && back != '[' && back != ':') out_ += ',';
        }
        fresh_ = false;
    }
    std::string out_;
    bool fresh_ = true;
};

inline std::string result_to_json(const ShootResult& r) {
    JsonWriter w;
    w.begin_object();
    w.key("gamma").value(r.gamma);
    w.key("m").value(r.m);
    w.key("z_std").value(r.z_std);
    w.key("lambda_std").value(r.lambda_std);
    w.key("triple_point").value(std::string(triple_point_name(r.triple)));
    w.key("residual").value(r.residual);
    w.key("window").begin_array().value(r.window_lo).value(r.window_hi).end_array();
    w.key("iterations").value(r.iterations);
    w.key("solver").begin_object();
    w.key("tol").value(r.tol);
    w.key("integrator_tols")
        .begin_array()
        .value(r.integrator.rtol)
        .value(r.integrator.atol)
        .end_array();
    w.end_object();
    w.end_object();
    return w.str();
}

inline std::string barrier_reports_to_json(const std::vector<BarrierReport>& reports) {
    JsonWriter w;
    w.begin_array();
    for (const auto& r : reports) {
        w.begin_object();
        w.key("name").value(std::string(barrier_name(r.name)));
        w.key("domain").begin_array().value(r.domain_lo).value(r.domain_hi).end_array();
        w.key("samples").value(r.samples);
        w.key("min_margin").value(r.min_margin);
        w.key("passed").value(r.passed);
        w.key("detail").value(r.detail);
        w.end_object();
    }
    w.end_array();
    return w.str();
}

inline std::string error_to_json(const Error& e) {
    JsonWriter w;
    w.begin_object();
    w.key("error").begin_object();
    w.key("kind").value(std::string(e.kind_name()));
    w.key("message").value(std::string(e.what()));
    w.end_object();
    w.end_object();
    return w.str();
}

// --- CSV ---------------------------------------------------------------

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) {
        row(std::move(header));
    }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ += ',';
            out_ += fields[i];
        }
        out_ += "\r\n";
    }
    const std::string& str() const { return out_; }

  private:
    std::string out_;
};

inline std::string trajectory_to_csv(const Trajectory& traj) {
    CsvWriter csv({"V", "C", "x", "F", "G", "D"});
    for (const auto& n : traj.nodes) {
        const FGDValues f = eval_fgd(traj.exp.cfg, {n.V, n.C});
        const double x = traj.x_attached ? -std::exp(n.lnx) : 0.0;
        csv.row({fmt17(n.V), fmt17(n.C), fmt17(x), fmt17(f.F), fmt17(f.G), fmt17(f.D)});
    }
    return csv.str();
}

inline std::string profile_to_csv(const SimilarityProfile& prof) {
    CsvWriter csv({"x", "V", "C", "R", "u_coeff", "c_coeff"});
    const double lambda = prof.result.lambda_std;
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
        const double u_coeff = -prof.V[i] / (lambda * prof.x[i]);
        const double c_coeff = -prof.C[i] / (lambda * prof.x[i]);
        csv.row({fmt17(prof.x[i]), fmt17(prof.V[i]), fmt17(prof.C[i]), fmt17(prof.R[i]),
                 fmt17(u_coeff), fmt17(c_coeff)});
    }
    return csv.str();
}

inline std::string profile_metadata_json(const SimilarityProfile& prof,
                                         const CollapseLimits* limits) {
    JsonWriter w;
    w.begin_object();
    w.key("gamma").value(prof.result.gamma);
    w.key("m").value(prof.result.m);
    w.key("z_std").value(prof.result.z_std);
    w.key("lambda").value(prof.result.lambda_std);
    w.key("x_sonic").value(prof.x_sonic);
    w.key("entropy_const").value(prof.entropy_const);
    w.key("q").value(prof.q);
    w.key("x_min").value(prof.x_min);
    w.key("n").value(static_cast<int>(prof.x.size()));
    w.key("degenerate_exponent").value(prof.degenerate_exponent);
    if (limits) {
        w.key("collapse_limits").begin_object();
        w.key("uhat").value(limits->uhat);
        w.key("chat").value(limits->chat);
        w.key("R0").value(limits->R0);
        w.end_object();
    }
    w.key("notes").begin_object();
    w.key("series_radius_est").value(prof.result.left.exp.radius_est);
    w.key("series_N").value(prof.result.left.exp.N);
    w.key("series_K_est").value(prof.result.left.exp.K_est);
    w.key("right_stop_V").value(kRightStopV);
    w.end_object();
    w.end_object();
    return w.str();
}

inline std::string series_dump_json(const SonicExpansion& exp) {
    JsonWriter w;
    w.begin_object();
    w.key("which").value(std::string(triple_point_name(exp.which)));
    w.key("V_star").value(exp.star.V);
    w.key("C_star").value(exp.star.C);
    w.key("N").value(exp.N);
    w.key("K_est").value(exp.K_est);
    w.key("radius_est").value(exp.radius_est);
    w.key("coefficients").begin_array();
    for (double c : exp.c) w.value(fmt17(c));  // decimal strings
    w.end_array();
    w.end_object();
    return w.str();
}

// --- cache ---------------------------------------------------------------

// FNV-1a, stable across platforms (std::hash is not).
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string cache_key(double gamma, int m, double tol, const IntegratorOptions& opt) {
    const std::string payload = std::string(kVersion) + "|" + fmt17(gamma) + "|" +
                                std::to_string(m) + "|" + fmt17(tol) + "|" + fmt17(opt.rtol) +
                                "|" + fmt17(opt.atol);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(payload)));
    return buf;
}

inline bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_domain("cannot open output file: " + path);
    out << content;
}

}  // namespace guderley
