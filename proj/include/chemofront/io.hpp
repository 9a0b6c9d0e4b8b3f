// Serialization: delimited-text time series and JSON reports. Output is
// byte-stable for identical inputs.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "chemofront/params.hpp"
#include "chemofront/stepper.hpp"
#include "chemofront/verification.hpp"

namespace chemofront {

namespace detail {
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}
}  // namespace detail

inline std::string series_to_text(const TimeSeries& ts) {
    std::string out = "t\tsup_u\tinf_u";
    if (ts.has_target) out += "\terr_to_target";
    if (ts.has_front) out += "\th";
    if (ts.has_g) out += "\tg";
    if (ts.has_front) out += "\tux_front";
    out += "\tclip_mass\n";
    for (const ProbeRow& r : ts.rows) {
        out += detail::fmt(r.t);
        out += '\t';
        out += detail::fmt(r.sup_u);
        out += '\t';
        out += detail::fmt(r.inf_u);
        if (ts.has_target) {
            out += '\t';
            out += detail::fmt(r.err_to_target);
        }
        if (ts.has_front) {
            out += '\t';
            out += detail::fmt(r.h);
        }
        if (ts.has_g) {
            out += '\t';
            out += detail::fmt(r.g);
        }
        if (ts.has_front) {
            out += '\t';
            out += detail::fmt(r.ux_front);
        }
        out += '\t';
        out += detail::fmt(r.clip_mass);
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline void emit_series(const TimeSeries& ts, const std::string& path) {
    write_file(path, series_to_text(ts));
}

inline nlohmann::json hypothesis_json(const HypothesisReport& h, const BoundSet& b) {
    nlohmann::json j;
    j["M"] = h.M;
    j["K"] = h.K;
    j["H0"] = h.h0_ok;
    j["H1"] = h.h1_ok;
    j["H2"] = h.h2_ok;
    j["H3"] = h.h3_ok;
    j["margins"] = {{"H0", h.margins[0]},
                    {"H1", h.margins[1]},
                    {"H2", h.margins[2]},
                    {"H3", h.margins[3]}};
    auto put = [&j](const char* name, const std::optional<double>& v) {
        if (v)
            j[name] = *v;
        else
            j[name] = nullptr;
    };
    put("C_u0", b.C_u0);
    put("limsup_bound", b.limsup_bound);
    put("M0", b.M0);
    put("m0", b.m0);
    put("rho", b.rho);
    return j;
}

inline nlohmann::json report_json(const Theorem11Report& r) {
    return {{"theorem", "theorem-1-1"},
            {"applicable", r.applicable},
            {"passed", r.passed},
            {"global_ok", r.global_ok},
            {"limsup_ok", r.limsup_ok},
            {"C_u0", r.C_u0},
            {"limsup_bound", r.limsup_bound},
            {"max_sup_u", r.max_sup_u},
            {"final_window_sup", r.final_window_sup},
            {"tol", r.tol}};
}

inline nlohmann::json report_json(const Theorem12Report& r) {
    nlohmann::json j = {{"theorem", "theorem-1-2"},
                        {"applicable", r.applicable},
                        {"passed", r.passed},
                        {"entered", r.entered},
                        {"held", r.held},
                        {"m0", r.m0},
                        {"M0", r.M0},
                        {"final_inf", r.final_inf},
                        {"final_sup", r.final_sup},
                        {"tol", r.tol}};
    if (r.t_star)
        j["t_star"] = *r.t_star;
    else
        j["t_star"] = nullptr;
    return j;
}

inline nlohmann::json report_json(const Theorem13Report& r) {
    return {{"theorem", "theorem-1-3"},
            {"applicable", r.applicable},
            {"passed", r.passed},
            {"converged", r.converged},
            {"envelope_ok", r.envelope_ok},
            {"e_end", r.e_end},
            {"tol_abs", r.tol_abs},
            {"rho", r.rho},
            {"ratio_limit", r.ratio_limit},
            {"plateaus", r.plateaus},
            {"ratios", r.ratios}};
}

inline void emit_report(const nlohmann::json& j, const std::string& path) {
    write_file(path, j.dump(2) + "\n");
}

}  // namespace chemofront
