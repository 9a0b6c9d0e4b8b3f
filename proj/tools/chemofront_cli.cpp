// Command-line driver: check-hypotheses, run, verify <suite>, sweep.
// Exit codes: 0 pass, 1 assertion failure, 2 usage/config error,
// 3 numerical failure (CFL violation, blowup, front collapse).

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chemofront/config.hpp"
#include "chemofront/free_boundary.hpp"
#include "chemofront/io.hpp"
#include "chemofront/runner.hpp"
#include "chemofront/verification.hpp"

namespace fs = std::filesystem;
using namespace chemofront;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// a theorem suite only claims applicability when the hypothesis holds with
// this much slack
constexpr double kMinMargin = 1e-6;

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path resolve_out(const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) return fs::path(name);
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
}

int worker_count() {
    if (const char* env = std::getenv("CHEMO_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// u0 extrema over the domain the run will actually sample
std::pair<double, double> initial_extrema(const RunConfig& cfg) {
    const auto u0 = build_initial(cfg);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    if (cfg.is_free_boundary()) {
        const double a = cfg.problem == ProblemKind::free_boundary_double ? cfg.g0 : 0.0;
        for (int i = 0; i <= cfg.n_cells; ++i) {
            const double x = a + (cfg.h0 - a) * double(i) / double(cfg.n_cells);
            const double v = u0(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    } else {
        const double a = cfg.problem == ProblemKind::whole_line ? -cfg.x_max : 0.0;
        for (int i = 0; i <= cfg.n_cells; ++i) {
            const double x = a + (cfg.x_max - a) * double(i) / double(cfg.n_cells);
            const double v = u0(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

int cmd_check_hypotheses(const RunConfig& cfg, const std::string& out_dir, bool quiet) {
    const CoefficientField coeffs = build_coefficients(cfg);
    const HypothesisReport hyp = check_hypotheses(cfg.params, coeffs);
    const auto [u0_inf, u0_sup] = initial_extrema(cfg);
    const BoundSet bounds = derive_bounds(cfg.params, coeffs, u0_sup);
    const nlohmann::json j = hypothesis_json(hyp, bounds);
    if (!quiet) std::cout << j.dump(2) << "\n";
    if (!out_dir.empty()) emit_report(j, resolve_out(out_dir, cfg.report_path).string());
    return kExitOk;
}

int cmd_run(const RunConfig& cfg, const std::string& out_dir, std::int64_t seed,
            bool quiet) {
    RunResult res = run_config(cfg);
    emit_series(res.series, resolve_out(out_dir, cfg.series_path).string());

    nlohmann::json j;
    j["problem"] = to_string(cfg.problem);
    j["seed"] = seed;
    j["hypotheses"] = hypothesis_json(res.hypotheses, res.bounds);
    j["u0_inf"] = res.u0_inf;
    j["u0_sup"] = res.u0_sup;
    j["max_sup_u"] = res.series.max_sup_u;
    j["min_inf_u"] = res.series.min_inf_u;
    j["final_sup_u"] = res.series.final_sup_u();
    j["clip_mass"] = res.series.clip_total;
    if (res.fb_final) {
        j["h_final"] = res.fb_final->h;
        if (res.fb_final->g) j["g_final"] = *res.fb_final->g;
        j["outcome"] = to_string(*res.outcome);
    }
    emit_report(j, resolve_out(out_dir, cfg.report_path).string());
    if (!quiet) {
        std::cout << "run complete: t in [" << cfg.t0 << ", " << cfg.t_end << "], sup u "
                  << res.series.final_sup_u() << "\n";
        if (res.outcome) std::cout << "outcome: " << to_string(*res.outcome) << "\n";
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, const std::string& out_dir,
               double tol, bool quiet) {
    nlohmann::json j;
    bool passed = false;
    if (suite == "theorem-1-1") {
        RunResult res = run_config(cfg);
        auto report = check_theorem_1_1(res.series, res.bounds, tol > 0 ? tol : 1e-2);
        report.applicable = report.applicable && res.hypotheses.margins[1] > kMinMargin;
        j = report_json(report);
        j["H1_margin"] = res.hypotheses.margins[1];
        passed = report.applicable && report.passed;
    } else if (suite == "theorem-1-2") {
        RunResult res = run_config(cfg);
        auto report = check_theorem_1_2(res.series, res.bounds, tol > 0 ? tol : 1e-2);
        report.applicable = report.applicable && res.hypotheses.margins[2] > kMinMargin;
        j = report_json(report);
        j["H2_margin"] = res.hypotheses.margins[2];
        passed = report.applicable && report.passed;
    } else if (suite == "theorem-1-3") {
        const CoefficientField coeffs = build_coefficients(cfg);
        if (!coeffs.period_T || !coeffs.t_only) {
            std::cerr << "theorem-1-3 needs t-only periodic coefficients\n";
            return kExitUsage;
        }
        const PeriodicOrbit orbit = solve_periodic_orbit(coeffs);
        RunResult res = run_config(cfg, [&orbit](double t) { return orbit.at(t); });
        const HypothesisReport hyp = res.hypotheses;
        if (!res.bounds.rho) {
            std::cerr << "theorem-1-3: rho denominator not positive\n";
            return kExitUsage;
        }
        auto report = check_theorem_1_3(res.series, *res.bounds.rho,
                                        tol > 0 ? tol : 1e-4);
        report.applicable = report.applicable && hyp.margins[3] > kMinMargin;
        j = report_json(report);
        j["H3"] = hyp.h3_ok;
        j["H3_margin"] = hyp.margins[3];
        j["u_star_inf"] = orbit.u_star_inf;
        passed = report.applicable && report.passed;
    } else {
        std::cerr << "unknown suite '" << suite
                  << "' (expected theorem-1-1, theorem-1-2, theorem-1-3)\n";
        return kExitUsage;
    }
    if (!out_dir.empty())
        emit_report(j, resolve_out(out_dir, "verify_" + suite + ".json").string());
    if (!quiet) std::cout << j.dump(2) << "\n";
    return passed ? kExitOk : kExitAssertion;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::int64_t seed,
              bool quiet) {
    if (!cfg.is_free_boundary()) {
        std::cerr << "sweep requires a free-boundary problem\n";
        return kExitUsage;
    }
    const SweepSpec& sw = cfg.sweep;
    std::vector<double> h0s(sw.h0_count), u0s(sw.u0_count);
    for (int i = 0; i < sw.h0_count; ++i)
        h0s[i] = sw.h0_count == 1
                     ? sw.h0_min
                     : sw.h0_min + (sw.h0_max - sw.h0_min) * double(i) / double(sw.h0_count - 1);
    for (int i = 0; i < sw.u0_count; ++i)
        u0s[i] = sw.u0_count == 1
                     ? sw.u0_min
                     : sw.u0_min + (sw.u0_max - sw.u0_min) * double(i) / double(sw.u0_count - 1);

    std::vector<Outcome> table(h0s.size() * u0s.size(), Outcome::undecided);
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= table.size() || failed.load()) return;
            const double h0 = h0s[k / u0s.size()];
            const double u0_sup = u0s[k % u0s.size()];
            RunConfig local = cfg;
            local.h0 = h0;
            local.g0 = -h0;
            local.t_end = sw.t_end;
            local.stepping.dt = 0.0;  // re-pick per run
            local.initial.kind = InitialKind::cosine_bump;
            local.initial.center = 0.0;
            local.initial.width = h0;
            local.initial.amplitude = u0_sup;
            local.initial.floor = 0.0;
            try {
                RunResult res = run_config(local);
                table[k] = *res.outcome;
            } catch (const NumericalError& e) {
                std::scoped_lock lk(failure_mutex);
                failure = e.what();
                failed.store(true);
            }
        }
    };
    const int workers = std::max(1, std::min<int>(worker_count(), int(table.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failed.load()) {
        std::cerr << "sweep aborted: " << failure << "\n";
        return kExitNumerical;
    }

    std::string text = "h0\\u0_sup";
    char buf[32];
    for (double u : u0s) {
        std::snprintf(buf, sizeof buf, "\t%.6g", u);
        text += buf;
    }
    text += "\n";
    for (std::size_t r = 0; r < h0s.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.6g", h0s[r]);
        text += buf;
        for (std::size_t c = 0; c < u0s.size(); ++c) {
            const Outcome o = table[r * u0s.size() + c];
            text += '\t';
            text += o == Outcome::spreading ? 'S' : (o == Outcome::vanishing ? 'V' : 'U');
        }
        text += "\n";
    }
    const fs::path path = resolve_out(out_dir, "phase_table.tsv");
    write_file(path.string(), text);
    if (!quiet) {
        std::cout << "sweep (" << h0s.size() << " x " << u0s.size() << ", seed " << seed
                  << ") written to " << path.string() << "\n"
                  << text;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D attraction-repulsion chemotaxis simulator and bound checker"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir, suite;
    std::int64_t seed = 0;
    double tol = 0.0;
    bool quiet = false;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed recorded with outputs");
    app.add_option("--tol", tol, "tolerance override for verify");
    app.add_flag("--quiet", quiet, "suppress stdout summaries");

    auto* check = app.add_subcommand("check-hypotheses",
                                     "evaluate M, K, (H0)-(H3) and the theorem bounds");
    check->add_option("--config", config_path, "run configuration")->required();

    auto* run = app.add_subcommand("run", "execute one simulation");
    run->add_option("--config", config_path, "run configuration")->required();

    auto* verify = app.add_subcommand("verify", "run a named theorem suite");
    verify->add_option("suite", suite, "theorem-1-1 | theorem-1-2 | theorem-1-3")->required();
    verify->add_option("--config", config_path, "run configuration")->required();

    auto* sweep = app.add_subcommand("sweep", "phase table over (h0, u0 sup)");
    sweep->add_option("--config", config_path, "run configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg = parse_config(read_file(config_path));
        if (seed != 0) cfg.seed = seed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check_hypotheses(cfg, out_dir, quiet);
        if (run->parsed()) return cmd_run(cfg, out_dir, cfg.seed, quiet);
        if (verify->parsed()) return cmd_verify(cfg, suite, out_dir, tol, quiet);
        if (sweep->parsed()) return cmd_sweep(cfg, out_dir, cfg.seed, quiet);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
