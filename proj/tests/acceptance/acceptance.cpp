// Pass/fail report for the eight acceptance criteria.  Exit status is 0 only if all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "cmvlab/localization.hpp"
#include "cmvlab/lyapunov_ldt.hpp"
#include "cmvlab/spectra.hpp"
#include "cmvlab/verify.hpp"

using namespace cmvlab;

namespace {

constexpr std::uint64_t kSeed = 20240607;
const char* kBernoulli = "atoms:(0.5,0.5);(-0.5,0.5)";

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double v, int digits = 4) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*g", digits, v);
    return b;
}

std::string full(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string prop(const Proportion& p) {
    return full(p.p) + "/" + std::to_string(p.successes) + "/" + std::to_string(p.trials) + "/" + full(p.lo) + "/" +
           full(p.hi);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool strictly_decreasing(const std::vector<Proportion>& ps) {
    for (std::size_t i = 1; i < ps.size(); ++i) {
        if (!(ps[i].p < ps[i - 1].p)) return false;
    }
    return true;
}

std::vector<double> as_x(const std::vector<long>& ns) { return {ns.begin(), ns.end()}; }

// ---------------------------------------------------------------------------
// experiment runners shared by the criteria and the reproducibility rerun

struct LyapunovGrid {
    std::vector<double> thetas;
    std::vector<LyapunovEstimate> est;
    std::string serial() const {
        std::string s;
        for (const auto& e : est) s += full(e.gamma_hat) + "," + full(e.std_err) + ";";
        return s;
    }
};

LyapunovGrid lyapunov_grid(int threads) {
    LyapunovGrid g{Arc(0.4, 2.7).grid(16), {}};
    const auto d = Distribution::parse(kBernoulli);
    for (double t : g.thetas) g.est.push_back(lyapunov_estimate(d, std::polar(1.0, t), 10000, 200, kSeed, threads));
    return g;
}

struct LdtRun {
    double gamma_hat = 0.0, std_err = 0.0;
    std::vector<long> ns{20, 40, 80, 160};
    std::vector<Decoration> decs{Decoration::Left, Decoration::Right, Decoration::Both};
    std::vector<std::vector<Proportion>> tails;
    std::string serial() const {
        std::string s = full(gamma_hat) + ";";
        for (const auto& row : tails) {
            for (const auto& p : row) s += prop(p) + ";";
        }
        return s;
    }
};

LdtRun ldt_run(int threads) {
    LdtRun r;
    const auto d = Distribution::parse(kBernoulli);
    const Complex z = std::polar(1.0, 1.0);
    const auto ref = lyapunov_estimate(d, z, 10000, 200, kSeed + 1, threads);
    r.gamma_hat = ref.gamma_hat;
    r.std_err = ref.std_err;
    for (Decoration dec : r.decs) {
        std::vector<Proportion> row;
        for (long n : r.ns) {
            row.push_back(ldt_tail(d, z, 0.5 * ref.gamma_hat, {0, n - 1}, dec, 2000, ref.gamma_hat, kSeed, threads).tail);
        }
        r.tails.push_back(row);
    }
    return r;
}

struct TwoPointRun {
    std::vector<long> ns{10, 20, 40};
    double nu = 0.0, eps = 0.0, delta = 0.0;
    std::vector<TwoPointResult> res;
    std::string serial() const {
        std::string s = full(nu) + ";";
        for (const auto& r : res) {
            s += prop(r.pooled) + ";" + prop(r.singular_close) + ";" + std::to_string(r.perturbed) + ";";
            for (const auto& p : r.per_theta) s += prop(p) + ";";
        }
        return s;
    }
};

TwoPointRun two_point_run(int threads) {
    TwoPointRun r;
    const auto d = Distribution::parse(kBernoulli);
    const auto thetas = Arc(0.4, 2.7).grid(8);
    std::vector<double> gammas;
    for (double t : thetas) {
        gammas.push_back(lyapunov_estimate(d, std::polar(1.0, t), 10000, 200, kSeed + 2, threads).gamma_hat);
    }
    r.nu = *std::min_element(gammas.begin(), gammas.end());
    r.eps = r.nu / 4.0;
    r.delta = r.eps / 2.0;
    for (long n : r.ns) r.res.push_back(two_point_experiment(d, 0, n, thetas, r.eps, gammas, r.delta, 2000, kSeed, threads));
    return r;
}

struct ResonanceRun {
    std::vector<long> ns{10, 20, 40};
    std::vector<ResonanceResult> res;
    std::string serial() const {
        std::string s;
        for (const auto& r : res) s += prop(r.tail) + "," + full(r.median_log_distance) + ";";
        return s;
    }
};

ResonanceRun resonance_run(int threads) {
    ResonanceRun r;
    const auto d = Distribution::parse(kBernoulli);
    for (long n : r.ns) r.res.push_back(resonance_experiment(d, 0, n, 0.05, 2000, kSeed, threads));
    return r;
}

const std::vector<long> kOffsets{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};

EdlResult edl_run(int threads) {
    return edl_experiment(Distribution::parse(kBernoulli), 1000, Arc(0.4, 2.7), 450, kOffsets, 50, kSeed, threads);
}

std::string edl_serial(const EdlResult& r) {
    std::string s;
    for (const auto& m : r.kernel) s += full(m.mean) + "," + full(m.std_err) + ";";
    for (const auto& m : r.conditioned) s += full(m.mean) + "," + full(m.std_err) + ";";
    return s + full(r.kernel_fit.rate);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    const auto reps = algebraic_suite(1000, kSeed, 1);
    long failures = 0, instances = 0;
    std::string worst;
    for (const auto& r : reps) {
        failures += r.failures;
        instances += r.trials;
        if (!r.passed()) worst += " " + r.check_name + "@" + num(r.worst_error);
    }
    return {failures == 0, std::to_string(reps.size()) + " identities x 1000 instances (" + std::to_string(instances) +
                               "), " + std::to_string(failures) + " failures" + worst};
}

Outcome criterion2() {
    const std::vector<CheckDef> checks{halfline_check(),    phi_equals_P_check(),       rotation_check(),
                                        transfer_corrections_check(), green_correction_check(), poisson_check()};
    bool ok = true;
    std::string d;
    for (const auto& c : checks) {
        const auto r = run_check(c, 500, kSeed, 1);
        ok = ok && r.passed() && r.trials == 500;
        d += r.check_name + " " + std::to_string(r.failures) + "f/" + std::to_string(r.flagged) + "s worst " +
             num(r.worst_error, 2) + "; ";
    }
    return {ok, d};
}

Outcome criterion3(const LyapunovGrid& g) {
    const auto free = lyapunov_estimate(Distribution::parse("constant:0+0i"), std::polar(1.0, 1.0), 10000, 1, kSeed);
    const auto cst = lyapunov_estimate(Distribution::parse("constant:0.5+0i"), Complex(1.0), 10000, 1, kSeed);
    const double want = std::acosh(2.0 / std::sqrt(3.0));
    bool grid_ok = true;
    double worst_ratio = INFINITY;
    for (const auto& e : g.est) {
        const double ratio = e.gamma_hat / e.std_err;
        worst_ratio = std::min(worst_ratio, ratio);
        grid_ok = grid_ok && e.gamma_hat > 3.0 * e.std_err;
    }
    const bool ok = std::abs(free.gamma_hat) <= 1e-12 && std::abs(cst.gamma_hat - want) <= 1e-6 && grid_ok;
    return {ok, "free " + num(free.gamma_hat, 3) + ", constant error " + num(std::abs(cst.gamma_hat - want), 3) +
                    ", grid min gamma/se " + num(worst_ratio, 3)};
}

Outcome criterion4(const LdtRun& r) {
    bool ok = true;
    std::string d = "gamma " + num(r.gamma_hat) + ", eps " + num(0.5 * r.gamma_hat) + ";";
    for (std::size_t k = 0; k < r.decs.size(); ++k) {
        const auto& row = r.tails[k];
        bool monotone = true;
        for (std::size_t i = 1; i < row.size(); ++i) monotone = monotone && row[i].p <= row[i - 1].p;
        const LinearFit f = log_linear_fit(as_x(r.ns), row);
        const bool pass = monotone && f.slope < 0.0 && f.r2 >= 0.9;
        ok = ok && pass;
        d += " " + to_string(r.decs[k]) + " [";
        for (const auto& p : row) d += num(p.p, 3) + " ";
        d += "] slope " + num(f.slope, 3) + " R2 " + num(f.r2, 3) + (pass ? "" : " FAIL") + ";";
    }
    return {ok, d};
}

Outcome criterion5(const TwoPointRun& r) {
    std::vector<Proportion> pooled;
    long close = 0, flagged = 0;
    for (const auto& x : r.res) {
        pooled.push_back(x.pooled);
        close += x.singular_close.successes;
        flagged += x.singular_close.trials;
    }
    const LinearFit f = log_linear_fit(as_x(r.ns), pooled);
    const double frac = flagged ? static_cast<double>(close) / static_cast<double>(flagged) : 0.0;
    const bool ok = strictly_decreasing(pooled) && f.slope < 0.0 && flagged > 0 && frac >= 0.95;
    std::string d = "nu " + num(r.nu) + " eps " + num(r.eps) + " delta " + num(r.delta) + "; pooled [";
    for (const auto& p : pooled) d += num(p.p, 3) + " ";
    d += "] slope " + num(f.slope, 3) + "; close " + std::to_string(close) + "/" + std::to_string(flagged);
    return {ok, d};
}

Outcome criterion6(const ResonanceRun& r) {
    std::vector<Proportion> ps;
    for (const auto& x : r.res) ps.push_back(x.tail);
    const LinearFit f = log_linear_fit(as_x(r.ns), ps);
    std::string d = "[";
    for (const auto& p : ps) d += num(p.p, 3) + " ";
    d += "] slope " + num(f.slope, 3) + "; median log distance vs log threshold:";
    for (const auto& x : r.res) d += " " + num(x.median_log_distance, 3) + "/" + num(std::log(x.threshold), 3);
    return {strictly_decreasing(ps) && f.slope < 0.0, d};
}

Outcome criterion7(const EdlResult& edl) {
    const Arc mid(0.4, 2.7);
    const auto sys = sample_eigensystem(Distribution::parse(kBernoulli), 1000, SeedPlan{kSeed, 0});
    const auto prof = localize_eigenfunctions(sys, mid);
    long good = 0;
    for (const auto& p : prof) good += (p.fit_r2 >= 0.8 && p.decay_rate < 0.0) ? 1 : 0;
    const double good_frac = prof.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(prof.size());

    const auto free_sys = sample_eigensystem(Distribution::parse("constant:0+0i"), 1000, SeedPlan{kSeed, 0});
    std::vector<double> rates;
    for (const auto& p : localize_eigenfunctions(free_sys, mid)) rates.push_back(std::abs(p.decay_rate));
    std::sort(rates.begin(), rates.end());
    const double median = rates.empty() ? INFINITY : rates[rates.size() / 2];

    double diag_err = 0.0;
    for (long p : {0L, 1L, 450L, 999L}) {
        diag_err = std::max(diag_err, std::abs(edl_kernel(sys, Arc::full_circle(), p, p) - 1.0));
    }
    const auto& kf = edl.kernel_fit;
    const bool ci_ok = std::isfinite(kf.rate_lo) && (kf.rate_lo > 0.0 || kf.rate_hi < 0.0);
    const bool ok = good_frac >= 0.8 && median <= 0.005 && ci_ok && diag_err <= 1e-9;
    return {ok, "profiles " + std::to_string(good) + "/" + std::to_string(prof.size()) + ", free median |rate| " +
                    num(median, 3) + ", EDL rate " + num(kf.rate, 3) + " CI [" + num(kf.rate_lo, 3) + ", " +
                    num(kf.rate_hi, 3) + "] R2 " + num(kf.r2, 3) + ", diag error " + num(diag_err, 2)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// every CLI subcommand, run at two thread counts, compared byte for byte
bool cli_outputs_identical(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("cmvlab_acceptance_" + std::to_string(kSeed));
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> runs{
        {"verify", "--samples", "100"},
        {"lyapunov", "--n", "2000", "--samples", "50", "--z-grid", "4"},
        {"ldt", "--n", "20,40", "--samples", "500", "--ref-n", "2000", "--ref-samples", "50"},
        {"resonance", "--n", "5,10", "--samples", "300"},
        {"regularity", "--n", "5,10", "--samples", "300", "--z-grid", "4", "--ref-n", "2000", "--ref-samples", "50"},
        {"localize", "--size", "300", "--samples", "2"},
        {"edl", "--size", "300", "--samples", "6", "--p", "100", "--offsets", "10:60:10"},
        {"dump", "--interval", "0,40"},
    };
    bool ok = true;
    for (const auto& base : runs) {
        std::vector<std::string> outs;
        for (const char* th : {"1", "3"}) {
            auto args = base;
            const fs::path out = dir / (base[0] + "_" + th + ".csv");
            args.insert(args.end(), {"--seed", std::to_string(kSeed), "--threads", th, "--out", out.string()});
            std::ostringstream o, e;
            if (cli::run(args, o, e) != 0) {
                detail += base[0] + " failed; ";
                ok = false;
            }
            outs.push_back(slurp(out) + (base[0] == "edl" ? slurp(out.string() + ".conditioned") : ""));
        }
        if (outs[0].empty() || outs[0] != outs[1]) {
            detail += base[0] + " differs; ";
            ok = false;
        }
    }
    fs::remove_all(dir);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance report"};
    std::vector<int> only, known;
    app.add_option("--only", only, "criteria to run (default all)")->delimiter(',');
    app.add_option("--known-unattainable", known,
                   "criteria whose failure is documented; they still print FAIL but do not set the exit status")
        ->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    auto want = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };

    const std::vector<std::pair<int, double>> budgets{{1, 120}, {2, 180}, {3, 120}, {4, 300},
                                                      {5, 600}, {6, 600}, {7, 900}};
    bool all = true;
    auto report = [&](int k, const std::string& name, const Outcome& o, double secs, double budget) {
        const bool in_time = budget <= 0.0 || secs <= budget;
        const bool pass = o.pass && in_time;
        const bool excused = std::find(known.begin(), known.end(), k) != known.end();
        all = all && (pass || excused);
        std::cout << "criterion " << k << ' ' << (pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << " ("
                  << num(secs, 3) << " s" << (in_time ? "" : ", over budget") << ")" << (!pass && excused ? " [documented as unattainable]" : "")
                  << std::endl;
    };
    auto timed = [&](int k, const std::string& name, const std::function<Outcome()>& fn) {
        if (!want(k)) return;
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = fn();
        report(k, name, o, seconds_since(t0), budgets[static_cast<std::size_t>(k - 1)].second);
    };

    timed(1, "matrix identity suite", criterion1);
    timed(2, "correction suite", criterion2);

    // runs kept for the reproducibility comparison
    std::optional<LyapunovGrid> grid;
    std::optional<LdtRun> ldt;
    std::optional<TwoPointRun> two;
    std::optional<ResonanceRun> res;
    std::optional<EdlResult> edl;
    timed(3, "exponent anchors", [&] { grid = lyapunov_grid(1); return criterion3(*grid); });
    timed(4, "tail decay", [&] { ldt = ldt_run(1); return criterion4(*ldt); });
    timed(5, "two-point dichotomy", [&] { two = two_point_run(1); return criterion5(*two); });
    timed(6, "resonance", [&] { res = resonance_run(1); return criterion6(*res); });
    timed(7, "localization and EDL", [&] { edl = edl_run(1); return criterion7(*edl); });

    if (want(8)) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string d;
        bool ok = true;
        auto compare = [&](const std::string& name, const std::string& a, const std::string& b) {
            const bool same = a == b;
            ok = ok && same;
            d += name + (same ? " same; " : " DIFFERS; ");
        };
        if (grid) compare("lyapunov", grid->serial(), lyapunov_grid(3).serial());
        if (ldt) compare("ldt", ldt->serial(), ldt_run(3).serial());
        if (two) compare("two-point", two->serial(), two_point_run(3).serial());
        if (res) compare("resonance", res->serial(), resonance_run(3).serial());
        if (edl) compare("edl", edl_serial(*edl), edl_serial(edl_run(3)));
        const bool cli_ok = cli_outputs_identical(d);
        ok = ok && cli_ok;
        if (cli_ok) d += "all CLI subcommands byte-identical";
        report(8, "thread-count reproducibility", {ok, d}, seconds_since(t0), 0.0);
    }
    return all ? 0 : 1;
}
