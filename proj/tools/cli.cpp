#include "cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmvlab/cmv_core.hpp"
#include "cmvlab/determinants.hpp"
#include "cmvlab/errors.hpp"
#include "cmvlab/localization.hpp"
#include "cmvlab/lyapunov_ldt.hpp"
#include "cmvlab/model.hpp"
#include "cmvlab/parallel.hpp"
#include "cmvlab/spectra.hpp"
#include "cmvlab/stats.hpp"
#include "cmvlab/verify.hpp"

namespace cmvlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
    };
    return std::visit(V{}, c);
}

nlohmann::ordered_json json_value(const Cell& c) {
    struct V {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(long v) const { return v; }
        nlohmann::ordered_json operator()(std::uint64_t v) const { return v; }
        nlohmann::ordered_json operator()(double v) const {
            if (!std::isfinite(v)) return nullptr;
            return v;
        }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, c);
}

Cell opt_cell(double v) { return std::isnan(v) ? Cell{} : Cell{v}; }

// ---------------------------------------------------------------------------
// settings: command-line values over config-file values

class Settings {
public:
    std::map<std::string, std::string> given;
    std::map<std::string, std::string> config;

    std::optional<std::string> raw(const std::string& key) const {
        if (auto it = given.find(key); it != given.end()) return it->second;
        if (auto it = config.find(key); it != config.end()) return it->second;
        return std::nullopt;
    }
    bool has(const std::string& key) const { return raw(key).has_value(); }

    std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }

    long integer(const std::string& key, long def) const {
        const auto r = raw(key);
        return r ? to_long(key, *r) : def;
    }

    std::uint64_t u64(const std::string& key, std::uint64_t def) const {
        const auto r = raw(key);
        if (!r) return def;
        const std::string s = trim(*r);
        std::size_t pos = 0;
        try {
            if (!s.empty() && s[0] != '-') {
                const auto v = std::stoull(s, &pos, 10);
                if (pos == s.size()) return v;
            }
        } catch (const std::exception&) {
        }
        throw ParameterError("--" + key + ": expected an unsigned 64-bit integer, got '" + *r + "'");
    }

    double real(const std::string& key, double def) const {
        const auto r = raw(key);
        return r ? to_double(key, *r) : def;
    }

    std::vector<long> longs(const std::string& key, const std::vector<long>& def) const {
        const auto r = raw(key);
        if (!r) return def;
        // a:b:s expands to a, a+s, …, ≤ b
        if (r->find(':') != std::string::npos) {
            const auto parts = split(*r, ':');
            if (parts.size() != 3) throw ParameterError("--" + key + ": range must be lo:hi:step");
            const long lo = to_long(key, parts[0]), hi = to_long(key, parts[1]), step = to_long(key, parts[2]);
            if (step < 1 || hi < lo) throw ParameterError("--" + key + ": empty or malformed range");
            std::vector<long> out;
            for (long v = lo; v <= hi; v += step) out.push_back(v);
            return out;
        }
        std::vector<long> out;
        for (const auto& p : split(*r, ',')) out.push_back(to_long(key, p));
        if (out.empty()) throw ParameterError("--" + key + ": empty list");
        return out;
    }

    std::vector<std::string> words(const std::string& key, const std::vector<std::string>& def) const {
        const auto r = raw(key);
        if (!r) return def;
        std::vector<std::string> out;
        for (const auto& p : split(*r, ',')) out.push_back(trim(p));
        return out;
    }

    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream is(s);
        while (std::getline(is, cur, sep)) out.push_back(trim(cur));
        return out;
    }

    static long to_long(const std::string& key, const std::string& s) {
        const std::string t = trim(s);
        std::size_t pos = 0;
        try {
            const long v = std::stol(t, &pos, 10);
            if (pos == t.size()) return v;
        } catch (const std::exception&) {
        }
        throw ParameterError("--" + key + ": expected an integer, got '" + s + "'");
    }

    static double to_double(const std::string& key, const std::string& s) {
        const std::string t = trim(s);
        std::size_t pos = 0;
        try {
            const double v = std::stod(t, &pos);
            if (pos == t.size() && std::isfinite(v)) return v;
        } catch (const std::exception&) {
        }
        throw ParameterError("--" + key + ": expected a number, got '" + s + "'");
    }
};

struct Common {
    std::uint64_t seed;
    long samples;
    Distribution dist;
    double arc_lo, arc_hi;
    int z_grid;
    std::string out;
    Format format;
    int threads;
    std::string svg;
};

Common common(const Settings& s, long default_samples, double lo, double hi, int grid, Format fmt = Format::Csv) {
    const std::string arc = s.str("arc", format_double(lo) + "," + format_double(hi));
    const auto parts = Settings::split(arc, ',');
    if (parts.size() != 2) throw ParameterError("--arc: expected lo,hi");
    Common c{s.u64("seed", 0),
             s.integer("samples", default_samples),
             Distribution::parse(s.str("dist", "atoms:(0.5,0.5);(-0.5,0.5)")),
             Settings::to_double("arc", parts[0]),
             Settings::to_double("arc", parts[1]),
             static_cast<int>(s.integer("z-grid", grid)),
             s.str("out", "-"),
             s.has("format") ? parse_format(s.str("format", "")) : fmt,
             static_cast<int>(s.integer("threads", 0)),
             s.str("svg", "")};
    if (c.samples < 1) throw ParameterError("--samples must be positive");
    if (c.threads < 0) throw ParameterError("--threads must be non-negative");
    if (c.z_grid < 1) throw ParameterError("--z-grid must be positive");
    if (c.arc_hi < c.arc_lo) throw ParameterError("--arc: need lo ≤ hi");
    return c;
}

// lo = hi is a single angle; otherwise Chebyshev points of the arc
std::vector<double> angles(const Common& c) {
    if (c.arc_lo == c.arc_hi) {
        if (c.z_grid != 1) throw ParameterError("a one-point arc needs --z-grid 1");
        return {c.arc_lo};
    }
    return Arc(c.arc_lo, c.arc_hi).grid(c.z_grid);
}

Arc arc_of(const Common& c) { return Arc(c.arc_lo, c.arc_hi); }

// derived seed for the reference exponent estimates, distinct from the experiment's own stream
std::uint64_t reference_seed(std::uint64_t seed) { return SeedPlan{seed, 0}.bits(0x72656665u, 0); }

std::vector<LyapunovEstimate> reference_exponents(const Settings& s, const Common& c, const std::vector<double>& th) {
    const long n = s.integer("ref-n", 10000);
    const long samples = s.integer("ref-samples", 200);
    std::vector<LyapunovEstimate> out;
    for (double t : th) {
        out.push_back(lyapunov_estimate(c.dist, std::polar(1.0, t), n, samples, reference_seed(c.seed), c.threads));
    }
    return out;
}

void note(std::ostream& err, const std::string& msg) { err << "cmvlab: " << msg << '\n'; }

void write_svg_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot write '" + path + "'");
    f << body;
    if (!f) throw ParameterError("cannot write '" + path + "'");
}

Series log_series(const std::string& label, const std::vector<long>& ns, const std::vector<Proportion>& props) {
    // zero counts are plotted at the same continuity-corrected value the fit uses
    Series s;
    s.label = label;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto& p = props[i];
        s.x.push_back(static_cast<double>(ns[i]));
        s.y.push_back(std::log(p.successes > 0 ? p.p : 0.5 / (static_cast<double>(p.trials) + 1.0)));
    }
    if (ns.size() >= 2) {
        try {
            const LinearFit f = log_linear_fit(s.x, props);
            s.has_fit = true;
            s.slope = f.slope;
            s.intercept = f.intercept;
        } catch (const ParameterError&) {
        }
    }
    return s;
}

void report_fit(std::ostream& err, const std::string& label, const std::vector<long>& ns,
                const std::vector<Proportion>& props) {
    std::vector<double> x;
    for (long n : ns) x.push_back(static_cast<double>(n));
    try {
        const LinearFit f = log_linear_fit(x, props);
        note(err, label + ": log-linear slope " + format_double(f.slope) + ", R² " + format_double(f.r2));
    } catch (const ParameterError& e) {
        note(err, label + ": no fit (" + std::string(e.what()) + ")");
    }
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_verify(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 500, 0.4, 2.7, 1, Format::Json);
    const std::string suite = s.str("suite", "corrections");
    std::vector<VerifyReport> reps;
    if (suite == "corrections" || suite == "all") {
        for (auto& r : verify_suite(c.samples, c.seed, c.threads)) reps.push_back(std::move(r));
    }
    if (suite == "identities" || suite == "all") {
        for (auto& r : algebraic_suite(c.samples, c.seed, c.threads)) reps.push_back(std::move(r));
    }
    if (reps.empty()) throw ParameterError("--suite must be corrections, identities or all");
    Table t{{"check_name", "trials", "pass_count", "failures", "flagged", "worst_error", "worst_seed", "tolerance",
             "negative_control"},
            {}};
    bool ok = true;
    for (const auto& r : reps) {
        ok = ok && r.passed();
        t.rows.push_back({r.check_name, r.trials, r.pass_count, r.failures, r.flagged, r.worst_error, r.worst_seed,
                          r.tolerance, r.negative_control ? Cell{*r.negative_control} : Cell{}});
        if (!r.passed()) {
            note(err, r.check_name + ": " + std::to_string(r.failures) + " failures, worst " +
                          format_double(r.worst_error) + " at seed " + std::to_string(r.worst_seed));
        }
    }
    emit(t, c.format, c.out, out);
    return ok ? 0 : 1;
}

const std::vector<std::string> kLdtColumns{"theta",     "n",     "epsilon", "decoration", "gamma_hat", "std_err",
                                           "tail_prob", "ci_lo", "ci_hi",   "samples",    "master_seed"};

int cmd_lyapunov(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 200, 0.4, 2.7, 16);
    const long n = s.integer("n", 10000);
    Table t{kLdtColumns, {}};
    for (double th : angles(c)) {
        const auto e = lyapunov_estimate(c.dist, std::polar(1.0, th), n, c.samples, c.seed, c.threads);
        if (e.possible_exceptional) note(err, "theta " + format_double(th) + ": possible exceptional point");
        t.rows.push_back({th, n, Cell{}, std::string("none"), e.gamma_hat, e.std_err, Cell{}, Cell{}, Cell{},
                          e.samples, c.seed});
    }
    emit(t, c.format, c.out, out);
    return 0;
}

int cmd_ldt(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 2000, 1.0, 1.0, 1);
    const auto ns = s.longs("n", {20, 40, 80, 160});
    std::vector<Decoration> decs;
    for (const auto& w : s.words("decorations", {"left", "right", "both"})) decs.push_back(parse_decoration(w));
    const auto th = angles(c);
    const auto refs = reference_exponents(s, c, th);
    const bool explicit_eps = s.has("epsilon");
    const double factor = s.real("epsilon-factor", 0.5);
    Table t{kLdtColumns, {}};
    std::vector<Series> series;
    for (std::size_t i = 0; i < th.size(); ++i) {
        const Complex z = std::polar(1.0, th[i]);
        const double eps = explicit_eps ? s.real("epsilon", 0.0) : factor * refs[i].gamma_hat;
        if (!(eps > 0.0)) throw ParameterError("epsilon must be positive (γ̂ = " + format_double(refs[i].gamma_hat) + ")");
        if (refs[i].possible_exceptional) note(err, "theta " + format_double(th[i]) + ": possible exceptional point");
        for (Decoration d : decs) {
            std::vector<Proportion> props;
            for (long n : ns) {
                if (n < 1) throw ParameterError("--n values must be positive");
                const auto tail =
                    ldt_tail(c.dist, z, eps, {0, n - 1}, d, c.samples, refs[i].gamma_hat, c.seed, c.threads);
                props.push_back(tail.tail);
                t.rows.push_back({th[i], n, eps, to_string(d), refs[i].gamma_hat, refs[i].std_err, tail.tail.p,
                                  tail.tail.lo, tail.tail.hi, c.samples, c.seed});
            }
            const std::string label = "theta " + format_double(th[i]) + " " + to_string(d);
            report_fit(err, label, ns, props);
            series.push_back(log_series(label, ns, props));
        }
    }
    emit(t, c.format, c.out, out);
    if (!c.svg.empty()) write_svg_file(c.svg, svg_chart("tail probability", "n", "log tail", series));
    return 0;
}

int cmd_resonance(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 2000, 0.4, 2.7, 1);
    const auto ns = s.longs("n", {10, 20, 40});
    const double delta = s.real("delta", 0.05);
    const long x = s.integer("x", 0);
    Table t{{"n", "delta", "threshold", "tail_prob", "ci_lo", "ci_hi", "samples", "master_seed"}, {}};
    std::vector<Proportion> props;
    for (long n : ns) {
        const auto r = resonance_experiment(c.dist, x, n, delta, c.samples, c.seed, c.threads);
        props.push_back(r.tail);
        t.rows.push_back({n, delta, r.threshold, r.tail.p, r.tail.lo, r.tail.hi, c.samples, c.seed});
    }
    report_fit(err, "resonance", ns, props);
    emit(t, c.format, c.out, out);
    if (!c.svg.empty()) {
        write_svg_file(c.svg, svg_chart("resonance", "n", "log probability", {log_series("resonance", ns, props)}));
    }
    return 0;
}

int cmd_regularity(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 2000, 0.4, 2.7, 8);
    const auto ns = s.longs("n", {10, 20, 40});
    const long x = s.integer("x", 0);
    const auto th = angles(c);
    const auto refs = reference_exponents(s, c, th);
    std::vector<double> gammas;
    for (const auto& r : refs) gammas.push_back(r.gamma_hat);
    const double nu = *std::min_element(gammas.begin(), gammas.end());
    if (!(nu > 0.0)) throw ParameterError("estimated exponent is not positive on the grid");
    const double eps = s.has("epsilon") ? s.real("epsilon", 0.0) : s.real("epsilon-factor", 0.25) * nu;
    const double delta = s.real("delta", 0.5 * eps);
    Table t{{"theta", "n", "eps", "frac_both_singular", "ci_lo", "ci_hi", "samples"}, {}};
    std::vector<Proportion> pooled;
    for (long n : ns) {
        const auto r = two_point_experiment(c.dist, x, n, th, eps, gammas, delta, c.samples, c.seed, c.threads);
        for (std::size_t i = 0; i < th.size(); ++i) {
            const auto& p = r.per_theta[i];
            t.rows.push_back({th[i], n, eps, p.p, p.lo, p.hi, c.samples});
        }
        // pooled over the grid; the theta cell is left empty
        t.rows.push_back({Cell{}, n, eps, r.pooled.p, r.pooled.lo, r.pooled.hi, c.samples});
        pooled.push_back(r.pooled);
        note(err, "n " + std::to_string(n) + ": singular samples close to the spectrum " +
                      std::to_string(r.singular_close.successes) + "/" + std::to_string(r.singular_close.trials) +
                      (r.perturbed ? ", z perturbed " + std::to_string(r.perturbed) + " times" : ""));
    }
    report_fit(err, "pooled", ns, pooled);
    emit(t, c.format, c.out, out);
    if (!c.svg.empty()) {
        write_svg_file(c.svg,
                       svg_chart("both-singular fraction", "n", "log fraction", {log_series("pooled", ns, pooled)}));
    }
    return 0;
}

int cmd_localize(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 1, 0.4, 2.7, 1);
    const long size = s.integer("size", 1000);
    if (size < 2) throw ParameterError("--size must be at least 2");
    const Arc arc = arc_of(c);
    ProfileOptions opt;
    opt.plateau = s.integer("plateau", opt.plateau);
    opt.edge = s.integer("edge", opt.edge);
    const auto per_sample = parallel_map(static_cast<std::size_t>(c.samples), c.threads, [&](std::size_t i) {
        return localize_eigenfunctions(sample_eigensystem(c.dist, size, SeedPlan{c.seed, i}), arc, opt);
    });
    Table t{{"k", "center", "decay_rate", "fit_r2", "theta_k"}, {}};
    std::vector<double> rates;
    long good = 0;
    for (const auto& profiles : per_sample) {
        for (const auto& p : profiles) {
            t.rows.push_back({p.k, p.center, p.decay_rate, p.fit_r2, p.theta});
            rates.push_back(std::abs(p.decay_rate));
            if (p.fit_r2 >= 0.8 && p.decay_rate < 0.0) ++good;
        }
    }
    if (!rates.empty()) {
        std::nth_element(rates.begin(), rates.begin() + static_cast<long>(rates.size() / 2), rates.end());
        note(err, std::to_string(good) + "/" + std::to_string(t.rows.size()) +
                      " profiles with R² ≥ 0.8 and negative rate; median |rate| " +
                      format_double(rates[rates.size() / 2]));
    }
    emit(t, c.format, c.out, out);
    return 0;
}

Table edl_table(const std::vector<long>& offsets, const std::vector<MeanStats>& means, const DecayFit& fit) {
    Table t{{"offset", "mean_kernel", "ci_lo", "ci_hi", "fitted_rate"}, {}};
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const auto& m = means[i];
        const double h = m.count > 1 ? t_quantile_975(m.count - 1) * m.std_err : 0.0;
        t.rows.push_back({offsets[i], m.mean, m.mean - h, m.mean + h, opt_cell(fit.rate)});
    }
    return t;
}

int cmd_edl(const Settings& s, std::ostream& out, std::ostream& err) {
    const Common c = common(s, 50, 0.4, 2.7, 1);
    const long size = s.integer("size", 1000);
    const long p = s.integer("p", size / 2 - 50);
    const auto offsets = s.longs("offsets", {10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
    const auto r = edl_experiment(c.dist, size, arc_of(c), p, offsets, c.samples, c.seed, c.threads);
    note(err, "kernel rate " + format_double(r.kernel_fit.rate) + " CI [" + format_double(r.kernel_fit.rate_lo) + ", " +
                  format_double(r.kernel_fit.rate_hi) + "], R² " + format_double(r.kernel_fit.r2));
    emit(edl_table(offsets, r.kernel, r.kernel_fit), c.format, c.out, out);
    if (c.out.empty() || c.out == "-") {
        note(err, "center-conditioned sums are only written alongside an --out file");
    } else {
        emit(edl_table(offsets, r.conditioned, r.conditioned_fit), c.format, c.out + ".conditioned", out);
    }
    if (!c.svg.empty()) {
        Series k{"kernel", {}, {}, false, 0.0, 0.0};
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            if (r.kernel[i].mean <= 0.0) continue;
            k.x.push_back(static_cast<double>(offsets[i]));
            k.y.push_back(std::log(r.kernel[i].mean));
        }
        if (std::isfinite(r.kernel_fit.rate)) {
            k.has_fit = true;
            k.slope = -r.kernel_fit.rate;
            k.intercept = std::log(r.kernel_fit.prefactor);
        }
        write_svg_file(c.svg, svg_chart("mean kernel", "offset", "log mean", {k}));
    }
    return 0;
}

int cmd_dump(const Settings& s, std::ostream& out, std::ostream&) {
    const Common c = common(s, 1, 0.0, 0.0, 1);
    const auto iv = s.longs("interval", {0, 9});
    if (iv.size() != 2 || iv[1] < iv[0]) throw ParameterError("--interval: expected a,b with a ≤ b");
    const Interval sites{iv[0], iv[1]};
    const Decoration dec = parse_decoration(s.str("boundary", "both"));
    const Boundary bd = decorate(dec, Complex(-1.0, 0.0), Complex(1.0, 0.0));
    const VerblunskyField f = sample_field(c.dist, sites, std::nullopt, std::nullopt, SeedPlan{c.seed, 0});
    const std::string which = s.str("matrix", "E");
    Eigen::MatrixXcd m;
    if (which == "A") {
        m = build_A(f, sites, bd, std::polar(1.0, s.real("theta", 0.0))).dense();
    } else {
        const CmvBlock blk = build_block(f, sites, bd);
        if (which == "E") {
            m = blk.E.dense();
        } else if (which == "L") {
            m = blk.L.dense();
        } else if (which == "M") {
            m = blk.M.dense();
        } else {
            throw ParameterError("--matrix must be E, L, M or A");
        }
    }
    Table t{{"row", "col", "re", "im"}, {}};
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) == Complex{}) continue;
            t.rows.push_back({sites.lo + static_cast<long>(i), sites.lo + static_cast<long>(j), m(i, j).real(),
                              m(i, j).imag()});
        }
    }
    emit(t, c.format, c.out, out);
    return 0;
}

struct Command {
    std::string name;
    std::string help;
    std::vector<std::pair<std::string, std::string>> extra;  // option name, help
    std::function<int(const Settings&, std::ostream&, std::ostream&)> fn;
};

const std::vector<std::pair<std::string, std::string>> kCommon{
    {"seed", "master seed (u64)"},
    {"samples", "Monte Carlo samples (trials for verify)"},
    {"dist", "distribution literal, e.g. atoms:(0.5,0.5);(-0.5,0.5)"},
    {"arc", "angle range lo,hi"},
    {"z-grid", "number of grid angles in the arc"},
    {"out", "output path (- for stdout)"},
    {"format", "csv or json"},
    {"threads", "worker threads (0 = hardware)"},
    {"svg", "write a line chart of the decay fit to this path"},
};

std::vector<Command> commands() {
    return {
        {"verify", "run the correction checks", {{"suite", "corrections, identities or all"}}, cmd_verify},
        {"lyapunov", "estimate the Lyapunov exponent on a z-grid", {{"n", "cocycle length"}}, cmd_lyapunov},
        {"ldt",
         "large-deviation tail probabilities",
         {{"n", "lengths, list or lo:hi:step"},
          {"epsilon", "deviation (overrides --epsilon-factor)"},
          {"epsilon-factor", "epsilon as a multiple of the estimated exponent"},
          {"decorations", "comma list of none,left,right,both"},
          {"ref-n", "length for the reference exponent"},
          {"ref-samples", "samples for the reference exponent"}},
         cmd_ldt},
        {"resonance",
         "spectral closeness of adjacent blocks",
         {{"n", "half-widths"}, {"delta", "closeness exponent"}, {"x", "left block center"}},
         cmd_resonance},
        {"regularity",
         "two-point singularity frequencies",
         {{"n", "half-widths"},
          {"epsilon", "deviation (overrides --epsilon-factor)"},
          {"epsilon-factor", "epsilon as a multiple of the smallest exponent on the grid"},
          {"delta", "closeness exponent (default epsilon/2)"},
          {"x", "first site"},
          {"ref-n", "length for the reference exponent"},
          {"ref-samples", "samples for the reference exponent"}},
         cmd_regularity},
        {"localize",
         "eigenfunction decay profiles",
         {{"size", "block size"}, {"plateau", "sites skipped around the center"}, {"edge", "sites skipped at each end"}},
         cmd_localize},
        {"edl",
         "mean eigenfunction-correlator decay",
         {{"size", "block size"}, {"p", "reference site"}, {"offsets", "offsets, list or lo:hi:step"}},
         cmd_edl},
        {"dump",
         "write a sampled matrix as (row, col, re, im) triplets",
         {{"interval", "a,b"},
          {"matrix", "E, L, M or A"},
          {"boundary", "none, left, right or both"},
          {"theta", "angle of z for A"}},
         cmd_dump},
    };
}

}  // namespace

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ParameterError("--format must be csv or json");
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size()) throw std::logic_error("row width does not match the schema");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& t) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size()) throw std::logic_error("row width does not match the schema");
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_value(row[i]);
        arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << '\n';
}

void emit(const Table& t, Format f, const std::string& path, std::ostream& fallback) {
    std::ostringstream buf;
    if (f == Format::Csv) {
        write_csv(buf, t);
    } else {
        write_json(buf, t);
    }
    if (path.empty() || path == "-") {
        fallback << buf.str();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ParameterError("cannot write '" + path + "'");
    file << buf.str();
    file.flush();
    if (!file) throw ParameterError("cannot write '" + path + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
    constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n"
      << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n"
      << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"11\">" << x0 << "</text>\n"
      << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"end\">" << x1
      << "</text>\n"
      << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << y0 << "</text>\n"
      << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">" << y1
      << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
        o << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        }
        if (s.has_fit) {
            const double ya = s.intercept + s.slope * x0, yb = s.intercept + s.slope * x1;
            o << "<line x1=\"" << px(x0) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yb)
              << "\" stroke=\"" << col << "\" stroke-dasharray=\"5,4\"/>\n";
        }
        o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
          << col << "\">" << s.label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random CMV matrix experiments", "cmvlab"};
    app.require_subcommand(1, 1);
    Settings settings;
    std::string config_path;
    const auto cmds = commands();
    std::vector<CLI::App*> subs;
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        subs.push_back(sub);
        auto bind = [&](const std::string& name, const std::string& help) {
            sub->add_option_function<std::string>(
                "--" + name, [&settings, name](const std::string& v) { settings.given[name] = v; }, help);
        };
        for (const auto& [name, help] : kCommon) bind(name, help);
        for (const auto& [name, help] : c.extra) bind(name, help);
        sub->add_option("--config", config_path, "key = value file; command-line flags take precedence");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        CLI::App* active = &app;
        for (auto* s : subs) {
            if (s->parsed()) active = s;
        }
        err << active->help();
        return 2;
    }

    std::size_t which = 0;
    while (!subs[which]->parsed()) ++which;
    try {
        if (!config_path.empty()) {
            settings.config = read_config(config_path);
            std::vector<std::string> known;
            for (const auto& [n, h] : kCommon) known.push_back(n);
            for (const auto& c : cmds) {
                for (const auto& [n, h] : c.extra) known.push_back(n);
            }
            for (const auto& [k, v] : settings.config) {
                if (std::find(known.begin(), known.end(), k) == known.end()) {
                    throw ParameterError("config: unknown key '" + k + "'");
                }
            }
            // keys that belong to other subcommands are ignored
            std::map<std::string, std::string> mine;
            for (const auto& [k, v] : settings.config) {
                const bool common_key =
                    std::any_of(kCommon.begin(), kCommon.end(), [&](const auto& p) { return p.first == k; });
                const bool own = std::any_of(cmds[which].extra.begin(), cmds[which].extra.end(),
                                             [&](const auto& p) { return p.first == k; });
                if (common_key || own) mine[k] = v;
            }
            settings.config = std::move(mine);
        }
        return cmds[which].fn(settings, out, err);
    } catch (const ParameterError& e) {
        note(err, e.what());
        err << subs[which]->help();
        return 2;
    } catch (const DomainError& e) {
        note(err, e.what());
        err << subs[which]->help();
        return 2;
    } catch (const NumericalFailure& e) {
        note(err, std::string("numerical failure: ") + e.what());
        return 3;
    } catch (const SingularSystemError& e) {
        note(err, std::string("numerical failure: ") + e.what());
        return 3;
    } catch (const std::exception& e) {
        note(err, e.what());
        return 1;
    }
}

}  // namespace cmvlab::cli
