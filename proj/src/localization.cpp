#include "cmvlab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmvlab/errors.hpp"
#include "cmvlab/parallel.hpp"

namespace cmvlab {

RegularityVerdict is_regular(const VerblunskyField& field, long x, long n, Complex z, double rate,
                             Complex beta_boundary, Complex gamma_boundary) {
    if (n < 1) throw ParameterError("regularity scale n must be at least 1");
    const VerblunskyField w = field.with_interval({x - n, x + n});
    RegularityVerdict v;
    v.x = x;
    v.n = n;
    v.rate = rate;
    v.z = z;
    v.left_green_logmag = green_entry(w, z, x - n, x, beta_boundary, gamma_boundary).value.log_mag();
    v.right_green_logmag = green_entry(w, z, x, x + n, beta_boundary, gamma_boundary).value.log_mag();
    const double bound = -rate * static_cast<double>(n);
    v.regular = v.left_green_logmag <= bound && v.right_green_logmag <= bound;
    return v;
}

RegularityVerdict is_regular_perturbing(const VerblunskyField& field, long x, long n, Complex z, double rate,
                                        Complex beta_boundary, Complex gamma_boundary, int& perturbed) {
    const Complex step = std::polar(1.0, 1e-9);
    for (int attempt = 0;; ++attempt) {
        try {
            return is_regular(field, x, n, z, rate, beta_boundary, gamma_boundary);
        } catch (const SingularSystemError&) {
            if (attempt == 8) throw;
            z *= step;
            ++perturbed;
        }
    }
}

namespace {

struct TwoPointSample {
    std::vector<char> both;  // per theta
    long any = 0;
    long singular = 0;
    long close = 0;
    long perturbed = 0;
};

}  // namespace

TwoPointResult two_point_experiment(const Distribution& dist, long x, long n, const std::vector<double>& thetas,
                                    double epsilon, const std::vector<double>& gamma_refs, double delta, long samples,
                                    std::uint64_t seed, int threads) {
    if (thetas.empty() || thetas.size() != gamma_refs.size()) {
        throw ParameterError("two-point experiment needs one reference exponent per grid angle");
    }
    if (samples < 1 || n < 1) throw ParameterError("two-point experiment needs n >= 1 and samples >= 1");
    const double nu = *std::min_element(gamma_refs.begin(), gamma_refs.end());
    if (!(epsilon > 0.0) || !(epsilon < nu / 2.0)) {
        throw ParameterError("epsilon must lie in (0, min gamma / 2) = (0, " + std::to_string(nu / 2.0) + ")");
    }
    const long y = x + 2 * n + 1;
    const Complex beta = default_beta().value();
    const Complex gamma = default_gamma().value();
    const double close_bound = std::exp(-delta * static_cast<double>(2 * n + 1));

    const auto per_sample = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const VerblunskyField f = sample_field(dist, {x - n, x + 3 * n + 1}, default_beta(), default_gamma(),
                                               SeedPlan{seed, s});
        TwoPointSample out;
        out.both.assign(thetas.size(), 0);
        std::optional<UnitaryEigenSystem> sys_x, sys_y;
        auto closeness = [&](std::optional<UnitaryEigenSystem>& sys, long site, Complex z) {
            if (!sys) sys = eig_unitary(build_block(f, {site - n, site + n}, Boundary::both(default_beta(), default_gamma())));
            ++out.singular;
            if (distance_to_spectrum(*sys, z) <= close_bound) ++out.close;
        };
        for (std::size_t t = 0; t < thetas.size(); ++t) {
            const Complex z = std::polar(1.0, thetas[t]);
            const double c = gamma_refs[t] - 2.0 * epsilon;
            int pert = 0;
            const auto vx = is_regular_perturbing(f, x, n, z, c, beta, gamma, pert);
            const auto vy = is_regular_perturbing(f, y, n, z, c, beta, gamma, pert);
            out.perturbed += pert;
            if (!vx.regular) closeness(sys_x, x, vx.z);
            if (!vy.regular) closeness(sys_y, y, vy.z);
            out.both[t] = !vx.regular && !vy.regular;
        }
        out.any = std::any_of(out.both.begin(), out.both.end(), [](char b) { return b != 0; }) ? 1 : 0;
        return out;
    });

    TwoPointResult r;
    r.n = n;
    r.epsilon = epsilon;
    r.delta = delta;
    r.thetas = thetas;
    r.master_seed = seed;
    std::vector<long> counts(thetas.size(), 0);
    long any = 0, singular = 0, close = 0;
    for (const auto& s : per_sample) {
        for (std::size_t t = 0; t < thetas.size(); ++t) counts[t] += s.both[t];
        any += s.any;
        singular += s.singular;
        close += s.close;
        r.perturbed += s.perturbed;
    }
    long pooled = 0;
    std::size_t worst = 0;
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        r.per_theta.push_back(wilson(counts[t], samples));
        pooled += counts[t];
        if (counts[t] > counts[worst]) worst = t;
    }
    r.pooled = wilson(pooled, samples * static_cast<long>(thetas.size()));
    r.worst = r.per_theta[worst];
    r.any_z = wilson(any, samples);
    r.singular_close = singular > 0 ? wilson(close, singular) : Proportion{};
    return r;
}

long argmax_leftmost(const Eigen::VectorXcd& v) {
    if (v.size() == 0) throw ParameterError("argmax of an empty vector");
    long best = 0;
    double top = std::abs(v(0));
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > top) {
            top = a;
            best = static_cast<long>(i);
        }
    }
    return best;
}

LocalizationProfile profile_vector(const Eigen::VectorXcd& v, long offset, const ProfileOptions& opt) {
    LocalizationProfile p;
    const long c = argmax_leftmost(v);
    p.center = offset + c;
    const double peak = std::abs(v(c));
    std::vector<double> xs, ys;
    const long size = static_cast<long>(v.size());
    for (long i = opt.edge; i < size - opt.edge; ++i) {
        const long d = std::abs(i - c);
        if (d < opt.plateau) continue;
        const double a = std::abs(v(i));
        if (!(a >= opt.noise_floor * peak) || a == 0.0) continue;
        xs.push_back(static_cast<double>(d));
        ys.push_back(std::log(a));
    }
    p.fit_points = static_cast<long>(xs.size());
    bool distinct = false;
    for (double d : xs) distinct = distinct || d != xs.front();
    if (xs.size() < 3 || !distinct) {
        // nothing resolvable away from the peak: faster than any measurable rate
        p.decay_rate = opt.rate_cap;
        p.fit_r2 = 1.0;
        return p;
    }
    const LinearFit f = linear_fit(xs, ys);
    p.decay_rate = std::max(f.slope, opt.rate_cap);
    p.fit_r2 = f.r2;
    return p;
}

std::vector<LocalizationProfile> localize_eigenfunctions(const UnitaryEigenSystem& sys, const Arc& arc,
                                                         const ProfileOptions& opt) {
    std::vector<LocalizationProfile> out;
    for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
        if (!arc.contains(sys.values(k))) continue;
        LocalizationProfile p = profile_vector(sys.vectors.col(k), sys.sites.lo, opt);
        p.k = static_cast<long>(k);
        p.theta = std::arg(sys.values(k));
        out.push_back(p);
    }
    return out;
}

namespace {

Eigen::Index site_row(const UnitaryEigenSystem& sys, long site) {
    if (site < sys.sites.lo || site > sys.sites.hi) {
        throw ParameterError("site " + std::to_string(site) + " outside the block");
    }
    return static_cast<Eigen::Index>(site - sys.sites.lo);
}

}  // namespace

double edl_kernel(const UnitaryEigenSystem& sys, const Arc& arc, long p, long q) {
    const Eigen::Index ip = site_row(sys, p), iq = site_row(sys, q);
    double s = 0.0;
    for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
        if (arc.contains(sys.values(k))) s += std::abs(sys.vectors(ip, k)) * std::abs(sys.vectors(iq, k));
    }
    return s;
}

double center_conditioned_sum(const UnitaryEigenSystem& sys, const Arc& arc, long y, long x) {
    const Eigen::Index iy = site_row(sys, y), ix = site_row(sys, x);
    double s = 0.0;
    for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
        if (!arc.contains(sys.values(k))) continue;
        if (argmax_leftmost(sys.vectors.col(k)) == iy) s += std::norm(sys.vectors(ix, k));
    }
    return s;
}

DecayFit fit_decay(const std::vector<long>& offsets, const std::vector<MeanStats>& means) {
    if (offsets.size() != means.size()) throw ParameterError("offsets and means differ in length");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (means[i].mean > 0.0) {
            xs.push_back(static_cast<double>(offsets[i]));
            ys.push_back(std::log(means[i].mean));
        }
    }
    DecayFit d;
    d.points = static_cast<long>(xs.size());
    if (xs.size() < 3) {
        d.rate = d.rate_lo = d.rate_hi = std::numeric_limits<double>::quiet_NaN();
        return d;
    }
    const LinearFit f = linear_fit(xs, ys);
    const double half = t_quantile_975(static_cast<long>(xs.size()) - 2) * f.slope_std_err;
    d.rate = -f.slope;
    d.rate_lo = d.rate - half;
    d.rate_hi = d.rate + half;
    d.prefactor = std::exp(f.intercept);
    d.r2 = f.r2;
    return d;
}

UnitaryEigenSystem sample_eigensystem(const Distribution& dist, long size, const SeedPlan& seed) {
    if (size < 1) throw ParameterError("block size must be positive");
    const VerblunskyField f = sample_field(dist, {0, size - 1}, default_beta(), default_gamma(), seed);
    return eig_unitary(build_block(f, true, true));
}

EdlResult edl_experiment(const Distribution& dist, long size, const Arc& arc, long p, const std::vector<long>& offsets,
                         long samples, std::uint64_t seed, int threads) {
    if (samples < 1) throw ParameterError("samples must be positive");
    for (long o : offsets) {
        if (p + o < 0 || p + o >= size || p < 0 || p >= size) throw ParameterError("EDL site outside the block");
    }
    struct Row {
        std::vector<double> kernel, conditioned;
    };
    const auto rows = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const UnitaryEigenSystem sys = sample_eigensystem(dist, size, SeedPlan{seed, s});
        Row r;
        for (long o : offsets) {
            r.kernel.push_back(edl_kernel(sys, arc, p, p + o));
            r.conditioned.push_back(center_conditioned_sum(sys, arc, p, p + o));
        }
        return r;
    });
    EdlResult e;
    e.size = size;
    e.p = p;
    e.offsets = offsets;
    e.master_seed = seed;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        std::vector<double> k, c;
        for (const auto& r : rows) {
            k.push_back(r.kernel[i]);
            c.push_back(r.conditioned[i]);
        }
        e.kernel.push_back(mean_stats(k));
        e.conditioned.push_back(mean_stats(c));
    }
    e.kernel_fit = fit_decay(offsets, e.kernel);
    e.conditioned_fit = fit_decay(offsets, e.conditioned);
    return e;
}

}  // namespace cmvlab
