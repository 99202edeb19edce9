#include "cmvlab/lyapunov_ldt.hpp"

#include <cmath>

#include "cmvlab/errors.hpp"
#include "cmvlab/parallel.hpp"
#include "cmvlab/transfer.hpp"

namespace cmvlab {

namespace {

double require_gamma(std::optional<double> gamma_ref) {
    if (!gamma_ref) throw ParameterError("a reference Lyapunov exponent is required");
    if (!std::isfinite(*gamma_ref)) throw ParameterError("reference Lyapunov exponent is not finite");
    return *gamma_ref;
}

Boundary phases_of(const VerblunskyField& field) {
    return {field.beta() ? field.beta()->value() : default_beta().value(),
            field.gamma() ? field.gamma()->value() : default_gamma().value()};
}

}  // namespace

LyapunovEstimate lyapunov_estimate(const Distribution& dist, Complex z, long n, long samples, std::uint64_t seed,
                                   int threads) {
    if (n < 1) throw ParameterError("lyapunov_estimate needs n >= 1");
    if (samples < 1) throw ParameterError("lyapunov_estimate needs samples >= 1");
    const auto rates = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const SeedPlan plan{seed, static_cast<std::uint64_t>(s)};
        TransferState st;
        for (long k = 0; k < n; ++k) st = propagate(st, dist.draw(plan.uniform(0, k)), z);
        return st.log_norm() / static_cast<double>(n);
    });
    const MeanStats m = mean_stats(rates);
    LyapunovEstimate out;
    out.z = z;
    out.n = n;
    out.samples = samples;
    out.gamma_hat = m.mean;
    out.std_err = m.std_err;
    out.possible_exceptional = !(m.mean >= 5.0 * m.std_err) || m.mean <= 1e-10;
    return out;
}

TailEstimate ldt_tail(const Distribution& dist, Complex z, double epsilon, Interval interval, Decoration decoration,
                      long samples, std::optional<double> gamma_ref, std::uint64_t seed, int threads) {
    const double g = require_gamma(gamma_ref);
    if (interval.empty()) throw ParameterError("ldt_tail needs a nonempty interval");
    if (samples < 1) throw ParameterError("ldt_tail needs samples >= 1");
    if (!(epsilon >= 0.0)) throw ParameterError("ldt_tail needs epsilon >= 0");
    const double L = static_cast<double>(interval.size());
    const auto hits = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const auto field = sample_field(dist, interval, default_beta(), default_gamma(),
                                        SeedPlan{seed, static_cast<std::uint64_t>(s)});
        const double lp = det_P(field, z, decoration).normalized_P.log_mag();
        return std::abs(lp / L - g) >= epsilon ? 1 : 0;
    });
    long count = 0;
    for (int h : hits) count += h;
    TailEstimate out;
    out.z = z;
    out.n = interval.size();
    out.epsilon = epsilon;
    out.decoration = decoration;
    out.gamma_ref = g;
    out.tail = wilson(count, samples);
    return out;
}

const char* to_string(BadSet b) {
    switch (b) {
        case BadSet::Plus: return "plus";
        case BadSet::Minus: return "minus";
        case BadSet::Neither: return "neither";
    }
    return "neither";
}

BadSet classify_log_det(double log_abs_P, long length, double epsilon, double gamma_ref) {
    const double L = static_cast<double>(length);
    if (log_abs_P >= (gamma_ref + epsilon) * L) return BadSet::Plus;
    if (log_abs_P <= (gamma_ref - epsilon) * L) return BadSet::Minus;
    return BadSet::Neither;
}

BadSet bad_set_member(const VerblunskyField& field, Complex z, double epsilon, Decoration decoration,
                      std::optional<double> gamma_ref) {
    const double g = require_gamma(gamma_ref);
    if (!(epsilon > 0.0)) throw ParameterError("bad sets need epsilon > 0");
    const double lp = det_P(field, z, decoration).normalized_P.log_mag();
    return classify_log_det(lp, field.interval().size(), epsilon, g);
}

BadSetStats bad_set_stats(const Distribution& dist, Interval interval, Complex z, double epsilon,
                          Decoration decoration, double gamma_ref, long samples, std::uint64_t seed, int threads) {
    const auto cls = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const auto field = sample_field(dist, interval, default_beta(), default_gamma(),
                                        SeedPlan{seed, static_cast<std::uint64_t>(s)});
        return bad_set_member(field, z, epsilon, decoration, gamma_ref);
    });
    BadSetStats out{interval, epsilon, decoration, z, 0, 0, static_cast<long>(cls.size())};
    for (BadSet b : cls) {
        if (b == BadSet::Plus) ++out.plus_count;
        if (b == BadSet::Minus) ++out.minus_count;
    }
    return out;
}

CraigSimonResult craig_simon_check(const VerblunskyField& field, long x, long n, Complex z, double epsilon,
                                   std::optional<double> gamma_ref, CraigSimonOrientation orientation) {
    const double g = require_gamma(gamma_ref);
    if (n < 1) throw ParameterError("craig_simon_check needs n >= 1");
    const Boundary ph = phases_of(field);
    const Interval left{x - n, x - 1};
    const Interval right{x + 1, x + n};
    const bool beta_right = orientation == CraigSimonOrientation::BetaRight;
    const Boundary left_bd = beta_right ? Boundary{std::nullopt, ph.right} : Boundary{ph.left, std::nullopt};
    const Boundary right_bd = beta_right ? Boundary{ph.left, std::nullopt} : Boundary{std::nullopt, ph.right};
    CraigSimonResult r;
    r.left_log = det_P(field, left, left_bd, z).normalized_P.log_mag();
    r.right_log = det_P(field, right, right_bd, z).normalized_P.log_mag();
    r.threshold_log = (g + epsilon) * static_cast<double>(n + 1);
    r.pass = std::max(r.left_log, r.right_log) <= r.threshold_log;
    return r;
}

Proportion craig_simon_failure_rate(const Distribution& dist, long n, Complex z, double epsilon, double gamma_ref,
                                    long samples, std::uint64_t seed, int threads,
                                    CraigSimonOrientation orientation) {
    const auto fails = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const auto field = sample_field(dist, {-n, n}, default_beta(), default_gamma(),
                                        SeedPlan{seed, static_cast<std::uint64_t>(s)});
        return craig_simon_check(field, 0, n, z, epsilon, gamma_ref, orientation).pass ? 0 : 1;
    });
    long count = 0;
    for (int f : fails) count += f;
    return wilson(count, samples);
}

}  // namespace cmvlab
