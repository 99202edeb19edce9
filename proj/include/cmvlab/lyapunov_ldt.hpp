#pragma once

#include <cstdint>
#include <optional>

#include "cmvlab/determinants.hpp"
#include "cmvlab/stats.hpp"

namespace cmvlab {

/// Monte Carlo estimate of γ(z) from (1/n) log ‖T_{[0,n-1]}‖ over independent fields.
struct LyapunovEstimate {
    Complex z;
    long n = 0;
    long samples = 0;
    double gamma_hat = 0.0;
    double std_err = 0.0;
    /// γ̂ < 5·std_err: z may sit at (or near) a point where the exponent vanishes.
    bool possible_exceptional = false;
};

/// Coefficients for sample s are α_k = dist.draw(SeedPlan{seed, s}.uniform(stream, k)), k = 0 … n−1.
LyapunovEstimate lyapunov_estimate(const Distribution& dist, Complex z, long n, long samples, std::uint64_t seed,
                                   int threads = 1);

/// Fraction of samples with |(1/L) log|P^{dec}_{[a,b]}| − γ| ≥ ε, L = b − a + 1, with β = −1 and γ = 1.
struct TailEstimate {
    Complex z;
    long n = 0;
    double epsilon = 0.0;
    Decoration decoration = Decoration::Both;
    double gamma_ref = 0.0;
    Proportion tail;
};

TailEstimate ldt_tail(const Distribution& dist, Complex z, double epsilon, Interval interval, Decoration decoration,
                      long samples, std::optional<double> gamma_ref, std::uint64_t seed, int threads = 1);

enum class BadSet { Plus, Minus, Neither };

const char* to_string(BadSet b);

/// Plus when |P| ≥ e^{(γ+ε)L}, minus when |P| ≤ e^{(γ−ε)L}, over the field's own interval.
BadSet bad_set_member(const VerblunskyField& field, Complex z, double epsilon, Decoration decoration,
                      std::optional<double> gamma_ref);

/// Same classification for a precomputed log|P| over a window of length L.
BadSet classify_log_det(double log_abs_P, long length, double epsilon, double gamma_ref);

struct BadSetStats {
    Interval interval;
    double epsilon = 0.0;
    Decoration decoration = Decoration::Both;
    Complex z;
    long plus_count = 0;
    long minus_count = 0;
    long total = 0;
};

BadSetStats bad_set_stats(const Distribution& dist, Interval interval, Complex z, double epsilon,
                          Decoration decoration, double gamma_ref, long samples, std::uint64_t seed, int threads = 1);

/// Which one-sided windows enter the Craig–Simon bound around x.
///   BetaRight: P^{β,·}_{[x+1,x+n]} and P^{·,γ}_{[x−n,x−1]}.
///   BetaLeft:  P^{β,·}_{[x−n,x−1]} and P^{·,γ}_{[x+1,x+n]} (the pair the Green entries G(x, x±n) use).
enum class CraigSimonOrientation { BetaRight, BetaLeft };

struct CraigSimonResult {
    bool pass = false;
    double left_log = 0.0;   // log of the determinant on [x−n, x−1]
    double right_log = 0.0;  // log of the determinant on [x+1, x+n]
    double threshold_log = 0.0;
};

/// max of the two one-sided |P| ≤ e^{(γ+ε)(n+1)}, with β = −1, γ = 1 unless the field records phases.
CraigSimonResult craig_simon_check(const VerblunskyField& field, long x, long n, Complex z, double epsilon,
                                   std::optional<double> gamma_ref,
                                   CraigSimonOrientation orientation = CraigSimonOrientation::BetaRight);

/// Failure frequency of craig_simon_check at x = 0 over independent fields.
Proportion craig_simon_failure_rate(const Distribution& dist, long n, Complex z, double epsilon, double gamma_ref,
                                    long samples, std::uint64_t seed, int threads = 1,
                                    CraigSimonOrientation orientation = CraigSimonOrientation::BetaRight);

}  // namespace cmvlab
