#include <doctest.h>

#include <cmath>

#include "cmvlab/errors.hpp"
#include "cmvlab/lyapunov_ldt.hpp"
#include "helpers.hpp"

using namespace cmvlab;
using namespace testing_support;

namespace {
const Distribution bern = Distribution::parse("atoms:(0.5,0.5);(-0.5,0.5)");
}

TEST_CASE("free cocycle has zero exponent") {
    for (double th : {0.3, 1.0, 2.9}) {
        const auto e = lyapunov_estimate(Distribution::constant(0.0), std::polar(1.0, th), 10000, 1, 1);
        CHECK(std::abs(e.gamma_hat) <= 1e-12);
        CHECK(e.possible_exceptional);
    }
}

TEST_CASE("constant 0.5 at z = 1 matches the closed form") {
    // trace of (1/√z) S is 2 cos(θ/2)/ρ with det 1; at θ = 0 the larger eigenvalue is e^{arccosh(1/ρ)}.
    const double expected = std::acosh(2.0 / std::sqrt(3.0));
    CHECK(expected == doctest::Approx(0.5493).epsilon(1e-4));
    const auto e = lyapunov_estimate(Distribution::constant(0.5), 1.0, 10000, 1, 3);
    CHECK(std::abs(e.gamma_hat - expected) <= 1e-6);
    CHECK_FALSE(e.possible_exceptional);
}

TEST_CASE("Bernoulli exponent is positive and seed-reproducible") {
    const auto a = lyapunov_estimate(bern, std::polar(1.0, 1.0), 2000, 40, 11, 1);
    const auto b = lyapunov_estimate(bern, std::polar(1.0, 1.0), 2000, 40, 11, 3);
    CHECK(a.gamma_hat == b.gamma_hat);
    CHECK(a.std_err == b.std_err);
    CHECK(a.gamma_hat > 3.0 * a.std_err);
    CHECK(a.gamma_hat == doctest::Approx(0.164).epsilon(0.1));
    CHECK_THROWS_AS(lyapunov_estimate(bern, 1.0, 0, 1, 1), ParameterError);
}

TEST_CASE("conjugation symmetry of the exponent") {
    const auto d = Distribution::parse("atoms:(0.3+0.4i,0.5);(-0.5,0.5)");
    const Complex z = std::polar(1.0, 0.8);
    const auto a = lyapunov_estimate(d, z, 2000, 60, 5);
    const auto b = lyapunov_estimate(d.conjugated(), std::conj(z), 2000, 60, 6);
    CHECK(std::abs(a.gamma_hat - b.gamma_hat) <= 3.0 * std::hypot(a.std_err, b.std_err));
}

TEST_CASE("LDT tail extremes") {
    const Complex z = std::polar(1.0, 1.0);
    const double g = 0.1644;
    for (Decoration d : {Decoration::Left, Decoration::Right, Decoration::Both}) {
        CHECK(ldt_tail(bern, z, 0.0, {0, 19}, d, 100, g, 1).tail.p == 1.0);
        CHECK(ldt_tail(bern, z, 10.0 * g + 10.0, {0, 19}, d, 100, g, 1).tail.p == 0.0);
    }
    CHECK_THROWS_AS(ldt_tail(bern, z, 0.1, {0, 19}, Decoration::Both, 10, std::nullopt, 1), ParameterError);
}

TEST_CASE("LDT tail decays with n") {
    const Complex z = std::polar(1.0, 1.0);
    const auto ge = lyapunov_estimate(bern, z, 4000, 60, 2);
    std::vector<double> ns;
    std::vector<Proportion> ps;
    for (long n : {20L, 40L, 80L}) {
        ns.push_back(static_cast<double>(n));
        ps.push_back(ldt_tail(bern, z, ge.gamma_hat / 2.0, {0, n - 1}, Decoration::Left, 600, ge.gamma_hat, 3).tail);
    }
    CHECK(ps[0].p > ps[1].p);
    CHECK(ps[1].p > ps[2].p);
    CHECK(log_linear_fit(ns, ps).slope < 0.0);
}

TEST_CASE("reversal: right decoration equals left decoration on the reflected law") {
    // P^{·,1}(α̃) with α̃_j = −conj(α_{a+b−1−j}) has the law of P^{−1,·} under −conj(α).
    const Complex z = std::polar(1.0, 1.3);
    const auto d = Distribution::parse("atoms:(0.3+0.4i,0.3);(-0.5,0.7)");
    const double g = lyapunov_estimate(d, z, 3000, 40, 4).gamma_hat;
    const auto r = ldt_tail(d, z, g / 2.0, {0, 29}, Decoration::Right, 1500, g, 8).tail;
    const auto l = ldt_tail(d.negated_conjugate(), z, g / 2.0, {0, 29}, Decoration::Left, 1500, g, 9).tail;
    const double se = std::sqrt(r.p * (1 - r.p) / 1500.0 + l.p * (1 - l.p) / 1500.0);
    CHECK(std::abs(r.p - l.p) <= 3.0 * se + 1e-12);
}

TEST_CASE("bad set classification") {
    CHECK(classify_log_det(0.2 * 10, 10, 0.05, 0.2) == BadSet::Neither);
    CHECK(classify_log_det(0.26 * 10, 10, 0.05, 0.2) == BadSet::Plus);
    CHECK(classify_log_det(0.14 * 10, 10, 0.05, 0.2) == BadSet::Minus);
    std::mt19937_64 rng(1);
    const auto f = random_field(rng, 0, 20);
    CHECK_THROWS_AS(bad_set_member(f, 1.0, 0.0, Decoration::Both, 0.1), ParameterError);
    const auto st = bad_set_stats(bern, {0, 39}, std::polar(1.0, 1.0), 0.05, Decoration::Both, 0.1644, 300, 3);
    CHECK(st.plus_count + st.minus_count <= st.total);
    CHECK(st.total == 300);
}

TEST_CASE("outside all bad sets bounds the boundary Green entries") {
    // Not in B^− for the (−1,1) window [x−n, x+n] and not in B^+ for the one-sided windows gives
    // |G(x, x±n)| < e^{−γ(n+1) + ε(3n+1)} / ρ at the far site.
    const Complex z = std::polar(1.0, 1.0);
    const double g = 0.1644, eps = 0.02;
    long checked = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        const long n = 10 + static_cast<long>(s % 20);
        const auto f = sample_field(bern, {-n, n}, default_beta(), default_gamma(), SeedPlan{21, s});
        const auto full = det_P(f, z, Decoration::Both);
        const auto cs = craig_simon_check(f, 0, n, z, eps, g, CraigSimonOrientation::BetaLeft);
        const bool big_ok = classify_log_det(full.normalized_P.log_mag(), 2 * n + 1, eps, g) != BadSet::Minus;
        const bool sides_ok = classify_log_det(cs.left_log, n, eps, g) != BadSet::Plus &&
                              classify_log_det(cs.right_log, n, eps, g) != BadSet::Plus;
        if (!(big_ok && sides_ok)) continue;
        ++checked;
        const auto G = green_direct(f, z, -1.0, 1.0);
        const double bound = -g * (n + 1) + eps * (3 * n + 1);
        CHECK(std::log(std::abs(G(n, 2 * n))) < bound - std::log(f.rho(n)));
        CHECK(std::log(std::abs(G(n, 0))) < bound - std::log(f.rho(-n - 1)));
    }
    CHECK(checked > 20);
}

TEST_CASE("Craig-Simon checks") {
    // free field: |P| stays polynomially bounded
    const auto free = constant_field(0.0, -200, 200);
    for (auto o : {CraigSimonOrientation::BetaRight, CraigSimonOrientation::BetaLeft}) {
        CHECK(craig_simon_check(free, 0, 150, std::polar(1.0, 0.7), 0.01, 0.0, o).pass);
    }
    const Complex z = std::polar(1.0, 1.0);
    const double g = 0.1644;
    const auto f10 = craig_simon_failure_rate(bern, 10, z, 0.05, g, 800, 4);
    const auto f40 = craig_simon_failure_rate(bern, 40, z, 0.05, g, 800, 4);
    CHECK(f40.p <= f10.p);
    const auto f0 = craig_simon_failure_rate(bern, 10, z, 0.0, g, 800, 4);
    MESSAGE("Craig-Simon failure at eps=0, n=10: " << f0.p);
    CHECK(f0.p >= f10.p);
}
