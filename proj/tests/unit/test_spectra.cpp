#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmvlab/determinants.hpp"
#include "cmvlab/errors.hpp"
#include "cmvlab/spectra.hpp"
#include "helpers.hpp"

using namespace cmvlab;
using namespace testing_support;

namespace {

void check_contract(const UnitaryEigenSystem& sys, const Eigen::MatrixXcd& E) {
    const Eigen::Index n = E.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        CHECK(std::abs(std::abs(sys.values(k)) - 1.0) <= 1e-9);
        CHECK((E * sys.vectors.col(k) - sys.values(k) * sys.vectors.col(k)).norm() <= 1e-8);
    }
    const Eigen::MatrixXcd G = sys.vectors.adjoint() * sys.vectors;
    CHECK((G - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
    // completeness over sites
    for (Eigen::Index x = 0; x < n; ++x) CHECK(std::abs(sys.vectors.row(x).squaredNorm() - 1.0) <= 1e-8);
}

}  // namespace

TEST_CASE("free 2x2 block has eigenvalues ±1") {
    const auto f = constant_field(0.0, 0, 1);
    const auto block = build_block(f, {0, 1}, Boundary::both(default_beta(), default_gamma()));
    const auto sys = eig_unitary(block);
    std::vector<double> re{sys.values(0).real(), sys.values(1).real()};
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(re[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(sys.values(0).imag()) <= 1e-12);
    check_contract(sys, block.E.dense());
}

TEST_CASE("eigenvalues are roots of the decorated determinant") {
    std::mt19937_64 rng(404);
    for (int t = 0; t < 60; ++t) {
        const long a = static_cast<long>(rng() % 7) - 3;
        const long b = a + 1 + static_cast<long>(rng() % 63);
        const auto f = random_field(rng, a, b);
        const Boundary bd = Boundary::both(BoundaryPhase(random_phase(rng)), BoundaryPhase(random_phase(rng)));
        const auto block = build_block(f, {a, b}, bd);
        const auto sys = eig_unitary(block);
        check_contract(sys, block.E.dense());
        for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
            const auto r = det_P(f, {a, b}, bd, sys.values(k));
            CHECK(r.script_P.log_mag() <= std::log(1e-7) + r.scale_log);
        }
    }
}

TEST_CASE("solver survives -1 in the spectrum") {
    // free 2x2 block contains −1 exactly, so the unshifted Cayley map is singular
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(4, 4);
    U(0, 0) = -1.0;
    U(1, 1) = 1.0;
    U(2, 3) = 1.0;
    U(3, 2) = 1.0;
    const auto sys = eig_unitary(U, {0, 3});
    check_contract(sys, U);
    CHECK(sys.shift != 0.0);
    CHECK_THROWS_AS(eig_unitary(U, {0, 2}), ParameterError);
}

TEST_CASE("degenerate spectra still give orthonormal vectors") {
    const Eigen::MatrixXcd U = Complex(0.0, 1.0) * Eigen::MatrixXcd::Identity(6, 6);
    check_contract(eig_unitary(U, {0, 5}), U);
}

TEST_CASE("large random block meets the contract") {
    std::mt19937_64 rng(9);
    const auto f = random_field(rng, 0, 399);
    const auto block = build_block(f, {0, 399}, Boundary::both(default_beta(), default_gamma()));
    const auto sys = eig_unitary(block);
    CHECK(sys.residual <= 1e-10);
    CHECK(sys.gram_residual <= 1e-10);
}

TEST_CASE("half-modified block is rejected") {
    std::mt19937_64 rng(1);
    const auto f = random_field(rng, 0, 5);
    CHECK_THROWS_AS(eig_unitary(build_block(f, {0, 5}, Boundary::left_only(default_beta()))), ParameterError);
}

TEST_CASE("different seeds give different spectra") {
    const auto d = Distribution::parse("atoms:(0.5,0.5);(-0.5,0.5)");
    const auto b1 = resonance_blocks(resonance_field(d, 0, 10, {1, 0}), 0, 10);
    const auto b2 = resonance_blocks(resonance_field(d, 0, 10, {2, 0}), 0, 10);
    CHECK(spectral_distance(eig_unitary(b1.left).values, eig_unitary(b1.left).values) == 0.0);
    const auto s1 = eig_unitary(b1.left), s2 = eig_unitary(b2.left);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < s1.values.size(); ++k) worst = std::max(worst, distance_to_spectrum(s2, s1.values(k)));
    CHECK(worst > 1e-6);
}

TEST_CASE("spectral distance") {
    Eigen::VectorXcd a(2), b(2);
    a << 1.0, -1.0;
    b << Complex(0, 1), Complex(0, -1);
    CHECK(spectral_distance(a, b) == doctest::Approx(std::sqrt(2.0)));
    CHECK(spectral_distance(a, a) == 0.0);
    CHECK_THROWS_AS(spectral_distance(a, Eigen::VectorXcd()), ParameterError);
}

TEST_CASE("resonance blocks use disjoint coefficients") {
    const auto d = Distribution::parse("atoms:(0.5,0.5);(-0.5,0.5)");
    const long n = 6;
    const auto f = resonance_field(d, 0, n, {3, 0});
    auto g_coeffs = f.coefficients();
    // re-draw every coefficient strictly right of x+n from another seed
    const auto other = resonance_field(d, 0, n, {99, 5});
    for (long k = n; k <= 3 * n + 2; ++k) {
        const auto i = static_cast<std::size_t>(k - f.window().lo);
        g_coeffs[i] = other.coefficients()[i];
    }
    const VerblunskyField g(f.interval(), f.window().lo, g_coeffs, f.beta(), f.gamma());
    const auto pf = resonance_blocks(f, 0, n), pg = resonance_blocks(g, 0, n);
    CHECK((pf.left.E.dense() - pg.left.E.dense()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pf.right.E.dense() - pg.right.E.dense()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("resonance experiment") {
    const auto d = Distribution::parse("atoms:(0.5,0.5);(-0.5,0.5)");
    const auto r0 = resonance_experiment(d, 0, 5, 0.0, 200, 1);
    CHECK(r0.threshold == 2.0);
    CHECK(r0.tail.p == 1.0);
    CHECK(resonance_experiment(d, 0, 10, 5.0, 200, 1).tail.p == 0.0);
    const auto a = resonance_experiment(d, 0, 10, 0.05, 300, 7, 1);
    const auto b = resonance_experiment(d, 0, 10, 0.05, 300, 7, 3);
    CHECK(a.tail.successes == b.tail.successes);
    CHECK(a.median_log_distance == b.median_log_distance);
}
