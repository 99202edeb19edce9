#include <doctest.h>

#include <numbers>

#include "cmvlab/determinants.hpp"
#include "cmvlab/errors.hpp"
#include "cmvlab/transfer.hpp"
#include "helpers.hpp"

using namespace cmvlab;
using namespace testing_support;

TEST_CASE("one step examples") {
    const Complex z = std::polar(1.0, 0.8);
    const auto s0 = one_step(z, 0.0).entries;
    CHECK(s0(0, 0) == z);
    CHECK(s0(0, 1) == Complex(0.0, 0.0));
    CHECK(s0(1, 0) == Complex(0.0, 0.0));
    CHECK(s0(1, 1) == Complex(1.0, 0.0));

    const auto s1 = one_step(1.0, 0.5).entries;
    const double k = 1.0 / std::sqrt(0.75);
    CHECK(std::abs(s1(0, 0) - k) < 1e-15);
    CHECK(std::abs(s1(0, 1) + 0.5 * k) < 1e-15);
    CHECK(std::abs(s1(1, 0) + 0.5 * k) < 1e-15);
    CHECK(std::abs(s1(1, 1) - k) < 1e-15);

    CHECK_THROWS_AS(one_step(z, 1.2), DomainError);
    CHECK_THROWS_AS(one_step(0.0, 0.2), ParameterError);
}

TEST_CASE("det S = z and SU(1,1) membership") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
        const Complex z = t % 2 ? random_phase(rng) : random_disk(rng, 3.0);
        const Complex a = random_disk(rng, 0.99);
        const auto S = one_step(z, a).entries;
        CHECK(rel(S.determinant(), z) <= 1e-13);
        if (t % 2) {
            const Eigen::Matrix2cd U = S / principal_sqrt(z);
            CHECK(std::abs(std::norm(U(0, 0)) - std::norm(U(0, 1)) - 1.0) <= 1e-12);
            CHECK(std::abs(U(1, 0) - std::conj(U(0, 1))) <= 1e-12);
            CHECK(std::abs(U(1, 1) - std::conj(U(0, 0))) <= 1e-12);
        }
    }
    CHECK(principal_sqrt(1.0) == Complex(1.0, 0.0));
}

TEST_CASE("propagation matches naive products") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const Complex z = random_phase(rng);
        TransferState s;
        Eigen::Matrix2cd naive = Eigen::Matrix2cd::Identity();
        const Complex a0 = random_disk(rng);
        s = propagate(s, a0, z);
        CHECK((s.materialize() - one_step(z, a0).entries).cwiseAbs().maxCoeff() <= 1e-15);
        naive = one_step(z, a0).entries;
        for (int k = 1; k < 30; ++k) {
            const Complex a = random_disk(rng);
            s = propagate(s, a, z);
            naive = one_step(z, a).entries * naive;
        }
        CHECK((s.materialize() - naive).cwiseAbs().maxCoeff() <= 1e-10 * naive.cwiseAbs().maxCoeff());
        CHECK(std::abs(s.log_norm() - std::log(spectral_norm(naive))) <= 1e-10);
        CHECK(s.step_count == 30);
        // det T = z^{30}, measured against ‖T‖² (the size of the products that cancel in a 2×2 determinant)
        const Complex det_scaled = s.matrix.determinant();
        CHECK(std::abs(det_scaled - std::pow(z, 30.0) * std::exp(-2.0 * s.log_scale)) <=
              1e-9 * std::pow(spectral_norm(s.matrix), 2));
        CHECK(s.log_norm() >= -1e-12);
    }
}

TEST_CASE("free cocycle is isometric") {
    const Complex z = std::polar(1.0, 2.2);
    TransferState s;
    for (int k = 0; k < 5000; ++k) {
        s = propagate(s, 0.0, z);
        if (k % 500 == 0) CHECK(std::abs(s.log_norm()) <= 1e-12);
    }
    CHECK(std::abs(s.log_norm()) <= 1e-12);
}

TEST_CASE("spectral norm of 2x2") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        Eigen::Matrix2cd m;
        m << random_disk(rng, 5.0), random_disk(rng, 5.0), random_disk(rng, 5.0), random_disk(rng, 5.0);
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
        CHECK(std::abs(spectral_norm(m) - svd.singularValues()(0)) <= 1e-12 * svd.singularValues()(0));
    }
}

TEST_CASE("Szego polynomials") {
    std::mt19937_64 rng(4);
    const auto f = random_field(rng, 0, 20);
    const Complex z = std::polar(1.0, 0.6);
    const auto polys = szego_polys(f, z, 0);
    CHECK(polys.size() == 1);
    CHECK(polys[0].phi.value() == Complex(1.0, 0.0));
    CHECK(polys[0].phi_star.value() == Complex(1.0, 0.0));
    CHECK(std::abs(monic_phi(f, z, 1).value() - (z - std::conj(f.alpha(0)))) <= 1e-15);

    // monic recurrence and |φ*| = |φ| on the circle
    Complex Phi = 1.0, Phis = 1.0;
    const auto seq = szego_polys(f, z, 16);
    for (long n = 0; n < 16; ++n) {
        double prod = 1.0;
        for (long k = 0; k < n; ++k) prod *= f.rho(k);
        CHECK(rel(seq[static_cast<std::size_t>(n)].phi.value() * prod, Phi) <= 1e-12);
        CHECK(std::abs(seq[static_cast<std::size_t>(n)].phi.log_mag() -
                       seq[static_cast<std::size_t>(n)].phi_star.log_mag()) <= 1e-12);
        const Complex a = f.alpha(n);
        const Complex next = z * Phi - std::conj(a) * Phis;
        Phis = Phis - a * z * Phi;
        Phi = next;
    }
}

TEST_CASE("monic Phi_n equals the left-decorated determinant") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const long n = 1 + static_cast<long>(rng() % 16);
        const auto f = random_field(rng, 0, n - 1);
        const Complex z = t % 2 ? std::polar(1.0, std::numbers::pi - 0.1) : random_phase(rng);
        const Complex lhs = monic_phi(f, z, n).value();
        const Complex rhs = det_P(f, {0, n - 1}, Boundary{Complex(-1.0, 0.0), std::nullopt}, z).script_P.value();
        CHECK(rel(lhs, rhs) <= 1e-9);
    }
}

TEST_CASE("transfer matrix vs determinants") {
    // free case: T = diag(z^n, 1)
    const auto free = constant_field(0.0, 0, 9);
    const Complex z0 = std::polar(1.0, 1.3);
    const auto Tf = transfer_from_determinants(free, z0, {0, 9});
    CHECK(std::abs(Tf(0, 0) - std::pow(z0, 10.0)) <= 1e-12);
    CHECK(std::abs(Tf(0, 1)) <= 1e-12);
    CHECK(std::abs(Tf(1, 0)) <= 1e-12);
    CHECK(std::abs(Tf(1, 1) - 1.0) <= 1e-12);

    std::mt19937_64 rng(6);
    const std::vector<double> thetas{0.3, 1.7, std::numbers::pi - 0.1, -std::numbers::pi + 0.1, -1.2};
    for (int t = 0; t < 200; ++t) {
        const long a = static_cast<long>(rng() % 11) - 5;
        const long b = a + static_cast<long>(rng() % 40);
        const auto f = random_field(rng, a, b);
        const Complex z = std::polar(1.0, thetas[static_cast<std::size_t>(t) % thetas.size()]);
        CHECK(transfer_vs_determinant(f, z, {a, b}) <= 1e-9);
    }
    // single step reduces to S_z(α_a)
    const auto f = random_field(rng, 3, 3);
    const auto T1 = transfer_from_determinants(f, z0, {3, 3});
    CHECK((T1 - one_step(z0, f.alpha(3)).entries).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK_THROWS_AS(transfer_from_determinants(f, 0.5, {3, 3}), ParameterError);
}
