#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "cmvlab/model.hpp"

namespace testing_support {

using cmvlab::Complex;

inline Complex random_disk(std::mt19937_64& rng, double max_radius = 0.9) {
    std::uniform_real_distribution<double> r(0.0, max_radius), t(0.0, 2.0 * std::numbers::pi);
    return std::polar(r(rng), t(rng));
}

inline Complex random_phase(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> t(-std::numbers::pi, std::numbers::pi);
    return std::polar(1.0, t(rng));
}

// Field on [a,b] with coefficients on [a-2, b+2].
inline cmvlab::VerblunskyField random_field(std::mt19937_64& rng, long a, long b, double max_radius = 0.9) {
    std::vector<Complex> c;
    for (long n = a - 2; n <= b + 2; ++n) c.push_back(random_disk(rng, max_radius));
    return cmvlab::VerblunskyField({a, b}, a - 2, std::move(c));
}

inline cmvlab::VerblunskyField constant_field(Complex alpha, long a, long b) {
    return cmvlab::VerblunskyField({a, b}, a - 2, std::vector<Complex>(static_cast<std::size_t>(b - a + 5), alpha));
}

inline Complex dense_det(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0) return 1.0;
    return m.partialPivLu().determinant();
}

inline double rel(Complex got, Complex want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace testing_support
