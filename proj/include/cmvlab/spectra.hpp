#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "cmvlab/cmv_core.hpp"
#include "cmvlab/stats.hpp"

namespace cmvlab {

/// Eigenpairs of a unitary block. Column k of `vectors` is Ψ_k, indexed by site − sites.lo.
struct UnitaryEigenSystem {
    Interval sites;
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    /// max_k ‖E v_k − z_k v_k‖
    double residual = 0.0;
    /// max |V*V − I|
    double gram_residual = 0.0;
    /// angle φ with e^{iφ}E the matrix actually handed to the Hermitian solver
    double shift = 0.0;
};

/// Diagonalizes a unitary block through the Cayley map H = i(I − V)(I + V)^{-1}, V = e^{iφ}E,
/// with φ chosen so that −1 is well separated from the spectrum of V.
UnitaryEigenSystem eig_unitary(const CmvBlock& block);
UnitaryEigenSystem eig_unitary(const Eigen::MatrixXcd& unitary, Interval sites);

/// min |z_i − z_j| over the two spectra.
double spectral_distance(const UnitaryEigenSystem& a, const UnitaryEigenSystem& b);
double spectral_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// distance from z to the nearest eigenvalue
double distance_to_spectrum(const UnitaryEigenSystem& sys, Complex z);

/// The two blocks [x−n, x+n] and [x+n+1, x+3n+1] with phases (−1, 1); they share no coefficient,
/// since α_{x+n} is overwritten on both sides.
struct ResonancePair {
    CmvBlock left;
    CmvBlock right;
};

ResonancePair resonance_blocks(const VerblunskyField& field, long x, long n);

/// Field covering [x−n−1, x+3n+2] for the given sample.
VerblunskyField resonance_field(const Distribution& dist, long x, long n, const SeedPlan& seed);

struct ResonanceResult {
    long n = 0;
    double delta = 0.0;
    double threshold = 0.0;  // 2 e^{−δ(2n+1)}
    Proportion tail;         // ℙ[dist < threshold]
    double median_log_distance = 0.0;
    std::uint64_t master_seed = 0;
};

ResonanceResult resonance_experiment(const Distribution& dist, long x, long n, double delta, long samples,
                                     std::uint64_t seed, int threads = 1);

}  // namespace cmvlab
