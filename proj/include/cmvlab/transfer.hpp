#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmvlab/model.hpp"

namespace cmvlab {

/// S_z(α) = (1/ρ)[[z, −ᾱ], [−αz, 1]].
struct OneStep {
    Eigen::Matrix2cd entries;
    Complex z;
    Complex alpha;
};

OneStep one_step(Complex z, Complex alpha);

/// Principal branch, √1 = 1, cut along the negative axis.
Complex principal_sqrt(Complex z);

/// Largest singular value of a 2×2 matrix.
double spectral_norm(const Eigen::Matrix2cd& m);

/// Product S(α_k)⋯S(α_first) held as (unit max-norm matrix, log scale).
struct TransferState {
    Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Identity();
    double log_scale = 0.0;
    long step_count = 0;

    Eigen::Matrix2cd materialize() const;
    /// log ‖T‖ (spectral norm).
    double log_norm() const;
};

/// Left-multiplies by S_z(α) and renormalizes.
TransferState propagate(const TransferState& state, Complex alpha, Complex z);

/// T_{[a,b]} = S_z(α_b)⋯S_z(α_a).
TransferState transfer_matrix(const VerblunskyField& field, Interval interval, Complex z);
TransferState transfer_matrix(const std::vector<Complex>& alphas, Complex z);

/// (φ_k, φ_k*) as scaled numbers.
struct SzegoPair {
    ScaledComplex phi;
    ScaledComplex phi_star;
};

/// k = 0 … n from the normalized recurrence with α_0 … α_{n-1} of the field.
std::vector<SzegoPair> szego_polys(const VerblunskyField& field, Complex z, long n);

/// Monic Φ_n = φ_n · ρ_0⋯ρ_{n-1}.
ScaledComplex monic_phi(const VerblunskyField& field, Complex z, long n);

/// Q*(z) = z^degree · conj(Q(z)) on the unit circle.
Complex reflect(Complex q, Complex z, long degree);

/// Assembles T_{[a,b]} from determinants:
///   [[z P_in, Q], [z Q*, P_in*]],  P_in = 𝒫_{[a+1,b]}/(ρ_a⋯ρ_b),  Q = 𝒫^{−1,·}_{[a,b]}/(ρ_a⋯ρ_b) − z P_in,
/// with both reflections taken at degree b − a. Needs |z| = 1 and a window of plain numbers (no overflow).
Eigen::Matrix2cd transfer_from_determinants(const VerblunskyField& field, Complex z, Interval interval);

/// Max entrywise error between the propagated and assembled T_{[a,b]}, relative to ‖T‖_max.
double transfer_vs_determinant(const VerblunskyField& field, Complex z, Interval interval);

}  // namespace cmvlab
