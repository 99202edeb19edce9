#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cmvlab/model.hpp"

namespace cmvlab {

/// Boundary phases actually applied to a block: β replaces α_{a-1}, γ replaces α_b.
struct Boundary {
    std::optional<Complex> left;
    std::optional<Complex> right;

    static Boundary none() { return {}; }
    static Boundary both(BoundaryPhase beta, BoundaryPhase gamma) { return {beta.value(), gamma.value()}; }
    static Boundary left_only(BoundaryPhase beta) { return {beta.value(), std::nullopt}; }
    static Boundary right_only(BoundaryPhase gamma) { return {std::nullopt, gamma.value()}; }
};

/// The boundary a field records for itself (absent phases leave the coefficient unmodified).
Boundary field_boundary(const VerblunskyField& field, bool modify_left = true, bool modify_right = true);

/// α̃_n: the field coefficient with α_{a-1} → β and α_b → γ when the boundary says so.
Complex effective_alpha(const VerblunskyField& field, Interval interval, const Boundary& boundary, long n);

/// Θ_n = [[ᾱ, ρ], [ρ, -α]] acting on ℓ²({n, n+1}).
struct ThetaBlock {
    Eigen::Matrix2cd entries;
};

ThetaBlock build_theta(const DiskPoint& alpha);
/// Also accepts unimodular α (ρ = 0), as used at modified boundaries.
ThetaBlock build_theta_unchecked(Complex alpha);

/// Square complex matrix stored by diagonals, entries (i, j) with |i - j| ≤ bandwidth.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(long size, int bandwidth);

    long size() const { return n_; }
    int bandwidth() const { return bw_; }

    Complex operator()(long i, long j) const;
    Complex& at(long i, long j);

    BandedMatrix operator*(const BandedMatrix& rhs) const;
    BandedMatrix adjoint() const;
    Eigen::MatrixXcd dense() const;

    /// Number of diagonals (offsets) carrying at least one nonzero entry.
    std::vector<int> occupied_offsets() const;

private:
    long n_ = 0;
    int bw_ = 0;
    std::vector<Complex> data_;  // row-major: row i holds offsets -bw … +bw
};

/// A finite CMV window E_{[a,b]} = L_{[a,b]} M_{[a,b]}, possibly boundary-modified.
///
/// Θ_n is placed in L for even n and in M for odd n; rows and columns are the sites a … b.
struct CmvBlock {
    Interval interval;
    Boundary boundary;
    BandedMatrix E;
    BandedMatrix L;
    BandedMatrix M;
};

CmvBlock build_block(const VerblunskyField& field, bool modify_left, bool modify_right);
CmvBlock build_block(const VerblunskyField& field, Interval interval, const Boundary& boundary);

/// A^{β,γ}_{[a,b],z} = z·(L^{β,γ})* − M^{β,γ}, tridiagonal and complex symmetric.
struct TridiagonalA {
    Interval interval;
    Boundary boundary;
    Complex z;
    std::vector<Complex> diag;  // A_{j,j}
    std::vector<Complex> off;   // A_{j,j+1} = A_{j+1,j}

    Eigen::MatrixXcd dense() const;
};

TridiagonalA build_A(const VerblunskyField& field, Complex z);
TridiagonalA build_A(const VerblunskyField& field, Interval interval, const Boundary& boundary, Complex z);

/// ‖X* X − I‖_max.
double unitarity_residual(const Eigen::MatrixXcd& X);
double unitarity_residual(const BandedMatrix& X);

/// Writes `row,col,re,im` for every nonzero entry, indexed by site.
void dump_csv(std::ostream& os, const BandedMatrix& X, Interval sites);

}  // namespace cmvlab
