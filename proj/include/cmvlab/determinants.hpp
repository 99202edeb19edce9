#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

#include "cmvlab/cmv_core.hpp"

namespace cmvlab {

/// Which of α_{a-1}, α_b are replaced by the boundary phases.
enum class Decoration { None, Left, Right, Both };

std::string to_string(Decoration d);
Decoration parse_decoration(const std::string& s);
Boundary decorate(Decoration d, Complex beta, Complex gamma);

struct DeterminantResult {
    ScaledComplex script_P;      // det(z − E^{dec}_{[a,b]})
    ScaledComplex normalized_P;  // script_P / (ρ_{a-1}⋯ρ_b), original ρ's
    Decoration decoration = Decoration::None;
    /// log of the recurrence's first-order rounding scale (its error is about eps·e^{scale_log});
    /// |script_P| far below e^{scale_log} means z sits on the spectrum.
    double scale_log = 0.0;
};

/// Characteristic determinant of a boundary-decorated window, by a log-rescaled three-term recurrence.
///
/// Rows of z − E carrying a full Θ-block of ℒ are replaced by the matching rows of z ℒ* − ℳ; the
/// (at most two) rows carrying a truncated 1×1 piece c of ℒ become z e_r − c ℳ_r. The result is
/// tridiagonal and differs from z − E by the block-diagonal factor of full Θ-blocks (det −1 each).
/// An empty interval gives 1.
DeterminantResult det_P(const VerblunskyField& field, Interval interval, const Boundary& boundary, Complex z);

/// Uses the field's own interval and phases (−1 and 1 where the field records none).
DeterminantResult det_P(const VerblunskyField& field, Complex z, Decoration decoration);

/// True when |script_P| < e^{-20} relative to its recurrence scale.
bool near_spectrum(const DeterminantResult& r);

struct GreenEntry {
    ScaledComplex value;  // magnitude only; phase is 1
    long x = 0;
    long y = 0;
    Interval interval;
    Complex z;
};

/// |G^{β,γ}_{[a,b],z}(x,y)| from determinants:
///   |𝒫^{β,·}_{[a,x-1]} 𝒫^{·,γ}_{[y+1,b]} / 𝒫^{β,γ}_{[a,b]}| · ρ_x⋯ρ_{y-1}.
/// Needs |z| = 1; the order of x and y is irrelevant (A is complex symmetric).
GreenEntry green_entry(const VerblunskyField& field, Complex z, long x, long y, Complex beta, Complex gamma);

/// The same magnitude written with normalized determinants, |P^{β,·}_{[a,x-1]} P^{·,γ}_{[y+1,b]} / P^{β,γ}_{[a,b]}|.
/// Equals green_entry for a < x ≤ y < b; at x = a it is smaller by the factor ρ_{a-1}, at y = b by ρ_b.
ScaledComplex green_entry_normalized(const VerblunskyField& field, Complex z, long x, long y, Complex beta,
                                     Complex gamma);

/// Full inverse of A^{β,γ}_{[a,b],z} by tridiagonal elimination with partial pivoting.
Eigen::MatrixXcd green_direct(const VerblunskyField& field, Complex z, Complex beta, Complex gamma);
Eigen::MatrixXcd green_direct(const TridiagonalA& A);
/// Solves A g = e_y only; y is a site index.
Eigen::VectorXcd green_direct_column(const TridiagonalA& A, long y);

/// The two boundary brackets of the Poisson formula, for the given Ψ(a−1), Ψ(a), Ψ(b), Ψ(b+1).
struct PoissonBrackets {
    Complex left;
    Complex right;
};

PoissonBrackets poisson_brackets(const VerblunskyField& field, Interval interval, Complex beta, Complex gamma,
                                 Complex z, const std::array<Complex, 4>& psi_boundary);

/// Ψ(x) = −G(x,a)·left − G(x,b)·right for a < x < b, using the Green entries supplied.
Complex poisson_reconstruct(const std::array<Complex, 4>& psi_boundary, Complex green_xa, Complex green_xb,
                            long x, const VerblunskyField& field, Interval interval, Complex beta, Complex gamma,
                            Complex z);

/// As above with the Green entries taken from green_direct.
Complex poisson_reconstruct(const std::array<Complex, 4>& psi_boundary, long x, const VerblunskyField& field,
                            Interval interval, Complex beta, Complex gamma, Complex z);

}  // namespace cmvlab
