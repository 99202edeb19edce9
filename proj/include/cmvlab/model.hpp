#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmvlab/scaled_complex.hpp"

namespace cmvlab {

/// Closed integer range [lo, hi]; empty when lo > hi.
struct Interval {
    long lo = 0;
    long hi = -1;

    bool empty() const { return lo > hi; }
    long size() const { return empty() ? 0 : hi - lo + 1; }
    bool contains(long n) const { return lo <= n && n <= hi; }
    bool covers(const Interval& other) const { return other.empty() || (lo <= other.lo && other.hi <= hi); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Parity of a (possibly negative) site index.
inline bool is_even(long n) { return (n % 2 + 2) % 2 == 0; }

/// A point of the open unit disk.
class DiskPoint {
public:
    explicit DiskPoint(Complex value);
    Complex value() const { return value_; }

private:
    Complex value_;
};

/// A point of the unit circle, |value| = 1 within 1e-14.
class BoundaryPhase {
public:
    explicit BoundaryPhase(Complex value);
    Complex value() const { return value_; }

private:
    Complex value_;
};

/// ρ = sqrt(1 - |α|²); throws DomainError when |α| ≥ 1.
double rho(const DiskPoint& alpha);
double rho(Complex alpha);

/// Compactly supported law of a single Verblunsky coefficient.
class Distribution {
public:
    enum class Kind { FiniteAtoms, UniformCircle, Constant };

    static Distribution atoms(std::vector<Complex> points, std::vector<double> weights);
    static Distribution circle(double radius);
    static Distribution constant(Complex point);

    /// Parses `constant:0.5+0i`, `atoms:(0.5,0.5);(-0.5,0.5)`, `circle:0.7`.
    /// Atom entries are `(value,weight)` where value is a real or `re+imi` literal.
    static Distribution parse(const std::string& literal);

    Kind kind() const { return kind_; }
    const std::vector<Complex>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    double radius() const { return radius_; }

    /// δ with every atom in the closed disk of radius 1 - δ.
    double support_margin() const { return margin_; }

    /// Maps a uniform variate u ∈ [0, 1) to a coefficient.
    Complex draw(double u) const;

    /// The law of conj(α).
    Distribution conjugated() const;
    /// The law of -conj(α) (reflection used by the reversal symmetry of determinants).
    Distribution negated_conjugate() const;

    std::string literal() const;

private:
    Distribution() = default;
    void finalize();

    Kind kind_ = Kind::Constant;
    std::vector<Complex> points_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    double radius_ = 0.0;
    double margin_ = 1.0;
};

/// Deterministic per-sample randomness keyed by (master seed, sample index, stream, coordinate).
///
/// Every variate is a pure function of its key, so results do not depend on the order
/// in which samples or coordinates are visited, nor on the number of workers.
struct SeedPlan {
    std::uint64_t master_seed = 0;
    std::uint64_t sample_index = 0;

    /// Uniform variate in [0, 1).
    double uniform(std::uint64_t stream, long coordinate) const;
    std::uint64_t bits(std::uint64_t stream, long coordinate) const;
};

/// Verblunsky coefficients over a window that covers [a-1, b+1], with optional boundary phases.
class VerblunskyField {
public:
    /// `coefficients[i]` is α at site `window_first + i`.
    VerblunskyField(Interval interval, long window_first, std::vector<Complex> coefficients,
                    std::optional<BoundaryPhase> beta = std::nullopt,
                    std::optional<BoundaryPhase> gamma = std::nullopt);

    const Interval& interval() const { return interval_; }
    Interval window() const { return {first_, first_ + static_cast<long>(coeffs_.size()) - 1}; }
    const std::optional<BoundaryPhase>& beta() const { return beta_; }
    const std::optional<BoundaryPhase>& gamma() const { return gamma_; }

    /// Original (unmodified) coefficient at site n.
    Complex alpha(long n) const;
    double rho(long n) const;
    const std::vector<Complex>& coefficients() const { return coeffs_; }

    VerblunskyField with_interval(Interval interval) const;
    VerblunskyField with_boundaries(std::optional<BoundaryPhase> beta, std::optional<BoundaryPhase> gamma) const;

private:
    Interval interval_;
    long first_;
    std::vector<Complex> coeffs_;
    std::optional<BoundaryPhase> beta_;
    std::optional<BoundaryPhase> gamma_;
};

/// Default boundary phases β = -1, γ = 1.
inline BoundaryPhase default_beta() { return BoundaryPhase(Complex(-1.0, 0.0)); }
inline BoundaryPhase default_gamma() { return BoundaryPhase(Complex(1.0, 0.0)); }

/// Draws α at sites a-1 … b+1 i.i.d. from `dist`, keyed by site index on `stream`.
VerblunskyField sample_field(const Distribution& dist, Interval interval, std::optional<BoundaryPhase> beta,
                             std::optional<BoundaryPhase> gamma, const SeedPlan& seed, std::uint64_t stream = 0);

/// Arc {e^{iθ}: θ_lo ≤ θ ≤ θ_hi} on the unit circle; membership is tested modulo 2π.
class Arc {
public:
    Arc(double theta_lo, double theta_hi);
    static Arc full_circle();

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool contains_angle(double theta) const;
    bool contains(Complex z) const;

    /// `count` angles in [lo, hi]; Chebyshev-spaced (endpoints excluded) unless uniform.
    std::vector<double> grid(int count, bool chebyshev = true) const;

private:
    double lo_;
    double hi_;
};

}  // namespace cmvlab
