#pragma once

#include <cstdint>
#include <vector>

#include "cmvlab/determinants.hpp"
#include "cmvlab/spectra.hpp"
#include "cmvlab/stats.hpp"

namespace cmvlab {

/// Both |G^{β,γ}_{[x−n,x+n],z}(x, x±n)| ≤ e^{−cn}.
struct RegularityVerdict {
    long x = 0;
    long n = 0;
    double rate = 0.0;
    Complex z;
    double left_green_logmag = 0.0;   // log |G(x, x−n)|
    double right_green_logmag = 0.0;  // log |G(x, x+n)|
    bool regular = false;
};

/// Throws SingularSystemError when z is an eigenvalue of the block [x−n, x+n].
RegularityVerdict is_regular(const VerblunskyField& field, long x, long n, Complex z, double rate,
                             Complex beta_boundary, Complex gamma_boundary);

/// Same, but an eigenvalue hit rotates z by e^{i·1e−9} (up to 8 times); `perturbed` counts the rotations.
RegularityVerdict is_regular_perturbing(const VerblunskyField& field, long x, long n, Complex z, double rate,
                                        Complex beta_boundary, Complex gamma_boundary, int& perturbed);

struct TwoPointResult {
    long n = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<double> thetas;
    /// per grid point: fraction of samples with x and x+2n+1 both (γ(z)−2ε, n)-singular
    std::vector<Proportion> per_theta;
    Proportion pooled;   // over all (sample, z)
    Proportion worst;    // grid point with the largest fraction
    Proportion any_z;    // samples with at least one both-singular grid point
    /// over every singular (sample, z, site): dist(z, σ(E_{[site−n, site+n]})) ≤ e^{−δ(2n+1)}
    Proportion singular_close;
    long perturbed = 0;
    std::uint64_t master_seed = 0;
};

/// Fields cover [x−n−1, x+3n+2] (same layout as the resonance experiment), phases (−1, 1).
/// Needs 0 < ε < min(gamma_refs)/2.
TwoPointResult two_point_experiment(const Distribution& dist, long x, long n, const std::vector<double>& thetas,
                                    double epsilon, const std::vector<double>& gamma_refs, double delta, long samples,
                                    std::uint64_t seed, int threads = 1);

struct LocalizationProfile {
    long k = 0;
    long center = 0;  // site of the left-most maximum of |Ψ_k|
    double decay_rate = 0.0;
    double fit_r2 = 0.0;
    double theta = 0.0;
    long fit_points = 0;
};

struct ProfileOptions {
    long plateau = 5;  // sites with |x − center| < plateau are left out of the fit
    long edge = 5;     // outermost sites on each end left out
    /// entries below floor·max|Ψ| are below the solver's resolution and left out
    double noise_floor = 1e-10;
    double rate_cap = -50.0;
};

/// Index of the left-most maximum of |v|.
long argmax_leftmost(const Eigen::VectorXcd& v);

/// Profile of a single vector; `offset` is the site of v(0).
LocalizationProfile profile_vector(const Eigen::VectorXcd& v, long offset, const ProfileOptions& opt = {});

/// Profiles for the eigenvalues in the arc, in eigen-index order.
std::vector<LocalizationProfile> localize_eigenfunctions(const UnitaryEigenSystem& sys, const Arc& arc,
                                                         const ProfileOptions& opt = {});

/// Σ_{z_k ∈ arc} |Ψ_k(p)| |Ψ_k(q)|.
double edl_kernel(const UnitaryEigenSystem& sys, const Arc& arc, long p, long q);

/// Σ_{z_k ∈ arc, c_k = y} |Ψ_k(x)|².
double center_conditioned_sum(const UnitaryEigenSystem& sys, const Arc& arc, long y, long x);

struct DecayFit {
    double rate = 0.0;  // −slope of log(mean) against offset
    double rate_lo = 0.0;
    double rate_hi = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
    long points = 0;
};

/// Fit over the offsets whose mean is positive; rate interval uses Student's t.
DecayFit fit_decay(const std::vector<long>& offsets, const std::vector<MeanStats>& means);

struct EdlResult {
    long size = 0;
    long p = 0;
    std::vector<long> offsets;
    std::vector<MeanStats> kernel;       // edl_kernel(p, p + offset)
    std::vector<MeanStats> conditioned;  // center_conditioned_sum(y = p, x = p + offset)
    DecayFit kernel_fit;
    DecayFit conditioned_fit;
    std::uint64_t master_seed = 0;
};

/// Blocks on [0, size−1] with phases (−1, 1).
EdlResult edl_experiment(const Distribution& dist, long size, const Arc& arc, long p, const std::vector<long>& offsets,
                         long samples, std::uint64_t seed, int threads = 1);

/// Eigensystem of the fully modified block on [0, size−1] for one sample.
UnitaryEigenSystem sample_eigensystem(const Distribution& dist, long size, const SeedPlan& seed);

}  // namespace cmvlab
