#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cmvlab {

/// One randomized trial: its error against the tolerance, or `flagged` when the trial hit a guard
/// (an eigenvalue of the block, say) and asserts nothing.
struct TrialOutcome {
    double error = 0.0;
    bool flagged = false;
    /// magnitude of a deliberately wrong variant, when the check carries one
    std::optional<double> control;
};

struct VerifyReport {
    std::string check_name;
    long trials = 0;
    long pass_count = 0;
    long failures = 0;
    long flagged = 0;
    double worst_error = 0.0;
    std::uint64_t worst_seed = 0;
    double tolerance = 0.0;
    /// mean magnitude of the negative control over the trials (absent for most checks)
    std::optional<double> negative_control;

    bool passed() const { return failures == 0; }
};

/// A trial is a pure function of its own seed; `trial_seed` derives it from the master seed.
using TrialFn = std::function<TrialOutcome(std::uint64_t)>;

struct CheckDef {
    std::string name;
    double tolerance;
    TrialFn trial;
};

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& check_name, long trial);
VerifyReport run_check(const CheckDef& check, long trials, std::uint64_t master_seed, int threads = 1);

/// Formula entries of A vs z L* − M (abs 1e−13).
CheckDef tridiagonal_entries_check();
/// Poisson reconstruction of enclosing-block eigenvectors, all four parities (1e−8·‖Ψ‖).
CheckDef poisson_check();
/// Half-line matrix from its entry pattern vs E^{−1,·}_{[0,N]}, plus single-coefficient sparsity (1e−13).
CheckDef halfline_check();
/// Monic Φ_n vs 𝒫^{−1,·}_{[0,n−1]} (relative 1e−9, n ≤ 24).
CheckDef phi_equals_P_check();
/// Diagonal conjugation of the rotated matrix (1e−12) and the boundary-rotation determinant identities.
CheckDef rotation_check();
/// Transfer matrix written through decorated determinants, several forms (relative 1e−9).
CheckDef transfer_corrections_check();
/// Corrected Green magnitude vs direct inverse (relative 1e−9).
CheckDef green_correction_check();

VerifyReport verify_tridiagonal_entries(long trials, std::uint64_t seed = 0, int threads = 1);
VerifyReport verify_poisson(long trials, std::uint64_t seed = 0, int threads = 1);
VerifyReport verify_halfline(long trials, std::uint64_t seed = 0, int threads = 1);
VerifyReport verify_phi_equals_P(long trials, std::uint64_t seed = 0, int threads = 1);
VerifyReport verify_rotation_identity(long trials, std::uint64_t seed = 0, int threads = 1);
VerifyReport verify_transfer_corrections(long trials, std::uint64_t seed = 0, int threads = 1);
VerifyReport verify_green_correction(long trials, std::uint64_t seed = 0, int threads = 1);

/// All seven checks above, in that order.
std::vector<VerifyReport> verify_suite(long trials, std::uint64_t seed = 0, int threads = 1);

/// Matrix identities: E = LM against the five-diagonal entry pattern, unitarity, A entries,
/// det(z − E) = det L · det A and the recurrence, Cramer vs direct Green, the transfer identity,
/// det T = z^L, and SU(1,1) membership of the one-step matrix.
std::vector<CheckDef> algebraic_checks();
std::vector<VerifyReport> algebraic_suite(long trials, std::uint64_t seed = 0, int threads = 1);

/// Re-runs a single trial by check name and trial seed (as reported in worst_seed).
TrialOutcome rerun_trial(const std::string& check_name, std::uint64_t seed);

}  // namespace cmvlab
