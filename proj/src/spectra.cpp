#include "cmvlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include "cmvlab/errors.hpp"
#include "cmvlab/parallel.hpp"

namespace cmvlab {

namespace {

using Apply = std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>;

Eigen::MatrixXcd banded_times(const BandedMatrix& E, const Eigen::MatrixXcd& X) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(X.rows(), X.cols());
    const long n = E.size();
    for (long i = 0; i < n; ++i) {
        for (long j = std::max(0L, i - E.bandwidth()); j <= std::min(n - 1, i + E.bandwidth()); ++j) {
            const Complex e = E(i, j);
            if (e != Complex{}) out.row(i) += e * X.row(j);
        }
    }
    return out;
}

struct Attempt {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    double shift;
};

// Returns false when I + e^{iφ}U is too close to singular.
bool cayley_solve(const Eigen::MatrixXcd& U, double phi, Attempt& out) {
    const Eigen::Index n = U.rows();
    const Eigen::MatrixXcd V = std::polar(1.0, phi) * U;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(I + V);
    if (!(lu.rcond() >= 1e-8)) return false;
    Eigen::MatrixXcd H = Complex(0.0, 1.0) * lu.solve(I - V);
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::VectorXd w(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n), H.data(),
                                           static_cast<lapack_int>(n), w.data());
    if (info != 0) throw NumericalFailure("zheevd failed with info " + std::to_string(info));
    out.vectors = std::move(H);
    out.shift = phi;
    return true;
}

double largest_gap_center(const Eigen::VectorXcd& z) {
    std::vector<double> th(static_cast<std::size_t>(z.size()));
    for (Eigen::Index k = 0; k < z.size(); ++k) th[static_cast<std::size_t>(k)] = std::arg(z(k));
    std::sort(th.begin(), th.end());
    double best = th.front() + 2.0 * std::numbers::pi - th.back();
    double center = th.back() + 0.5 * best;
    for (std::size_t k = 1; k < th.size(); ++k) {
        if (th[k] - th[k - 1] > best) {
            best = th[k] - th[k - 1];
            center = 0.5 * (th[k] + th[k - 1]);
        }
    }
    return center;
}

UnitaryEigenSystem finish(const Attempt& at, const Apply& apply, Interval sites) {
    UnitaryEigenSystem sys;
    sys.sites = sites;
    sys.shift = at.shift;
    sys.vectors = at.vectors;
    const Eigen::Index n = sys.vectors.cols();
    auto gram = [&] {
        return n == 0 ? 0.0
                      : (sys.vectors.adjoint() * sys.vectors - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    };
    sys.gram_residual = gram();
    if (sys.gram_residual > 1e-10) {
        const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(sys.vectors);
        Eigen::MatrixXcd Q = qr.householderQ();
        // keep each column's direction: undo the sign/phase of R's diagonal
        const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index k = 0; k < n; ++k) {
            const Complex d = R(k, k);
            if (std::abs(d) > 0.0) Q.col(k) *= d / std::abs(d);
        }
        sys.vectors = std::move(Q);
        sys.gram_residual = gram();
    }
    const Eigen::MatrixXcd UV = apply(sys.vectors);
    sys.values.resize(n);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex rq = sys.vectors.col(k).dot(UV.col(k));  // v* U v
        const Complex zk = std::abs(rq) > 0.0 ? rq / std::abs(rq) : Complex(1.0, 0.0);
        sys.values(k) = zk;
        worst = std::max(worst, (UV.col(k) - zk * sys.vectors.col(k)).norm());
    }
    sys.residual = worst;
    return sys;
}

UnitaryEigenSystem solve(const Eigen::MatrixXcd& U, const Apply& apply, Interval sites) {
    if (U.rows() != U.cols()) throw ParameterError("eig_unitary needs a square matrix");
    if (U.rows() == 0) return UnitaryEigenSystem{sites, {}, {}, 0.0, 0.0, 0.0};
    const double norm_U = U.colwise().norm().maxCoeff();  // ‖U‖ = 1 up to rounding for unitary input
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    Attempt at;
    bool ok = false;
    // start off zero: real coefficients give real orthogonal blocks, which often carry −1 exactly
    for (int k = 1; k <= 64 && !ok; ++k) ok = cayley_solve(U, k * golden, at);
    if (!ok) throw NumericalFailure("no spectral shift separated -1 from the spectrum");
    UnitaryEigenSystem sys = finish(at, apply, sites);
    if (sys.residual > 1e-9 * norm_U && U.rows() > 1) {
        // move −1 to the middle of the widest spectral gap and solve again
        Attempt again;
        if (cayley_solve(U, std::numbers::pi - largest_gap_center(sys.values), again)) {
            UnitaryEigenSystem retry = finish(again, apply, sites);
            if (retry.residual < sys.residual) sys = std::move(retry);
        }
    }
    const double n_unit = (sys.values.cwiseAbs().array() - 1.0).abs().maxCoeff();
    if (sys.residual > 1e-8 * norm_U || sys.gram_residual > 1e-8 || n_unit > 1e-9) {
        std::ostringstream msg;
        msg << "eigensolver residual " << sys.residual << ", gram " << sys.gram_residual << ", size " << U.rows()
            << ", shift " << sys.shift;
        throw NumericalFailure(msg.str());
    }
    return sys;
}

}  // namespace

UnitaryEigenSystem eig_unitary(const CmvBlock& block) {
    if (!block.boundary.left || !block.boundary.right) {
        throw ParameterError("eig_unitary needs a block with both boundaries modified");
    }
    const BandedMatrix& E = block.E;
    return solve(E.dense(), [&E](const Eigen::MatrixXcd& X) { return banded_times(E, X); }, block.interval);
}

UnitaryEigenSystem eig_unitary(const Eigen::MatrixXcd& unitary, Interval sites) {
    if (sites.size() != unitary.rows()) throw ParameterError("site interval does not match the matrix size");
    return solve(unitary, [&unitary](const Eigen::MatrixXcd& X) { return Eigen::MatrixXcd(unitary * X); }, sites);
}

double spectral_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    if (a.size() == 0 || b.size() == 0) throw ParameterError("spectral distance needs nonempty spectra");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        for (Eigen::Index j = 0; j < b.size(); ++j) best = std::min(best, std::abs(a(i) - b(j)));
    }
    return best;
}

double spectral_distance(const UnitaryEigenSystem& a, const UnitaryEigenSystem& b) {
    return spectral_distance(a.values, b.values);
}

double distance_to_spectrum(const UnitaryEigenSystem& sys, Complex z) {
    Eigen::VectorXcd one(1);
    one(0) = z;
    return spectral_distance(sys.values, one);
}

ResonancePair resonance_blocks(const VerblunskyField& field, long x, long n) {
    if (n < 0) throw ParameterError("resonance scale n must be nonnegative");
    const Boundary phases = Boundary::both(default_beta(), default_gamma());
    return {build_block(field, {x - n, x + n}, phases), build_block(field, {x + n + 1, x + 3 * n + 1}, phases)};
}

VerblunskyField resonance_field(const Distribution& dist, long x, long n, const SeedPlan& seed) {
    return sample_field(dist, {x - n, x + 3 * n + 1}, default_beta(), default_gamma(), seed);
}

ResonanceResult resonance_experiment(const Distribution& dist, long x, long n, double delta, long samples,
                                     std::uint64_t seed, int threads) {
    if (samples < 1) throw ParameterError("samples must be positive");
    if (delta < 0.0) throw ParameterError("delta must be nonnegative");
    ResonanceResult r;
    r.n = n;
    r.delta = delta;
    r.threshold = 2.0 * std::exp(-delta * static_cast<double>(2 * n + 1));
    r.master_seed = seed;
    const auto dists = parallel_map(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        const auto pair = resonance_blocks(resonance_field(dist, x, n, SeedPlan{seed, s}), x, n);
        return spectral_distance(eig_unitary(pair.left), eig_unitary(pair.right));
    });
    long hits = 0;
    std::vector<double> logs;
    logs.reserve(dists.size());
    for (double d : dists) {
        if (d < r.threshold) ++hits;
        logs.push_back(std::log(d));
    }
    std::nth_element(logs.begin(), logs.begin() + static_cast<long>(logs.size() / 2), logs.end());
    r.median_log_distance = logs[logs.size() / 2];
    r.tail = wilson(hits, samples);
    return r;
}

}  // namespace cmvlab
