#include "cmvlab/determinants.hpp"

#include <cmath>
#include <sstream>

#include "cmvlab/errors.hpp"

namespace cmvlab {

namespace {

double rho_unchecked(Complex alpha) {
    const double m = std::abs(alpha);
    return m >= 1.0 ? 0.0 : std::sqrt((1.0 - m) * (1.0 + m));
}

double log_rho_product(const VerblunskyField& field, long lo, long hi) {
    double s = 0.0;
    for (long k = lo; k <= hi; ++k) s += std::log(field.rho(k));
    return s;
}

std::string describe(Complex z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

void require_unit(Complex z, const char* what) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12) throw ParameterError(std::string(what) + " needs |z| = 1");
}

Boundary field_phases(const VerblunskyField& field) {
    return {field.beta() ? field.beta()->value() : default_beta().value(),
            field.gamma() ? field.gamma()->value() : default_gamma().value()};
}

}  // namespace

std::string to_string(Decoration d) {
    switch (d) {
        case Decoration::None: return "none";
        case Decoration::Left: return "left";
        case Decoration::Right: return "right";
        case Decoration::Both: return "both";
    }
    return "none";
}

Decoration parse_decoration(const std::string& s) {
    if (s == "none") return Decoration::None;
    if (s == "left") return Decoration::Left;
    if (s == "right") return Decoration::Right;
    if (s == "both") return Decoration::Both;
    throw ParameterError("unknown decoration '" + s + "' (none|left|right|both)");
}

Boundary decorate(Decoration d, Complex beta, Complex gamma) {
    Boundary b;
    if (d == Decoration::Left || d == Decoration::Both) b.left = beta;
    if (d == Decoration::Right || d == Decoration::Both) b.right = gamma;
    return b;
}

DeterminantResult det_P(const VerblunskyField& field, Interval interval, const Boundary& boundary, Complex z) {
    DeterminantResult out;
    out.decoration = boundary.left ? (boundary.right ? Decoration::Both : Decoration::Left)
                                   : (boundary.right ? Decoration::Right : Decoration::None);
    if (interval.empty()) {
        out.script_P = out.normalized_P = ScaledComplex::one();
        return out;
    }
    if (!field.window().covers({interval.lo - 1, interval.hi})) {
        throw ParameterError("field window too small for determinant");
    }
    const long a = interval.lo;
    const long b = interval.hi;
    auto alpha = [&](long k) { return effective_alpha(field, interval, boundary, k); };

    // Rows of the modified tridiagonal matrix: diag d_k, sub s_k = Â_{k,k-1}, sup u_k = Â_{k,k+1}.
    auto row = [&](long j, Complex& d, Complex& s, Complex& u) {
        if (j == a && !is_even(a)) {
            const Complex c = -alpha(a - 1);
            d = z - c * std::conj(alpha(a));
            u = -c * rho_unchecked(alpha(a));
            s = 0.0;
        } else if (j == b && is_even(b)) {
            const Complex c = std::conj(alpha(b));
            d = z + c * alpha(b - 1);
            s = -c * rho_unchecked(alpha(b - 1));
            u = 0.0;
        } else if (is_even(j)) {
            d = z * alpha(j) + alpha(j - 1);
            s = -rho_unchecked(alpha(j - 1));
            u = z * rho_unchecked(alpha(j));
        } else {
            d = -z * std::conj(alpha(j - 1)) - std::conj(alpha(j));
            s = z * rho_unchecked(alpha(j - 1));
            u = -rho_unchecked(alpha(j));
        }
    };

    // (D_k, D_{k-1})ᵀ = Π_k (1, 0)ᵀ with Π_k = M_k ⋯ M_1, M_k = [[d_k, −s_k u_{k-1}], [1, 0]], kept as e^{shift}·pi.
    Eigen::Matrix2cd pi = Eigen::Matrix2cd::Identity();
    double shift = 0.0;
    Complex prev_sup(0.0, 0.0);
    std::vector<Eigen::Matrix2cd> steps;
    std::vector<double> log_pi;
    steps.reserve(static_cast<std::size_t>(interval.size()));
    log_pi.reserve(static_cast<std::size_t>(interval.size()));
    for (long j = a; j <= b; ++j) {
        Complex d, s, u;
        row(j, d, s, u);
        Eigen::Matrix2cd step;
        step << d, -s * prev_sup, 1.0, 0.0;
        steps.push_back(step);
        pi = step * pi;
        prev_sup = u;
        const double m = pi.cwiseAbs().maxCoeff();
        if (!std::isfinite(m)) throw NumericalFailure("determinant recurrence overflowed");
        pi /= m;
        shift += std::log(m);
        log_pi.push_back(shift + std::log(pi.norm()));
    }
    const Complex p1 = pi(0, 0);

    // First-order rounding bound of the recurrence: max_k ‖M_n⋯M_{k+1}‖·‖Π_k‖. A plain ‖Π_n‖ is too
    // small when the partial products grow and then contract, as they do near localized eigenvalues.
    double scale_log = log_pi.back();
    {
        Eigen::Matrix2cd tail = Eigen::Matrix2cd::Identity();
        double tail_shift = 0.0;
        for (long k = static_cast<long>(steps.size()) - 1; k >= 1; --k) {
            tail = tail * steps[static_cast<std::size_t>(k)];
            const double m = tail.cwiseAbs().maxCoeff();
            tail /= m;
            tail_shift += std::log(m);
            scale_log = std::max(scale_log, tail_shift + std::log(tail.norm()) + log_pi[static_cast<std::size_t>(k - 1)]);
        }
    }

    long full_blocks = 0;
    for (long k = a; k <= b - 1; ++k) {
        if (is_even(k)) ++full_blocks;
    }
    const double sign = full_blocks % 2 == 0 ? 1.0 : -1.0;

    const ScaledComplex raw = ScaledComplex::from(p1 * sign);
    out.script_P = raw.is_zero() ? raw : ScaledComplex(raw.log_mag() + shift, raw.phase());
    out.scale_log = scale_log;
    const double lr = log_rho_product(field, a - 1, b);
    out.normalized_P = out.script_P.is_zero() ? out.script_P
                                              : ScaledComplex(out.script_P.log_mag() - lr, out.script_P.phase());
    return out;
}

DeterminantResult det_P(const VerblunskyField& field, Complex z, Decoration decoration) {
    const Boundary phases = field_phases(field);
    return det_P(field, field.interval(), decorate(decoration, *phases.left, *phases.right), z);
}

bool near_spectrum(const DeterminantResult& r) {
    return r.script_P.is_zero() || r.script_P.log_mag() < r.scale_log - 20.0;
}

GreenEntry green_entry(const VerblunskyField& field, Complex z, long x, long y, Complex beta, Complex gamma) {
    require_unit(z, "green_entry");
    const Interval I = field.interval();
    if (x > y) std::swap(x, y);
    if (x < I.lo || y > I.hi) throw ParameterError("green_entry indices outside the interval");
    const DeterminantResult full = det_P(field, I, Boundary{beta, gamma}, z);
    if (near_spectrum(full)) {
        throw SingularSystemError("z = " + describe(z) + " is an eigenvalue of the boundary-modified block");
    }
    const DeterminantResult left = det_P(field, {I.lo, x - 1}, Boundary{beta, std::nullopt}, z);
    const DeterminantResult right = det_P(field, {y + 1, I.hi}, Boundary{std::nullopt, gamma}, z);
    GreenEntry g;
    g.x = x;
    g.y = y;
    g.interval = I;
    g.z = z;
    if (left.script_P.is_zero() || right.script_P.is_zero()) {
        g.value = ScaledComplex::zero();
        return g;
    }
    const double lm = left.script_P.log_mag() + right.script_P.log_mag() - full.script_P.log_mag() +
                      log_rho_product(field, x, y - 1);
    g.value = ScaledComplex(lm, Complex(1.0, 0.0));
    return g;
}

ScaledComplex green_entry_normalized(const VerblunskyField& field, Complex z, long x, long y, Complex beta,
                                     Complex gamma) {
    const Interval I = field.interval();
    if (x > y) std::swap(x, y);
    const DeterminantResult full = det_P(field, I, Boundary{beta, gamma}, z);
    if (near_spectrum(full)) {
        throw SingularSystemError("z = " + describe(z) + " is an eigenvalue of the boundary-modified block");
    }
    const DeterminantResult left = det_P(field, {I.lo, x - 1}, Boundary{beta, std::nullopt}, z);
    const DeterminantResult right = det_P(field, {y + 1, I.hi}, Boundary{std::nullopt, gamma}, z);
    if (left.normalized_P.is_zero() || right.normalized_P.is_zero()) return ScaledComplex::zero();
    return {left.normalized_P.log_mag() + right.normalized_P.log_mag() - full.normalized_P.log_mag(),
            Complex(1.0, 0.0)};
}

// ---------------------------------------------------------------------------
// Direct solve

namespace {

// LU with partial pivoting of a tridiagonal matrix (LAPACK gttrf layout).
struct TridiagLU {
    std::vector<Complex> dl, d, du, du2;
    std::vector<long> ipiv;
};

TridiagLU factor(const TridiagonalA& A) {
    const long n = static_cast<long>(A.diag.size());
    TridiagLU f{A.off, A.diag, A.off, std::vector<Complex>(static_cast<std::size_t>(std::max(0L, n - 2))),
                std::vector<long>(static_cast<std::size_t>(n))};
    double scale = 0.0;
    for (const Complex& v : A.diag) scale = std::max(scale, std::abs(v));
    for (const Complex& v : A.off) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-14 * std::max(scale, 1e-300);
    for (long i = 0; i < n; ++i) f.ipiv[static_cast<std::size_t>(i)] = i;
    for (long i = 0; i + 1 < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (std::abs(f.d[k]) >= std::abs(f.dl[k])) {
            if (std::abs(f.d[k]) <= tiny) {
                throw SingularSystemError("A is numerically singular at z = " + describe(A.z));
            }
            const Complex m = f.dl[k] / f.d[k];
            f.dl[k] = m;
            f.d[k + 1] -= m * f.du[k];
            if (i + 2 < n) f.du2[k] = 0.0;
        } else {
            const Complex m = f.d[k] / f.dl[k];
            f.d[k] = f.dl[k];
            f.dl[k] = m;
            const Complex tmp = f.du[k];
            f.du[k] = f.d[k + 1];
            f.d[k + 1] = tmp - m * f.d[k + 1];
            if (i + 2 < n) {
                f.du2[k] = f.du[k + 1];
                f.du[k + 1] = -m * f.du[k + 1];
            }
            f.ipiv[k] = i + 1;
        }
    }
    if (n > 0 && std::abs(f.d[static_cast<std::size_t>(n - 1)]) <= tiny) {
        throw SingularSystemError("A is numerically singular at z = " + describe(A.z));
    }
    return f;
}

void solve_in_place(const TridiagLU& f, Eigen::VectorXcd& x) {
    const long n = static_cast<long>(f.d.size());
    for (long i = 0; i + 1 < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (f.ipiv[k] == i) {
            x(i + 1) -= f.dl[k] * x(i);
        } else {
            const Complex t = x(i);
            x(i) = x(i + 1);
            x(i + 1) = t - f.dl[k] * x(i);
        }
    }
    for (long i = n - 1; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        Complex v = x(i);
        if (i + 1 < n) v -= f.du[k] * x(i + 1);
        if (i + 2 < n) v -= f.du2[k] * x(i + 2);
        x(i) = v / f.d[k];
    }
}

}  // namespace

Eigen::MatrixXcd green_direct(const VerblunskyField& field, Complex z, Complex beta, Complex gamma) {
    return green_direct(build_A(field, field.interval(), Boundary{beta, gamma}, z));
}

Eigen::MatrixXcd green_direct(const TridiagonalA& A) {
    const auto n = static_cast<Eigen::Index>(A.diag.size());
    const TridiagLU f = factor(A);
    Eigen::MatrixXcd G(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e(c) = 1.0;
        solve_in_place(f, e);
        G.col(c) = e;
    }
    return G;
}

Eigen::VectorXcd green_direct_column(const TridiagonalA& A, long y) {
    if (!A.interval.contains(y)) throw ParameterError("green column outside the interval");
    const TridiagLU f = factor(A);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(A.diag.size()));
    e(y - A.interval.lo) = 1.0;
    solve_in_place(f, e);
    return e;
}

// ---------------------------------------------------------------------------
// Poisson formula

PoissonBrackets poisson_brackets(const VerblunskyField& field, Interval interval, Complex beta, Complex gamma,
                                 Complex z, const std::array<Complex, 4>& psi) {
    const long a = interval.lo;
    const long b = interval.hi;
    const Complex al = field.alpha(a - 1);
    const Complex ar = field.alpha(b);
    const double rl = field.rho(a - 1);
    const double rr = field.rho(b);
    // psi = {Ψ(a−1), Ψ(a), Ψ(b), Ψ(b+1)}
    PoissonBrackets out;
    if (!is_even(a)) {
        out.left = psi[1] * (z * std::conj(beta) - z * std::conj(al)) + psi[0] * z * rl;
    } else {
        out.left = psi[1] * (al - beta) - psi[0] * rl;
    }
    if (!is_even(b)) {
        out.right = psi[2] * (-std::conj(ar) + std::conj(gamma)) - psi[3] * rr;
    } else {
        out.right = psi[2] * (z * ar - z * gamma) + psi[3] * z * rr;
    }
    return out;
}

Complex poisson_reconstruct(const std::array<Complex, 4>& psi_boundary, Complex green_xa, Complex green_xb,
                            long x, const VerblunskyField& field, Interval interval, Complex beta, Complex gamma,
                            Complex z) {
    if (!(interval.lo < x && x < interval.hi)) throw ParameterError("Poisson formula needs a < x < b");
    const PoissonBrackets br = poisson_brackets(field, interval, beta, gamma, z, psi_boundary);
    return -green_xa * br.left - green_xb * br.right;
}

Complex poisson_reconstruct(const std::array<Complex, 4>& psi_boundary, long x, const VerblunskyField& field,
                            Interval interval, Complex beta, Complex gamma, Complex z) {
    if (!(interval.lo < x && x < interval.hi)) throw ParameterError("Poisson formula needs a < x < b");
    const TridiagonalA A = build_A(field, interval, Boundary{beta, gamma}, z);
    // A is complex symmetric, so row x of G is column x.
    const Eigen::VectorXcd gx = green_direct_column(A, x);
    return poisson_reconstruct(psi_boundary, gx(0), gx(interval.size() - 1), x, field, interval, beta, gamma, z);
}

}  // namespace cmvlab
