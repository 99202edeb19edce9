#include "cmvlab/transfer.hpp"

#include <cmath>

#include "cmvlab/cmv_core.hpp"
#include "cmvlab/determinants.hpp"
#include "cmvlab/errors.hpp"

namespace cmvlab {

OneStep one_step(Complex z, Complex alpha) {
    const double r = rho(alpha);
    if (z == Complex{}) throw ParameterError("one_step needs z != 0");
    OneStep s{{}, z, alpha};
    s.entries << z / r, -std::conj(alpha) / r, -alpha * z / r, 1.0 / r;
    return s;
}

Complex principal_sqrt(Complex z) { return std::sqrt(z); }

double spectral_norm(const Eigen::Matrix2cd& m) {
    // σ_max² is the larger eigenvalue of m m* = [[p, r], [r̄, q]]; this form avoids the
    // cancellation in sqrt(t² − 4|det|²) when the singular values are close.
    const double p = std::norm(m(0, 0)) + std::norm(m(0, 1));
    const double q = std::norm(m(1, 0)) + std::norm(m(1, 1));
    const Complex r = m(0, 0) * std::conj(m(1, 0)) + m(0, 1) * std::conj(m(1, 1));
    return std::sqrt(0.5 * (p + q) + std::hypot(0.5 * (p - q), std::abs(r)));
}

Eigen::Matrix2cd TransferState::materialize() const { return std::exp(log_scale) * matrix; }

double TransferState::log_norm() const { return log_scale + std::log(spectral_norm(matrix)); }

TransferState propagate(const TransferState& state, Complex alpha, Complex z) {
    TransferState out = state;
    out.matrix = one_step(z, alpha).entries * state.matrix;
    const double m = out.matrix.cwiseAbs().maxCoeff();
    if (!(m > 0.0) || !std::isfinite(m)) throw NumericalFailure("transfer product degenerated");
    out.matrix /= m;
    out.log_scale += std::log(m);
    out.step_count += 1;
    return out;
}

TransferState transfer_matrix(const VerblunskyField& field, Interval interval, Complex z) {
    TransferState s;
    for (long k = interval.lo; k <= interval.hi; ++k) s = propagate(s, field.alpha(k), z);
    return s;
}

TransferState transfer_matrix(const std::vector<Complex>& alphas, Complex z) {
    TransferState s;
    for (const Complex& a : alphas) s = propagate(s, a, z);
    return s;
}

std::vector<SzegoPair> szego_polys(const VerblunskyField& field, Complex z, long n) {
    if (n < 0) throw ParameterError("szego_polys needs n >= 0");
    if (n > 0 && !field.window().covers({0, n - 1})) throw ParameterError("field lacks α_0 … α_{n-1}");
    std::vector<SzegoPair> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    Eigen::Vector2cd v(1.0, 1.0);
    double shift = 0.0;
    auto push = [&] {
        const ScaledComplex p = ScaledComplex::from(v(0));
        const ScaledComplex q = ScaledComplex::from(v(1));
        out.push_back({p.is_zero() ? p : ScaledComplex(p.log_mag() + shift, p.phase()),
                       q.is_zero() ? q : ScaledComplex(q.log_mag() + shift, q.phase())});
    };
    push();
    for (long k = 0; k < n; ++k) {
        v = one_step(z, field.alpha(k)).entries * v;
        const double m = v.cwiseAbs().maxCoeff();
        if (m > 0.0) {
            v /= m;
            shift += std::log(m);
        }
        push();
    }
    return out;
}

ScaledComplex monic_phi(const VerblunskyField& field, Complex z, long n) {
    const ScaledComplex phi = szego_polys(field, z, n).back().phi;
    if (phi.is_zero()) return phi;
    double lr = 0.0;
    for (long k = 0; k < n; ++k) lr += std::log(field.rho(k));
    return {phi.log_mag() + lr, phi.phase()};
}

Complex reflect(Complex q, Complex z, long degree) { return std::pow(z, static_cast<double>(degree)) * std::conj(q); }

Eigen::Matrix2cd transfer_from_determinants(const VerblunskyField& field, Complex z, Interval interval) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12) throw ParameterError("transfer identity needs |z| = 1");
    const long a = interval.lo;
    const long b = interval.hi;
    const long n = interval.size();
    double lr = 0.0;
    for (long k = a; k <= b; ++k) lr += std::log(field.rho(k));
    const Complex inner = det_P(field, {a + 1, b}, Boundary::none(), z).script_P.value() * std::exp(-lr);
    const Complex outer =
        det_P(field, {a, b}, Boundary{Complex(-1.0, 0.0), std::nullopt}, z).script_P.value() * std::exp(-lr);
    const Complex q = outer - z * inner;
    Eigen::Matrix2cd T;
    T << z * inner, q, z * reflect(q, z, n - 1), reflect(inner, z, n - 1);
    return T;
}

double transfer_vs_determinant(const VerblunskyField& field, Complex z, Interval interval) {
    const Eigen::Matrix2cd direct = transfer_matrix(field, interval, z).materialize();
    const Eigen::Matrix2cd assembled = transfer_from_determinants(field, z, interval);
    return (direct - assembled).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff();
}

}  // namespace cmvlab
