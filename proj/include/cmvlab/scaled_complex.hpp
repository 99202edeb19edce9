#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace cmvlab {

using Complex = std::complex<double>;

/// A complex number held as (natural log of modulus, unit phase).
///
/// Determinants and cocycle norms grow like e^{γn}; this keeps them representable
/// for windows far beyond the ~700-site overflow limit of plain doubles.
/// Exact zero is log_mag = -inf with phase 1.
class ScaledComplex {
public:
    ScaledComplex() = default;
    ScaledComplex(double log_mag, Complex phase) : log_mag_(log_mag), phase_(phase) {}

    static ScaledComplex from(Complex c) {
        const double m = std::abs(c);
        if (m == 0.0) return zero();
        return {std::log(m), c / m};
    }
    static ScaledComplex zero() { return {-std::numeric_limits<double>::infinity(), Complex(1.0, 0.0)}; }
    static ScaledComplex one() { return {0.0, Complex(1.0, 0.0)}; }

    double log_mag() const { return log_mag_; }
    Complex phase() const { return phase_; }
    bool is_zero() const { return std::isinf(log_mag_) && log_mag_ < 0; }

    /// exp(log_mag)·phase; overflows to inf for log_mag beyond ~709.
    Complex value() const { return is_zero() ? Complex(0.0, 0.0) : std::exp(log_mag_) * phase_; }

    /// The value times e^{-shift}, for comparing numbers that share a common scale.
    Complex value_scaled(double shift) const {
        return is_zero() ? Complex(0.0, 0.0) : std::exp(log_mag_ - shift) * phase_;
    }

    ScaledComplex conj() const { return {log_mag_, std::conj(phase_)}; }

    friend ScaledComplex operator*(const ScaledComplex& x, const ScaledComplex& y) {
        if (x.is_zero() || y.is_zero()) return zero();
        return {x.log_mag_ + y.log_mag_, normalize(x.phase_ * y.phase_)};
    }
    friend ScaledComplex operator/(const ScaledComplex& x, const ScaledComplex& y) {
        if (x.is_zero()) return zero();
        return {x.log_mag_ - y.log_mag_, normalize(x.phase_ / y.phase_)};
    }
    friend ScaledComplex operator*(const ScaledComplex& x, Complex c) { return x * from(c); }

    friend ScaledComplex operator+(const ScaledComplex& x, const ScaledComplex& y) {
        if (x.is_zero()) return y;
        if (y.is_zero()) return x;
        const double s = std::max(x.log_mag_, y.log_mag_);
        const ScaledComplex r = from(x.value_scaled(s) + y.value_scaled(s));
        if (r.is_zero()) return r;
        return {r.log_mag_ + s, r.phase_};
    }
    friend ScaledComplex operator-(const ScaledComplex& x, const ScaledComplex& y) {
        return x + ScaledComplex(y.log_mag_, -y.phase_);
    }

private:
    static Complex normalize(Complex p) { return p / std::abs(p); }

    double log_mag_ = -std::numeric_limits<double>::infinity();
    Complex phase_{1.0, 0.0};
};

}  // namespace cmvlab
