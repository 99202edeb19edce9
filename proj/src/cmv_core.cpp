#include "cmvlab/cmv_core.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cmvlab/errors.hpp"

namespace cmvlab {

Boundary field_boundary(const VerblunskyField& field, bool modify_left, bool modify_right) {
    Boundary b;
    if (modify_left && field.beta()) b.left = field.beta()->value();
    if (modify_right && field.gamma()) b.right = field.gamma()->value();
    return b;
}

Complex effective_alpha(const VerblunskyField& field, Interval interval, const Boundary& boundary, long n) {
    if (n == interval.lo - 1 && boundary.left) return *boundary.left;
    if (n == interval.hi && boundary.right) return *boundary.right;
    return field.alpha(n);
}

namespace {

// ρ for possibly unimodular α; exact zero at the circle.
double rho_unchecked(Complex alpha) {
    const double m = std::abs(alpha);
    return m >= 1.0 ? 0.0 : std::sqrt((1.0 - m) * (1.0 + m));
}

void require_window(const VerblunskyField& field, Interval interval) {
    if (interval.empty()) throw ParameterError("block interval is empty");
    if (!field.window().covers({interval.lo - 1, interval.hi})) {
        throw ParameterError("field window too small for block [" + std::to_string(interval.lo) + "," +
                             std::to_string(interval.hi) + "]");
    }
}

}  // namespace

ThetaBlock build_theta(const DiskPoint& alpha) { return build_theta_unchecked(alpha.value()); }

ThetaBlock build_theta_unchecked(Complex alpha) {
    const double r = rho_unchecked(alpha);
    ThetaBlock t;
    t.entries << std::conj(alpha), r, r, -alpha;
    return t;
}

// ---------------------------------------------------------------------------
// BandedMatrix

BandedMatrix::BandedMatrix(long size, int bandwidth)
    : n_(size), bw_(bandwidth), data_(static_cast<std::size_t>(size * (2 * bandwidth + 1))) {}

Complex BandedMatrix::operator()(long i, long j) const {
    const long d = j - i;
    if (d < -bw_ || d > bw_ || i < 0 || j < 0 || i >= n_ || j >= n_) return {};
    return data_[static_cast<std::size_t>(i * (2 * bw_ + 1) + d + bw_)];
}

Complex& BandedMatrix::at(long i, long j) {
    const long d = j - i;
    if (d < -bw_ || d > bw_ || i < 0 || j < 0 || i >= n_ || j >= n_) {
        throw ParameterError("banded entry outside the band");
    }
    return data_[static_cast<std::size_t>(i * (2 * bw_ + 1) + d + bw_)];
}

BandedMatrix BandedMatrix::operator*(const BandedMatrix& rhs) const {
    if (rhs.n_ != n_) throw ParameterError("banded product size mismatch");
    BandedMatrix out(n_, std::min<long>(bw_ + rhs.bw_, std::max<long>(n_ - 1, 0)));
    for (long i = 0; i < n_; ++i) {
        for (long k = std::max(0L, i - bw_); k <= std::min(n_ - 1, i + bw_); ++k) {
            const Complex lik = (*this)(i, k);
            if (lik == Complex{}) continue;
            for (long j = std::max(0L, k - rhs.bw_); j <= std::min(n_ - 1, k + rhs.bw_); ++j) {
                out.at(i, j) += lik * rhs(k, j);
            }
        }
    }
    return out;
}

BandedMatrix BandedMatrix::adjoint() const {
    BandedMatrix out(n_, bw_);
    for (long i = 0; i < n_; ++i) {
        for (long j = std::max(0L, i - bw_); j <= std::min(n_ - 1, i + bw_); ++j) {
            out.at(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

Eigen::MatrixXcd BandedMatrix::dense() const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_, n_);
    for (long i = 0; i < n_; ++i) {
        for (long j = std::max(0L, i - bw_); j <= std::min(n_ - 1, i + bw_); ++j) out(i, j) = (*this)(i, j);
    }
    return out;
}

std::vector<int> BandedMatrix::occupied_offsets() const {
    std::vector<int> out;
    for (int d = -bw_; d <= bw_; ++d) {
        for (long i = std::max(0L, -static_cast<long>(d)); i < n_ && i + d < n_; ++i) {
            if ((*this)(i, i + d) != Complex{}) {
                out.push_back(d);
                break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Blocks

CmvBlock build_block(const VerblunskyField& field, bool modify_left, bool modify_right) {
    return build_block(field, field.interval(), field_boundary(field, modify_left, modify_right));
}

CmvBlock build_block(const VerblunskyField& field, Interval interval, const Boundary& boundary) {
    require_window(field, interval);
    const long n = interval.size();
    CmvBlock block{interval, boundary, {}, BandedMatrix(n, 1), BandedMatrix(n, 1)};
    for (long k = interval.lo - 1; k <= interval.hi; ++k) {
        const ThetaBlock theta = build_theta_unchecked(effective_alpha(field, interval, boundary, k));
        BandedMatrix& target = is_even(k) ? block.L : block.M;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                const long row = k + r - interval.lo;
                const long col = k + c - interval.lo;
                if (row >= 0 && row < n && col >= 0 && col < n) target.at(row, col) = theta.entries(r, c);
            }
        }
    }
    block.E = block.L * block.M;
    return block;
}

TridiagonalA build_A(const VerblunskyField& field, Complex z) {
    return build_A(field, field.interval(), field_boundary(field), z);
}

TridiagonalA build_A(const VerblunskyField& field, Interval interval, const Boundary& boundary, Complex z) {
    require_window(field, interval);
    const long n = interval.size();
    TridiagonalA A{interval, boundary, z, std::vector<Complex>(static_cast<std::size_t>(n)),
                   std::vector<Complex>(static_cast<std::size_t>(std::max(0L, n - 1)))};
    auto alpha = [&](long k) { return effective_alpha(field, interval, boundary, k); };
    for (long j = interval.lo; j <= interval.hi; ++j) {
        const auto idx = static_cast<std::size_t>(j - interval.lo);
        if (is_even(j)) {
            A.diag[idx] = z * alpha(j) + alpha(j - 1);
        } else {
            A.diag[idx] = -z * std::conj(alpha(j - 1)) - std::conj(alpha(j));
        }
        if (j < interval.hi) {
            const double r = rho_unchecked(alpha(j));
            A.off[idx] = is_even(j) ? z * r : Complex(-r, 0.0);
        }
    }
    return A;
}

Eigen::MatrixXcd TridiagonalA::dense() const {
    const auto n = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) out(i, i + 1) = out(i + 1, i) = off[static_cast<std::size_t>(i)];
    }
    return out;
}

double unitarity_residual(const Eigen::MatrixXcd& X) {
    if (X.rows() != X.cols()) throw ParameterError("unitarity residual needs a square matrix");
    const Eigen::MatrixXcd R = X.adjoint() * X - Eigen::MatrixXcd::Identity(X.rows(), X.cols());
    return R.size() == 0 ? 0.0 : R.cwiseAbs().maxCoeff();
}

double unitarity_residual(const BandedMatrix& X) {
    const BandedMatrix P = X.adjoint() * X;
    double worst = 0.0;
    for (long i = 0; i < P.size(); ++i) {
        for (long j = std::max(0L, i - P.bandwidth()); j <= std::min(P.size() - 1, i + P.bandwidth()); ++j) {
            worst = std::max(worst, std::abs(P(i, j) - (i == j ? Complex(1.0, 0.0) : Complex{})));
        }
    }
    return worst;
}

void dump_csv(std::ostream& os, const BandedMatrix& X, Interval sites) {
    const auto old_prec = os.precision(17);
    os << "row,col,re,im\n";
    for (long i = 0; i < X.size(); ++i) {
        for (long j = std::max(0L, i - X.bandwidth()); j <= std::min(X.size() - 1, i + X.bandwidth()); ++j) {
            const Complex v = X(i, j);
            if (v == Complex{}) continue;
            os << sites.lo + i << ',' << sites.lo + j << ',' << v.real() << ',' << v.imag() << '\n';
        }
    }
    os.precision(old_prec);
}

}  // namespace cmvlab
