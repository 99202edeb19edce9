#include "cmvlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <regex>
#include <sstream>

#include "cmvlab/errors.hpp"

namespace cmvlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParameterError("malformed real number '" + text + "'");
    }
    if (used != t.size()) throw ParameterError("malformed real number '" + text + "'");
    return v;
}

// Accepts "0.5", "-0.5", "0.5+0i", "0.3-0.2i", "0.4i", "-i".
Complex parse_complex(const std::string& text) {
    static const std::regex re(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i)?\s*$)");
    static const std::regex pure_imag(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, pure_imag)) {
        const std::string mag = m[1].str();
        if (mag.empty() || mag == "+") return {0.0, 1.0};
        if (mag == "-") return {0.0, -1.0};
        return {0.0, parse_real(mag)};
    }
    if (std::regex_match(text, m, re) && (m[1].matched || m[2].matched)) {
        const double re_part = m[1].matched ? parse_real(m[1].str()) : 0.0;
        double im_part = 0.0;
        if (m[2].matched) {
            im_part = m[3].matched ? parse_real(m[3].str()) : 1.0;
            if (m[2].str() == "-") im_part = -im_part;
        }
        return {re_part, im_part};
    }
    throw ParameterError("malformed complex literal '" + text + "'");
}

std::string format_complex(Complex c) {
    std::ostringstream os;
    os.precision(17);
    os << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
    return os.str();
}

}  // namespace

DiskPoint::DiskPoint(Complex value) : value_(value) {
    if (!(std::abs(value) < 1.0)) {
        throw DomainError("Verblunsky coefficient outside the open unit disk: |alpha| = " +
                          std::to_string(std::abs(value)));
    }
}

BoundaryPhase::BoundaryPhase(Complex value) : value_(value) {
    if (!(std::abs(std::abs(value) - 1.0) <= 1e-14)) {
        throw DomainError("boundary phase is not unimodular: |value| = " + std::to_string(std::abs(value)));
    }
}

double rho(const DiskPoint& alpha) { return rho(alpha.value()); }

double rho(Complex alpha) {
    const double m = std::abs(alpha);
    if (!(m < 1.0)) throw DomainError("rho requires |alpha| < 1");
    // (1-m)(1+m) keeps relative accuracy when |α| is close to 1.
    return std::sqrt((1.0 - m) * (1.0 + m));
}

// ---------------------------------------------------------------------------
// Distribution

Distribution Distribution::atoms(std::vector<Complex> points, std::vector<double> weights) {
    if (points.empty()) throw ParameterError("atom distribution needs at least one atom");
    if (points.size() != weights.size()) throw ParameterError("atom and weight counts differ");
    Distribution d;
    d.kind_ = Kind::FiniteAtoms;
    d.points_ = std::move(points);
    d.weights_ = std::move(weights);
    d.finalize();
    return d;
}

Distribution Distribution::circle(double radius) {
    if (!(radius >= 0.0 && radius < 1.0)) throw DomainError("circle radius must lie in [0, 1)");
    Distribution d;
    d.kind_ = Kind::UniformCircle;
    d.radius_ = radius;
    d.finalize();
    return d;
}

Distribution Distribution::constant(Complex point) {
    Distribution d;
    d.kind_ = Kind::Constant;
    d.points_ = {point};
    d.weights_ = {1.0};
    d.finalize();
    return d;
}

void Distribution::finalize() {
    double max_mod = radius_;
    if (kind_ != Kind::UniformCircle) {
        double total = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            DiskPoint{points_[i]};
            if (!(weights_[i] >= 0.0)) throw ParameterError("atom weights must be nonnegative");
            total += weights_[i];
            max_mod = std::max(max_mod, std::abs(points_[i]));
        }
        if (std::abs(total - 1.0) > 1e-12) throw ParameterError("atom weights must sum to 1");
        cumulative_.resize(weights_.size());
        std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
        cumulative_.back() = 1.0;
    }
    margin_ = 1.0 - max_mod;
}

Complex Distribution::draw(double u) const {
    switch (kind_) {
        case Kind::Constant:
            return points_.front();
        case Kind::UniformCircle:
            return std::polar(radius_, kTwoPi * u);
        case Kind::FiniteAtoms: {
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                                   points_.size() - 1);
            return points_[idx];
        }
    }
    return {};
}

Distribution Distribution::conjugated() const {
    Distribution d = *this;
    for (auto& p : d.points_) p = std::conj(p);
    return d;
}

Distribution Distribution::negated_conjugate() const {
    Distribution d = *this;
    for (auto& p : d.points_) p = -std::conj(p);
    return d;
}

std::string Distribution::literal() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::Constant:
            os << "constant:" << format_complex(points_.front());
            break;
        case Kind::UniformCircle:
            os << "circle:" << radius_;
            break;
        case Kind::FiniteAtoms:
            os << "atoms:";
            for (std::size_t i = 0; i < points_.size(); ++i) {
                if (i) os << ';';
                os << '(' << format_complex(points_[i]) << ',' << weights_[i] << ')';
            }
            break;
    }
    return os.str();
}

Distribution Distribution::parse(const std::string& literal) {
    const auto colon = literal.find(':');
    if (colon == std::string::npos) throw ParameterError("distribution literal needs a 'kind:' prefix: " + literal);
    const std::string kind = trim(literal.substr(0, colon));
    const std::string body = trim(literal.substr(colon + 1));
    if (kind == "constant") return constant(parse_complex(body));
    if (kind == "circle") return circle(parse_real(body));
    if (kind == "atoms") {
        std::vector<Complex> pts;
        std::vector<double> ws;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ';')) {
            item = trim(item);
            if (item.size() < 2 || item.front() != '(' || item.back() != ')') {
                throw ParameterError("atom entries must look like (value,weight): '" + item + "'");
            }
            const std::string inner = item.substr(1, item.size() - 2);
            const auto comma = inner.rfind(',');
            if (comma == std::string::npos) throw ParameterError("atom entry lacks a weight: '" + item + "'");
            pts.push_back(parse_complex(inner.substr(0, comma)));
            ws.push_back(parse_real(inner.substr(comma + 1)));
        }
        return atoms(std::move(pts), std::move(ws));
    }
    throw ParameterError("unknown distribution kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// SeedPlan

std::uint64_t SeedPlan::bits(std::uint64_t stream, long coordinate) const {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ sample_index);
    h = splitmix64(h ^ (stream * 0xD1B54A32D192ED03ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(coordinate));
    return h;
}

double SeedPlan::uniform(std::uint64_t stream, long coordinate) const {
    return static_cast<double>(bits(stream, coordinate) >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// VerblunskyField

VerblunskyField::VerblunskyField(Interval interval, long window_first, std::vector<Complex> coefficients,
                                 std::optional<BoundaryPhase> beta, std::optional<BoundaryPhase> gamma)
    : interval_(interval), first_(window_first), coeffs_(std::move(coefficients)), beta_(beta), gamma_(gamma) {
    if (interval_.empty()) throw ParameterError("field interval is empty");
    const Interval needed{interval_.lo - 1, interval_.hi + 1};
    if (!window().covers(needed)) {
        throw ParameterError("coefficient window does not cover [a-1, b+1]");
    }
    for (const auto& c : coeffs_) DiskPoint{c};
}

Complex VerblunskyField::alpha(long n) const {
    if (!window().contains(n)) throw ParameterError("site " + std::to_string(n) + " outside the coefficient window");
    return coeffs_[static_cast<std::size_t>(n - first_)];
}

double VerblunskyField::rho(long n) const { return cmvlab::rho(alpha(n)); }

VerblunskyField VerblunskyField::with_interval(Interval interval) const {
    return VerblunskyField(interval, first_, coeffs_, beta_, gamma_);
}

VerblunskyField VerblunskyField::with_boundaries(std::optional<BoundaryPhase> beta,
                                                 std::optional<BoundaryPhase> gamma) const {
    return VerblunskyField(interval_, first_, coeffs_, beta, gamma);
}

VerblunskyField sample_field(const Distribution& dist, Interval interval, std::optional<BoundaryPhase> beta,
                             std::optional<BoundaryPhase> gamma, const SeedPlan& seed, std::uint64_t stream) {
    if (interval.empty()) throw ParameterError("cannot sample a field on an empty interval");
    std::vector<Complex> coeffs;
    coeffs.reserve(static_cast<std::size_t>(interval.size() + 2));
    for (long n = interval.lo - 1; n <= interval.hi + 1; ++n) coeffs.push_back(dist.draw(seed.uniform(stream, n)));
    return VerblunskyField(interval, interval.lo - 1, std::move(coeffs), beta, gamma);
}

// ---------------------------------------------------------------------------
// Arc

Arc::Arc(double theta_lo, double theta_hi) : lo_(theta_lo), hi_(theta_hi) {
    const double width = hi_ - lo_;
    if (!(width > 0.0 && width <= kTwoPi + 1e-12)) throw ParameterError("arc width must lie in (0, 2π]");
}

Arc Arc::full_circle() { return Arc(-std::numbers::pi, std::numbers::pi); }

bool Arc::contains_angle(double theta) const {
    if (hi_ - lo_ >= kTwoPi) return true;
    double t = std::fmod(theta - lo_, kTwoPi);
    if (t < 0) t += kTwoPi;
    return t <= hi_ - lo_;
}

bool Arc::contains(Complex z) const { return contains_angle(std::arg(z)); }

std::vector<double> Arc::grid(int count, bool chebyshev) const {
    if (count < 1) throw ParameterError("grid needs at least one point");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    const double mid = 0.5 * (lo_ + hi_);
    const double half = 0.5 * (hi_ - lo_);
    for (int k = 0; k < count; ++k) {
        if (chebyshev) {
            out.push_back(mid - half * std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * count)));
        } else {
            out.push_back(count == 1 ? mid : lo_ + (hi_ - lo_) * k / (count - 1));
        }
    }
    return out;
}

}  // namespace cmvlab
