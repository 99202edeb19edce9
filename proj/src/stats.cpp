#include "cmvlab/stats.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "cmvlab/errors.hpp"

namespace cmvlab {

MeanStats mean_stats(const std::vector<double>& values) {
    MeanStats s;
    s.count = static_cast<long>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_err = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
    }
    return s;
}

Proportion wilson(long successes, long trials, double z) {
    if (trials <= 0 || successes < 0 || successes > trials) throw ParameterError("wilson needs 0 <= k <= n, n > 0");
    Proportion out;
    out.successes = successes;
    out.trials = trials;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    out.p = p;
    out.lo = std::max(0.0, centre - half);
    out.hi = std::min(1.0, centre + half);
    if (successes == 0) out.lo = 0.0;
    if (successes == trials) out.hi = 1.0;
    return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("linear fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ParameterError("linear fit needs distinct x values");
    LinearFit f;
    f.count = static_cast<long>(x.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double sse = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    f.slope_std_err = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return f;
}

LinearFit log_linear_fit(const std::vector<double>& x, const std::vector<Proportion>& props) {
    std::vector<double> y;
    y.reserve(props.size());
    for (const Proportion& p : props) {
        const double rate = p.successes > 0
                                ? p.p
                                : (static_cast<double>(p.successes) + 0.5) / (static_cast<double>(p.trials) + 1.0);
        y.push_back(std::log(rate));
    }
    return linear_fit(x, y);
}

double t_quantile_975(long dof) {
    if (dof < 1) throw ParameterError("t quantile needs dof >= 1");
    return boost::math::quantile(boost::math::students_t(static_cast<double>(dof)), 0.975);
}

}  // namespace cmvlab
