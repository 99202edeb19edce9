#pragma once

#include <cstdint>
#include <vector>

namespace cmvlab {

struct MeanStats {
    double mean = 0.0;
    double std_err = 0.0;
    long count = 0;
};

/// Sample mean and standard error (n − 1 denominator; 0 for a single value).
MeanStats mean_stats(const std::vector<double>& values);

/// Wilson score interval for k successes out of n (z = 1.96 by default).
struct Proportion {
    long successes = 0;
    long trials = 0;
    double p = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

Proportion wilson(long successes, long trials, double z = 1.959963984540054);

/// Least-squares line y = intercept + slope·x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_std_err = 0.0;
    long count = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log p against x. Zero counts use the continuity-corrected rate (k + ½)/(n + 1).
LinearFit log_linear_fit(const std::vector<double>& x, const std::vector<Proportion>& props);

/// 0.975 quantile of Student's t (half-width factor of a two-sided 95% interval).
double t_quantile_975(long dof);

}  // namespace cmvlab
