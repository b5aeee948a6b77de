#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mscbf {

struct SummaryStat {
    double mean = 0.0;
    double stderr_mean = 0.0;
    std::size_t n = 0;
};

SummaryStat summarize(std::span<const double> values);

struct Ci {
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap over realization-level values; deterministic in
/// (seed, id).  n_resamples defaults to the 10^3 used everywhere.
Ci bootstrap_ci_mean(std::span<const double> values, std::uint64_t seed, std::uint32_t id,
                     int n_resamples = 1000);

/// Bootstrap of an arbitrary statistic of the resampled multiset.
Ci bootstrap_ci(std::span<const double> values,
                const std::function<double(std::span<const double>)>& stat, std::uint64_t seed,
                std::uint32_t id, int n_resamples = 1000);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double residual = 0.0;  // rms residual
    bool ok = false;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys);
/// Least squares on (log x, log y); requires positive data.
LineFit fit_loglog(std::span<const double> xs, std::span<const double> ys);
/// Fit log(y) = a - rate * t; returns rate in `slope` (sign flipped).
LineFit fit_exponential_decay(std::span<const double> ts, std::span<const double> ys);

}  // namespace mscbf
