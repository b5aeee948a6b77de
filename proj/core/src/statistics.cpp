#include "mscbf/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "mscbf/rng.hpp"

namespace mscbf {

SummaryStat summarize(std::span<const double> values) {
    SummaryStat s;
    s.n = values.size();
    if (s.n == 0) return s;
    // Welford
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    s.mean = mean;
    if (s.n > 1) {
        const double var = m2 / static_cast<double>(s.n - 1);
        s.stderr_mean = std::sqrt(var / static_cast<double>(s.n));
    }
    return s;
}

Ci bootstrap_ci(std::span<const double> values,
                const std::function<double(std::span<const double>)>& stat, std::uint64_t seed,
                std::uint32_t id, int n_resamples) {
    if (values.empty()) return {};
    const std::size_t n = values.size();
    ScalarRng rng{seed, id, RngChannel::Bootstrap};
    std::vector<double> resampled(n);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t idx = rng.uniform_index(
                static_cast<std::uint64_t>(b), static_cast<std::uint32_t>(i), n);
            resampled[i] = values[idx];
        }
        stats.push_back(stat(resampled));
    }
    std::sort(stats.begin(), stats.end());
    const auto pick = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, stats.size() - 1);
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * stats[lo] + w * stats[hi];
    };
    return {pick(0.025), pick(0.975)};
}

Ci bootstrap_ci_mean(std::span<const double> values, std::uint64_t seed, std::uint32_t id,
                     int n_resamples) {
    return bootstrap_ci(
        values,
        [](std::span<const double> v) {
            double acc = 0.0;
            for (double x : v) acc += x;
            return acc / static_cast<double>(v.size());
        },
        seed, id, n_resamples);
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    LineFit f;
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) return f;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += e * e;
    }
    f.residual = std::sqrt(ss_res / static_cast<double>(n));
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    f.ok = true;
    return f;
}

LineFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> lx, ly;
    lx.reserve(xs.size());
    ly.reserve(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] > 0.0 && ys[i] > 0.0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    }
    return fit_line(lx, ly);
}

LineFit fit_exponential_decay(std::span<const double> ts, std::span<const double> ys) {
    std::vector<double> lt, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ys[i] > 0.0) {
            lt.push_back(ts[i]);
            ly.push_back(std::log(ys[i]));
        }
    }
    LineFit f = fit_line(lt, ly);
    f.slope = -f.slope;
    return f;
}

}  // namespace mscbf
