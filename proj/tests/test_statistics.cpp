#include "doctest.h"

#include <cmath>
#include <vector>

#include "mscbf/rng.hpp"
#include "mscbf/statistics.hpp"

using namespace mscbf;

TEST_CASE("summary statistics") {
    std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    auto s = summarize(v);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.n == 4);
    // sample sd = sqrt(5/3), stderr = sd/2
    CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(summarize(std::vector<double>{}).n == 0);
}

TEST_CASE("bootstrap CI brackets the mean and is deterministic") {
    std::vector<double> v;
    ScalarRng rng{4242, 0, RngChannel::Bootstrap};
    for (int i = 0; i < 400; ++i) v.push_back(rng.gaussians(i, 7).first + 3.0);
    auto ci1 = bootstrap_ci_mean(v, 11, 0);
    auto ci2 = bootstrap_ci_mean(v, 11, 0);
    CHECK(ci1.lo == ci2.lo);
    CHECK(ci1.hi == ci2.hi);
    const auto s = summarize(v);
    CHECK(ci1.lo < s.mean);
    CHECK(ci1.hi > s.mean);
    CHECK(ci1.hi - ci1.lo < 8.0 * s.stderr_mean);
    CHECK(ci1.hi - ci1.lo > 2.0 * s.stderr_mean);
}

TEST_CASE("log-log fit recovers exact power laws") {
    std::vector<double> xs = {0.025, 0.05, 0.1, 0.2};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, 0.5));
    auto f = fit_loglog(xs, ys);
    REQUIRE(f.ok);
    CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("exponential decay fit recovers the rate") {
    std::vector<double> ts, ys;
    for (int i = 0; i <= 50; ++i) {
        const double t = 0.02 * i;
        ts.push_back(t);
        ys.push_back(0.7 * std::exp(-1.76 * t));
    }
    auto f = fit_exponential_decay(ts, ys);
    REQUIRE(f.ok);
    CHECK(f.slope == doctest::Approx(1.76).epsilon(1e-10));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("degenerate fits are flagged") {
    std::vector<double> one = {1.0};
    CHECK_FALSE(fit_line(one, one).ok);
}
