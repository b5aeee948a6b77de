#include "oracles.hpp"

#include <cmath>

namespace mscbf::oracle {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::array<double, 2> eval_point(const VelocityField& u, double x1, double x2) {
    std::complex<double> vx = 0.0, vy = 0.0;
    const auto& modes = u.basis()->modes();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Mode& m = modes[i];
        const std::complex<double> phase =
            std::exp(std::complex<double>(0.0, m.kx * x1 + m.ky * x2));
        vx += u[i] * m.pol_x * phase;
        vy += u[i] * m.pol_y * phase;
    }
    return {vx.real() / kTwoPi, vy.real() / kTwoPi};
}

double quadrature_lp_pow(const VelocityField& u, double p, int n) {
    const double h = kTwoPi / n;
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const auto v = eval_point(u, a * h, b * h);
            acc += std::pow(std::sqrt(v[0] * v[0] + v[1] * v[1]), p);
        }
    }
    return acc * h * h;
}

double quadrature_inner(const VelocityField& a, const VelocityField& b, int n) {
    const double h = kTwoPi / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto va = eval_point(a, i * h, j * h);
            const auto vb = eval_point(b, i * h, j * h);
            acc += va[0] * vb[0] + va[1] * vb[1];
        }
    }
    return acc * h * h;
}

std::array<double, 4> expm2(const std::array<double, 4>& m, double t) {
    // scale so the scaled matrix has small norm, then Taylor + squaring
    const double norm = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
    int squarings = 0;
    double scale = t;
    while (std::abs(scale) * norm > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    std::array<double, 4> a = {m[0] * scale, m[1] * scale, m[2] * scale, m[3] * scale};
    std::array<double, 4> result = {1.0, 0.0, 0.0, 1.0};
    std::array<double, 4> term = {1.0, 0.0, 0.0, 1.0};
    for (int k = 1; k <= 16; ++k) {
        const std::array<double, 4> next = {
            (term[0] * a[0] + term[1] * a[2]) / k, (term[0] * a[1] + term[1] * a[3]) / k,
            (term[2] * a[0] + term[3] * a[2]) / k, (term[2] * a[1] + term[3] * a[3]) / k};
        term = next;
        for (int i = 0; i < 4; ++i) result[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) {
        const std::array<double, 4> sq = {
            result[0] * result[0] + result[1] * result[2],
            result[0] * result[1] + result[1] * result[3],
            result[2] * result[0] + result[3] * result[2],
            result[2] * result[1] + result[3] * result[3]};
        result = sq;
    }
    return result;
}

OuStationary ou_stationary(double rate, double force, double vol) {
    return {force / rate, vol * vol / (2.0 * rate)};
}

}  // namespace mscbf::oracle
