#include "mscbf/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace mscbf {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
}

void sample_increment_into(NoiseStream& stream, const CovarianceSpec& cov, double dt,
                           VelocityField& out) {
    if (dt < 0.0) throw std::invalid_argument("sample_increment: dt must be >= 0");
    const StokesBasis& basis = *cov.basis;
    const std::uint64_t event = stream.counter++;
    if (dt == 0.0) {
        out.set_zero();
        return;
    }
    const auto& reps = basis.representatives();
    const auto& modes = basis.modes();
    const std::uint32_t chan_bits = static_cast<std::uint32_t>(stream.channel) << 24;
    auto coeffs = out.coeffs();
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const int i = reps[j];
        const auto [gc, gs] = gaussian_pair(
            stream.master_seed, static_cast<std::uint32_t>(event),
            static_cast<std::uint32_t>(event >> 32), stream.realization_id,
            static_cast<std::uint32_t>(j) | chan_bits);
        const double amp = std::sqrt(dt * cov.q[static_cast<std::size_t>(i)]) * kInvSqrt2;
        const std::complex<double> c(amp * gc, -amp * gs);
        coeffs[static_cast<std::size_t>(i)] = c;
        coeffs[static_cast<std::size_t>(modes[static_cast<std::size_t>(i)].conj)] = std::conj(c);
    }
}

VelocityField sample_increment(NoiseStream& stream, const CovarianceSpec& cov, double dt) {
    VelocityField out(cov.basis);
    sample_increment_into(stream, cov, dt, out);
    return out;
}

void apply_diffusion_into(const DiagonalMultiplier& multiplier, const VelocityField& dw,
                          VelocityField& out) {
    if (multiplier.basis.get() != dw.basis().get()) {
        throw std::invalid_argument("apply_diffusion: basis mismatch");
    }
    const StokesBasis& basis = *dw.basis();
    const auto& reps = basis.representatives();
    const auto& modes = basis.modes();
    auto coeffs = out.coeffs();
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const int i = reps[j];
        const std::complex<double> c = dw[static_cast<std::size_t>(i)];
        // per-coordinate product: cos coordinate = sqrt(2) Re, sin = -sqrt(2) Im
        const std::complex<double> scaled(multiplier.cos_m[j] * c.real(),
                                          multiplier.sin_m[j] * c.imag());
        coeffs[static_cast<std::size_t>(i)] = scaled;
        coeffs[static_cast<std::size_t>(modes[static_cast<std::size_t>(i)].conj)] =
            std::conj(scaled);
    }
}

VelocityField apply_diffusion(const DiagonalMultiplier& multiplier, const VelocityField& dw) {
    VelocityField out(dw.basis());
    apply_diffusion_into(multiplier, dw, out);
    return out;
}

double hs_norm_sq(const DiagonalMultiplier& multiplier, const CovarianceSpec& cov) {
    if (multiplier.basis.get() != cov.basis.get()) {
        throw std::invalid_argument("hs_norm_sq: basis mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < multiplier.cos_m.size(); ++j) {
        const double qj = cov.q_pair(static_cast<int>(j));
        acc += qj * (multiplier.cos_m[j] * multiplier.cos_m[j] +
                     multiplier.sin_m[j] * multiplier.sin_m[j]);
    }
    return acc;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b) {
    const Philox4x32::Block blk = Philox4x32::encrypt(
        master_seed, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32));
    return uniform_bits(blk.v[0], blk.v[1]) ^ (uniform_bits(blk.v[2], blk.v[3]) << 1);
}

}  // namespace mscbf
