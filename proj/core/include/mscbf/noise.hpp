#pragma once

#include <cstdint>

#include "mscbf/coupling.hpp"
#include "mscbf/covariance.hpp"
#include "mscbf/field.hpp"
#include "mscbf/rng.hpp"

namespace mscbf {

/// Reproducible realization-indexed noise stream.  Two streams with equal
/// (master_seed, realization_id, channel, counter) produce bitwise-identical
/// increments; distinct channels are independent by key separation.
struct NoiseStream {
    std::uint64_t master_seed = 0;
    std::uint32_t realization_id = 0;
    RngChannel channel = RngChannel::Q1;
    std::uint64_t counter = 0;
};

/// Q-Wiener increment over dt: independent centred Gaussians of variance
/// dt*q_k per real mode coordinate, Hermitian-symmetrized.  Advances the
/// stream counter exactly once.
VelocityField sample_increment(NoiseStream& stream, const CovarianceSpec& cov, double dt);

/// In-place variant writing into `out` (hot path of the integrators).
void sample_increment_into(NoiseStream& stream, const CovarianceSpec& cov, double dt,
                           VelocityField& out);

/// sigma . dW, mode-wise product with the diagonal multiplier.
VelocityField apply_diffusion(const DiagonalMultiplier& multiplier, const VelocityField& dw);
void apply_diffusion_into(const DiagonalMultiplier& multiplier, const VelocityField& dw,
                          VelocityField& out);

/// Hilbert-Schmidt norm ||sigma||^2_{L_Q} = sum_j multiplier_j^2 q_j over the
/// real mode coordinates; the quantity entering the energy identities.
double hs_norm_sq(const DiagonalMultiplier& multiplier, const CovarianceSpec& cov);

/// Keyed seed derivation for nested Monte Carlo structures (replica bursts,
/// bootstrap): a fresh 64-bit seed that never collides with path streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b);

}  // namespace mscbf
