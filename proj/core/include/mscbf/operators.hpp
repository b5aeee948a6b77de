#pragma once

#include <vector>

#include "mscbf/field.hpp"
#include "mscbf/rng.hpp"

namespace mscbf {

/// A u: mode-wise multiplication by lambda_k; <Au,u> = v_norm(u)^2.
VelocityField apply_stokes(const VelocityField& u);

/// Grid-valued vector field on the basis collocation grid (row-major M*M
/// per component), the input type of the Leray projection.
struct GridField {
    int grid = 0;
    std::vector<double> x;
    std::vector<double> y;
};

/// Helmholtz-Hodge projection onto the retained divergence-free modes.
/// Idempotent; gradients map to zero.
VelocityField leray_project(const BasisPtr& basis, const GridField& v);

/// B(u,v) = P_H((u . grad) v), dealiased pseudo-spectral product.
VelocityField apply_convection(const VelocityField& u, const VelocityField& v);

/// C(u) = P_H(|u|^{r-1} u) by collocation; requires grid >= (max(2,r)+1)*k_max.
VelocityField apply_damping(const VelocityField& u, double r);

/// Lp norm by grid quadrature, p >= 1.
double lp_norm(const VelocityField& u, double p);

enum class NormKind { H, V, Lp };
double norm(const VelocityField& u, NormKind kind, double p = 2.0);

/// Full drift operator G(u) = mu A u + B(u) + beta C(u) of the monotonicity
/// lemmas.
VelocityField drift_operator(const VelocityField& u, double mu, double beta, double r);

/// Gaussian sample with spectrum ~ lambda^{-spectral_exponent}, Hermitian-
/// symmetrized; the default exponent 1 keeps every tested norm finite
/// (V-regular).  Deterministic in (seed, id, event).
VelocityField sample_random_field(const BasisPtr& basis, std::uint64_t seed,
                                  std::uint32_t id, std::uint64_t event,
                                  double scale = 1.0, double spectral_exponent = 1.0);

}  // namespace mscbf
