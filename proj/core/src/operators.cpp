#include "mscbf/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace mscbf {

VelocityField apply_stokes(const VelocityField& u) {
    VelocityField out = u;
    const auto& modes = u.basis()->modes();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= modes[i].lambda;
    return out;
}

VelocityField leray_project(const BasisPtr& basis, const GridField& v) {
    if (v.grid != basis->grid()) {
        throw std::invalid_argument("leray_project: grid does not match the basis");
    }
    VelocityField out(basis);
    basis->analyze_project(v.x.data(), v.y.data(), out.coeffs());
    return out;
}

VelocityField apply_convection(const VelocityField& u, const VelocityField& v) {
    if (!same_basis(u, v)) throw std::invalid_argument("apply_convection: basis mismatch");
    const StokesBasis& basis = *u.basis();
    const std::size_t n2 = static_cast<std::size_t>(basis.grid()) * basis.grid();

    std::vector<double> ux(n2), uy(n2);
    basis.synthesize(u.coeffs(), ux.data(), uy.data());

    std::vector<double> dxvx(n2), dyvx(n2), dxvy(n2), dyvy(n2);
    basis.synthesize_gradient(v.coeffs(), dxvx.data(), dyvx.data(), dxvy.data(), dyvy.data());

    std::vector<double> wx(n2), wy(n2);
    for (std::size_t p = 0; p < n2; ++p) {
        wx[p] = ux[p] * dxvx[p] + uy[p] * dyvx[p];
        wy[p] = ux[p] * dxvy[p] + uy[p] * dyvy[p];
    }

    VelocityField out(u.basis());
    basis.analyze_project(wx.data(), wy.data(), out.coeffs());
    return out;
}

VelocityField apply_damping(const VelocityField& u, double r) {
    if (r < 1.0) throw std::invalid_argument("apply_damping: exponent must satisfy r >= 1");
    const StokesBasis& basis = *u.basis();
    const int q = static_cast<int>(std::ceil(std::max(2.0, r)));
    if (!basis.supports_product_order(q)) {
        throw std::invalid_argument("apply_damping: dealias violation for the given r");
    }
    if (r == 1.0) return u;  // |u|^0 u with P_H a no-op on divergence-free u

    const std::size_t n2 = static_cast<std::size_t>(basis.grid()) * basis.grid();
    std::vector<double> ux(n2), uy(n2);
    basis.synthesize(u.coeffs(), ux.data(), uy.data());

    // |u|^{r-1} = (|u|^2)^{(r-1)/2}; integer exponents skip pow entirely
    if (r == 3.0) {
        for (std::size_t p = 0; p < n2; ++p) {
            const double w = ux[p] * ux[p] + uy[p] * uy[p];
            ux[p] *= w;
            uy[p] *= w;
        }
    } else if (r == 5.0) {
        for (std::size_t p = 0; p < n2; ++p) {
            const double m2 = ux[p] * ux[p] + uy[p] * uy[p];
            const double w = m2 * m2;
            ux[p] *= w;
            uy[p] *= w;
        }
    } else {
        const double half_exp = 0.5 * (r - 1.0);
        for (std::size_t p = 0; p < n2; ++p) {
            const double m2 = ux[p] * ux[p] + uy[p] * uy[p];
            const double w = m2 > 0.0 ? std::pow(m2, half_exp) : 0.0;
            ux[p] *= w;
            uy[p] *= w;
        }
    }

    VelocityField out(u.basis());
    basis.analyze_project(ux.data(), uy.data(), out.coeffs());
    return out;
}

double lp_norm(const VelocityField& u, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const StokesBasis& basis = *u.basis();
    const std::size_t n2 = static_cast<std::size_t>(basis.grid()) * basis.grid();
    std::vector<double> ux(n2), uy(n2);
    basis.synthesize(u.coeffs(), ux.data(), uy.data());
    double acc = 0.0;
    for (std::size_t i = 0; i < n2; ++i) {
        acc += std::pow(std::sqrt(ux[i] * ux[i] + uy[i] * uy[i]), p);
    }
    return std::pow(acc * basis.cell_area(), 1.0 / p);
}

double norm(const VelocityField& u, NormKind kind, double p) {
    switch (kind) {
        case NormKind::H: return h_norm(u);
        case NormKind::V: return v_norm(u);
        case NormKind::Lp: return lp_norm(u, p);
    }
    return 0.0;
}

VelocityField drift_operator(const VelocityField& u, double mu, double beta, double r) {
    VelocityField out = apply_stokes(u);
    out *= mu;
    out += apply_convection(u, u);
    if (beta != 0.0) {
        VelocityField c = apply_damping(u, r);
        out.axpy(beta, c);
    }
    return out;
}

VelocityField sample_random_field(const BasisPtr& basis, std::uint64_t seed,
                                  std::uint32_t id, std::uint64_t event, double scale,
                                  double spectral_exponent) {
    VelocityField u(basis);
    ScalarRng rng{seed, id, RngChannel::FieldSampler};
    const auto& reps = basis->representatives();
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const auto [g1, g2] = rng.gaussians(event, static_cast<std::uint32_t>(j));
        const double lambda = basis->mode(static_cast<std::size_t>(reps[j])).lambda;
        const double amp = scale * std::pow(lambda, -spectral_exponent);
        u.set_pair_coords(static_cast<int>(j), amp * g1, amp * g2);
    }
    return u;
}

}  // namespace mscbf
