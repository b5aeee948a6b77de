#include "mscbf/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace mscbf {

const char* family_name(CouplingFamily f) {
    switch (f) {
        case CouplingFamily::Linear: return "linear";
        case CouplingFamily::TanhDiagonal: return "tanh";
        case CouplingFamily::ConstantSigma: return "constant_sigma";
    }
    return "?";
}

bool CouplingSpec::validate(std::vector<std::string>* problems) {
    std::vector<std::string> local;
    auto reject = [&](const std::string& msg) { local.push_back(msg); };
    if (g_y < 0.0) reject("coupling: g_y must be >= 0 (fast damping coefficient)");
    if (!(std::isfinite(f_x) && std::isfinite(f_y) && std::isfinite(g_x) && std::isfinite(g_y)))
        reject("coupling: non-finite drift coefficient");
    if (!(std::isfinite(sigma1_base) && std::isfinite(sigma1_x) && std::isfinite(sigma2_base) &&
          std::isfinite(sigma2_x) && std::isfinite(sigma2_y)))
        reject("coupling: non-finite diffusion coefficient");
    if (family == CouplingFamily::Linear || family == CouplingFamily::ConstantSigma) {
        if (sigma1_x != 0.0 || sigma2_x != 0.0 || sigma2_y != 0.0)
            reject("coupling: constant-sigma families take sigma*_base only");
    }
    validated = local.empty();
    if (problems) problems->insert(problems->end(), local.begin(), local.end());
    return validated;
}

CouplingConstants coupling_constants(const CouplingSpec& spec) {
    CouplingConstants c;
    c.l_g = spec.g_y;
    c.c_lip = std::max({std::abs(spec.f_x), std::abs(spec.f_y), std::abs(spec.g_x)});
    if (spec.family == CouplingFamily::TanhDiagonal) {
        c.sigma1_slope = std::abs(spec.sigma1_x);
        c.sigma2_slope_x = std::abs(spec.sigma2_x);
        c.sigma2_slope_y = std::abs(spec.sigma2_y);
        c.sigma2_bound = std::abs(spec.sigma2_base) + std::abs(spec.sigma2_x) + std::abs(spec.sigma2_y);
    } else {
        c.sigma2_bound = std::abs(spec.sigma2_base);
    }
    return c;
}

CertifiedConstants certified_constants(const CouplingSpec& spec, double q1_max, double q2_max) {
    const CouplingConstants c = coupling_constants(spec);
    const double s1 = std::sqrt(std::max(q1_max, 0.0));
    const double s2 = std::sqrt(std::max(q2_max, 0.0));
    CertifiedConstants out;
    out.l_g = c.l_g;
    out.l_sigma2 = c.sigma2_slope_y * s2;
    out.c_lip = std::max({c.c_lip, c.sigma1_slope * s1, c.sigma2_slope_x * s2});
    return out;
}

namespace {

void require_validated(const CouplingSpec& spec) {
    if (!spec.validated) throw std::invalid_argument("coupling: spec not validated");
}

}  // namespace

VelocityField eval_f(const CouplingSpec& spec, const VelocityField& x, const VelocityField& y) {
    require_validated(spec);
    if (!same_basis(x, y)) throw std::invalid_argument("eval_f: basis mismatch");
    VelocityField out(x.basis());
    if (spec.family == CouplingFamily::Linear) {
        out.axpy(spec.f_x, x);
        out.axpy(spec.f_y, y);
        return out;
    }
    const int pairs = static_cast<int>(x.basis()->pair_count());
    for (int j = 0; j < pairs; ++j) {
        const double fc = spec.f_x * x.cos_coord(j) + spec.f_y * std::tanh(y.cos_coord(j));
        const double fs = spec.f_x * x.sin_coord(j) + spec.f_y * std::tanh(y.sin_coord(j));
        out.set_pair_coords(j, fc, fs);
    }
    return out;
}

VelocityField eval_g(const CouplingSpec& spec, const VelocityField& x, const VelocityField& y) {
    require_validated(spec);
    if (!same_basis(x, y)) throw std::invalid_argument("eval_g: basis mismatch");
    VelocityField out(x.basis());
    if (spec.family == CouplingFamily::Linear) {
        out.axpy(spec.g_x, x);
        out.axpy(-spec.g_y, y);
        return out;
    }
    const int pairs = static_cast<int>(x.basis()->pair_count());
    for (int j = 0; j < pairs; ++j) {
        const double gc = spec.g_x * std::tanh(x.cos_coord(j)) - spec.g_y * y.cos_coord(j);
        const double gs = spec.g_x * std::tanh(x.sin_coord(j)) - spec.g_y * y.sin_coord(j);
        out.set_pair_coords(j, gc, gs);
    }
    return out;
}

DiagonalMultiplier eval_sigma1(const CouplingSpec& spec, const VelocityField& x) {
    require_validated(spec);
    DiagonalMultiplier m;
    m.basis = x.basis();
    const std::size_t pairs = x.basis()->pair_count();
    m.cos_m.resize(pairs);
    m.sin_m.resize(pairs);
    if (spec.family == CouplingFamily::TanhDiagonal && spec.sigma1_x != 0.0) {
        for (std::size_t j = 0; j < pairs; ++j) {
            const int idx = static_cast<int>(j);
            m.cos_m[j] = spec.sigma1_base + spec.sigma1_x * std::tanh(x.cos_coord(idx));
            m.sin_m[j] = spec.sigma1_base + spec.sigma1_x * std::tanh(x.sin_coord(idx));
        }
    } else {
        for (std::size_t j = 0; j < pairs; ++j) m.cos_m[j] = m.sin_m[j] = spec.sigma1_base;
    }
    return m;
}

DiagonalMultiplier eval_sigma2(const CouplingSpec& spec, const VelocityField& x,
                               const VelocityField& y) {
    require_validated(spec);
    if (!same_basis(x, y)) throw std::invalid_argument("eval_sigma2: basis mismatch");
    DiagonalMultiplier m;
    m.basis = x.basis();
    const std::size_t pairs = x.basis()->pair_count();
    m.cos_m.resize(pairs);
    m.sin_m.resize(pairs);
    if (spec.family == CouplingFamily::TanhDiagonal) {
        for (std::size_t j = 0; j < pairs; ++j) {
            const int idx = static_cast<int>(j);
            m.cos_m[j] = spec.sigma2_base + spec.sigma2_x * std::tanh(x.cos_coord(idx)) +
                         spec.sigma2_y * std::tanh(y.cos_coord(idx));
            m.sin_m[j] = spec.sigma2_base + spec.sigma2_x * std::tanh(x.sin_coord(idx)) +
                         spec.sigma2_y * std::tanh(y.sin_coord(idx));
        }
    } else {
        for (std::size_t j = 0; j < pairs; ++j) m.cos_m[j] = m.sin_m[j] = spec.sigma2_base;
    }
    return m;
}


VelocityField eval_coupling_field(const CouplingSpec& spec, CouplingPart part,
                                  const VelocityField& x, const VelocityField& y) {
    switch (part) {
        case CouplingPart::F: return eval_f(spec, x, y);
        case CouplingPart::G: return eval_g(spec, x, y);
        default: throw std::invalid_argument("eval_coupling_field: sigmas are multipliers");
    }
}

DiagonalMultiplier eval_coupling_multiplier(const CouplingSpec& spec, CouplingPart part,
                                            const VelocityField& x, const VelocityField& y) {
    switch (part) {
        case CouplingPart::Sigma1: return eval_sigma1(spec, x);
        case CouplingPart::Sigma2: return eval_sigma2(spec, x, y);
        default: throw std::invalid_argument("eval_coupling_multiplier: f and g are fields");
    }
}

}  // namespace mscbf
