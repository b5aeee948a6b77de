#pragma once

#include <string>
#include <vector>

#include "mscbf/field.hpp"

namespace mscbf {

/// Built-in coupling families.  All act coordinate-wise on the real
/// (cos, sin) coordinates of each mode pair, which keeps every Lipschitz
/// constant explicit:
///   linear:          f = f_x*x + f_y*y,        g = g_x*x - g_y*y,
///                    sigma1, sigma2 constant multipliers.
///   tanh_diagonal:   f = f_x*x + f_y*T(y),     g = g_x*T(x) - g_y*y,
///                    sigma1_j = s1_base + s1_x*tanh(x_j),
///                    sigma2_j = s2_base + s2_x*tanh(x_j) + s2_y*tanh(y_j),
///                    where T applies tanh per real coordinate.
///   constant_sigma:  f, g as tanh_diagonal, sigma1/sigma2 constant.
enum class CouplingFamily { Linear, TanhDiagonal, ConstantSigma };

const char* family_name(CouplingFamily f);

struct CouplingSpec {
    CouplingFamily family = CouplingFamily::Linear;
    double f_x = 0.0;
    double f_y = 0.0;
    double g_x = 0.0;
    double g_y = 0.0;  // linear damping of the fast variable, >= 0, enters L_g
    double sigma1_base = 0.0;
    double sigma1_x = 0.0;
    double sigma2_base = 0.0;
    double sigma2_x = 0.0;
    double sigma2_y = 0.0;
    bool validated = false;

    // Fills `problems` and returns false on an inadmissible member.
    bool validate(std::vector<std::string>* problems = nullptr);
};

/// Multiplier-level Lipschitz constants of the family (exact for the
/// coordinate-wise definitions above).  The sigma entries still have to be
/// scaled by sqrt(max_k q_k) of the covariance they compose with.
struct CouplingConstants {
    double c_lip = 0.0;        // generic constant C of (A1)
    double l_g = 0.0;          // y-Lipschitz constant of g
    double sigma1_slope = 0.0; // x-slope of the sigma1 multiplier
    double sigma2_slope_x = 0.0;
    double sigma2_slope_y = 0.0;
    double sigma2_bound = 0.0; // sup of the sigma2 multiplier, gives (A2)
};

CouplingConstants coupling_constants(const CouplingSpec& spec);

/// Certified (A1) constants after composing the diagonal multipliers with
/// Q^{1/2}: L_sigma2 = sigma2_slope_y * sqrt(max_k q2_k), etc.
struct CertifiedConstants {
    double c_lip = 0.0;
    double l_g = 0.0;
    double l_sigma2 = 0.0;
};

CertifiedConstants certified_constants(const CouplingSpec& spec, double q1_max, double q2_max);

/// Per-real-coordinate diagonal multiplier, the representation of sigma1 and
/// sigma2.  Applying it to a Q-Wiener increment is mode-wise.
struct DiagonalMultiplier {
    BasisPtr basis;
    std::vector<double> cos_m;
    std::vector<double> sin_m;
};

VelocityField eval_f(const CouplingSpec& spec, const VelocityField& x, const VelocityField& y);
VelocityField eval_g(const CouplingSpec& spec, const VelocityField& x, const VelocityField& y);
DiagonalMultiplier eval_sigma1(const CouplingSpec& spec, const VelocityField& x);
DiagonalMultiplier eval_sigma2(const CouplingSpec& spec, const VelocityField& x,
                               const VelocityField& y);

enum class CouplingPart { F, G, Sigma1, Sigma2 };

/// Tag-dispatched surface over the four coupling members.  F and G return
/// H-valued fields; the sigmas live in eval_coupling_multiplier.
VelocityField eval_coupling_field(const CouplingSpec& spec, CouplingPart part,
                                  const VelocityField& x, const VelocityField& y);
DiagonalMultiplier eval_coupling_multiplier(const CouplingSpec& spec, CouplingPart part,
                                            const VelocityField& x, const VelocityField& y);

}  // namespace mscbf
