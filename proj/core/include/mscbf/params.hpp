#pragma once

#include <string>
#include <vector>

namespace mscbf {

struct CouplingSpec;

/// Model constants.  l_g / l_sigma2 / c_lip are the certified Lipschitz
/// constants of the active coupling family (already scaled by the noise
/// covariance, see certified_constants); alpha is fixed to 0 and not a field.
struct ModelParams {
    double mu = 1.0;          // Brinkman coefficient, > 0
    double beta = 0.0;        // Forchheimer coefficient, >= 0
    double r = 3.0;           // absorption exponent, >= 1
    double epsilon = 0.1;     // time-scale ratio, in (0, 1]
    double delta = 0.05;      // Khasminskii block length, > 0
    double l_g = 0.0;
    double l_sigma2 = 0.0;
    double c_lip = 0.0;
    double zeta_growth = 0.5;  // growth exponent of (A2), metadata
};

/// Dissipativity gaps derived from (mu, lambda_1, L_g, L_sigma2).  xi is the
/// standing assumption gap; averaging drivers refuse to run when xi <= 0.
struct ValidationReport {
    double lambda1 = 1.0;
    double gamma = 0.0;     // mu*lambda1 - 2*L_g
    double kappa = 0.0;     // mu*lambda1 - 2*L_g - L_sigma2^2
    double zeta_mix = 0.0;  // 2*mu*lambda1 - 2*L_g - L_sigma2^2
    double xi = 0.0;        // mu*lambda1 - 2*L_g - 2*L_sigma2^2
    bool gamma_positive = false;
    bool kappa_positive = false;
    bool zeta_mix_positive = false;
    bool xi_positive = false;
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
};

ValidationReport validate_assumptions(const ModelParams& params, const CouplingSpec& spec,
                                      double lambda1 = 1.0);

/// eta of the r>3 monotonicity bound:
/// eta = (r-3)/(2 mu (r-1)) * (2/(beta mu (r-1)))^(2/(r-3)).  Throws for r <= 3;
/// the critical case r = 3 is globally monotone when 2*beta*mu >= 1 (eta = 0).
double monotonicity_constant(const ModelParams& params);

}  // namespace mscbf
