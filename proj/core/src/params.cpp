#include "mscbf/params.hpp"

#include <cmath>
#include <stdexcept>

#include "mscbf/coupling.hpp"

namespace mscbf {

ValidationReport validate_assumptions(const ModelParams& params, const CouplingSpec& spec,
                                      double lambda1) {
    ValidationReport rep;
    rep.lambda1 = lambda1;

    if (!(params.mu > 0.0)) rep.failures.push_back("mu must be > 0");
    if (!(params.beta >= 0.0)) rep.failures.push_back("beta must be >= 0");
    if (!(params.r >= 1.0)) rep.failures.push_back("r must be >= 1");
    if (!(params.epsilon > 0.0 && params.epsilon <= 1.0))
        rep.failures.push_back("epsilon must lie in (0, 1]");
    if (!(params.delta > 0.0)) rep.failures.push_back("delta must be > 0");
    if (!(params.zeta_growth > 0.0 && params.zeta_growth < 1.0))
        rep.failures.push_back("zeta_growth must lie in (0, 1)");
    if (params.l_g < 0.0 || params.l_sigma2 < 0.0 || params.c_lip < 0.0)
        rep.failures.push_back("Lipschitz constants must be >= 0");
    if (!spec.validated) rep.failures.push_back("coupling spec not validated");

    const double mu_l1 = params.mu * lambda1;
    const double ls2_sq = params.l_sigma2 * params.l_sigma2;
    rep.gamma = mu_l1 - 2.0 * params.l_g;
    rep.kappa = mu_l1 - 2.0 * params.l_g - ls2_sq;
    rep.zeta_mix = 2.0 * mu_l1 - 2.0 * params.l_g - ls2_sq;
    rep.xi = mu_l1 - 2.0 * params.l_g - 2.0 * ls2_sq;
    rep.gamma_positive = rep.gamma > 0.0;
    rep.kappa_positive = rep.kappa > 0.0;
    rep.zeta_mix_positive = rep.zeta_mix > 0.0;
    rep.xi_positive = rep.xi > 0.0;
    if (!rep.xi_positive) {
        rep.failures.push_back("(A3) gap mu*lambda1 - 2*L_g - 2*L_sigma2^2 is not positive");
    }
    return rep;
}

double monotonicity_constant(const ModelParams& params) {
    if (!(params.r > 3.0)) {
        throw std::invalid_argument(
            "monotonicity_constant: defined for r > 3 (r = 3 with 2*beta*mu >= 1 is globally "
            "monotone with eta = 0)");
    }
    if (!(params.mu > 0.0) || !(params.beta > 0.0)) {
        throw std::invalid_argument("monotonicity_constant: requires mu > 0 and beta > 0");
    }
    const double r = params.r;
    const double lead = (r - 3.0) / (2.0 * params.mu * (r - 1.0));
    const double base = 2.0 / (params.beta * params.mu * (r - 1.0));
    return lead * std::pow(base, 2.0 / (r - 3.0));
}

}  // namespace mscbf
