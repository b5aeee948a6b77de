#include "mscbf/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mscbf {

CovarianceSpec CovarianceSpec::power_law(BasisPtr basis, double scale, double exponent) {
    if (scale < 0.0) throw std::invalid_argument("covariance: scale must be >= 0");
    CovarianceSpec cov;
    cov.basis = std::move(basis);
    cov.q.resize(cov.basis->mode_count());
    double trace = 0.0;
    for (std::size_t i = 0; i < cov.q.size(); ++i) {
        cov.q[i] = scale * std::pow(cov.basis->mode(i).lambda, -exponent);
        trace += cov.q[i];
    }
    cov.trace = trace;
    cov.decay_tag = "power:scale=" + std::to_string(scale) + ",exponent=" + std::to_string(exponent);
    return cov;
}

double CovarianceSpec::q_pair(int rep_index) const {
    const int i = basis->representatives()[static_cast<std::size_t>(rep_index)];
    return q[static_cast<std::size_t>(i)];
}

double CovarianceSpec::max_q() const {
    return q.empty() ? 0.0 : *std::max_element(q.begin(), q.end());
}

bool CovarianceSpec::consistent() const {
    double sum = 0.0;
    for (double v : q) {
        if (v < 0.0 || !std::isfinite(v)) return false;
        sum += v;
    }
    const double scale = std::max(1.0, std::abs(sum));
    return std::abs(sum - trace) <= 1e-12 * scale;
}

}  // namespace mscbf
