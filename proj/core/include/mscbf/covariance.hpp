#pragma once

#include <string>
#include <vector>

#include "mscbf/basis.hpp"

namespace mscbf {

/// Trace-class covariance of a Q-Wiener process, diagonal in the Stokes
/// basis with one eigenvalue per mode (equal on a +-k pair).
struct CovarianceSpec {
    BasisPtr basis;
    std::vector<double> q;   // per mode, q[i] >= 0
    double trace = 0.0;      // cached sum of q
    std::string decay_tag;

    /// q_k = scale * lambda_k^{-exponent}; trace class on the torus for
    /// exponent > 1.
    static CovarianceSpec power_law(BasisPtr basis, double scale, double exponent);

    double q_pair(int rep_index) const;  // eigenvalue of the pair
    double max_q() const;
    /// Recomputes the trace and verifies the cache (1e-12 relative).
    bool consistent() const;
};

}  // namespace mscbf
