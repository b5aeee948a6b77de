#pragma once

#include <string>
#include <vector>

#include "mscbf/averaging.hpp"
#include "mscbf/statistics.hpp"

namespace mscbf {

/// One pass/fail line of an experiment's summary.
struct CheckLine {
    std::string name;
    bool pass = false;
    bool skip = false;
    std::string detail;
};

/// Everything an experiment run shares.  Initial data is deterministic in
/// the scales so reruns reproduce results bit for bit.
struct ExperimentSetup {
    BasisPtr basis;
    ModelParams params;
    CouplingSpec spec;
    CovarianceSpec cov1;
    CovarianceSpec cov2;
    IntegratorConfig icfg;
    ErgodicConfig ecfg;
    HmmConfig hcfg;
    double t_final = 1.0;
    int n_rep = 200;
    std::uint64_t seed = 1;
    int workers = 0;
    double x0_scale = 1.0;
    double y0_scale = 0.5;

    VelocityField initial_x() const;
    VelocityField initial_y() const;
};

// ---------------------------------------------------------------------------

struct ConvergenceRow {
    double epsilon = 0.0;
    double delta = 0.0;  // epsilon^{2/3}, reported
    int p = 1;
    int n_rep = 0;
    int n_flagged = 0;
    double estimate = 0.0;  // E sup_t ||X^eps - Xbar||^{2p}
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool usable = true;  // false when > 5% of the paths flagged
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  // epsilon descending, grouped by p
    std::vector<CheckLine> checks;
};

/// Paired coupled-vs-averaged sup-norm gaps across an epsilon ladder with
/// delta = epsilon^{2/3} and shared Q1 noise per realization.
ConvergenceTable exp_convergence(const ExperimentSetup& setup,
                                 const std::vector<double>& epsilon_ladder,
                                 const std::vector<int>& p_list);

// ---------------------------------------------------------------------------

struct ScalingRung {
    double control = 0.0;  // delta
    double statistic = 0.0;
    double stderr_stat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double ratio_sqrt = 0.0;  // statistic / sqrt(delta)
    int n_flagged = 0;
};

struct ScalingReport {
    std::vector<ScalingRung> rungs;
    double slope = 0.0;  // log-log fit of statistic against control
    double slope_r2 = 0.0;
    double slope_residual = 0.0;  // rms residual of the log-log fit
    double ratio_max_min = 0.0;
    std::vector<CheckLine> checks;
};

/// Time-increment statistic E int ||X_t - X_{t(delta)}||^2 dt over a delta
/// ladder, one set of coupled paths evaluated at every rung.
ScalingReport exp_time_holder(const ExperimentSetup& setup,
                              const std::vector<double>& delta_ladder);

/// Auxiliary-process gap E int ||Y - Yhat||^2 dt per block length, paired
/// noise across the whole ladder.
ScalingReport exp_aux_gap(const ExperimentSetup& setup, const std::vector<double>& delta_ladder);

// ---------------------------------------------------------------------------

struct MomentRow {
    double epsilon = 0.0;
    int p = 1;
    double x_sup_moment = 0.0;  // E sup_t ||X||^{2p}
    double x_ci_lo = 0.0;
    double x_ci_hi = 0.0;
    double y_sup_moment = 0.0;  // sup_t E ||Y||^{2p}
    double y_ci_lo = 0.0;
    double y_ci_hi = 0.0;
    int n_flagged = 0;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    std::vector<CheckLine> checks;
    double uniformity_factor = 3.0;
};

MomentReport exp_moment_bounds(const ExperimentSetup& setup,
                               const std::vector<double>& epsilon_ladder,
                               const std::vector<int>& p_list);

// ---------------------------------------------------------------------------

struct MonotonicityRow {
    std::string check;
    double r = 0.0;
    int n_samples = 0;
    double worst_margin = 0.0;  // >= -1e-8 passes
    double eta = 0.0;           // the shift constant where applicable
};

struct MonotonicityReport {
    std::vector<MonotonicityRow> rows;
    std::vector<CheckLine> checks;
};

/// Operator identities and monotonicity margins on random V-regular pairs.
MonotonicityReport exp_monotonicity(const BasisPtr& basis, const ModelParams& params,
                                    const std::vector<double>& r_list, int n_samples,
                                    std::uint64_t seed, int workers = 0);

// ---------------------------------------------------------------------------

struct MixingRow {
    double x_scale = 0.0;
    double x_norm_sq = 0.0;
    double rate = 0.0;
    double rate_ci_lo = 0.0;
    double rate_ci_hi = 0.0;
    double rate_r2 = 0.0;
    double zeta_mix = 0.0;
    double moment = 0.0;
    double moment_stderr = 0.0;
};

struct MixingReport {
    std::vector<MixingRow> rows;
    std::vector<CheckLine> checks;
};

/// Frozen-equation mixing diagnostics across a ladder of slow arguments:
/// synchronous-coupling decay rate against the zeta_mix bound plus the
/// invariant second moment.
MixingReport exp_mixing(const ExperimentSetup& setup, const std::vector<double>& x_scales,
                        double horizon, int n_rep);

}  // namespace mscbf
