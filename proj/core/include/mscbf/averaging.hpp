#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mscbf/dynamics.hpp"

namespace mscbf {

/// Ergodic-average configuration for frozen-equation functionals.
/// burn_in < 0 selects the default 5/zeta_mix of the validated parameters.
struct ErgodicConfig {
    double burn_in = -1.0;
    double horizon = 2.0;
    int n_rep = 4;
    double dt = 1e-3;
};

struct FbarEstimate {
    VelocityField value;
    std::vector<double> stderr_pair;  // per mode pair, aggregated cos/sin
    double stderr_norm = 0.0;
    double burn_in_used = 0.0;
    double horizon_used = 0.0;
    bool stationarity_flag = false;  // window halves differ by > 5 stderr
    bool flagged_blowup = false;
};

/// Integrand of the averaged drift; defaults to the coupling's f.
using FbarIntegrand = std::function<VelocityField(const VelocityField& x, const VelocityField& y)>;

/// Time-average of f(x, Y_s) over the frozen equation, channel Q2bar.
/// Requires the (A3) gap xi > 0.
FbarEstimate estimate_fbar(const VelocityField& x, const ModelParams& params,
                           const CouplingSpec& spec, const CovarianceSpec& cov2,
                           const ErgodicConfig& cfg, std::uint64_t seed,
                           const FbarIntegrand& integrand = {},
                           const IntegratorConfig& icfg = {});

/// Closed-form averaged drift for the linear family with beta = 0 in the
/// fast equation: f_bar(x) = f_x x + f_y * OU-mean, OU-mean per mode
/// g_x x_k / (mu lambda_k + g_y).
VelocityField fbar_oracle_linear(const VelocityField& x, const ModelParams& params,
                                 const CouplingSpec& spec);

struct DecayRateFit {
    double rate = 0.0;
    double r2 = 0.0;
    double residual = 0.0;
    bool ok = false;  // false when the fit quality gate R^2 >= 0.9 fails
    std::vector<double> times;
    std::vector<double> mean_gap_sq;
    std::vector<std::vector<double>> replica_gap_sq;  // for bootstrap refits
};

/// Synchronous-coupling contraction rate of the frozen equation: log-linear
/// fit of E||Y^{x,y1} - Y^{x,y2}||^2 against t.  Throws when y1 == y2.
DecayRateFit estimate_decay_rate(const VelocityField& x, const VelocityField& y1,
                                 const VelocityField& y2, const ModelParams& params,
                                 const CouplingSpec& spec, const CovarianceSpec& cov2,
                                 double horizon, int n_rep, std::uint64_t seed,
                                 double dt = 1e-3, const IntegratorConfig& icfg = {});

struct MomentEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
    bool stationarity_flag = false;
    bool flagged_blowup = false;
};

/// Ergodic average of ||Y_s||_H^2 under the frozen dynamics at x.
MomentEstimate invariant_moment(const VelocityField& x, const ModelParams& params,
                                const CouplingSpec& spec, const CovarianceSpec& cov2,
                                const ErgodicConfig& cfg, std::uint64_t seed,
                                const IntegratorConfig& icfg = {});

/// Warm-started replica bursts for repeated averaged-drift estimation along
/// a slowly moving x (the HMM inner loop).  The first call burns in from
/// zero; later calls top up from the previous terminal replica states, which
/// the frozen equation's x-sensitivity bound keeps honest for nearby x.
class FbarBurstEstimator {
public:
    FbarBurstEstimator(BasisPtr basis, const ModelParams& params, const CouplingSpec& spec,
                       const CovarianceSpec& cov2, const ErgodicConfig& cfg,
                       const IntegratorConfig& icfg, std::uint64_t seed);

    FbarEstimate estimate(const VelocityField& x);

private:
    BasisPtr basis_;
    ModelParams params_;
    CouplingSpec spec_;
    CovarianceSpec cov2_;
    ErgodicConfig cfg_;
    IntegratorConfig icfg_;
    std::uint64_t seed_ = 0;
    double full_burn_ = 0.0;
    double topup_burn_ = 0.0;
    bool warm_ = false;
    // replica fast-state coordinates and their noise streams
    std::vector<std::vector<double>> yc_, ys_;
    std::vector<NoiseStream> streams_;
    std::vector<double> decay_, q_pair_, lambda_pair_;
};

/// Deterministic averaged-drift provider used by the multiscale drivers.
using FbarProvider = std::function<VelocityField(const VelocityField& x)>;

struct KhasminskiiResult {
    std::vector<double> times;        // post-step macro grid
    std::vector<double> gap_sq;       // ||Y_t - Yhat_t||_H^2
    std::vector<double> anchor_times;
    std::vector<VelocityField> anchors;  // X at block starts
    std::vector<double> block_functional_norm;  // || int_block f(X_anchor, Yhat) - fbar ||
    double gap_integral = 0.0;  // int_0^T ||Y - Yhat||^2 dt
    bool flagged = false;
};

/// Coupled system plus the block-anchored auxiliary fast process on shared
/// Q2 noise.  The block functional requires fbar; pass nullptr-like empty
/// function to skip it.
KhasminskiiResult run_khasminskii(const VelocityField& x0, const VelocityField& y0,
                                  const ModelParams& params, const CouplingSpec& spec,
                                  const CovarianceSpec& cov1, const CovarianceSpec& cov2,
                                  double t_final, double delta, const IntegratorConfig& icfg,
                                  std::uint64_t seed, std::uint32_t realization_id,
                                  const FbarProvider& fbar = {});

struct HmmConfig {
    double cache_tol_rel = 1e-2;  // recompute when ||x - x_cached|| > tol_rel * ||x||
    double stderr_frac = 1.0;     // abort when stderr > frac * max(||fbar||, floor)
    double stderr_floor = 1e-3;
    bool use_oracle = false;      // closed-form linear drift instead of estimation
};

struct FbarCallRecord {
    double t = 0.0;
    int call_index = 0;
    double stderr_norm = 0.0;
    double horizon_used = 0.0;
};

struct HmmResult {
    std::vector<double> times;  // post-step macro grid
    std::vector<VelocityField> path;
    std::vector<FbarCallRecord> call_log;  // cost profile of the drift estimation
    int fbar_calls = 0;
    double max_fbar_stderr = 0.0;
    double max_cache_drift = 0.0;  // largest ||x - x_cached|| seen before a step
    bool flagged = false;
    std::string flag_reason;
};

/// Macro-integrates the averaged equation, estimating fbar on the fly with
/// Lipschitz-justified caching.  The Q1 stream identity (seed, realization)
/// must match the paired coupled run for strong comparisons.
HmmResult run_hmm_averaged(const VelocityField& x0, const ModelParams& params,
                           const CouplingSpec& spec, const CovarianceSpec& cov1,
                           const CovarianceSpec& cov2, double t_final,
                           const IntegratorConfig& icfg, const ErgodicConfig& ecfg,
                           const HmmConfig& hcfg, std::uint64_t seed,
                           std::uint32_t realization_id);

}  // namespace mscbf
