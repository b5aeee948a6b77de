#pragma once

#include <vector>

#include "mscbf/coupling.hpp"
#include "mscbf/covariance.hpp"
#include "mscbf/field.hpp"
#include "mscbf/noise.hpp"
#include "mscbf/params.hpp"

namespace mscbf {

/// Time-stepping configuration.  The linear Stokes part is applied exactly
/// (exponential factors) or semi-implicitly; everything nonlinear is tamed
/// explicit: increment dt*N/(1 + dt*taming*||N||_H).
struct IntegratorConfig {
    double dt = 1e-3;
    double dt_fast = 1e-4;  // micro-step target; n_sub = ceil(dt/dt_fast) equal sub-steps
    enum class Scheme { ExponentialTamed, SemiImplicitLinear };
    Scheme scheme = Scheme::ExponentialTamed;
    double taming = 1.0;
    double blowup_threshold = 1e6;  // abort (never clamp) when an h_norm passes this
};

struct CoupledState {
    VelocityField x;
    VelocityField y;
    double t = 0.0;
};

enum class StepOutcome { Ok, BlowUp };

/// Terms of the discrete energy identity accumulated by the caller:
/// d||X||^2 = [-2 mu ||X||_V^2 - 2 beta ||X||_{r+1}^{r+1} + 2(f,X)
///             + ||sigma1||_{LQ1}^2] dt + 2 (sigma1 dW, X).
struct EnergyDiag {
    double v_norm_sq = 0.0;
    double lp_pow = 0.0;
    double f_inner = 0.0;
    double hs_sq = 0.0;
    double noise_inner = 0.0;
};

/// Advances the slow-fast pair by one macro step; the fast variable is
/// sub-cycled with the slow argument frozen at the step start, drift scaled
/// by 1/eps and noise by 1/sqrt(eps).  Owns precomputed decay tables and all
/// scratch, so construction is per-run and stepping allocation-free on the
/// fast path.
class CoupledStepper {
public:
    CoupledStepper(BasisPtr basis, const ModelParams& params, const CouplingSpec& spec,
                   const CovarianceSpec& cov1, const CovarianceSpec& cov2,
                   const IntegratorConfig& cfg);

    StepOutcome step(CoupledState& state, NoiseStream& s1, NoiseStream& s2,
                     EnergyDiag* diag = nullptr);

    /// Khasminskii lockstep: additionally advances the auxiliary fast process
    /// anchored at x_anchor, consuming the SAME Q2 increments as the coupled
    /// fast variable so the pathwise gap is measurable.
    StepOutcome step_with_auxiliary(CoupledState& state, VelocityField& yhat,
                                    const VelocityField& x_anchor, NoiseStream& s1,
                                    NoiseStream& s2);
    /// Same, for several auxiliaries with distinct anchors.
    StepOutcome step_with_auxiliaries(CoupledState& state,
                                      std::vector<VelocityField*> yhats,
                                      std::vector<const VelocityField*> anchors,
                                      NoiseStream& s1, NoiseStream& s2);

    int n_sub() const { return n_sub_; }
    double dt_sub() const { return dt_sub_; }

private:
    friend StepOutcome step_auxiliary(VelocityField&, const VelocityField&, const ModelParams&,
                                      const CouplingSpec&, const CovarianceSpec&, NoiseStream&,
                                      double, const IntegratorConfig&);

    StepOutcome slow_update(CoupledState& state, NoiseStream& s1, EnergyDiag* diag);
    // One fast micro-step of the coordinate arrays in `lanes` (paths sharing
    // one noise draw); returns false on blow-up.
    bool fast_substep_lanes(NoiseStream& s2);

    struct Lane {
        std::vector<double> yc, ys;    // fast-state coordinates
        std::vector<double> xc, xs;    // frozen slow argument
        std::vector<double> txc, txs;  // tanh of the frozen argument (loop-invariant)
        std::vector<double> gc, gs;    // drift scratch
        VelocityField* out = nullptr;
    };
    void load_lane(Lane& lane, const VelocityField& y, const VelocityField& x_frozen);
    bool lanes_substep(NoiseStream& s2);

    BasisPtr basis_;
    ModelParams params_;
    CouplingSpec spec_;
    CovarianceSpec cov1_, cov2_;
    IntegratorConfig cfg_;
    int n_sub_ = 1;
    double dt_sub_ = 0.0;
    std::vector<double> slow_decay_;   // per pair
    std::vector<double> fast_decay_;
    std::vector<double> q1_pair_, q2_pair_;
    std::vector<Lane> lanes_;
    VelocityField scratch_field_;
};

/// Unit-speed frozen fast equation at fixed slow argument x, driven by the
/// independent Q2bar channel.
class FrozenStepper {
public:
    FrozenStepper(BasisPtr basis, const ModelParams& params, const CouplingSpec& spec,
                  const CovarianceSpec& cov2, double dt,
                  const IntegratorConfig& cfg = {});

    StepOutcome step(VelocityField& y, const VelocityField& x, NoiseStream& s);
    /// Synchronous coupling: two copies driven by one increment.
    StepOutcome step_pair(VelocityField& y1, VelocityField& y2, const VelocityField& x,
                          NoiseStream& s);
    /// Synchronous coupling with distinct frozen arguments (x-sensitivity runs).
    StepOutcome step_pair_anchored(VelocityField& y1, const VelocityField& x1, VelocityField& y2,
                                   const VelocityField& x2, NoiseStream& s);

private:
    bool substep(std::vector<VelocityField*> ys, std::vector<const VelocityField*> xs,
                 NoiseStream& s);

    BasisPtr basis_;
    ModelParams params_;
    CouplingSpec spec_;
    CovarianceSpec cov2_;
    IntegratorConfig cfg_;
    double dt_;
    std::vector<double> decay_;
    std::vector<double> q_pair_;
};

/// Averaged slow equation; f_bar is supplied by the caller per step and the
/// Q1 stream must be the one paired with the coupled run.
class AveragedStepper {
public:
    AveragedStepper(BasisPtr basis, const ModelParams& params, const CouplingSpec& spec,
                    const CovarianceSpec& cov1, const IntegratorConfig& cfg);

    StepOutcome step(VelocityField& xbar, const VelocityField& fbar_value, NoiseStream& s1,
                     EnergyDiag* diag = nullptr);

private:
    BasisPtr basis_;
    ModelParams params_;
    CouplingSpec spec_;
    CovarianceSpec cov1_;
    IntegratorConfig cfg_;
    std::vector<double> decay_;
};

// Free-function wrappers (construct a stepper per call; fine for tests and
// one-off stepping, the drivers hold steppers).
StepOutcome step_coupled(CoupledState& state, const ModelParams&, const CouplingSpec&,
                         const CovarianceSpec& cov1, const CovarianceSpec& cov2, NoiseStream& s1,
                         NoiseStream& s2, const IntegratorConfig& cfg);
StepOutcome step_frozen(VelocityField& y, const VelocityField& x_frozen, const ModelParams&,
                        const CouplingSpec&, const CovarianceSpec& cov2, NoiseStream& s, double dt,
                        const IntegratorConfig& cfg = {});
StepOutcome step_auxiliary(VelocityField& yhat, const VelocityField& x_anchor, const ModelParams&,
                           const CouplingSpec&, const CovarianceSpec& cov2, NoiseStream& s2,
                           double dt, const IntegratorConfig& cfg = {});
StepOutcome step_averaged(VelocityField& xbar, const VelocityField& fbar_value, const ModelParams&,
                          const CouplingSpec&, const CovarianceSpec& cov1, NoiseStream& s1,
                          const IntegratorConfig& cfg);

/// Decay factor of the configured linear treatment over an interval tau.
double linear_decay_factor(IntegratorConfig::Scheme scheme, double mu_lambda, double tau);

}  // namespace mscbf
