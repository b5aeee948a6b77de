#include "mscbf/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "mscbf/operators.hpp"

namespace mscbf {

double linear_decay_factor(IntegratorConfig::Scheme scheme, double mu_lambda, double tau) {
    if (scheme == IntegratorConfig::Scheme::ExponentialTamed) return std::exp(-mu_lambda * tau);
    return 1.0 / (1.0 + mu_lambda * tau);
}

namespace {

void require_admissible(const ModelParams& params, const CouplingSpec& spec) {
    const ValidationReport rep = validate_assumptions(params, spec);
    if (!rep.pass()) {
        std::string msg = "stepper: assumptions not satisfied:";
        for (const auto& f : rep.failures) msg += " [" + f + "]";
        throw std::invalid_argument(msg);
    }
}

void require_damping_grid(const StokesBasis& basis, double beta, double r) {
    if (beta == 0.0) return;
    const int q = static_cast<int>(std::ceil(std::max(2.0, r)));
    if (!basis.supports_product_order(q)) {
        throw std::invalid_argument("stepper: dealias violation for the configured r");
    }
}

std::vector<double> pair_decay(const StokesBasis& basis, IntegratorConfig::Scheme scheme,
                               double mu, double tau) {
    std::vector<double> d(basis.pair_count());
    for (std::size_t j = 0; j < d.size(); ++j) {
        const int i = basis.representatives()[j];
        d[j] = linear_decay_factor(scheme, mu * basis.mode(static_cast<std::size_t>(i)).lambda, tau);
    }
    return d;
}

std::vector<double> pair_q(const StokesBasis& basis, const CovarianceSpec& cov) {
    std::vector<double> q(basis.pair_count());
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = cov.q_pair(static_cast<int>(j));
    return q;
}

void field_to_coords(const VelocityField& u, std::vector<double>& c, std::vector<double>& s) {
    const std::size_t pairs = u.basis()->pair_count();
    c.resize(pairs);
    s.resize(pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
        c[j] = u.cos_coord(static_cast<int>(j));
        s[j] = u.sin_coord(static_cast<int>(j));
    }
}

void coords_to_field(const std::vector<double>& c, const std::vector<double>& s,
                     VelocityField& u) {
    for (std::size_t j = 0; j < c.size(); ++j) {
        u.set_pair_coords(static_cast<int>(j), c[j], s[j]);
    }
}

double coords_norm_sq(const std::vector<double>& c, const std::vector<double>& s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] * c[j] + s[j] * s[j];
    return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// CoupledStepper

CoupledStepper::CoupledStepper(BasisPtr basis, const ModelParams& params,
                               const CouplingSpec& spec, const CovarianceSpec& cov1,
                               const CovarianceSpec& cov2, const IntegratorConfig& cfg)
    : basis_(std::move(basis)),
      params_(params),
      spec_(spec),
      cov1_(cov1),
      cov2_(cov2),
      cfg_(cfg),
      scratch_field_(basis_) {
    require_admissible(params_, spec_);
    require_damping_grid(*basis_, params_.beta, params_.r);
    if (!(cfg_.dt > 0.0) || !(cfg_.dt_fast > 0.0)) {
        throw std::invalid_argument("stepper: dt and dt_fast must be positive");
    }
    n_sub_ = static_cast<int>(std::ceil(cfg_.dt / cfg_.dt_fast - 1e-12));
    n_sub_ = std::max(n_sub_, 1);
    dt_sub_ = cfg_.dt / n_sub_;
    slow_decay_ = pair_decay(*basis_, cfg_.scheme, params_.mu, cfg_.dt);
    fast_decay_ = pair_decay(*basis_, cfg_.scheme, params_.mu, dt_sub_ / params_.epsilon);
    q1_pair_ = pair_q(*basis_, cov1_);
    q2_pair_ = pair_q(*basis_, cov2_);
    lanes_.resize(1);
}

void CoupledStepper::load_lane(Lane& lane, const VelocityField& y, const VelocityField& x_frozen) {
    field_to_coords(y, lane.yc, lane.ys);
    field_to_coords(x_frozen, lane.xc, lane.xs);
    lane.gc.resize(lane.yc.size());
    lane.gs.resize(lane.yc.size());
    if (spec_.family != CouplingFamily::Linear) {
        lane.txc.resize(lane.xc.size());
        lane.txs.resize(lane.xs.size());
        for (std::size_t j = 0; j < lane.xc.size(); ++j) {
            lane.txc[j] = std::tanh(lane.xc[j]);
            lane.txs[j] = std::tanh(lane.xs[j]);
        }
    }
}

bool CoupledStepper::lanes_substep(NoiseStream& s2) {
    const std::size_t pairs = basis_->pair_count();
    const double inv_eps = 1.0 / params_.epsilon;
    const double inv_sqrt_eps = 1.0 / std::sqrt(params_.epsilon);
    const bool tanh_family = spec_.family != CouplingFamily::Linear;
    const bool tanh_sigma = spec_.family == CouplingFamily::TanhDiagonal;

    // drift pass, per lane
    for (Lane& lane : lanes_) {
        double damp_c = 0.0, damp_s = 0.0;
        const bool with_damping = params_.beta != 0.0;
        if (with_damping) {
            coords_to_field(lane.yc, lane.ys, scratch_field_);
            scratch_field_ = apply_damping(scratch_field_, params_.r);
        }
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < pairs; ++j) {
            if (with_damping) {
                damp_c = scratch_field_.cos_coord(static_cast<int>(j));
                damp_s = scratch_field_.sin_coord(static_cast<int>(j));
            }
            const double xc = tanh_family ? lane.txc[j] : lane.xc[j];
            const double xs = tanh_family ? lane.txs[j] : lane.xs[j];
            const double gc = spec_.g_x * xc - spec_.g_y * lane.yc[j] - params_.beta * damp_c;
            const double gs = spec_.g_x * xs - spec_.g_y * lane.ys[j] - params_.beta * damp_s;
            lane.gc[j] = inv_eps * gc;
            lane.gs[j] = inv_eps * gs;
            norm_sq += lane.gc[j] * lane.gc[j] + lane.gs[j] * lane.gs[j];
        }
        const double tame = dt_sub_ / (1.0 + dt_sub_ * cfg_.taming * std::sqrt(norm_sq));
        for (std::size_t j = 0; j < pairs; ++j) {
            lane.gc[j] *= tame;
            lane.gs[j] *= tame;
        }
    }

    // noise pass: one draw per pair, shared by every lane (same layout as
    // sample_increment so separate runs replay identical increments)
    const std::uint64_t event = s2.counter++;
    const std::uint32_t chan_bits = static_cast<std::uint32_t>(s2.channel) << 24;
    const double thr_sq = cfg_.blowup_threshold * cfg_.blowup_threshold;
    for (std::size_t j = 0; j < pairs; ++j) {
        const auto [gn_c, gn_s] = gaussian_pair(
            s2.master_seed, static_cast<std::uint32_t>(event),
            static_cast<std::uint32_t>(event >> 32), s2.realization_id,
            static_cast<std::uint32_t>(j) | chan_bits);
        const double amp = std::sqrt(dt_sub_ * q2_pair_[j]) * inv_sqrt_eps;
        for (Lane& lane : lanes_) {
            double mc = spec_.sigma2_base;
            double ms = spec_.sigma2_base;
            if (tanh_sigma) {
                mc += spec_.sigma2_x * lane.txc[j] + spec_.sigma2_y * std::tanh(lane.yc[j]);
                ms += spec_.sigma2_x * lane.txs[j] + spec_.sigma2_y * std::tanh(lane.ys[j]);
            }
            lane.yc[j] = fast_decay_[j] * (lane.yc[j] + lane.gc[j] + mc * amp * gn_c);
            lane.ys[j] = fast_decay_[j] * (lane.ys[j] + lane.gs[j] + ms * amp * gn_s);
        }
    }
    for (Lane& lane : lanes_) {
        if (!(coords_norm_sq(lane.yc, lane.ys) <= thr_sq)) return false;
    }
    return true;
}

StepOutcome CoupledStepper::slow_update(CoupledState& state, NoiseStream& s1, EnergyDiag* diag) {
    VelocityField drift = apply_convection(state.x, state.x);
    drift *= -1.0;
    if (params_.beta != 0.0) {
        drift.axpy(-params_.beta, apply_damping(state.x, params_.r));
    }
    drift += eval_f(spec_, state.x, state.y);

    const double tame = cfg_.dt / (1.0 + cfg_.dt * cfg_.taming * h_norm(drift));

    VelocityField dw(basis_);
    sample_increment_into(s1, cov1_, cfg_.dt, dw);
    const DiagonalMultiplier sigma1 = eval_sigma1(spec_, state.x);
    VelocityField noise(basis_);
    apply_diffusion_into(sigma1, dw, noise);

    if (diag) {
        diag->v_norm_sq = v_norm_sq(state.x);
        diag->lp_pow = params_.beta != 0.0
                           ? std::pow(lp_norm(state.x, params_.r + 1.0), params_.r + 1.0)
                           : 0.0;
        diag->f_inner = inner_h(eval_f(spec_, state.x, state.y), state.x);
        diag->hs_sq = hs_norm_sq(sigma1, cov1_);
        diag->noise_inner = inner_h(noise, state.x);
    }

    const auto& modes = basis_->modes();
    const auto& reps = basis_->representatives();
    auto coeffs = state.x.coeffs();
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const std::size_t i = static_cast<std::size_t>(reps[j]);
        const std::size_t ic = static_cast<std::size_t>(modes[i].conj);
        const std::complex<double> v = slow_decay_[j] * (coeffs[i] + tame * drift[i] + noise[i]);
        coeffs[i] = v;
        coeffs[ic] = std::conj(v);
    }
    if (!(h_norm_sq(state.x) <= cfg_.blowup_threshold * cfg_.blowup_threshold)) {
        return StepOutcome::BlowUp;
    }
    return StepOutcome::Ok;
}

StepOutcome CoupledStepper::step(CoupledState& state, NoiseStream& s1, NoiseStream& s2,
                                 EnergyDiag* diag) {
    lanes_.resize(1);
    load_lane(lanes_[0], state.y, state.x);

    // slow update consumes (X_n, Y_n); the fast cycle sees the frozen X_n
    const StepOutcome slow = slow_update(state, s1, diag);

    bool ok = true;
    for (int i = 0; i < n_sub_ && ok; ++i) ok = lanes_substep(s2);
    coords_to_field(lanes_[0].yc, lanes_[0].ys, state.y);
    state.t += cfg_.dt;
    if (slow == StepOutcome::BlowUp || !ok) return StepOutcome::BlowUp;
    return StepOutcome::Ok;
}

StepOutcome CoupledStepper::step_with_auxiliary(CoupledState& state, VelocityField& yhat,
                                                const VelocityField& x_anchor, NoiseStream& s1,
                                                NoiseStream& s2) {
    return step_with_auxiliaries(state, {&yhat}, {&x_anchor}, s1, s2);
}

StepOutcome CoupledStepper::step_with_auxiliaries(CoupledState& state,
                                                  std::vector<VelocityField*> yhats,
                                                  std::vector<const VelocityField*> anchors,
                                                  NoiseStream& s1, NoiseStream& s2) {
    lanes_.resize(1 + yhats.size());
    load_lane(lanes_[0], state.y, state.x);
    for (std::size_t m = 0; m < yhats.size(); ++m) {
        load_lane(lanes_[1 + m], *yhats[m], *anchors[m]);
    }

    const StepOutcome slow = slow_update(state, s1, nullptr);

    bool ok = true;
    for (int i = 0; i < n_sub_ && ok; ++i) ok = lanes_substep(s2);
    coords_to_field(lanes_[0].yc, lanes_[0].ys, state.y);
    for (std::size_t m = 0; m < yhats.size(); ++m) {
        coords_to_field(lanes_[1 + m].yc, lanes_[1 + m].ys, *yhats[m]);
    }
    state.t += cfg_.dt;
    if (slow == StepOutcome::BlowUp || !ok) return StepOutcome::BlowUp;
    return StepOutcome::Ok;
}

// ---------------------------------------------------------------------------
// FrozenStepper

FrozenStepper::FrozenStepper(BasisPtr basis, const ModelParams& params, const CouplingSpec& spec,
                             const CovarianceSpec& cov2, double dt, const IntegratorConfig& cfg)
    : basis_(std::move(basis)), params_(params), spec_(spec), cov2_(cov2), cfg_(cfg), dt_(dt) {
    require_admissible(params_, spec_);
    require_damping_grid(*basis_, params_.beta, params_.r);
    if (!(dt_ > 0.0)) throw std::invalid_argument("FrozenStepper: dt must be positive");
    decay_ = pair_decay(*basis_, cfg_.scheme, params_.mu, dt_);
    q_pair_ = pair_q(*basis_, cov2_);
}

bool FrozenStepper::substep(std::vector<VelocityField*> ys,
                            std::vector<const VelocityField*> xs, NoiseStream& s) {
    const std::size_t pairs = basis_->pair_count();
    const bool tanh_sigma = spec_.family == CouplingFamily::TanhDiagonal;
    const double thr_sq = cfg_.blowup_threshold * cfg_.blowup_threshold;

    struct Work {
        VelocityField* y;
        const VelocityField* x;
        VelocityField drift;
        double tame;
    };
    std::vector<Work> work;
    work.reserve(ys.size());
    for (std::size_t m = 0; m < ys.size(); ++m) {
        VelocityField* y = ys[m];
        const VelocityField* x = xs[m];
        VelocityField g = eval_g(spec_, *x, *y);
        if (params_.beta != 0.0) g.axpy(-params_.beta, apply_damping(*y, params_.r));
        const double tame = dt_ / (1.0 + dt_ * cfg_.taming * h_norm(g));
        work.push_back({y, x, std::move(g), tame});
    }

    const std::uint64_t event = s.counter++;
    const std::uint32_t chan_bits = static_cast<std::uint32_t>(s.channel) << 24;
    const auto& reps = basis_->representatives();
    const auto& modes = basis_->modes();

    for (std::size_t j = 0; j < pairs; ++j) {
        const auto [gn_c, gn_s] = gaussian_pair(
            s.master_seed, static_cast<std::uint32_t>(event),
            static_cast<std::uint32_t>(event >> 32), s.realization_id,
            static_cast<std::uint32_t>(j) | chan_bits);
        const double amp = std::sqrt(dt_ * q_pair_[j]);
        const std::size_t i = static_cast<std::size_t>(reps[j]);
        const std::size_t ic = static_cast<std::size_t>(modes[i].conj);
        for (Work& w : work) {
            double mc = spec_.sigma2_base;
            double ms = spec_.sigma2_base;
            if (tanh_sigma) {
                mc += spec_.sigma2_x * std::tanh(w.x->cos_coord(static_cast<int>(j))) +
                      spec_.sigma2_y * std::tanh(w.y->cos_coord(static_cast<int>(j)));
                ms += spec_.sigma2_x * std::tanh(w.x->sin_coord(static_cast<int>(j))) +
                      spec_.sigma2_y * std::tanh(w.y->sin_coord(static_cast<int>(j)));
            }
            // cos/sin coordinates map to (Re, -Im)/sqrt(2) of the representative
            const std::complex<double> noise(mc * amp * gn_c * 0.70710678118654752440,
                                             -ms * amp * gn_s * 0.70710678118654752440);
            const std::complex<double> v = decay_[j] * ((*w.y)[i] + w.tame * w.drift[i] + noise);
            (*w.y)[i] = v;
            (*w.y)[ic] = std::conj(v);
        }
    }
    for (VelocityField* y : ys) {
        if (!(h_norm_sq(*y) <= thr_sq)) return false;
    }
    return true;
}

StepOutcome FrozenStepper::step(VelocityField& y, const VelocityField& x, NoiseStream& s) {
    return substep({&y}, {&x}, s) ? StepOutcome::Ok : StepOutcome::BlowUp;
}

StepOutcome FrozenStepper::step_pair(VelocityField& y1, VelocityField& y2,
                                     const VelocityField& x, NoiseStream& s) {
    return substep({&y1, &y2}, {&x, &x}, s) ? StepOutcome::Ok : StepOutcome::BlowUp;
}

StepOutcome FrozenStepper::step_pair_anchored(VelocityField& y1, const VelocityField& x1,
                                              VelocityField& y2, const VelocityField& x2,
                                              NoiseStream& s) {
    return substep({&y1, &y2}, {&x1, &x2}, s) ? StepOutcome::Ok : StepOutcome::BlowUp;
}

// ---------------------------------------------------------------------------
// AveragedStepper

AveragedStepper::AveragedStepper(BasisPtr basis, const ModelParams& params,
                                 const CouplingSpec& spec, const CovarianceSpec& cov1,
                                 const IntegratorConfig& cfg)
    : basis_(std::move(basis)), params_(params), spec_(spec), cov1_(cov1), cfg_(cfg) {
    require_admissible(params_, spec_);
    require_damping_grid(*basis_, params_.beta, params_.r);
    decay_ = pair_decay(*basis_, cfg_.scheme, params_.mu, cfg_.dt);
}

StepOutcome AveragedStepper::step(VelocityField& xbar, const VelocityField& fbar_value,
                                  NoiseStream& s1, EnergyDiag* diag) {
    VelocityField drift = apply_convection(xbar, xbar);
    drift *= -1.0;
    if (params_.beta != 0.0) drift.axpy(-params_.beta, apply_damping(xbar, params_.r));
    drift += fbar_value;

    const double tame = cfg_.dt / (1.0 + cfg_.dt * cfg_.taming * h_norm(drift));

    VelocityField dw(basis_);
    sample_increment_into(s1, cov1_, cfg_.dt, dw);
    const DiagonalMultiplier sigma1 = eval_sigma1(spec_, xbar);
    VelocityField noise(basis_);
    apply_diffusion_into(sigma1, dw, noise);

    if (diag) {
        diag->v_norm_sq = v_norm_sq(xbar);
        diag->lp_pow = params_.beta != 0.0
                           ? std::pow(lp_norm(xbar, params_.r + 1.0), params_.r + 1.0)
                           : 0.0;
        diag->f_inner = inner_h(fbar_value, xbar);
        diag->hs_sq = hs_norm_sq(sigma1, cov1_);
        diag->noise_inner = inner_h(noise, xbar);
    }

    const auto& modes = basis_->modes();
    const auto& reps = basis_->representatives();
    auto coeffs = xbar.coeffs();
    for (std::size_t j = 0; j < reps.size(); ++j) {
        const std::size_t i = static_cast<std::size_t>(reps[j]);
        const std::size_t ic = static_cast<std::size_t>(modes[i].conj);
        const std::complex<double> v = decay_[j] * (coeffs[i] + tame * drift[i] + noise[i]);
        coeffs[i] = v;
        coeffs[ic] = std::conj(v);
    }
    if (!(h_norm_sq(xbar) <= cfg_.blowup_threshold * cfg_.blowup_threshold)) {
        return StepOutcome::BlowUp;
    }
    return StepOutcome::Ok;
}

// ---------------------------------------------------------------------------
// spec-surface wrappers

StepOutcome step_coupled(CoupledState& state, const ModelParams& params, const CouplingSpec& spec,
                         const CovarianceSpec& cov1, const CovarianceSpec& cov2, NoiseStream& s1,
                         NoiseStream& s2, const IntegratorConfig& cfg) {
    CoupledStepper stepper(state.x.basis(), params, spec, cov1, cov2, cfg);
    return stepper.step(state, s1, s2);
}

StepOutcome step_frozen(VelocityField& y, const VelocityField& x_frozen, const ModelParams& params,
                        const CouplingSpec& spec, const CovarianceSpec& cov2, NoiseStream& s,
                        double dt, const IntegratorConfig& cfg) {
    FrozenStepper stepper(y.basis(), params, spec, cov2, dt, cfg);
    return stepper.step(y, x_frozen, s);
}

StepOutcome step_auxiliary(VelocityField& yhat, const VelocityField& x_anchor,
                           const ModelParams& params, const CouplingSpec& spec,
                           const CovarianceSpec& cov2, NoiseStream& s2, double dt,
                           const IntegratorConfig& cfg) {
    IntegratorConfig local = cfg;
    local.dt = dt;
    CoupledStepper stepper(yhat.basis(), params, spec,
                           CovarianceSpec::power_law(yhat.basis(), 0.0, 2.0), cov2, local);
    stepper.lanes_.resize(1);
    stepper.load_lane(stepper.lanes_[0], yhat, x_anchor);
    bool ok = true;
    for (int i = 0; i < stepper.n_sub_ && ok; ++i) ok = stepper.lanes_substep(s2);
    coords_to_field(stepper.lanes_[0].yc, stepper.lanes_[0].ys, yhat);
    return ok ? StepOutcome::Ok : StepOutcome::BlowUp;
}

StepOutcome step_averaged(VelocityField& xbar, const VelocityField& fbar_value,
                          const ModelParams& params, const CouplingSpec& spec,
                          const CovarianceSpec& cov1, NoiseStream& s1,
                          const IntegratorConfig& cfg) {
    AveragedStepper stepper(xbar.basis(), params, spec, cov1, cfg);
    return stepper.step(xbar, fbar_value, s1);
}

}  // namespace mscbf
