#include "mscbf/averaging.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mscbf/operators.hpp"
#include "mscbf/statistics.hpp"

namespace mscbf {

namespace {

double resolve_burn_in(const ErgodicConfig& cfg, const ModelParams& params,
                       const CouplingSpec& spec) {
    if (cfg.burn_in >= 0.0) return cfg.burn_in;
    const ValidationReport rep = validate_assumptions(params, spec);
    if (!(rep.zeta_mix > 0.0)) {
        throw std::invalid_argument("ergodic averaging: zeta_mix must be positive");
    }
    return 5.0 / rep.zeta_mix;
}

void require_mixing_gap(const ModelParams& params, const CouplingSpec& spec) {
    const ValidationReport rep = validate_assumptions(params, spec);
    if (!rep.pass()) {
        std::string msg = "averaging: assumptions not satisfied:";
        for (const auto& f : rep.failures) msg += " [" + f + "]";
        throw std::invalid_argument(msg);
    }
}

}  // namespace

FbarEstimate estimate_fbar(const VelocityField& x, const ModelParams& params,
                           const CouplingSpec& spec, const CovarianceSpec& cov2,
                           const ErgodicConfig& cfg, std::uint64_t seed,
                           const FbarIntegrand& integrand, const IntegratorConfig& icfg) {
    require_mixing_gap(params, spec);
    if (cfg.n_rep < 1 || !(cfg.horizon > 0.0) || !(cfg.dt > 0.0)) {
        throw std::invalid_argument("estimate_fbar: invalid ergodic configuration");
    }
    const BasisPtr basis = x.basis();
    const double burn_in = resolve_burn_in(cfg, params, spec);
    const int burn_steps = static_cast<int>(std::llround(burn_in / cfg.dt));
    const int window_steps = std::max(1, static_cast<int>(std::llround(cfg.horizon / cfg.dt)));

    const FbarIntegrand eval =
        integrand ? integrand
                  : FbarIntegrand([&spec](const VelocityField& xx, const VelocityField& yy) {
                        return eval_f(spec, xx, yy);
                    });

    FrozenStepper stepper(basis, params, spec, cov2, cfg.dt, icfg);

    FbarEstimate out;
    out.value = VelocityField::zero(basis);
    out.burn_in_used = burn_steps * cfg.dt;
    out.horizon_used = window_steps * cfg.dt;

    std::vector<VelocityField> replica_means;
    replica_means.reserve(static_cast<std::size_t>(cfg.n_rep));
    VelocityField half1 = VelocityField::zero(basis);
    VelocityField half2 = VelocityField::zero(basis);

    for (int rep = 0; rep < cfg.n_rep; ++rep) {
        NoiseStream stream{seed, static_cast<std::uint32_t>(rep), RngChannel::Q2bar, 0};
        VelocityField y = VelocityField::zero(basis);
        bool ok = true;
        for (int i = 0; i < burn_steps && ok; ++i) {
            ok = stepper.step(y, x, stream) == StepOutcome::Ok;
        }
        VelocityField acc = VelocityField::zero(basis);
        for (int i = 0; i < window_steps && ok; ++i) {
            ok = stepper.step(y, x, stream) == StepOutcome::Ok;
            const VelocityField fi = eval(x, y);
            acc += fi;
            if (i < window_steps / 2) {
                half1 += fi;
            } else {
                half2 += fi;
            }
        }
        if (!ok) {
            out.flagged_blowup = true;
            return out;
        }
        acc *= 1.0 / window_steps;
        replica_means.push_back(std::move(acc));
    }

    for (const auto& m : replica_means) out.value += m;
    out.value *= 1.0 / cfg.n_rep;

    const std::size_t pairs = basis->pair_count();
    out.stderr_pair.assign(pairs, 0.0);
    if (cfg.n_rep > 1) {
        double total = 0.0;
        for (std::size_t j = 0; j < pairs; ++j) {
            double var_c = 0.0, var_s = 0.0;
            const double mc = out.value.cos_coord(static_cast<int>(j));
            const double ms = out.value.sin_coord(static_cast<int>(j));
            for (const auto& m : replica_means) {
                const double dc = m.cos_coord(static_cast<int>(j)) - mc;
                const double ds = m.sin_coord(static_cast<int>(j)) - ms;
                var_c += dc * dc;
                var_s += ds * ds;
            }
            var_c /= (cfg.n_rep - 1);
            var_s /= (cfg.n_rep - 1);
            out.stderr_pair[j] = std::sqrt((var_c + var_s) / cfg.n_rep);
            total += (var_c + var_s) / cfg.n_rep;
        }
        out.stderr_norm = std::sqrt(total);
    }

    const int h1 = window_steps / 2;
    const int h2 = window_steps - h1;
    half1 *= 1.0 / (cfg.n_rep * std::max(1, h1));
    half2 *= 1.0 / (cfg.n_rep * std::max(1, h2));
    const double drift = h_norm(half1 - half2);
    out.stationarity_flag = drift > 5.0 * out.stderr_norm && drift > 1e-14;
    return out;
}

VelocityField fbar_oracle_linear(const VelocityField& x, const ModelParams& params,
                                 const CouplingSpec& spec) {
    if (spec.family != CouplingFamily::Linear) {
        throw std::invalid_argument("fbar_oracle_linear: linear family only");
    }
    if (params.beta != 0.0) {
        throw std::invalid_argument("fbar_oracle_linear: requires beta = 0 in the fast equation");
    }
    VelocityField out(x.basis());
    const auto& modes = x.basis()->modes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ou_gain = spec.g_x / (params.mu * modes[i].lambda + spec.g_y);
        out[i] = (spec.f_x + spec.f_y * ou_gain) * x[i];
    }
    return out;
}

DecayRateFit estimate_decay_rate(const VelocityField& x, const VelocityField& y1,
                                 const VelocityField& y2, const ModelParams& params,
                                 const CouplingSpec& spec, const CovarianceSpec& cov2,
                                 double horizon, int n_rep, std::uint64_t seed, double dt,
                                 const IntegratorConfig& icfg) {
    require_mixing_gap(params, spec);
    const double gap0 = h_norm_sq(y1 - y2);
    if (!(gap0 > 0.0)) {
        throw std::invalid_argument("estimate_decay_rate: y1 and y2 must differ");
    }
    const int steps = std::max(2, static_cast<int>(std::llround(horizon / dt)));

    DecayRateFit fit;
    fit.times.resize(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) fit.times[static_cast<std::size_t>(i)] = (i + 1) * dt;
    fit.replica_gap_sq.assign(static_cast<std::size_t>(n_rep),
                              std::vector<double>(static_cast<std::size_t>(steps), 0.0));

    FrozenStepper stepper(x.basis(), params, spec, cov2, dt, icfg);
    for (int rep = 0; rep < n_rep; ++rep) {
        NoiseStream stream{seed, static_cast<std::uint32_t>(rep), RngChannel::Q2bar, 0};
        VelocityField a = y1;
        VelocityField b = y2;
        for (int i = 0; i < steps; ++i) {
            if (stepper.step_pair(a, b, x, stream) != StepOutcome::Ok) {
                throw std::runtime_error("estimate_decay_rate: path blow-up");
            }
            fit.replica_gap_sq[static_cast<std::size_t>(rep)][static_cast<std::size_t>(i)] =
                h_norm_sq(a - b);
        }
    }

    fit.mean_gap_sq.assign(static_cast<std::size_t>(steps), 0.0);
    for (const auto& g : fit.replica_gap_sq) {
        for (int i = 0; i < steps; ++i) fit.mean_gap_sq[static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
    }
    for (double& v : fit.mean_gap_sq) v /= n_rep;

    // fit only the resolvable part of the decay
    std::vector<double> ts, gs;
    for (int i = 0; i < steps; ++i) {
        const double g = fit.mean_gap_sq[static_cast<std::size_t>(i)];
        if (g > 1e-10 * gap0) {
            ts.push_back(fit.times[static_cast<std::size_t>(i)]);
            gs.push_back(g);
        }
    }
    const LineFit lf = fit_exponential_decay(ts, gs);
    fit.rate = lf.slope;
    fit.r2 = lf.r2;
    fit.residual = lf.residual;
    fit.ok = lf.ok && lf.r2 >= 0.9;
    return fit;
}

MomentEstimate invariant_moment(const VelocityField& x, const ModelParams& params,
                                const CouplingSpec& spec, const CovarianceSpec& cov2,
                                const ErgodicConfig& cfg, std::uint64_t seed,
                                const IntegratorConfig& icfg) {
    require_mixing_gap(params, spec);
    const BasisPtr basis = x.basis();
    const double burn_in = resolve_burn_in(cfg, params, spec);
    const int burn_steps = static_cast<int>(std::llround(burn_in / cfg.dt));
    const int window_steps = std::max(1, static_cast<int>(std::llround(cfg.horizon / cfg.dt)));

    FrozenStepper stepper(basis, params, spec, cov2, cfg.dt, icfg);
    MomentEstimate out;
    std::vector<double> replica_means;
    double half1 = 0.0, half2 = 0.0;
    for (int rep = 0; rep < cfg.n_rep; ++rep) {
        NoiseStream stream{seed, static_cast<std::uint32_t>(rep), RngChannel::Q2bar, 0};
        VelocityField y = VelocityField::zero(basis);
        bool ok = true;
        for (int i = 0; i < burn_steps && ok; ++i) {
            ok = stepper.step(y, x, stream) == StepOutcome::Ok;
        }
        double acc = 0.0;
        for (int i = 0; i < window_steps && ok; ++i) {
            ok = stepper.step(y, x, stream) == StepOutcome::Ok;
            const double m = h_norm_sq(y);
            acc += m;
            (i < window_steps / 2 ? half1 : half2) += m;
        }
        if (!ok) {
            out.flagged_blowup = true;
            return out;
        }
        replica_means.push_back(acc / window_steps);
    }
    const SummaryStat s = summarize(replica_means);
    out.value = s.mean;
    out.stderr_value = s.stderr_mean;
    const int h1 = window_steps / 2;
    const int h2 = window_steps - h1;
    half1 /= cfg.n_rep * std::max(1, h1);
    half2 /= cfg.n_rep * std::max(1, h2);
    const double drift = std::abs(half1 - half2);
    out.stationarity_flag = drift > 5.0 * out.stderr_value && drift > 1e-14;
    return out;
}


FbarBurstEstimator::FbarBurstEstimator(BasisPtr basis, const ModelParams& params,
                                       const CouplingSpec& spec, const CovarianceSpec& cov2,
                                       const ErgodicConfig& cfg, const IntegratorConfig& icfg,
                                       std::uint64_t seed)
    : basis_(std::move(basis)),
      params_(params),
      spec_(spec),
      cov2_(cov2),
      cfg_(cfg),
      icfg_(icfg),
      seed_(seed) {
    require_mixing_gap(params_, spec_);
    if (params_.beta != 0.0) {
        // the coordinate fast path below assumes no damping in the fast drift
        throw std::invalid_argument("FbarBurstEstimator: beta != 0 requires estimate_fbar");
    }
    full_burn_ = resolve_burn_in(cfg_, params_, spec_);
    const ValidationReport rep = validate_assumptions(params_, spec_);
    topup_burn_ = 1.0 / rep.zeta_mix;
    const std::size_t pairs = basis_->pair_count();
    yc_.assign(static_cast<std::size_t>(cfg_.n_rep), std::vector<double>(pairs, 0.0));
    ys_.assign(static_cast<std::size_t>(cfg_.n_rep), std::vector<double>(pairs, 0.0));
    streams_.clear();
    for (int rep_i = 0; rep_i < cfg_.n_rep; ++rep_i) {
        streams_.push_back(
            NoiseStream{seed_, static_cast<std::uint32_t>(rep_i), RngChannel::Q2bar, 0});
    }
    decay_.resize(pairs);
    q_pair_.resize(pairs);
    lambda_pair_.resize(pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
        const int i = basis_->representatives()[j];
        lambda_pair_[j] = basis_->mode(static_cast<std::size_t>(i)).lambda;
        decay_[j] = linear_decay_factor(icfg_.scheme, params_.mu * lambda_pair_[j], cfg_.dt);
        q_pair_[j] = cov2_.q_pair(static_cast<int>(j));
    }
}

FbarEstimate FbarBurstEstimator::estimate(const VelocityField& x) {
    const std::size_t pairs = basis_->pair_count();
    const double dt = cfg_.dt;
    const int burn_steps =
        static_cast<int>(std::llround((warm_ ? topup_burn_ : full_burn_) / dt));
    const int window_steps = std::max(1, static_cast<int>(std::llround(cfg_.horizon / dt)));
    const bool tanh_family = spec_.family != CouplingFamily::Linear;
    const bool tanh_sigma = spec_.family == CouplingFamily::TanhDiagonal;
    const double thr_sq = icfg_.blowup_threshold * icfg_.blowup_threshold;

    std::vector<double> xc(pairs), xs(pairs), gxc(pairs), gxs(pairs), fxc(pairs), fxs(pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
        xc[j] = x.cos_coord(static_cast<int>(j));
        xs[j] = x.sin_coord(static_cast<int>(j));
        const double tc = tanh_family ? std::tanh(xc[j]) : xc[j];
        const double ts = tanh_family ? std::tanh(xs[j]) : xs[j];
        gxc[j] = spec_.g_x * tc;
        gxs[j] = spec_.g_x * ts;
        fxc[j] = spec_.f_x * xc[j];
        fxs[j] = spec_.f_x * xs[j];
    }

    FbarEstimate out;
    out.value = VelocityField::zero(basis_);
    out.burn_in_used = burn_steps * dt;
    out.horizon_used = window_steps * dt;

    std::vector<std::vector<double>> mean_c(yc_.size(), std::vector<double>(pairs, 0.0));
    std::vector<std::vector<double>> mean_s(yc_.size(), std::vector<double>(pairs, 0.0));
    std::vector<double> half1_c(pairs, 0.0), half1_s(pairs, 0.0);
    std::vector<double> half2_c(pairs, 0.0), half2_s(pairs, 0.0);

    std::vector<double> gc(pairs), gs(pairs);
    for (std::size_t rep_i = 0; rep_i < yc_.size(); ++rep_i) {
        std::vector<double>& yc = yc_[rep_i];
        std::vector<double>& ys = ys_[rep_i];
        NoiseStream& stream = streams_[rep_i];
        const std::uint32_t chan_bits = static_cast<std::uint32_t>(stream.channel) << 24;
        for (int n = 0; n < burn_steps + window_steps; ++n) {
            // tamed drift of the frozen fast equation at unit speed
            double norm_sq = 0.0;
            for (std::size_t j = 0; j < pairs; ++j) {
                gc[j] = gxc[j] - spec_.g_y * yc[j];
                gs[j] = gxs[j] - spec_.g_y * ys[j];
                norm_sq += gc[j] * gc[j] + gs[j] * gs[j];
            }
            const double tame = dt / (1.0 + dt * icfg_.taming * std::sqrt(norm_sq));
            const std::uint64_t event = stream.counter++;
            double state_sq = 0.0;
            for (std::size_t j = 0; j < pairs; ++j) {
                const auto [gn_c, gn_s] = gaussian_pair(
                    stream.master_seed, static_cast<std::uint32_t>(event),
                    static_cast<std::uint32_t>(event >> 32), stream.realization_id,
                    static_cast<std::uint32_t>(j) | chan_bits);
                double mc = spec_.sigma2_base;
                double ms = spec_.sigma2_base;
                if (tanh_sigma) {
                    mc += spec_.sigma2_x * std::tanh(xc[j]) + spec_.sigma2_y * std::tanh(yc[j]);
                    ms += spec_.sigma2_x * std::tanh(xs[j]) + spec_.sigma2_y * std::tanh(ys[j]);
                }
                const double amp = std::sqrt(dt * q_pair_[j]);
                yc[j] = decay_[j] * (yc[j] + tame * gc[j] + mc * amp * gn_c);
                ys[j] = decay_[j] * (ys[j] + tame * gs[j] + ms * amp * gn_s);
                state_sq += yc[j] * yc[j] + ys[j] * ys[j];
            }
            if (!(state_sq <= thr_sq)) {
                out.flagged_blowup = true;
                return out;
            }
            if (n >= burn_steps) {
                const int w = n - burn_steps;
                for (std::size_t j = 0; j < pairs; ++j) {
                    const double fc = fxc[j] + spec_.f_y * (tanh_family ? std::tanh(yc[j]) : yc[j]);
                    const double fs = fxs[j] + spec_.f_y * (tanh_family ? std::tanh(ys[j]) : ys[j]);
                    mean_c[rep_i][j] += fc;
                    mean_s[rep_i][j] += fs;
                    if (w < window_steps / 2) {
                        half1_c[j] += fc;
                        half1_s[j] += fs;
                    } else {
                        half2_c[j] += fc;
                        half2_s[j] += fs;
                    }
                }
            }
        }
        for (std::size_t j = 0; j < pairs; ++j) {
            mean_c[rep_i][j] /= window_steps;
            mean_s[rep_i][j] /= window_steps;
        }
    }
    warm_ = true;

    const int n_rep = cfg_.n_rep;
    out.stderr_pair.assign(pairs, 0.0);
    double total_var = 0.0;
    for (std::size_t j = 0; j < pairs; ++j) {
        double mc = 0.0, ms = 0.0;
        for (int rep_i = 0; rep_i < n_rep; ++rep_i) {
            mc += mean_c[static_cast<std::size_t>(rep_i)][j];
            ms += mean_s[static_cast<std::size_t>(rep_i)][j];
        }
        mc /= n_rep;
        ms /= n_rep;
        out.value.set_pair_coords(static_cast<int>(j), mc, ms);
        if (n_rep > 1) {
            double var_c = 0.0, var_s = 0.0;
            for (int rep_i = 0; rep_i < n_rep; ++rep_i) {
                const double dc = mean_c[static_cast<std::size_t>(rep_i)][j] - mc;
                const double ds = mean_s[static_cast<std::size_t>(rep_i)][j] - ms;
                var_c += dc * dc;
                var_s += ds * ds;
            }
            var_c /= (n_rep - 1);
            var_s /= (n_rep - 1);
            out.stderr_pair[j] = std::sqrt((var_c + var_s) / n_rep);
            total_var += (var_c + var_s) / n_rep;
        }
    }
    out.stderr_norm = std::sqrt(total_var);

    const int h1 = window_steps / 2;
    const int h2 = window_steps - h1;
    double drift_sq = 0.0;
    for (std::size_t j = 0; j < pairs; ++j) {
        const double d1c = half1_c[j] / (n_rep * std::max(1, h1));
        const double d2c = half2_c[j] / (n_rep * std::max(1, h2));
        const double d1s = half1_s[j] / (n_rep * std::max(1, h1));
        const double d2s = half2_s[j] / (n_rep * std::max(1, h2));
        drift_sq += (d1c - d2c) * (d1c - d2c) + (d1s - d2s) * (d1s - d2s);
    }
    const double drift = std::sqrt(drift_sq);
    out.stationarity_flag = drift > 5.0 * out.stderr_norm && drift > 1e-14;
    return out;
}

KhasminskiiResult run_khasminskii(const VelocityField& x0, const VelocityField& y0,
                                  const ModelParams& params, const CouplingSpec& spec,
                                  const CovarianceSpec& cov1, const CovarianceSpec& cov2,
                                  double t_final, double delta, const IntegratorConfig& icfg,
                                  std::uint64_t seed, std::uint32_t realization_id,
                                  const FbarProvider& fbar) {
    if (!(delta > 0.0)) throw std::invalid_argument("run_khasminskii: delta must be positive");
    const BasisPtr basis = x0.basis();
    CoupledStepper stepper(basis, params, spec, cov1, cov2, icfg);
    const int steps = static_cast<int>(std::llround(t_final / icfg.dt));

    KhasminskiiResult out;
    CoupledState st{x0, y0, 0.0};
    VelocityField yhat = y0;
    NoiseStream s1{seed, realization_id, RngChannel::Q1, 0};
    NoiseStream s2{seed, realization_id, RngChannel::Q2, 0};

    VelocityField anchor = x0;
    VelocityField fbar_anchor(basis);
    bool have_fbar = static_cast<bool>(fbar);
    if (have_fbar) fbar_anchor = fbar(anchor);
    long block = 0;
    out.anchor_times.push_back(0.0);
    out.anchors.push_back(anchor);
    VelocityField block_acc = VelocityField::zero(basis);

    for (int n = 0; n < steps; ++n) {
        const double t_pre = n * icfg.dt;
        const long k = static_cast<long>(std::floor(t_pre / delta + 1e-9));
        if (k != block) {
            block = k;
            anchor = st.x;  // X at the block start
            out.anchor_times.push_back(t_pre);
            out.anchors.push_back(anchor);
            if (have_fbar) fbar_anchor = fbar(anchor);
            out.block_functional_norm.push_back(h_norm(block_acc));
            block_acc.set_zero();
        }
        if (stepper.step_with_auxiliary(st, yhat, anchor, s1, s2) != StepOutcome::Ok) {
            out.flagged = true;
            return out;
        }
        const double gap = h_norm_sq(st.y - yhat);
        out.times.push_back(st.t);
        out.gap_sq.push_back(gap);
        out.gap_integral += icfg.dt * gap;
        if (have_fbar) {
            VelocityField integrand = eval_f(spec, anchor, yhat);
            integrand -= fbar_anchor;
            block_acc.axpy(icfg.dt, integrand);
        }
    }
    out.block_functional_norm.push_back(h_norm(block_acc));
    return out;
}

HmmResult run_hmm_averaged(const VelocityField& x0, const ModelParams& params,
                           const CouplingSpec& spec, const CovarianceSpec& cov1,
                           const CovarianceSpec& cov2, double t_final,
                           const IntegratorConfig& icfg, const ErgodicConfig& ecfg,
                           const HmmConfig& hcfg, std::uint64_t seed,
                           std::uint32_t realization_id) {
    require_mixing_gap(params, spec);
    const BasisPtr basis = x0.basis();
    AveragedStepper stepper(basis, params, spec, cov1, icfg);
    const int steps = static_cast<int>(std::llround(t_final / icfg.dt));

    HmmResult out;
    out.times.reserve(static_cast<std::size_t>(steps));
    out.path.reserve(static_cast<std::size_t>(steps));

    VelocityField xbar = x0;
    NoiseStream s1{seed, realization_id, RngChannel::Q1, 0};

    bool have_cache = false;
    VelocityField x_cached(basis);
    VelocityField fbar_cached(basis);

    std::unique_ptr<FbarBurstEstimator> bursts;
    if (!hcfg.use_oracle && params.beta == 0.0) {
        bursts = std::make_unique<FbarBurstEstimator>(
            basis, params, spec, cov2, ecfg, icfg,
            derive_seed(seed, static_cast<std::uint64_t>(realization_id), 0x66626172ull));
    }

    for (int n = 0; n < steps; ++n) {
        const double cache_drift = have_cache ? h_norm(xbar - x_cached) : 0.0;
        out.max_cache_drift = std::max(out.max_cache_drift, cache_drift);
        // the closed form costs nothing, so oracle mode never reuses a stale value
        const bool stale =
            hcfg.use_oracle || !have_cache ||
            cache_drift > hcfg.cache_tol_rel * std::max(h_norm(xbar), 1e-12);
        if (stale) {
            x_cached = xbar;
            if (hcfg.use_oracle) {
                fbar_cached = fbar_oracle_linear(xbar, params, spec);
                out.call_log.push_back({n * icfg.dt, out.fbar_calls, 0.0, 0.0});
            } else {
                const std::uint64_t call_seed =
                    derive_seed(seed, (static_cast<std::uint64_t>(realization_id) << 20) |
                                          static_cast<std::uint64_t>(out.fbar_calls),
                                0x66626172ull);  // distinct lane for cold bursts
                const FbarEstimate est =
                    bursts ? bursts->estimate(xbar)
                           : estimate_fbar(xbar, params, spec, cov2, ecfg, call_seed, {}, icfg);
                if (est.flagged_blowup) {
                    out.flagged = true;
                    out.flag_reason = "fbar burst blow-up";
                    return out;
                }
                out.max_fbar_stderr = std::max(out.max_fbar_stderr, est.stderr_norm);
                out.call_log.push_back(
                    {n * icfg.dt, out.fbar_calls, est.stderr_norm, est.horizon_used});
                const double drift_scale = std::max(h_norm(est.value), hcfg.stderr_floor);
                if (est.stderr_norm > hcfg.stderr_frac * drift_scale) {
                    out.flagged = true;
                    out.flag_reason = "fbar stderr above budget";
                    return out;
                }
                fbar_cached = est.value;
            }
            have_cache = true;
            ++out.fbar_calls;
        }
        if (stepper.step(xbar, fbar_cached, s1) != StepOutcome::Ok) {
            out.flagged = true;
            out.flag_reason = "path blow-up";
            return out;
        }
        out.times.push_back((n + 1) * icfg.dt);
        out.path.push_back(xbar);
    }
    return out;
}

}  // namespace mscbf
