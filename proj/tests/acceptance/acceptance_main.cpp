// Acceptance suite: every gate of the verification harness at desk scale
// (k_max = 4, grid 24^2, T = 1, n_rep = 200 unless noted), one PASS/FAIL
// line per criterion, nonzero exit if anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mscbf/averaging.hpp"
#include "mscbf/experiments.hpp"
#include "mscbf/operators.hpp"
#include "mscbf/run_config.hpp"

using namespace mscbf;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %d: %-22s %s  (%.1f s)\n", pass ? "PASS" : "FAIL", index,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename Fn>
void timed(int index, const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::pair<bool, std::string> r;
    try {
        r = fn();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(index, name, r.first, r.second, secs);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void set_certified(ExperimentSetup& s) {
    const auto cc = certified_constants(s.spec, s.cov1.max_q(), s.cov2.max_q());
    s.params.l_g = cc.l_g;
    s.params.l_sigma2 = cc.l_sigma2;
    s.params.c_lip = cc.c_lip;
}

// --------------------------------------------------------------------------
// 1. operator identities at tolerance, 10^3 V-regular pairs, r in {3,4,5}

std::pair<bool, std::string> criterion_operator_identities() {
    auto basis = build_basis(4, 24);
    ModelParams p;
    p.mu = 1.0;
    p.beta = 1.0;
    p.r = 5.0;
    const double eta = monotonicity_constant(p);
    if (std::abs(eta - 0.125) > 1e-15) return {false, "eta(mu=beta=1, r=5) != 0.125"};

    const auto rep = exp_monotonicity(basis, p, {3.0, 4.0, 5.0}, 1000, 0xACCE55, 0);
    bool pass = true;
    std::string detail;
    for (const auto& c : rep.checks) {
        if (!c.skip && !c.pass) {
            pass = false;
            detail += c.name + " ";
        }
    }
    if (pass) detail = "all identities hold; eta = 0.125 by arithmetic";
    return {pass, detail};
}

// --------------------------------------------------------------------------
// 2. OU oracle suite on the linear family with beta = 0

std::pair<bool, std::string> criterion_ou_suite() {
    auto basis = build_basis(4, 24);
    CouplingSpec spec;
    spec.family = CouplingFamily::Linear;
    spec.f_x = 0.0;
    spec.f_y = 1.0;  // f = y: fbar is exactly the OU stationary mean
    spec.g_x = 0.5;
    spec.g_y = 0.25;
    spec.sigma2_base = 0.4;
    spec.validate();
    auto cov2 = CovarianceSpec::power_law(basis, 1.0, 2.0);
    ModelParams p;
    p.mu = 1.0;
    p.beta = 0.0;
    p.r = 3.0;
    const auto cc = certified_constants(spec, 1.0, cov2.max_q());
    p.l_g = cc.l_g;
    p.l_sigma2 = cc.l_sigma2;
    p.c_lip = cc.c_lip;

    VelocityField x = VelocityField::unit_mode(basis, 1, 0);
    x.axpy(0.5, VelocityField::unit_mode(basis, 0, 1));
    x.axpy(0.25, VelocityField::unit_mode(basis, 1, 1));

    ErgodicConfig ecfg;
    ecfg.horizon = 6.0;
    ecfg.n_rep = 8;
    ecfg.dt = 2e-3;

    // (a) per-mode fbar vs oracle within 3 stderr over 100 repetitions
    const VelocityField oracle = fbar_oracle_linear(x, p, spec);
    long total = 0, ok_count = 0;
    for (int repe = 0; repe < 100; ++repe) {
        const auto est =
            estimate_fbar(x, p, spec, cov2, ecfg, derive_seed(0x0e5u, repe, 0xf0a));
        if (est.flagged_blowup) return {false, "fbar burst flagged"};
        for (std::size_t j = 0; j < basis->pair_count(); ++j) {
            const double dc = est.value.cos_coord(static_cast<int>(j)) -
                              oracle.cos_coord(static_cast<int>(j));
            const double ds = est.value.sin_coord(static_cast<int>(j)) -
                              oracle.sin_coord(static_cast<int>(j));
            ++total;
            if (std::sqrt(dc * dc + ds * ds) <= 3.0 * est.stderr_pair[j] + 1e-12) ++ok_count;
        }
    }
    const double frac = static_cast<double>(ok_count) / static_cast<double>(total);
    if (frac < 0.99) return {false, "fbar per-mode 3-stderr fraction " + fmt(frac)};

    // (b) invariant second moment vs the closed form
    ErgodicConfig mcfg;
    mcfg.horizon = 12.0;
    mcfg.n_rep = 12;
    mcfg.dt = 2e-3;
    const auto mom = invariant_moment(x, p, spec, cov2, mcfg, 0x4f2);
    double expect = 0.0;
    for (std::size_t i = 0; i < basis->mode_count(); ++i) {
        const double rate = p.mu * basis->mode(i).lambda + spec.g_y;
        expect += cov2.q[i] * spec.sigma2_base * spec.sigma2_base / (2.0 * rate);
    }
    expect += h_norm_sq(oracle);  // f = y, so the oracle field is the OU mean
    if (std::abs(mom.value - expect) > 3.0 * mom.stderr_value) {
        return {false, "moment " + fmt(mom.value) + " vs " + fmt(expect) + " (3 stderr " +
                           fmt(3.0 * mom.stderr_value) + ")"};
    }

    // (c) synchronous-coupling rate on the slowest mode = 2 (mu lambda_1 + a)
    const VelocityField y1 = 0.5 * VelocityField::unit_mode(basis, 0, 1);
    const VelocityField y2 = VelocityField::zero(basis);
    const auto fit = estimate_decay_rate(x, y1, y2, p, spec, cov2, 2.0, 4, 0x77);
    const double target = 2.0 * (p.mu * 1.0 + spec.g_y);
    if (!fit.ok || std::abs(fit.rate - target) > 0.1 * target) {
        return {false, "rate " + fmt(fit.rate) + " vs " + fmt(target)};
    }
    return {true, "fbar frac " + fmt(frac) + ", moment ok, rate " + fmt(fit.rate) + " ~ " +
                      fmt(target)};
}

// --------------------------------------------------------------------------
// 3. mixing bound for the tanh family

std::pair<bool, std::string> criterion_mixing() {
    ExperimentSetup s;
    s.basis = build_basis(4, 24);
    s.spec.family = CouplingFamily::TanhDiagonal;
    s.spec.f_x = 0.0;
    s.spec.f_y = 0.8;
    s.spec.g_x = 1.0;
    s.spec.g_y = 0.1;
    s.spec.sigma2_base = 0.3;
    s.spec.sigma2_y = 0.2;
    s.spec.validate();
    s.cov1 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.cov2 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.params.mu = 1.0;
    s.params.beta = 0.0;
    s.params.r = 3.0;
    set_certified(s);
    s.ecfg.horizon = 6.0;
    s.ecfg.n_rep = 12;
    s.ecfg.dt = 1e-3;
    s.seed = 0x3141;
    s.workers = 0;

    const ValidationReport vr = validate_assumptions(s.params, s.spec);
    if (!(vr.xi > 0.0)) return {false, "config must satisfy (A3)"};

    const auto rep = exp_mixing(s, {0.0, 1.0, 2.0}, 3.0, 50);
    bool pass = true;
    std::string detail = "zeta_mix " + fmt(vr.zeta_mix) + "; rates";
    for (const auto& row : rep.rows) {
        const double ci_w = row.rate_ci_hi - row.rate_ci_lo;
        detail += " " + fmt(row.rate);
        if (!(row.rate >= row.zeta_mix - ci_w) || row.rate_r2 < 0.9) pass = false;
    }
    return {pass, detail};
}

// --------------------------------------------------------------------------
// 4. moment uniformity across epsilon in {1, 0.1, 0.01}

std::pair<bool, std::string> criterion_moments() {
    ExperimentSetup s;
    s.basis = build_basis(4, 24);
    s.spec.family = CouplingFamily::Linear;
    s.spec.f_x = 0.0;
    s.spec.f_y = 0.5;
    s.spec.g_x = 0.5;
    s.spec.g_y = 0.25;
    s.spec.sigma1_base = 0.3;
    s.spec.sigma2_base = 0.3;
    s.spec.validate();
    s.cov1 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.cov2 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.params.mu = 1.0;
    s.params.beta = 1.0;
    s.params.r = 3.0;
    set_certified(s);
    s.icfg.dt = 1e-3;
    s.icfg.dt_fast = 1e-4;
    s.t_final = 1.0;
    s.n_rep = 200;
    s.seed = 0x99;
    s.x0_scale = 1.0;
    s.y0_scale = 0.5;

    const auto rep = exp_moment_bounds(s, {1.0, 0.1, 0.01}, {1});
    bool pass = true;
    std::string detail;
    for (const auto& c : rep.checks) {
        if (!c.pass) pass = false;
        detail += c.name + "=" + (c.pass ? "ok" : "FAIL") + " ";
    }
    return {pass, detail};
}

// --------------------------------------------------------------------------
// 5. time-increment scaling

std::pair<bool, std::string> criterion_time_holder() {
    ExperimentSetup s;
    s.basis = build_basis(4, 24);
    s.spec.family = CouplingFamily::Linear;
    s.spec.f_x = -8.0;
    s.spec.f_y = 0.4;
    s.spec.g_x = 0.5;
    s.spec.g_y = 0.25;
    s.spec.sigma1_base = 0.3;
    s.spec.sigma2_base = 0.3;
    s.spec.validate();
    s.cov1 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.cov2 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.params.mu = 2.0;
    s.params.beta = 1.0;
    s.params.r = 3.0;
    s.params.epsilon = 0.1;
    set_certified(s);
    s.icfg.dt = 1e-3;
    s.icfg.dt_fast = 1e-4;
    s.t_final = 1.0;
    s.n_rep = 200;
    s.seed = 0x777;
    s.x0_scale = 0.2;
    s.y0_scale = 0.2;

    const auto rep = exp_time_holder(s, {0.2, 0.1, 0.05, 0.025});
    const bool ratio_ok = rep.ratio_max_min <= 2.0;
    const bool slope_ok = rep.slope >= 0.45;
    return {ratio_ok && slope_ok,
            "ratio max/min " + fmt(rep.ratio_max_min) + ", slope " + fmt(rep.slope)};
}

// --------------------------------------------------------------------------
// 6. auxiliary-process gap decreases with the block length

std::pair<bool, std::string> criterion_aux_gap() {
    ExperimentSetup s;
    s.basis = build_basis(4, 24);
    s.spec.family = CouplingFamily::Linear;
    s.spec.f_x = 0.0;
    s.spec.f_y = 0.5;
    s.spec.g_x = 1.0;
    s.spec.g_y = 0.25;
    s.spec.sigma1_base = 0.3;
    s.spec.sigma2_base = 0.3;
    s.spec.validate();
    s.cov1 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.cov2 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.params.mu = 1.0;
    s.params.beta = 1.0;
    s.params.r = 3.0;
    s.params.epsilon = 0.1;
    set_certified(s);
    s.icfg.dt = 1e-3;
    s.icfg.dt_fast = 1e-4;
    s.t_final = 1.0;
    s.n_rep = 200;
    s.seed = 0x31415;
    s.x0_scale = 1.0;
    s.y0_scale = 0.5;

    const auto rep = exp_aux_gap(s, {0.2, 0.1, 0.05, 0.025});
    bool pass = true;
    for (const auto& c : rep.checks) {
        if (c.name == "gap_ci_separated_decrease" && !c.pass) pass = false;
    }
    std::string detail = "gaps";
    for (const auto& r : rep.rungs) detail += " " + fmt(r.statistic);
    int flagged = 0;
    for (const auto& r : rep.rungs) flagged += r.n_flagged;
    if (flagged > 0) detail += " (" + std::to_string(flagged) + " flagged)";
    return {pass, detail};
}

// --------------------------------------------------------------------------
// 7. strong averaging principle across the epsilon ladder, both families

ExperimentSetup convergence_setup(bool tanh_family) {
    ExperimentSetup s;
    s.basis = build_basis(4, 24);
    if (tanh_family) {
        s.spec.family = CouplingFamily::TanhDiagonal;
        s.spec.sigma1_base = 0.25;
        s.spec.sigma1_x = 0.1;
        s.spec.sigma2_base = 0.3;
        s.spec.sigma2_y = 0.15;
    } else {
        s.spec.family = CouplingFamily::Linear;
        s.spec.sigma1_base = 0.25;
        s.spec.sigma2_base = 0.3;
    }
    s.spec.f_x = 0.0;
    s.spec.f_y = 0.8;
    s.spec.g_x = 1.0;
    s.spec.g_y = 0.25;
    s.spec.validate();
    s.cov1 = CovarianceSpec::power_law(s.basis, 1.0, 2.0);
    s.cov2 = CovarianceSpec::power_law(s.basis, 0.5, 2.0);
    s.params.mu = 1.0;
    s.params.beta = 0.0;  // oracle route requires beta = 0; kept for both rows
    s.params.r = 3.0;
    set_certified(s);
    s.icfg.dt = 1e-3;
    s.icfg.dt_fast = 1e-4;
    s.ecfg.horizon = 6.0;
    s.ecfg.n_rep = 8;
    s.ecfg.dt = 4e-3;
    s.hcfg.use_oracle = !tanh_family;
    s.hcfg.cache_tol_rel = 0.12;
    s.hcfg.stderr_frac = 10.0;
    s.t_final = 1.0;
    s.n_rep = 200;
    s.seed = tanh_family ? 0x4094 : 0x2025;
    s.x0_scale = 1.0;
    s.y0_scale = 0.5;
    return s;
}

std::pair<bool, std::string> criterion_convergence(bool tanh_family) {
    const ExperimentSetup s = convergence_setup(tanh_family);
    const auto table = exp_convergence(s, {0.1, 0.01, 0.001}, {1});
    bool separated = true, slope_ok = false;
    std::string detail = "E sup gap^2:";
    for (const auto& c : table.checks) {
        if (c.name == "ci_separated_decrease_p1") separated = c.pass;
        if (c.name == "loglog_slope_positive_p1") slope_ok = c.pass;
    }
    for (const auto& row : table.rows) {
        if (row.p == 1) detail += " " + fmt(row.estimate);
    }
    return {separated && slope_ok, detail};
}

// --------------------------------------------------------------------------
// 8. determinism: byte-identical reruns and worker independence

std::pair<bool, std::string> criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "mscbf_acceptance_det";
    fs::remove_all(base);

    RunConfig c;
    c.experiment = "exp_aux_gap";
    c.family = "linear";
    c.f_y = 0.5;
    c.g_x = 1.0;
    c.g_y = 0.25;
    c.sigma1_base = 0.3;
    c.sigma2_base = 0.3;
    c.mu = 1.0;
    c.beta = 1.0;
    c.r = 3.0;
    c.epsilon = 0.25;
    c.dt = 2e-3;
    c.dt_fast = 1e-3;
    c.t_final = 0.5;
    c.n_rep = 16;
    c.seed = 314159;
    c.aux_delta_ladder = {0.1, 0.05};

    auto read_all = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::stringstream buf;
        buf << is.rdbuf();
        return buf.str();
    };

    std::vector<std::string> outputs;
    const int workers_list[3] = {1, 2, 1};
    for (int i = 0; i < 3; ++i) {
        c.workers = workers_list[i];
        c.out_dir = (base / ("run" + std::to_string(i))).string();
        if (run_configured_experiment(c) != 0) return {false, "experiment run failed"};
        outputs.push_back(read_all(fs::path(c.out_dir) / "results.csv"));
    }
    fs::remove_all(base);
    if (outputs[0].empty()) return {false, "empty CSV"};
    if (outputs[0] != outputs[2]) return {false, "rerun differs byte-wise"};
    if (outputs[0] != outputs[1]) return {false, "worker count changed the bytes"};
    return {true, "rerun and 1-vs-2 workers byte-identical (" +
                      std::to_string(outputs[0].size()) + " bytes)"};
}

}  // namespace

int main() {
    std::printf("mscbf acceptance suite (desk scale: k_max=4, grid 24^2, T=1)\n");
    timed(1, "operator identities", criterion_operator_identities);
    timed(2, "OU oracle suite", criterion_ou_suite);
    timed(3, "mixing bound", criterion_mixing);
    timed(4, "moment uniformity", criterion_moments);
    timed(5, "time-increment scaling", criterion_time_holder);
    timed(6, "auxiliary gap", criterion_aux_gap);
    timed(7, "averaging (linear)", [] { return criterion_convergence(false); });
    timed(7, "averaging (tanh)", [] { return criterion_convergence(true); });
    timed(8, "determinism", criterion_determinism);
    if (g_failures > 0) {
        std::printf("ACCEPTANCE: %d criterion check(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all criteria passed\n");
    return 0;
}
