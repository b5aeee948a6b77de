#include "doctest.h"

#include <cmath>
#include <vector>

#include "mscbf/dynamics.hpp"
#include "mscbf/operators.hpp"
#include "oracles.hpp"

using namespace mscbf;

namespace {

CouplingSpec linear_spec(double fx, double fy, double gx, double gy, double s1, double s2) {
    CouplingSpec s;
    s.family = CouplingFamily::Linear;
    s.f_x = fx;
    s.f_y = fy;
    s.g_x = gx;
    s.g_y = gy;
    s.sigma1_base = s1;
    s.sigma2_base = s2;
    REQUIRE(s.validate());
    return s;
}

ModelParams params_for(const CouplingSpec& spec, const CovarianceSpec& cov1,
                       const CovarianceSpec& cov2, double mu, double beta, double r,
                       double eps) {
    ModelParams p;
    p.mu = mu;
    p.beta = beta;
    p.r = r;
    p.epsilon = eps;
    const auto cc = certified_constants(spec, cov1.max_q(), cov2.max_q());
    p.l_g = cc.l_g;
    p.l_sigma2 = cc.l_sigma2;
    p.c_lip = cc.c_lip;
    return p;
}

// covariance supported on the (1,0) pair only
CovarianceSpec single_pair_cov(const BasisPtr& basis, double q0) {
    CovarianceSpec cov;
    cov.basis = basis;
    cov.q.assign(basis->mode_count(), 0.0);
    const int i = basis->mode_index(1, 0);
    const int j = basis->mode(static_cast<std::size_t>(i)).conj;
    cov.q[static_cast<std::size_t>(i)] = q0;
    cov.q[static_cast<std::size_t>(j)] = q0;
    cov.trace = 2.0 * q0;
    cov.decay_tag = "single_pair";
    return cov;
}

}  // namespace

TEST_CASE("zero data, zero couplings, zero noise stays at zero") {
    auto basis = build_basis(2, 8);
    auto spec = linear_spec(0, 0, 0, 0, 0, 0);
    auto cov = CovarianceSpec::power_law(basis, 0.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.0, 1.0, 3.0, 0.5);
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.dt_fast = 1e-2;
    CoupledState st{VelocityField::zero(basis), VelocityField::zero(basis), 0.0};
    NoiseStream s1{1, 0, RngChannel::Q1, 0}, s2{1, 0, RngChannel::Q2, 0};
    CoupledStepper stepper(basis, p, spec, cov, cov, cfg);
    for (int i = 0; i < 50; ++i) REQUIRE(stepper.step(st, s1, s2) == StepOutcome::Ok);
    CHECK(h_norm(st.x) == 0.0);
    CHECK(h_norm(st.y) == 0.0);
}

TEST_CASE("frozen equation with couplings off is pure heat decay") {
    auto basis = build_basis(2, 8);
    auto spec = linear_spec(0, 0, 0, 0, 0, 0);
    auto cov = CovarianceSpec::power_law(basis, 0.0, 2.0);
    auto p = params_for(spec, cov, cov, 0.7, 0.0, 3.0, 0.5);
    const double dt = 1e-3;
    FrozenStepper stepper(basis, p, spec, cov, dt);
    auto y = VelocityField::unit_mode(basis, 1, 1);  // lambda = 2
    y.axpy(0.5, VelocityField::unit_mode(basis, 1, 0));
    auto x = VelocityField::zero(basis);
    NoiseStream s{3, 0, RngChannel::Q2bar, 0};
    const int n = 700;
    for (int i = 0; i < n; ++i) REQUIRE(stepper.step(y, x, s) == StepOutcome::Ok);
    const double t = n * dt;
    const double c11 = inner_h(y, VelocityField::unit_mode(basis, 1, 1));
    const double c10 = inner_h(y, VelocityField::unit_mode(basis, 1, 0));
    CHECK(c11 == doctest::Approx(std::exp(-0.7 * 2.0 * t)).epsilon(1e-10));
    CHECK(c10 == doctest::Approx(0.5 * std::exp(-0.7 * 1.0 * t)).epsilon(1e-10));
}

TEST_CASE("deterministic dissipativity: h-norm never increases without forcing") {
    auto basis = build_basis(2, 12);
    auto spec = linear_spec(0, 0, 0, 0, 0, 0);
    auto cov = CovarianceSpec::power_law(basis, 0.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.0, 1.0, 3.0, 0.5);
    FrozenStepper stepper(basis, p, spec, cov, 1e-3);
    auto y = sample_random_field(basis, 5, 0, 0, 2.0);
    auto x = VelocityField::zero(basis);
    NoiseStream s{3, 0, RngChannel::Q2bar, 0};
    double prev = h_norm(y);
    for (int i = 0; i < 200; ++i) {
        REQUIRE(stepper.step(y, x, s) == StepOutcome::Ok);
        const double cur = h_norm(y);
        CHECK(cur <= prev + 1e-14);
        prev = cur;
    }
}

TEST_CASE("averaged stepper with everything off is heat decay per mode") {
    auto basis = build_basis(2, 8);
    auto spec = linear_spec(0, 0, 0, 0, 0, 0);
    auto cov = CovarianceSpec::power_law(basis, 0.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.2, 0.0, 3.0, 0.5);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    AveragedStepper stepper(basis, p, spec, cov, cfg);
    auto x = VelocityField::unit_mode(basis, 2, 0);  // lambda = 4
    auto fbar = VelocityField::zero(basis);
    NoiseStream s{9, 0, RngChannel::Q1, 0};
    for (int i = 0; i < 400; ++i) REQUIRE(stepper.step(x, fbar, s) == StepOutcome::Ok);
    CHECK(h_norm(x) == doctest::Approx(std::exp(-1.2 * 4.0 * 0.4)).epsilon(1e-10));
}

// Exact discrete transition of the per-pair 2x2 linear system driven by the
// replayed stream increments: Z' = expm(M h) (Z + Sigma dBeta).
namespace {

struct LinearOracle {
    double mu, eps, fx, fy, gx, gy, c1, c2;
    double q1, q2, lambda;
    std::array<double, 4> propagator(double h) const {
        const std::array<double, 4> m = {fx - mu * lambda, fy, gx / eps,
                                         -(mu * lambda + gy) / eps};
        return oracle::expm2(m, h);
    }
};

}  // namespace

TEST_CASE("coupled stepper matches the closed-form linear SDE at strong order one") {
    auto basis = build_basis(1, 8);
    auto spec = linear_spec(-0.5, 0.8, 1.0, 0.3, 0.4, 0.5);
    auto cov1 = single_pair_cov(basis, 1.0);
    auto cov2 = single_pair_cov(basis, 0.8);
    const double eps = 0.5;
    auto p = params_for(spec, cov1, cov2, 1.0, 0.0, 3.0, eps);
    REQUIRE(validate_assumptions(p, spec).pass());

    const double t_end = 0.5;
    std::vector<double> dts = {4e-3, 2e-3, 1e-3};
    std::vector<double> errors;

    for (double dt : dts) {
        double err_acc = 0.0;
        const int n_rep = 8;
        for (int rep = 0; rep < n_rep; ++rep) {
            IntegratorConfig cfg;
            cfg.dt = dt;
            cfg.dt_fast = dt;  // single-grid comparison, n_sub = 1
            CoupledStepper stepper(basis, p, spec, cov1, cov2, cfg);
            CoupledState st{VelocityField::unit_mode(basis, 1, 0),
                            0.5 * VelocityField::unit_mode(basis, 1, 0), 0.0};
            NoiseStream s1{77, static_cast<std::uint32_t>(rep), RngChannel::Q1, 0};
            NoiseStream s2{77, static_cast<std::uint32_t>(rep), RngChannel::Q2, 0};

            // oracle on the cos coordinate of pair (1,0); replays the same gaussians
            LinearOracle lin{p.mu, eps, spec.f_x, spec.f_y, spec.g_x, spec.g_y,
                             spec.sigma1_base, spec.sigma2_base, 1.0, 0.8, 1.0};
            const auto prop = lin.propagator(dt);
            // locate the pair index of (1,0) among representatives
            int pair_idx = -1;
            const auto& reps = basis->representatives();
            for (std::size_t j = 0; j < reps.size(); ++j) {
                const auto& m = basis->mode(static_cast<std::size_t>(reps[j]));
                if (m.kx == 1 && m.ky == 0) pair_idx = static_cast<int>(j);
            }
            REQUIRE(pair_idx >= 0);

            double zx = std::sqrt(2.0) * 0.70710678118654752440;  // cos coord of e_(1,0)
            double zy = 0.5 * zx;
            const int n_steps = static_cast<int>(std::round(t_end / dt));
            for (int n = 0; n < n_steps; ++n) {
                const auto [g1c, g1s] = gaussian_pair(
                    77, static_cast<std::uint32_t>(n), 0, static_cast<std::uint32_t>(rep),
                    static_cast<std::uint32_t>(pair_idx) |
                        (static_cast<std::uint32_t>(RngChannel::Q1) << 24));
                const auto [g2c, g2s] = gaussian_pair(
                    77, static_cast<std::uint32_t>(n), 0, static_cast<std::uint32_t>(rep),
                    static_cast<std::uint32_t>(pair_idx) |
                        (static_cast<std::uint32_t>(RngChannel::Q2) << 24));
                (void)g1s;
                (void)g2s;
                const double b1 = spec.sigma1_base * std::sqrt(dt * 1.0) * g1c;
                const double b2 = spec.sigma2_base * std::sqrt(dt * 0.8 / eps) * g2c;
                const double nzx = prop[0] * (zx + b1) + prop[1] * (zy + b2);
                const double nzy = prop[2] * (zx + b1) + prop[3] * (zy + b2);
                zx = nzx;
                zy = nzy;

                REQUIRE(stepper.step(st, s1, s2) == StepOutcome::Ok);
            }
            const double sx = st.x.cos_coord(pair_idx);
            const double sy = st.y.cos_coord(pair_idx);
            err_acc += std::sqrt((sx - zx) * (sx - zx) + (sy - zy) * (sy - zy));
        }
        errors.push_back(err_acc / 8.0);
    }
    // strong order one: halving dt roughly halves the error
    CHECK(errors[0] / errors[1] > 1.5);
    CHECK(errors[0] / errors[1] < 2.6);
    CHECK(errors[1] / errors[2] > 1.5);
    CHECK(errors[1] / errors[2] < 2.6);
}

TEST_CASE("auxiliary process with anchor = live X reproduces the coupled fast path") {
    auto basis = build_basis(2, 8);
    auto spec = linear_spec(0.3, 0.4, 0.8, 0.2, 0.3, 0.4);
    auto cov1 = CovarianceSpec::power_law(basis, 0.5, 2.0);
    auto cov2 = CovarianceSpec::power_law(basis, 0.5, 2.0);
    auto p = params_for(spec, cov1, cov2, 1.0, 0.0, 3.0, 0.25);
    IntegratorConfig cfg;
    cfg.dt = 2e-3;
    cfg.dt_fast = 5e-4;

    // coupled run recording the pre-step slow states
    CoupledStepper stepper(basis, p, spec, cov1, cov2, cfg);
    CoupledState st{sample_random_field(basis, 13, 0, 0), sample_random_field(basis, 13, 0, 1),
                    0.0};
    const VelocityField y0 = st.y;
    NoiseStream s1{55, 4, RngChannel::Q1, 0}, s2{55, 4, RngChannel::Q2, 0};
    std::vector<VelocityField> anchors;
    std::vector<VelocityField> y_path;
    for (int n = 0; n < 40; ++n) {
        anchors.push_back(st.x);
        REQUIRE(stepper.step(st, s1, s2) == StepOutcome::Ok);
        y_path.push_back(st.y);
    }

    // auxiliary replay on a fresh stream with the same identity
    VelocityField yhat = y0;
    NoiseStream s2b{55, 4, RngChannel::Q2, 0};
    for (int n = 0; n < 40; ++n) {
        REQUIRE(step_auxiliary(yhat, anchors[static_cast<std::size_t>(n)], p, spec, cov2, s2b,
                               cfg.dt, cfg) == StepOutcome::Ok);
        const auto& expect = y_path[static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < yhat.size(); ++i) {
            CHECK(yhat[i].real() == expect[i].real());
            CHECK(yhat[i].imag() == expect[i].imag());
        }
    }
}

TEST_CASE("deterministic energy balance closes at first order in dt") {
    auto basis = build_basis(3, 16);
    auto spec = linear_spec(0, 0, 0, 0, 0, 0);
    auto cov = CovarianceSpec::power_law(basis, 0.0, 2.0);
    auto p = params_for(spec, cov, cov, 0.8, 1.0, 3.0, 0.5);

    auto residual_for = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.dt_fast = dt;
        CoupledStepper stepper(basis, p, spec, cov, cov, cfg);
        CoupledState st{sample_random_field(basis, 17, 0, 0, 1.5), VelocityField::zero(basis),
                        0.0};
        NoiseStream s1{5, 0, RngChannel::Q1, 0}, s2{5, 0, RngChannel::Q2, 0};
        const double e0 = h_norm_sq(st.x);
        double budget = 0.0;
        const int n = static_cast<int>(std::round(0.5 / dt));
        for (int i = 0; i < n; ++i) {
            EnergyDiag d;
            REQUIRE(stepper.step(st, s1, s2, &d) == StepOutcome::Ok);
            budget += dt * (-2.0 * p.mu * d.v_norm_sq - 2.0 * p.beta * d.lp_pow +
                            2.0 * d.f_inner + d.hs_sq) +
                      2.0 * d.noise_inner;
        }
        return std::abs(h_norm_sq(st.x) - e0 - budget);
    };

    const double r1 = residual_for(4e-3);
    const double r2 = residual_for(2e-3);
    const double r3 = residual_for(1e-3);
    CHECK(r1 / r2 > 1.6);
    CHECK(r1 / r2 < 2.4);
    CHECK(r2 / r3 > 1.6);
    CHECK(r2 / r3 < 2.4);
}

TEST_CASE("stochastic energy balance residual is first order in the mean") {
    auto basis = build_basis(2, 12);
    CouplingSpec spec;
    spec.family = CouplingFamily::TanhDiagonal;
    spec.f_x = 0.2;
    spec.f_y = 0.3;
    spec.g_x = 0.5;
    spec.g_y = 0.1;
    spec.sigma1_base = 0.3;
    spec.sigma1_x = 0.1;
    spec.sigma2_base = 0.3;
    spec.sigma2_y = 0.15;
    REQUIRE(spec.validate());
    auto cov = CovarianceSpec::power_law(basis, 1.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.0, 1.0, 3.0, 0.5);
    REQUIRE(validate_assumptions(p, spec).pass());

    auto mean_residual = [&](double dt) {
        const int n_rep = 24;
        double acc = 0.0;
        for (int rep = 0; rep < n_rep; ++rep) {
            IntegratorConfig cfg;
            cfg.dt = dt;
            cfg.dt_fast = dt / 2.0;
            CoupledStepper stepper(basis, p, spec, cov, cov, cfg);
            CoupledState st{sample_random_field(basis, 29, 0, 0), VelocityField::zero(basis), 0.0};
            NoiseStream s1{91, static_cast<std::uint32_t>(rep), RngChannel::Q1, 0};
            NoiseStream s2{91, static_cast<std::uint32_t>(rep), RngChannel::Q2, 0};
            const double e0 = h_norm_sq(st.x);
            double budget = 0.0;
            const int n = static_cast<int>(std::round(1.0 / dt));
            for (int i = 0; i < n; ++i) {
                EnergyDiag d;
                REQUIRE(stepper.step(st, s1, s2, &d) == StepOutcome::Ok);
                budget += dt * (-2.0 * p.mu * d.v_norm_sq - 2.0 * p.beta * d.lp_pow +
                                2.0 * d.f_inner + d.hs_sq) +
                          2.0 * d.noise_inner;
            }
            acc += h_norm_sq(st.x) - e0 - budget;
        }
        return std::abs(acc / n_rep);
    };

    const double r_coarse = mean_residual(8e-3);
    const double r_fine = mean_residual(2e-3);
    CHECK(r_fine < r_coarse);
    CHECK(r_coarse < 0.05);  // absolute sanity at unit-scale fields
}

TEST_CASE("blow-up guard flags instead of clamping") {
    auto basis = build_basis(1, 8);
    auto spec = linear_spec(0, 0, 0, 0, 0, 1.0);
    auto cov = CovarianceSpec::power_law(basis, 1.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.0, 0.0, 3.0, 0.5);
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.dt_fast = 1e-2;
    cfg.blowup_threshold = 1e-4;  // absurdly low on purpose
    CoupledStepper stepper(basis, p, spec, cov, cov, cfg);
    CoupledState st{VelocityField::zero(basis), VelocityField::zero(basis), 0.0};
    NoiseStream s1{1, 0, RngChannel::Q1, 0}, s2{1, 0, RngChannel::Q2, 0};
    StepOutcome out = StepOutcome::Ok;
    for (int i = 0; i < 10 && out == StepOutcome::Ok; ++i) out = stepper.step(st, s1, s2);
    CHECK(out == StepOutcome::BlowUp);
}

TEST_CASE("inadmissible parameters are rejected at stepper construction") {
    auto basis = build_basis(1, 8);
    auto spec = linear_spec(0, 0, 0, 0.8, 0, 0);  // L_g = 0.8 -> xi < 0
    auto cov = CovarianceSpec::power_law(basis, 1.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.0, 0.0, 3.0, 0.5);
    IntegratorConfig cfg;
    CHECK_THROWS(CoupledStepper(basis, p, spec, cov, cov, cfg));
}

TEST_CASE("semi-implicit linear scheme follows the same heat decay to O(dt)") {
    auto basis = build_basis(1, 8);
    auto spec = linear_spec(0, 0, 0, 0, 0, 0);
    auto cov = CovarianceSpec::power_law(basis, 0.0, 2.0);
    auto p = params_for(spec, cov, cov, 1.0, 0.0, 3.0, 0.5);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.scheme = IntegratorConfig::Scheme::SemiImplicitLinear;
    AveragedStepper stepper(basis, p, spec, cov, cfg);
    auto x = VelocityField::unit_mode(basis, 1, 0);
    auto fbar = VelocityField::zero(basis);
    NoiseStream s{2, 0, RngChannel::Q1, 0};
    for (int i = 0; i < 1000; ++i) REQUIRE(stepper.step(x, fbar, s) == StepOutcome::Ok);
    CHECK(h_norm(x) == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}
