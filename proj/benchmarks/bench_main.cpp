#include <benchmark/benchmark.h>

#include "mscbf/dynamics.hpp"
#include "mscbf/noise.hpp"
#include "mscbf/operators.hpp"

using namespace mscbf;

namespace {

BasisPtr bench_basis() {
    static BasisPtr basis = build_basis(4, 24);
    return basis;
}

CouplingSpec bench_spec(CouplingFamily family) {
    CouplingSpec spec;
    spec.family = family;
    spec.f_y = 0.8;
    spec.g_x = 1.0;
    spec.g_y = 0.25;
    spec.sigma1_base = 0.25;
    spec.sigma2_base = 0.3;
    if (family == CouplingFamily::TanhDiagonal) spec.sigma2_y = 0.15;
    spec.validate();
    return spec;
}

ModelParams bench_params(const CouplingSpec& spec, double beta, double eps) {
    ModelParams p;
    p.mu = 1.0;
    p.beta = beta;
    p.r = 3.0;
    p.epsilon = eps;
    const auto cc = certified_constants(spec, 1.0, 1.0);
    p.l_g = cc.l_g;
    p.l_sigma2 = cc.l_sigma2;
    p.c_lip = cc.c_lip;
    return p;
}

void BM_Convection(benchmark::State& state) {
    auto basis = bench_basis();
    auto u = sample_random_field(basis, 1, 0, 0);
    auto v = sample_random_field(basis, 1, 0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_convection(u, v));
    }
}
BENCHMARK(BM_Convection);

void BM_Damping(benchmark::State& state) {
    auto basis = bench_basis();
    auto u = sample_random_field(basis, 1, 0, 0);
    const double r = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_damping(u, r));
    }
}
BENCHMARK(BM_Damping)->Arg(3)->Arg(5);

void BM_LerayProject(benchmark::State& state) {
    auto basis = bench_basis();
    auto u = sample_random_field(basis, 1, 0, 0);
    const int n = basis->grid();
    GridField g;
    g.grid = n;
    g.x.resize(static_cast<std::size_t>(n) * n);
    g.y.resize(g.x.size());
    basis->synthesize(u.coeffs(), g.x.data(), g.y.data());
    for (auto _ : state) {
        benchmark::DoNotOptimize(leray_project(basis, g));
    }
}
BENCHMARK(BM_LerayProject);

void BM_WienerIncrement(benchmark::State& state) {
    auto basis = bench_basis();
    auto cov = CovarianceSpec::power_law(basis, 1.0, 2.0);
    NoiseStream s{1, 0, RngChannel::Q2, 0};
    VelocityField dw(basis);
    for (auto _ : state) {
        sample_increment_into(s, cov, 1e-3, dw);
        benchmark::DoNotOptimize(dw);
    }
}
BENCHMARK(BM_WienerIncrement);

// one macro step including the fast sub-cycle; range = n_sub
void BM_CoupledStep(benchmark::State& state) {
    auto basis = bench_basis();
    auto spec = bench_spec(CouplingFamily::TanhDiagonal);
    const int n_sub = static_cast<int>(state.range(0));
    auto params = bench_params(spec, 0.0, 1.0 / n_sub);
    auto cov1 = CovarianceSpec::power_law(basis, 1.0, 2.0);
    auto cov2 = CovarianceSpec::power_law(basis, 0.5, 2.0);
    IntegratorConfig icfg;
    icfg.dt = 1e-3;
    icfg.dt_fast = icfg.dt / n_sub;
    CoupledStepper stepper(basis, params, spec, cov1, cov2, icfg);
    CoupledState st{VelocityField::unit_mode(basis, 1, 0), VelocityField::zero(basis), 0.0};
    NoiseStream s1{1, 0, RngChannel::Q1, 0}, s2{1, 0, RngChannel::Q2, 0};
    for (auto _ : state) {
        stepper.step(st, s1, s2);
        benchmark::DoNotOptimize(st);
    }
    state.SetItemsProcessed(state.iterations() * n_sub);
}
BENCHMARK(BM_CoupledStep)->Arg(1)->Arg(10)->Arg(100);

void BM_FrozenStep(benchmark::State& state) {
    auto basis = bench_basis();
    auto spec = bench_spec(CouplingFamily::Linear);
    auto params = bench_params(spec, 0.0, 0.5);
    auto cov2 = CovarianceSpec::power_law(basis, 1.0, 2.0);
    FrozenStepper stepper(basis, params, spec, cov2, 1e-3);
    auto x = VelocityField::unit_mode(basis, 1, 0);
    auto y = VelocityField::zero(basis);
    NoiseStream s{1, 0, RngChannel::Q2bar, 0};
    for (auto _ : state) {
        stepper.step(y, x, s);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_FrozenStep);

}  // namespace

BENCHMARK_MAIN();
