#include "doctest.h"

#include <cmath>

#include "mscbf/basis.hpp"
#include "mscbf/field.hpp"
#include "mscbf/operators.hpp"
#include "oracles.hpp"

using namespace mscbf;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("k_max=1 basis enumerates the 8 nonzero wave-vectors") {
    auto basis = build_basis(1, 8);
    REQUIRE(basis->mode_count() == 8);
    std::vector<double> lambdas;
    for (const auto& m : basis->modes()) lambdas.push_back(m.lambda);
    CHECK(lambdas == std::vector<double>{1, 1, 1, 1, 2, 2, 2, 2});
    CHECK(basis->lambda_min() == 1.0);
}

TEST_CASE("grid below the order-2 dealias rule is rejected") {
    CHECK_THROWS(build_basis(1, 2));
    CHECK_THROWS(build_basis(4, 11));
    CHECK_NOTHROW(build_basis(4, 12));
}

TEST_CASE("smallest eigenvalue is 1 for any basis") {
    for (int k : {1, 2, 4}) {
        auto basis = build_basis(k, 6 * k);
        CHECK(basis->lambda_min() == 1.0);
    }
}

TEST_CASE("modes are closed under negation and exactly divergence-free") {
    auto basis = build_basis(4, 24);
    CHECK(basis->mode_count() == 80);  // (2*4+1)^2 - 1
    for (const auto& m : basis->modes()) {
        const int j = basis->mode_index(-m.kx, -m.ky);
        REQUIRE(j >= 0);
        CHECK(basis->mode(static_cast<std::size_t>(j)).conj ==
              basis->mode_index(m.kx, m.ky));
        // divergence-free exactly at integer level, to one ulp after normalization
        CHECK(m.kx * m.pol_num_x + m.ky * m.pol_num_y == 0);
        CHECK(std::abs(m.kx * m.pol_x + m.ky * m.pol_y) <= 8.0 * 1e-16);
        CHECK(basis->mode(static_cast<std::size_t>(j)).pol_x == m.pol_x);
        CHECK(std::abs(m.pol_x * m.pol_x + m.pol_y * m.pol_y - 1.0) < 1e-15);
    }
    std::size_t reps = 0;
    for (const auto& m : basis->modes()) reps += m.representative ? 1 : 0;
    CHECK(reps == basis->mode_count() / 2);
}

TEST_CASE("unit modes are H-orthonormal eigenfunctions") {
    auto basis = build_basis(2, 8);
    auto e10 = VelocityField::unit_mode(basis, 1, 0);
    auto e01 = VelocityField::unit_mode(basis, 0, 1);
    CHECK(h_norm(e10) == doctest::Approx(1.0));
    CHECK(v_norm(e10) == doctest::Approx(1.0));
    CHECK(inner_h(e10, e01) == doctest::Approx(0.0));
    auto e11 = VelocityField::unit_mode(basis, 1, 1);
    CHECK(v_norm(e11) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("synthesis agrees with direct trigonometric summation") {
    auto basis = build_basis(3, 12);
    auto u = sample_random_field(basis, 99, 0, 0);
    const int n = basis->grid();
    std::vector<double> gx(static_cast<std::size_t>(n) * n), gy(gx.size());
    basis->synthesize(u.coeffs(), gx.data(), gy.data());
    const double h = kTwoPi / n;
    for (int a = 0; a < n; a += 5) {
        for (int b = 0; b < n; b += 3) {
            const auto v = oracle::eval_point(u, a * h, b * h);
            CHECK(gx[static_cast<std::size_t>(a) * n + b] == doctest::Approx(v[0]).epsilon(1e-10));
            CHECK(gy[static_cast<std::size_t>(a) * n + b] == doctest::Approx(v[1]).epsilon(1e-10));
        }
    }
}

TEST_CASE("Leray projection round-trips retained divergence-free fields") {
    auto basis = build_basis(4, 24);
    auto u = sample_random_field(basis, 7, 1, 0);
    const int n = basis->grid();
    GridField g;
    g.grid = n;
    g.x.resize(static_cast<std::size_t>(n) * n);
    g.y.resize(g.x.size());
    basis->synthesize(u.coeffs(), g.x.data(), g.y.data());
    auto back = leray_project(basis, g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(std::abs(back[i] - u[i]) < 1e-12);
    }
}

TEST_CASE("pure gradients project to zero") {
    auto basis = build_basis(4, 24);
    const int n = basis->grid();
    GridField g;
    g.grid = n;
    g.x.resize(static_cast<std::size_t>(n) * n);
    g.y.resize(g.x.size());
    const double h = kTwoPi / n;
    // grad of phi = sin(x1) + cos(2 x2): (cos(x1), -2 sin(2 x2))
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            g.x[static_cast<std::size_t>(a) * n + b] = std::cos(a * h);
            g.y[static_cast<std::size_t>(a) * n + b] = -2.0 * std::sin(2.0 * b * h);
        }
    }
    auto p = leray_project(basis, g);
    CHECK(h_norm(p) < 1e-12);
}

TEST_CASE("divergence-free part plus gradient projects onto the former") {
    auto basis = build_basis(2, 12);
    auto e = VelocityField::unit_mode(basis, 1, 0);
    const int n = basis->grid();
    GridField g;
    g.grid = n;
    g.x.resize(static_cast<std::size_t>(n) * n);
    g.y.resize(g.x.size());
    basis->synthesize(e.coeffs(), g.x.data(), g.y.data());
    const double h = kTwoPi / n;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            g.x[static_cast<std::size_t>(a) * n + b] += std::cos(a * h);  // grad sin(x1)
        }
    }
    auto p = leray_project(basis, g);
    auto diff = p - e;
    CHECK(h_norm(diff) < 1e-12);
}

TEST_CASE("projection is idempotent and self-adjoint on grid fields") {
    auto basis = build_basis(3, 16);
    const int n = basis->grid();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    GridField v, w;
    v.grid = w.grid = n;
    v.x.resize(n2);
    v.y.resize(n2);
    w.x.resize(n2);
    w.y.resize(n2);
    const double h = kTwoPi / n;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double x1 = a * h, x2 = b * h;
            v.x[static_cast<std::size_t>(a) * n + b] = std::sin(x1 + 2 * x2) + 0.3 * std::cos(x2);
            v.y[static_cast<std::size_t>(a) * n + b] = std::cos(2 * x1) - 0.7 * std::sin(x1 - x2);
            w.x[static_cast<std::size_t>(a) * n + b] = std::cos(x1) * std::sin(x2);
            w.y[static_cast<std::size_t>(a) * n + b] = std::sin(2 * x2) + 0.1;
        }
    }
    auto pv = leray_project(basis, v);
    auto pw = leray_project(basis, w);

    GridField pv_grid;
    pv_grid.grid = n;
    pv_grid.x.resize(n2);
    pv_grid.y.resize(n2);
    basis->synthesize(pv.coeffs(), pv_grid.x.data(), pv_grid.y.data());
    auto pv_again = leray_project(basis, pv_grid);
    for (std::size_t i = 0; i < pv.size(); ++i) CHECK(std::abs(pv_again[i] - pv[i]) < 1e-12);

    // <Pv, w> = <v, Pw> via grid quadrature
    const double area = basis->cell_area();
    GridField pw_grid;
    pw_grid.grid = n;
    pw_grid.x.resize(n2);
    pw_grid.y.resize(n2);
    basis->synthesize(pw.coeffs(), pw_grid.x.data(), pw_grid.y.data());
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < n2; ++i) {
        lhs += pv_grid.x[i] * w.x[i] + pv_grid.y[i] * w.y[i];
        rhs += v.x[i] * pw_grid.x[i] + v.y[i] * pw_grid.y[i];
    }
    CHECK(lhs * area == doctest::Approx(rhs * area).epsilon(1e-12));
}

TEST_CASE("dealias mask marks exactly the retained wavenumbers") {
    auto basis = build_basis(2, 8);
    const auto& mask = basis->dealias_mask();
    std::size_t kept = 0;
    for (auto m : mask) kept += m;
    CHECK(kept == basis->mode_count());
}

TEST_CASE("grid mismatch is rejected by the projection") {
    auto basis = build_basis(2, 12);
    GridField g;
    g.grid = 8;
    g.x.assign(64, 0.0);
    g.y.assign(64, 0.0);
    CHECK_THROWS(leray_project(basis, g));
}
