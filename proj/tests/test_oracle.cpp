#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_helpers.hpp"
#include "thinfilm/diagnostics.hpp"
#include "thinfilm/oracle.hpp"

using namespace thinfilm;
using namespace thinfilm::test;

namespace {

ModelConfig small_model(int k, int n) {
    ModelConfig m;
    PresetExpansion e = preset_from_physical(baseline_preset());
    m.es = e.params_for(k);
    m.split.chi = chi_min(m.es);
    m.gamma = e.gamma;
    m.epsilon_sq = e.epsilon_sq;
    m.dt = 1e-6;
    m.grid = square_grid(n);
    return m;
}

RealField smooth_init(const GridSpec& g, double amp) {
    return make_field(g, [amp](double x, double y) {
        return amp * (std::sin(3 * x) * std::sin(2 * y) +
                      std::sin(5 * x) * std::sin(5 * y));
    });
}

}  // namespace

TEST_CASE("oracle config validation") {
    ModelConfig m = small_model(1, 16);
    const double ceiling = explicit_dt_ceiling(m);
    CHECK(ceiling > 0.0);
    CHECK_NOTHROW(OracleConfig{m, 0.9 * ceiling}.validate());
    CHECK_THROWS(OracleConfig{m, 1.1 * ceiling}.validate());
    CHECK_THROWS(OracleConfig{m, 0.0}.validate());
    ModelConfig big = small_model(1, 64);
    CHECK_THROWS(OracleConfig{big, 1e-8}.validate());
}

TEST_CASE("rhs vanishes on the flat state") {
    ModelConfig m = small_model(1, 16);
    RealField r = oracle_rhs(RealField(m.grid), m, 0.0);
    for (double v : r.values) CHECK(v == 0.0);
}

TEST_CASE("rhs agrees with the weak-form pairing on basis modes") {
    ModelConfig m = small_model(1, 24);
    m.dealias = true;
    SpectralField F = forward(smooth_init(m.grid, 0.3));
    dealias(F);
    RealField h = inverse(F);
    RealField rhs = oracle_rhs(h, m, 0.0);

    SpectralField h_hat = forward(h);
    auto [gx, gy] = gradient(h_hat);
    auto [jx, jy] = flux(m.es, gx, gy);
    std::vector<double> lap = laplacian_symbol(m.grid);
    SpectralField lap_h = h_hat;
    for (std::size_t i = 0; i < lap_h.coeffs.size(); ++i) lap_h.coeffs[i] *= lap[i];
    RealField lap_field = inverse(lap_h);
    SpectralField bih = h_hat;
    for (std::size_t i = 0; i < bih.coeffs.size(); ++i) bih.coeffs[i] *= lap[i] * lap[i];
    RealField bih_field = inverse(bih);

    // <rhs, phi> must equal -gamma <grad h, grad phi> - eps2 <lap h, lap phi>
    // + <J, grad phi> for retained (dealiased) basis modes phi.
    auto quad = [&](const RealField& a, const RealField& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
        return s * m.grid.cell_area();
    };
    for (auto [x1, x2] : {std::pair{1, 0}, {2, 1}, {0, 3}, {4, 4}}) {
        RealField phi_mode = make_field(m.grid, [&](double x, double y) {
            return std::cos(x1 * x) * std::cos(x2 * y) +
                   std::sin(x1 * x + x2 * y);
        });
        SpectralField phi_hat = forward(phi_mode);
        auto [px, py] = gradient(phi_hat);
        SpectralField phi_lap = phi_hat;
        for (std::size_t i = 0; i < phi_lap.coeffs.size(); ++i)
            phi_lap.coeffs[i] *= lap[i];
        RealField phi_lap_field = inverse(phi_lap);

        const double lhs = quad(rhs, phi_mode);
        const double rhs_weak = -m.gamma * (quad(gx, px) + quad(gy, py)) -
                                m.epsilon_sq * quad(lap_field, phi_lap_field) +
                                quad(jx, px) + quad(jy, py);
        CHECK(std::abs(lhs - rhs_weak) <= 1e-12 * std::max(1.0, std::abs(rhs_weak)));
    }
}

TEST_CASE("rhs linearizes to the per-mode rate (Phi(0)-gamma) k^2 - eps2 k^4") {
    ModelConfig m = small_model(1, 16);
    const double a = 1e-8;
    RealField h = make_field(m.grid, [a](double x, double) { return a * std::sin(x); });
    RealField r = oracle_rhs(h, m, 0.0);
    // kappa^2 = kappa^4 = 1 at mode (1,0); the uphill ES flux destabilizes
    const double rate = (phi(m.es, 0.0) - m.gamma) * 1.0 - m.epsilon_sq * 1.0;
    for (int i = 0; i < m.grid.n1; ++i)
        for (int j = 0; j < m.grid.n2; ++j)
            CHECK(std::abs(r.at(i, j) - rate * h.at(i, j)) <= 1e-4 * std::abs(rate) * a);
}

TEST_CASE("rk4 basics") {
    ModelConfig m = small_model(1, 16);
    OracleConfig oc{m, 1e-4};
    CHECK(max_abs_diff(rk4_run(RealField(m.grid), oc, 0.01), RealField(m.grid)) == 0.0);
    CHECK_THROWS(rk4_run(RealField(square_grid(8)), oc, 0.01));
}

TEST_CASE("rk4 self-convergence under dt halving") {
    ModelConfig m = small_model(1, 16);
    RealField h0 = smooth_init(m.grid, 0.01);
    RealField a = rk4_run(h0, OracleConfig{m, 2e-5}, 0.005);
    RealField b = rk4_run(h0, OracleConfig{m, 1e-5}, 0.005);
    CHECK(max_abs_diff(a, b) <= 1e-12);
}

TEST_CASE("oracle energy decreases for zeta = 0") {
    ModelConfig m = small_model(1, 16);
    RealField h = smooth_init(m.grid, 0.05);
    const double dt = 1e-4;
    OracleConfig oc{m, dt};
    double e_prev = energy(h, m);
    for (int block = 0; block < 20; ++block) {
        h = rk4_run(h, oc, 100 * dt);
        const double e = energy(h, m);
        CHECK(e - e_prev <= 1e-10);
        e_prev = e;
    }
}

TEST_CASE("splitting stepper tracks the oracle on a short horizon") {
    // same semi-discrete system, independent integrators
    for (int k : {1, 2}) {
        ModelConfig m = small_model(k, 16);
        RealField h0 = smooth_init(m.grid, 0.01);
        const double T = 0.001;
        StepperState st = build_stepper(m, h0);
        st = run(std::move(st), m, T, {});
        RealField ho = rk4_run(h0, OracleConfig{m, m.dt}, T);
        CHECK(max_abs_diff(st.h, ho) <= 1e-8);
    }
}
