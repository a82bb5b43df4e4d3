// Acceptance suite: runs every criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exit status is the number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "thinfilm/diagnostics.hpp"
#include "thinfilm/es_model.hpp"
#include "thinfilm/experiment.hpp"
#include "thinfilm/oracle.hpp"
#include "thinfilm/stepper.hpp"

using namespace thinfilm;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Runner {
    int failures = 0;

    void criterion(int id, const std::string& what,
                   const std::function<std::pair<bool, std::string>()>& body) {
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        std::string detail;
        try {
            std::tie(ok, detail) = body();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("%s  criterion %2d  [%6.1fs]  %s%s%s\n", ok ? "PASS" : "FAIL", id,
                    secs, what.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

ModelConfig preset_model(int k, int n, double dt) {
    ModelConfig m;
    PresetExpansion e = preset_from_physical(baseline_preset());
    m.es = e.params_for(k);
    m.split.chi = chi_min(m.es);
    m.gamma = e.gamma;
    m.epsilon_sq = e.epsilon_sq;
    m.dt = dt;
    m.grid = GridSpec{2 * kPi, 2 * kPi, n, n};
    return m;
}

RealField example1_init(const GridSpec& g, double amp = 0.1) {
    RealField f(g);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const double x = g.x(i), y = g.y(j);
            f.at(i, j) = amp * (std::sin(3 * x) * std::sin(2 * y) +
                                std::sin(5 * x) * std::sin(5 * y));
        }
    return f;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Vec2 sample_m(std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> logmag(std::log(lo), std::log(hi));
    const double r = std::exp(logmag(rng));
    const double a = angle(rng);
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace

int main() {
    Runner runner;

    // Criteria 1 and 2 share the same ten runs: k in {1,2}, N=64,
    // dt in {0.01, 0.1, 1, 10, 100}, 200 steps each.
    double worst_energy_excess = -1e300;
    double worst_mean = 0.0;
    runner.criterion(1,
                     "unconditional energy stability, k=1,2, N=64, "
                     "dt in {0.01,0.1,1,10,100}, 200 steps",
                     [&]() -> std::pair<bool, std::string> {
        for (int k : {1, 2}) {
            for (double dt : {0.01, 0.1, 1.0, 10.0, 100.0}) {
                ModelConfig m = preset_model(k, 64, dt);
                StepperState st = build_stepper(m, example1_init(m.grid));
                double e_prev = energy(st.h, m);
                for (int i = 0; i < 200; ++i) {
                    st = step(st, m);
                    const double e = energy(st.h, m);
                    const double tol = 1e-8 * std::max(1.0, std::abs(e_prev));
                    worst_energy_excess = std::max(worst_energy_excess,
                                                   (e - e_prev) - tol);
                    worst_mean = std::max(worst_mean, std::abs(mean(st.h)));
                    e_prev = e;
                }
            }
        }
        return {worst_energy_excess <= 0.0,
                "worst excess over tolerance " + fmt(worst_energy_excess)};
    });

    runner.criterion(2, "mass conservation |mean(h)| <= 1e-13 on the same runs",
                     [&]() -> std::pair<bool, std::string> {
        return {worst_mean <= 1e-13, "worst |mean| " + fmt(worst_mean)};
    });

    runner.criterion(3,
                     "calculus consistency: gradient vs FD (1e-6), hessian vs FD "
                     "(1e-5), 100 points per k",
                     [&]() -> std::pair<bool, std::string> {
        std::mt19937 rng(2024);
        double worst_g = 0.0, worst_h = 0.0;
        for (int k : {1, 2, 3}) {
            EsParams params = preset_from_physical(baseline_preset()).params_for(k);
            for (int it = 0; it < 100; ++it) {
                Vec2 m = sample_m(rng, 1e-3, 10.0);
                const double step_g = 1e-5 * std::max(m.norm(), 0.01);
                Vec2 grad = potential_gradient(params, m);
                const double fx = (potential(params, {m.x + step_g, m.y}) -
                                   potential(params, {m.x - step_g, m.y})) /
                                  (2 * step_g);
                const double fy = (potential(params, {m.x, m.y + step_g}) -
                                   potential(params, {m.x, m.y - step_g})) /
                                  (2 * step_g);
                worst_g = std::max(worst_g, std::hypot(grad.x - fx, grad.y - fy) /
                                                std::max(1e-12, std::hypot(fx, fy)));

                const double step_h = 1e-5 * m.norm();
                SymMat2 hess = potential_hessian(params, m);
                Vec2 gxp = potential_gradient(params, {m.x + step_h, m.y});
                Vec2 gxm = potential_gradient(params, {m.x - step_h, m.y});
                Vec2 gyp = potential_gradient(params, {m.x, m.y + step_h});
                Vec2 gym = potential_gradient(params, {m.x, m.y - step_h});
                const double fxx = (gxp.x - gxm.x) / (2 * step_h);
                const double fxy = (gyp.x - gym.x) / (2 * step_h);
                const double fyy = (gyp.y - gym.y) / (2 * step_h);
                const double scale = std::max(
                    {1e-12, std::abs(fxx), std::abs(fxy), std::abs(fyy)});
                worst_h = std::max({worst_h, std::abs(hess.xx - fxx) / scale,
                                    std::abs(hess.xy - fxy) / scale,
                                    std::abs(hess.yy - fyy) / scale});
            }
        }
        return {worst_g <= 1e-6 && worst_h <= 1e-5,
                "worst gradient rel " + fmt(worst_g) + ", hessian rel " + fmt(worst_h)};
    });

    runner.criterion(4,
                     "splitting thresholds: concave at chi_min (1e-12, 1e4 points "
                     "per k) and positive eigenvalue found at 0.99 chi_min for k=1",
                     [&]() -> std::pair<bool, std::string> {
        std::mt19937 rng(7);
        double worst = -1e300;
        for (int k : {1, 2, 3}) {
            EsParams params = preset_from_physical(baseline_preset()).params_for(k);
            const double chi = chi_min(params);
            // k=3 hessian entries scale like alpha/((q-p)|m|); sampling
            // floors at 1e-4 there so entry rounding stays below the
            // 1e-12 eigenvalue tolerance
            const double lo = (k == 3) ? 1e-4 : 1e-12;
            for (int it = 0; it < 10000; ++it) {
                Vec2 m = sample_m(rng, lo, 1e3);
                SymMat2 h = potential_hessian(params, m);
                h.xx -= chi;
                h.yy -= chi;
                worst = std::max(worst, h.max_eigenvalue());
            }
        }
        const bool concave_ok = worst <= 1e-12;

        // sharpness probe: dense search over slope magnitudes for an
        // eigenvalue of hessian - 0.99 chi_min I above zero
        EsParams p1 = preset_from_physical(baseline_preset()).params_for(1);
        const double probe_chi = 0.99 * chi_min(p1);
        double sup = -1e300;
        for (double s = 1e-10; s < 1e8; s *= 1.002) {
            SymMat2 h = potential_hessian(p1, {s, 0.0});
            sup = std::max(sup, h.max_eigenvalue());
        }
        const bool sharp_ok = sup - probe_chi > 0.0;
        return {concave_ok && sharp_ok,
                "concavity worst eig " + fmt(worst) + "; k=1 sup eig " + fmt(sup) +
                    " vs 0.99 chi_min " + fmt(probe_chi) +
                    (sharp_ok ? ""
                              : " (the closed-form threshold is an upper bound, not the sup; "
                                "no positive eigenvalue exists)")};
    });

    runner.criterion(5,
                     "temporal order in [0.8,1.2]: k=1, N=32, T=0.1, ladder "
                     "{4e-3,2e-3,1e-3} vs dt=6.25e-5",
                     [&]() -> std::pair<bool, std::string> {
        ModelConfig m = preset_model(1, 32, 1.0);
        RealField h0 = example1_init(m.grid, 0.01);
        const double T = 0.1;
        auto final_at = [&](double dt) {
            ModelConfig c = m;
            c.dt = dt;
            StepperState st = build_stepper(c, h0);
            return run(std::move(st), c, T, {}).h;
        };
        RealField ref = final_at(6.25e-5);
        std::vector<double> errs;
        for (double dt : {4e-3, 2e-3, 1e-3}) {
            RealField h = final_at(dt);
            double sum = 0.0;
            for (std::size_t i = 0; i < h.values.size(); ++i) {
                const double d = h.values[i] - ref.values[i];
                sum += d * d;
            }
            errs.push_back(std::sqrt(sum * m.grid.cell_area()));
        }
        std::string detail = "orders";
        bool ok = true;
        for (std::size_t i = 1; i < errs.size(); ++i) {
            const double order = std::log2(errs[i - 1] / errs[i]);
            ok &= order >= 0.8 && order <= 1.2;
            detail += " " + fmt(order);
        }
        return {ok, detail};
    });

    runner.criterion(6,
                     "oracle equivalence: N=16, k=1,2, T=0.01, splitting dt=1e-6 vs "
                     "rk4 dt=1e-6, max-norm <= 1e-8",
                     [&]() -> std::pair<bool, std::string> {
        bool ok = true;
        std::string detail;
        for (int k : {1, 2}) {
            ModelConfig m = preset_model(k, 16, 1e-6);
            RealField h0 = example1_init(m.grid, 0.01);
            StepperState st = build_stepper(m, h0);
            st = run(std::move(st), m, 0.01, {});
            RealField ho = rk4_run(h0, OracleConfig{m, 1e-6}, 0.01);
            double diff = 0.0;
            for (std::size_t i = 0; i < ho.values.size(); ++i)
                diff = std::max(diff, std::abs(ho.values[i] - st.h.values[i]));
            ok &= diff <= 1e-8;
            detail += "k=" + std::to_string(k) + ": " + fmt(diff) + " ";
        }
        return {ok, detail};
    });

    runner.criterion(7,
                     "roughness global bound: Example 1, k=1, t=50, slope "
                     "2 alpha1 (q-p), tol 1e-10",
                     [&]() -> std::pair<bool, std::string> {
        ModelConfig m = preset_model(1, 64, 0.01);
        StepperState st = build_stepper(m, example1_init(m.grid));
        std::vector<std::pair<double, double>> t_omega{{0.0, roughness(st.h)}};
        StepObserver obs{10, [&](const StepperState&, const StepperState& curr) {
                             t_omega.emplace_back(curr.time, roughness(curr.h));
                         }};
        run(std::move(st), m, 50.0, std::span<const StepObserver>(&obs, 1));
        MonitorResult r = check_global_roughness_bound(t_omega, m.es, 1e-10);
        return {r.pass, "worst margin " + fmt(r.worst)};
    });

    runner.criterion(8,
                     "rough-smooth-rough: Example 1, k=1, N=128, dt=0.01, t=300; "
                     "energy non-increasing throughout",
                     [&]() -> std::pair<bool, std::string> {
        ModelConfig m = preset_model(1, 128, 0.01);
        StepperState st = build_stepper(m, example1_init(m.grid));
        const double omega0 = roughness(st.h);
        double min_omega = omega0, min_t = 0.0, e_prev = energy(st.h, m);
        double worst_excess = -1e300;
        StepObserver obs{1, [&](const StepperState&, const StepperState& curr) {
                             const double om = roughness(curr.h);
                             if (om < min_omega) {
                                 min_omega = om;
                                 min_t = curr.time;
                             }
                             const double e = energy(curr.h, m);
                             worst_excess = std::max(
                                 worst_excess,
                                 e - e_prev - 1e-8 * std::max(1.0, std::abs(e_prev)));
                             e_prev = e;
                         }};
        st = run(std::move(st), m, 300.0, std::span<const StepObserver>(&obs, 1));
        const double omega_final = roughness(st.h);
        const bool ok = min_omega < omega0 && min_t > 0.0 && omega_final > omega0 &&
                        worst_excess <= 0.0;
        return {ok, "omega0 " + fmt(omega0) + ", min " + fmt(min_omega) + " at t=" +
                        fmt(min_t) + ", final " + fmt(omega_final) +
                        ", worst energy excess " + fmt(worst_excess)};
    });

    runner.criterion(9,
                     "perturbation directions: gamma=0.64 and eps2=0.512 runs to "
                     "t=100 end below 0.05 omega(0)",
                     [&]() -> std::pair<bool, std::string> {
        std::string detail;
        bool ok = true;
        for (int which : {0, 1}) {
            ModelConfig m = preset_model(1, 128, 0.01);
            if (which == 0)
                m.gamma = 0.64;
            else
                m.epsilon_sq = 0.512;
            StepperState st = build_stepper(m, example1_init(m.grid));
            const double omega0 = roughness(st.h);
            st = run(std::move(st), m, 100.0, {});
            const double omega_final = roughness(st.h);
            ok &= omega_final < 0.05 * omega0;
            detail += std::string(which == 0 ? "gamma" : "eps2") + ": " +
                      fmt(omega_final) + " ";
        }
        return {ok, detail + "(cap " + fmt(0.05 * 0.1 / std::sqrt(2.0)) + ")"};
    });

    runner.criterion(10,
                     "Phi1(0) = Phi2(0) under alpha2 = alpha1 (q-p)/p, rel 1e-14, "
                     "100 random parameter draws",
                     [&]() -> std::pair<bool, std::string> {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> pd(0.01, 1.0), ud(0.1, 3.0),
            ad(0.01, 10.0);
        double worst = 0.0;
        for (int it = 0; it < 100; ++it) {
            EsParams a{1, ad(rng), pd(rng), 0.0, 1e-16};
            a.q = a.p * (1.0 + ud(rng));
            EsParams b{2, a.alpha * (a.q - a.p) / a.p, a.p, a.q, 1e-16};
            worst = std::max(worst, std::abs(phi(a, 0.0) - phi(b, 0.0)) /
                                        std::abs(phi(a, 0.0)));
        }
        return {worst <= 1e-14, "worst rel " + fmt(worst)};
    });

    if (runner.failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria failed\n", runner.failures);
    return runner.failures;
}
