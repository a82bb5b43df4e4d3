#include "thinfilm/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thinfilm {

double explicit_dt_ceiling(const ModelConfig& config) {
    const double k2 = config.grid.kappa_sq_max();
    const double rate = config.epsilon_sq * k2 * k2 +
                        (config.gamma + phi(config.es, 0.0)) * k2;
    return 2.0 * 0.5 / rate;
}

void OracleConfig::validate() const {
    model.es.validate();
    model.grid.validate();
    if (model.grid.n1 > 32 || model.grid.n2 > 32)
        throw std::invalid_argument("OracleConfig: oracle grids are capped at 32");
    if (!(model.epsilon_sq > 0.0))
        throw std::invalid_argument("OracleConfig: epsilon_sq must be positive");
    if (!(dt_explicit > 0.0))
        throw std::invalid_argument("OracleConfig: dt_explicit must be positive");
    const double ceiling = explicit_dt_ceiling(model);
    if (dt_explicit > ceiling)
        throw std::invalid_argument("OracleConfig: dt_explicit=" +
                                    std::to_string(dt_explicit) +
                                    " above the stability ceiling " +
                                    std::to_string(ceiling));
}

RealField oracle_rhs(const RealField& h, const ModelConfig& config, double t) {
    SpectralField h_hat = forward(h);
    auto [gx, gy] = gradient(h_hat);
    auto [jx, jy] = flux(config.es, gx, gy);
    SpectralField div_j = divergence(jx, jy);
    if (config.dealias) dealias(div_j);

    std::vector<double> lap = laplacian_symbol(config.grid);
    SpectralField out(config.grid);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
        const double k2 = -lap[i];
        out.coeffs[i] = (-config.gamma * k2 - config.epsilon_sq * k2 * k2) *
                            h_hat.coeffs[i] -
                        div_j.coeffs[i];
    }
    RealField rhs = inverse(out);
    if (!config.zeta.is_zero()) {
        RealField z = config.zeta.sample(t, config.grid);
        for (std::size_t i = 0; i < rhs.values.size(); ++i) rhs.values[i] += z.values[i];
    }
    if (!all_finite(rhs)) throw std::runtime_error("oracle_rhs: non-finite value");
    return rhs;
}

RealField rk4_run(const RealField& h0, const OracleConfig& config, double t_end) {
    config.validate();
    if (!(h0.grid == config.model.grid))
        throw std::invalid_argument("rk4_run: h0 grid mismatch");

    const double dt = config.dt_explicit;
    const std::int64_t steps = std::llround(t_end / dt);
    RealField h = h0;
    const std::size_t n = h.values.size();
    for (std::int64_t s = 0; s < steps; ++s) {
        const double t = s * dt;
        RealField k1 = oracle_rhs(h, config.model, t);
        RealField u(h.grid);
        for (std::size_t i = 0; i < n; ++i) u.values[i] = h.values[i] + dt / 2.0 * k1.values[i];
        RealField k2 = oracle_rhs(u, config.model, t + dt / 2.0);
        for (std::size_t i = 0; i < n; ++i) u.values[i] = h.values[i] + dt / 2.0 * k2.values[i];
        RealField k3 = oracle_rhs(u, config.model, t + dt / 2.0);
        for (std::size_t i = 0; i < n; ++i) u.values[i] = h.values[i] + dt * k3.values[i];
        RealField k4 = oracle_rhs(u, config.model, t + dt);
        double max_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            h.values[i] += dt / 6.0 *
                           (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] +
                            k4.values[i]);
            max_abs = std::max(max_abs, std::abs(h.values[i]));
        }
        if (max_abs > 1e6)
            throw std::runtime_error("rk4_run: blow-up detected at t=" +
                                     std::to_string(t + dt) +
                                     " (dt_explicit too large for this problem)");
    }
    return h;
}

}  // namespace thinfilm
