#include "thinfilm/stepper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thinfilm {

ZetaSource ZetaSource::fixed(RealField field) {
    ZetaSource z;
    z.kind_ = Kind::Fixed;
    const double m = mean(field);
    for (double& v : field.values) v -= m;
    z.field_ = std::move(field);
    return z;
}

ZetaSource ZetaSource::provider(std::function<RealField(double)> fn) {
    ZetaSource z;
    z.kind_ = Kind::Provider;
    z.fn_ = std::move(fn);
    return z;
}

RealField ZetaSource::sample(double t, const GridSpec& grid) const {
    switch (kind_) {
        case Kind::Zero:
            return RealField(grid);
        case Kind::Fixed:
            if (!(field_.grid == grid))
                throw std::invalid_argument("zeta: fixed field grid mismatch");
            return field_;
        default: {
            RealField f = fn_(t);
            if (!(f.grid == grid))
                throw std::invalid_argument("zeta: provider returned wrong grid");
            const double m = mean(f);
            for (double& v : f.values) v -= m;
            return f;
        }
    }
}

void ModelConfig::validate() const {
    es.validate();
    grid.validate();
    if (!(epsilon_sq > 0.0))
        throw std::invalid_argument("ModelConfig: epsilon_sq must be positive "
                                    "(the implicit operator loses coercivity at 0)");
    if (gamma < 0.0) throw std::invalid_argument("ModelConfig: gamma must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("ModelConfig: dt must be positive");
    const double threshold = chi_min(es);
    if (split.chi < threshold)
        throw std::invalid_argument("ModelConfig: chi=" + std::to_string(split.chi) +
                                    " below the concavity threshold chi_min=" +
                                    std::to_string(threshold) + " for variant " +
                                    std::to_string(es.variant));
}

ImplicitSymbol ImplicitSymbol::make(const ModelConfig& config) {
    ImplicitSymbol sym;
    std::vector<double> lap = laplacian_symbol(config.grid);
    sym.d.resize(lap.size());
    const double inv_dt = 1.0 / config.dt;
    const double c2 = config.gamma + config.split.chi;
    for (std::size_t i = 0; i < lap.size(); ++i) {
        const double k2 = -lap[i];
        sym.d[i] = inv_dt + c2 * k2 + config.epsilon_sq * k2 * k2;
    }
    return sym;
}

StepperState build_stepper(const ModelConfig& config, const RealField& h0) {
    config.validate();
    if (!(h0.grid == config.grid))
        throw std::invalid_argument("build_stepper: h0 grid mismatch");
    if (!all_finite(h0)) throw std::invalid_argument("build_stepper: non-finite h0");

    StepperState st;
    st.h = h0;
    const double m = mean(h0);
    for (double& v : st.h.values) v -= m;
    st.h_hat = forward(st.h);
    st.h_hat.coeffs[0] = 0.0;  // mean-free exactly
    st.symbol = ImplicitSymbol::make(config);
    return st;
}

SpectralField explicit_term(const StepperState& state, const ModelConfig& config) {
    auto [gx, gy] = gradient(state.h_hat);
    auto [jx, jy] = flux(config.es, gx, gy);
    const double chi = config.split.chi;
    // grad_F G_-(m) = -Phi(|m|) m - chi m
    RealField vx(config.grid), vy(config.grid);
    for (std::size_t i = 0; i < vx.values.size(); ++i) {
        vx.values[i] = -jx.values[i] - chi * gx.values[i];
        vy.values[i] = -jy.values[i] - chi * gy.values[i];
    }
    if (config.dealias) {
        SpectralField fx = forward(vx), fy = forward(vy);
        dealias(fx);
        dealias(fy);
        SpectralField out = divergence(inverse(fx), inverse(fy));
        out.coeffs[0] = 0.0;
        return out;
    }
    SpectralField out = divergence(vx, vy);
    out.coeffs[0] = 0.0;
    return out;
}

StepperState step(const StepperState& state, const ModelConfig& config) {
    SpectralField nhat = explicit_term(state, config);
    const double inv_dt = 1.0 / config.dt;
    // time is kept as step_index * dt exactly (no accumulation drift)
    const double t_new = static_cast<double>(state.step_index + 1) * config.dt;

    SpectralField rhs(config.grid);
    if (!config.zeta.is_zero()) {
        rhs = forward(config.zeta.sample(t_new, config.grid));
        rhs.coeffs[0] = 0.0;
    }
    StepperState next;
    next.h_hat = SpectralField(config.grid);
    for (std::size_t i = 0; i < nhat.coeffs.size(); ++i) {
        next.h_hat.coeffs[i] =
            (state.h_hat.coeffs[i] * inv_dt + rhs.coeffs[i] + nhat.coeffs[i]) /
            state.symbol.d[i];
    }
    next.h = inverse(next.h_hat);
    next.step_index = state.step_index + 1;
    next.time = t_new;
    next.symbol = state.symbol;
    if (!all_finite(next.h))
        throw std::runtime_error("step: non-finite field at step " +
                                 std::to_string(next.step_index));
    return next;
}

StepperState run(StepperState state, const ModelConfig& config, double t_end,
                 std::span<const StepObserver> observers) {
    if (t_end < state.time - 1e-12 * config.dt)
        throw std::invalid_argument("run: t_end precedes current time");
    const std::int64_t steps = std::llround((t_end - state.time) / config.dt);
    for (std::int64_t i = 0; i < steps; ++i) {
        StepperState next = step(state, config);
        for (const StepObserver& obs : observers) {
            if (obs.every > 0 && next.step_index % obs.every == 0) {
                try {
                    obs.fn(state, next);
                } catch (const std::exception& e) {
                    throw std::runtime_error("observer failed at step " +
                                             std::to_string(next.step_index) + ": " +
                                             e.what());
                }
            }
        }
        state = std::move(next);
    }
    return state;
}

}  // namespace thinfilm
