#pragma once

// Convex-concave splitting semi-implicit time integrator for
//   dh/dt = zeta + gamma lap h - eps2 lap^2 h - div(Phi(|grad h|) grad h).
//
// The quadratic split part chi/2 |grad h|^2 is treated implicitly together
// with the gamma and eps2 terms (a per-mode diagonal solve in Fourier
// space); the concave remainder is evaluated pseudo-spectrally at the
// previous time level. Unconditionally energy stable for chi >= chi_min.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "thinfilm/es_model.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

// Deposition source: identically zero, a fixed field, or a time-indexed
// provider. Fields are made mean-free on ingestion so the mean height
// decouples.
class ZetaSource {
public:
    ZetaSource() = default;  // zero

    static ZetaSource zero() { return ZetaSource(); }
    static ZetaSource fixed(RealField field);
    static ZetaSource provider(std::function<RealField(double)> fn);

    bool is_zero() const { return kind_ == Kind::Zero; }

    // Mean-free sample at time t; valid only when !is_zero().
    RealField sample(double t, const GridSpec& grid) const;

private:
    enum class Kind { Zero, Fixed, Provider };
    Kind kind_ = Kind::Zero;
    RealField field_;
    std::function<RealField(double)> fn_;
};

struct ModelConfig {
    EsParams es;
    SplittingParams split;
    double gamma = 0.0;       // >= 0
    double epsilon_sq = 0.0;  // > 0 (the leading dissipation; 0 is rejected)
    ZetaSource zeta;
    double dt = 0.0;  // > 0
    GridSpec grid;
    bool dealias = false;

    void validate() const;
};

// Per-mode denominator of the implicit solve,
//   D(xi) = 1/dt + (gamma+chi)|kappa|^2 + eps2 |kappa|^4 >= 1/dt,
// so the scheme is uniquely solvable for any dt.
struct ImplicitSymbol {
    std::vector<double> d;  // half-spectrum layout

    static ImplicitSymbol make(const ModelConfig& config);
};

struct StepperState {
    RealField h;          // current iterate (mean-free)
    SpectralField h_hat;  // spectral mirror of h; the (0,0) mode is kept
                          // exactly per the mean-free convention
    std::int64_t step_index = 0;
    double time = 0.0;
    ImplicitSymbol symbol;
};

// Projects h0 to its mean-free part and precomputes the implicit symbol.
StepperState build_stepper(const ModelConfig& config, const RealField& h0);

// Spectral representation of div(grad_F G_-(grad h)) evaluated at the
// state's field: gradient (spectral), -Phi(|m|)m - chi m (pointwise),
// divergence (spectral). 2/3-rule mask applied to the pointwise product
// when config.dealias is set. The mean mode is exactly zero.
SpectralField explicit_term(const StepperState& state, const ModelConfig& config);

// One step of the scheme:
//   h^i = F^-1[ (h^{i-1}^/dt + zeta^i^ + N^) / D ],  N^ = explicit_term.
// zeta is sampled at the new time level.
StepperState step(const StepperState& state, const ModelConfig& config);

struct StepObserver {
    std::int64_t every = 1;  // fire when step_index % every == 0
    std::function<void(const StepperState& prev, const StepperState& curr)> fn;
};

// Repeated step() until t_end (nearest step count); deterministic given
// the config. Observer exceptions abort the run with step context.
StepperState run(StepperState state, const ModelConfig& config, double t_end,
                 std::span<const StepObserver> observers);

}  // namespace thinfilm
