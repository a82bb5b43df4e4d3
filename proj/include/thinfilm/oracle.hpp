#pragma once

// Independent cross-check integrator: classical RK4 on the unsplit
// semi-discrete system, restricted to small grids. Orders of magnitude
// slower than the splitting stepper and conditionally stable; used to
// validate the stepper, never to run experiments.

#include "thinfilm/stepper.hpp"

namespace thinfilm {

// Explicit-stepping ceiling 2*safety / (eps2 kappa_max^4 +
// (gamma + Phi(0)) kappa_max^2), safety = 0.5; Phi(0) is the worst-case
// destabilizing linear rate.
double explicit_dt_ceiling(const ModelConfig& config);

struct OracleConfig {
    ModelConfig model;          // splitting parameters are ignored
    double dt_explicit = 0.0;   // <= explicit_dt_ceiling(model)

    void validate() const;      // also enforces n1, n2 <= 32
};

// zeta + gamma lap h - eps2 lap^2 h - div(Phi(|grad h|) grad h),
// evaluated pseudo-spectrally with no splitting.
RealField oracle_rhs(const RealField& h, const ModelConfig& config, double t);

// Classical 4-stage explicit integration to t_end. Aborts when
// max|h| > 1e6 (blow-up from an over-large dt_explicit).
RealField rk4_run(const RealField& h0, const OracleConfig& config, double t_end);

}  // namespace thinfilm
