#pragma once

// The three Ehrlich-Schwoebel current models J_k = Phi_k(|grad h|) grad h,
// their potentials G_k with grad_F G_k(m) = -Phi_k(|m|) m, analytic
// Hessians, and the convex-concave splitting thresholds chi_k that make
// G_k(m) - chi/2 |m|^2 concave.

#include <utility>

#include "thinfilm/grid.hpp"

namespace thinfilm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const;
};

// Symmetric 2x2 matrix.
struct SymMat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
    std::pair<double, double> eigenvalues() const;  // ascending
    double max_eigenvalue() const { return eigenvalues().second; }
};

struct EsParams {
    int variant = 1;       // k in {1,2,3}
    double alpha = 0.0;    // current strength alpha_k, > 0
    double p = 0.0;        // 0 < p < q
    double q = 0.0;
    double floor = 1e-16;  // slope regularization for k=3, > 0

    void validate() const;
};

struct SplittingParams {
    double chi = 0.0;  // >= chi_min(params)
};

// Physical quantities of the growth process; expands to the model
// parameters via the relations
//   alpha1 = F_f L_ES / 2,  alpha2 = alpha1 (q-p)/p,  alpha3 = alpha1 (q-p),
//   p = b/L_isl,  q = b/L_isl + b/L_ES,  gamma = C_DF F_f,
//   eps2 = F_f L_isl^4.
struct PhysicalPreset {
    double flux = 2.0;          // F_f, deposition flux per unit time
    double l_es = 0.05;         // ES attachment length
    double l_isl = 0.25;        // island separation length
    double step_height = 0.017; // b
    double c_df = 0.0;          // downward-funneling strength
};

struct PresetExpansion {
    double alpha1, alpha2, alpha3;
    double p, q;
    double gamma;
    double epsilon_sq;

    EsParams params_for(int variant) const;
};

PresetExpansion preset_from_physical(const PhysicalPreset& preset);

// The baseline parameter set (flux=2, l_es=0.05, l_isl=0.25,
// b=0.017, c_df=0), giving alpha1=0.05, p=0.068, q=0.408, gamma=0,
// eps2=0.0078125.
PhysicalPreset baseline_preset();

// Mobility Phi_k(s), s = |grad h| >= 0, strictly positive.
//   Phi_1(s) = a (q-p) / ((p+s)(q+s))
//   Phi_2(s) = a / (q + (p+q) s / p)
//   Phi_3(s) = a / (s~^2 + (q-p) s~),  s~ = max(s, floor)
double phi(const EsParams& params, double s);

// Closed-form dPhi_k/ds; strictly negative, bounded below by
// -2a(q-p)/(p^2 q) for k=1 and -a(p+q)/(p q^2) for k=2.
double phi_prime(const EsParams& params, double s);

// Potential G_k(m), continuous on R^2 (k=3 included), radial in |m|.
double potential(const EsParams& params, Vec2 m);

// grad_F G_k(m) = -Phi_k(|m|) m; (0,0) at m=0 for k=1,2, floored for k=3.
Vec2 potential_gradient(const EsParams& params, Vec2 m);

// Analytic Hessian of G_k. At m=0 the k=1,2 limit -Phi_k(0) I is
// returned; m=0 is rejected for k=3.
SymMat2 potential_hessian(const EsParams& params, Vec2 m);

// Concavity threshold: G_k(m) - chi/2 |m|^2 is concave for chi >= chi_min.
// Returns 2a(q-p)/(pq) for k=1, 0 for k=2, a/(q-p)^2 for k=3.
double chi_min(const EsParams& params);

// Pointwise ES flux J = Phi_k(|m|) m over slope component fields.
std::pair<RealField, RealField> flux(const EsParams& params, const RealField& mx,
                                     const RealField& my);

// Smallest C with |G_k(m)| <= C (1 + |m|), fitted from the closed form
// over a dense slope grid (with 10% headroom).
double linear_growth_constant(const EsParams& params);

}  // namespace thinfilm
