#include "thinfilm/es_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace thinfilm {

namespace {

void check_slope(const EsParams& params, double s) {
    if (!std::isfinite(s) || s < 0.0)
        throw std::invalid_argument("slope magnitude must be finite and >= 0, got " +
                                    std::to_string(s));
    (void)params;
}

}  // namespace

double Vec2::norm() const { return std::hypot(x, y); }

std::pair<double, double> SymMat2::eigenvalues() const {
    const double tr = xx + yy;
    const double det = xx * yy - xy * xy;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

void EsParams::validate() const {
    if (variant < 1 || variant > 3)
        throw std::invalid_argument("EsParams: variant must be 1, 2 or 3");
    if (!(alpha > 0.0)) throw std::invalid_argument("EsParams: alpha must be positive");
    if (!(0.0 < p && p < q))
        throw std::invalid_argument("EsParams: requires 0 < p < q, got p=" +
                                    std::to_string(p) + ", q=" + std::to_string(q));
    if (variant == 3 && !(floor > 0.0))
        throw std::invalid_argument("EsParams: variant 3 needs a positive slope floor");
}

PresetExpansion preset_from_physical(const PhysicalPreset& preset) {
    if (!(preset.flux > 0.0) || !(preset.l_es > 0.0) || !(preset.l_isl > 0.0) ||
        !(preset.step_height > 0.0) || preset.c_df < 0.0)
        throw std::invalid_argument(
            "PhysicalPreset: flux, l_es, l_isl, step_height must be positive and "
            "c_df >= 0");
    PresetExpansion e{};
    e.p = preset.step_height / preset.l_isl;
    e.q = preset.step_height / preset.l_isl + preset.step_height / preset.l_es;
    e.alpha1 = preset.flux * preset.l_es / 2.0;
    e.alpha2 = e.alpha1 * (e.q - e.p) / e.p;
    e.alpha3 = e.alpha1 * (e.q - e.p);
    e.gamma = preset.c_df * preset.flux;
    e.epsilon_sq = preset.flux * preset.l_isl * preset.l_isl * preset.l_isl * preset.l_isl;
    return e;
}

EsParams PresetExpansion::params_for(int variant) const {
    EsParams out;
    out.variant = variant;
    out.p = p;
    out.q = q;
    switch (variant) {
        case 1: out.alpha = alpha1; break;
        case 2: out.alpha = alpha2; break;
        case 3: out.alpha = alpha3; break;
        default: throw std::invalid_argument("variant must be 1, 2 or 3");
    }
    out.validate();
    return out;
}

PhysicalPreset baseline_preset() { return PhysicalPreset{}; }

double phi(const EsParams& params, double s) {
    check_slope(params, s);
    switch (params.variant) {
        case 1:
            return params.alpha * (params.q - params.p) /
                   ((params.p + s) * (params.q + s));
        case 2:
            return params.alpha / (params.q + (params.p + params.q) * s / params.p);
        default: {
            const double st = std::max(s, params.floor);
            return params.alpha / (st * st + (params.q - params.p) * st);
        }
    }
}

double phi_prime(const EsParams& params, double s) {
    check_slope(params, s);
    const double p = params.p, q = params.q, a = params.alpha;
    switch (params.variant) {
        case 1: {
            const double ps = p + s, qs = q + s;
            return -a * 2.0 * (q - p) * ((p + q) / 2.0 + s) / (ps * ps * qs * qs);
        }
        case 2: {
            const double d = q + (p + q) * s / p;
            return -a * ((p + q) / p) / (d * d);
        }
        default: {
            const double st = std::max(s, params.floor);
            const double d = st * st + (q - p) * st;
            return -a * (2.0 * st + (q - p)) / (d * d);
        }
    }
}

double potential(const EsParams& params, Vec2 m) {
    const double s = m.norm();
    check_slope(params, s);
    const double p = params.p, q = params.q, a = params.alpha;
    switch (params.variant) {
        case 1:
            return a * (p * std::log(p + s) - q * std::log(q + s));
        case 2:
            return a * (-p / (p + q) * s +
                        p * p * q / ((p + q) * (p + q)) * std::log(p * q / (p + q) + s));
        default:
            return -a * std::log(q - p + s);
    }
}

Vec2 potential_gradient(const EsParams& params, Vec2 m) {
    const double s = (params.variant == 3) ? std::max(m.norm(), params.floor) : m.norm();
    const double f = -phi(params, s);
    return {f * m.x, f * m.y};
}

SymMat2 potential_hessian(const EsParams& params, Vec2 m) {
    const double s = m.norm();
    check_slope(params, s);
    const double p = params.p, q = params.q, a = params.alpha;
    if (s == 0.0) {
        if (params.variant == 3)
            throw std::invalid_argument("potential_hessian: m=0 is singular for variant 3");
        const double d = -phi(params, 0.0);  // rank-one term vanishes like |m|
        return {d, 0.0, d};
    }
    double diag, rank1;  // hessian = diag*I + rank1*(m (x) m)/|m|
    switch (params.variant) {
        case 1: {
            const double ps = p + s, qs = q + s;
            diag = -a * (q - p) / (ps * qs);
            rank1 = a * (1.0 / (ps * ps) - 1.0 / (qs * qs));
            break;
        }
        case 2: {
            const double d = p * q + (p + q) * s;
            diag = -a * p / d;
            rank1 = a * p * (p + q) / (d * d);
            break;
        }
        default: {
            const double d = (q - p) * s + s * s;
            diag = -a / d;
            rank1 = a * (q - p + 2.0 * s) / (d * d);
            break;
        }
    }
    const double c = rank1 / s;
    return {diag + c * m.x * m.x, c * m.x * m.y, diag + c * m.y * m.y};
}

double chi_min(const EsParams& params) {
    params.validate();
    switch (params.variant) {
        case 1: return 2.0 * params.alpha * (params.q - params.p) / (params.p * params.q);
        case 2: return 0.0;
        default:
            return params.alpha / ((params.q - params.p) * (params.q - params.p));
    }
}

std::pair<RealField, RealField> flux(const EsParams& params, const RealField& mx,
                                     const RealField& my) {
    if (!(mx.grid == my.grid)) throw std::invalid_argument("flux: grid mismatch");
    RealField jx(mx.grid), jy(mx.grid);
    const std::size_t n = mx.values.size();
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double f = phi(params, std::hypot(mx.values[idx], my.values[idx]));
        jx.values[idx] = f * mx.values[idx];
        jy.values[idx] = f * my.values[idx];
    }
    return {std::move(jx), std::move(jy)};
}

double linear_growth_constant(const EsParams& params) {
    // |G| grows at most logarithmically, so the ratio |G|/(1+s) attains
    // its sup at moderate s; a log-spaced scan up to 1e12 covers it.
    double c = std::abs(potential(params, {0.0, 0.0}));
    for (double s = 1e-6; s < 1e12; s *= 1.05) {
        c = std::max(c, std::abs(potential(params, {s, 0.0})) / (1.0 + s));
    }
    return 1.1 * c;
}

}  // namespace thinfilm
