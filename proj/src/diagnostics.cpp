#include "thinfilm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thinfilm {

double roughness(const RealField& h) {
    const double m = mean(h);
    double sum = 0.0;
    for (double v : h.values) {
        const double d = v - m;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(h.grid.size()));
}

EnergyBreakdown energy_breakdown(const RealField& h, const ModelConfig& config) {
    auto [gx, gy] = gradient(forward(h));
    double gsum = 0.0;
    for (std::size_t i = 0; i < gx.values.size(); ++i)
        gsum += potential(config.es, {gx.values[i], gy.values[i]});
    Seminorms s = seminorms(h);
    EnergyBreakdown e;
    e.g_part = gsum * h.grid.cell_area();
    e.grad_part = config.gamma / 2.0 * s.grad_sq;
    e.lap_part = config.epsilon_sq / 2.0 * s.lap_sq;
    e.total = e.g_part + e.grad_part + e.lap_part;
    return e;
}

double energy(const RealField& h, const ModelConfig& config) {
    return energy_breakdown(h, config).total;
}

double steady_residual(const RealField& prev, const RealField& next, double dt) {
    if (!(prev.grid == next.grid))
        throw std::invalid_argument("steady_residual: grid mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < prev.values.size(); ++i) {
        const double d = next.values[i] - prev.values[i];
        sum += d * d;
    }
    return std::sqrt(sum * prev.grid.cell_area()) / dt;
}

DiagnosticsRecord make_record(double t, const RealField& h, const RealField* prev,
                              const ModelConfig& config) {
    DiagnosticsRecord r;
    r.t = t;
    r.omega = roughness(h);
    EnergyBreakdown e = energy_breakdown(h, config);
    r.energy = e.total;
    Seminorms s = seminorms(h);
    r.grad_sq = s.grad_sq;
    r.lap_sq = s.lap_sq;
    r.mean = mean(h);
    auto [lo, hi] = std::minmax_element(h.values.begin(), h.values.end());
    r.h_min = *lo;
    r.h_max = *hi;
    r.increment_rate = prev ? steady_residual(*prev, h, config.dt) : 0.0;
    return r;
}

namespace {

// Uniform thinning to at most `cap` points (the pairwise scan is O(n^2)).
std::vector<std::pair<double, double>> thin(
    std::span<const std::pair<double, double>> series, std::size_t cap) {
    std::vector<std::pair<double, double>> out;
    if (series.size() <= cap) {
        out.assign(series.begin(), series.end());
        return out;
    }
    out.reserve(cap);
    for (std::size_t k = 0; k < cap; ++k)
        out.push_back(series[k * (series.size() - 1) / (cap - 1)]);
    return out;
}

}  // namespace

MonitorResult check_global_roughness_bound(
    std::span<const std::pair<double, double>> t_omega, const EsParams& params,
    double tol) {
    params.validate();
    double slope;  // omega^2 growth budget per unit time
    if (params.variant == 1)
        slope = 2.0 * params.alpha * (params.q - params.p);
    else if (params.variant == 3)
        slope = 2.0 * params.alpha;
    else
        throw std::invalid_argument(
            "check_global_roughness_bound: constant not explicit for variant 2");
    for (std::size_t i = 1; i < t_omega.size(); ++i)
        if (t_omega[i].first < t_omega[i - 1].first)
            throw std::invalid_argument("check_global_roughness_bound: time not monotone");

    std::vector<std::pair<double, double>> s = thin(t_omega, 512);
    MonitorResult res;
    res.worst = -1e300;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i; j < s.size(); ++j) {
            const double margin = s[j].second * s[j].second -
                                  s[i].second * s[i].second -
                                  slope * (s[j].first - s[i].first);
            res.worst = std::max(res.worst, margin);
        }
    }
    res.pass = res.worst <= tol;
    res.detail = "omega^2 growth bound, slope " + std::to_string(slope) +
                 ", worst margin " + std::to_string(res.worst);
    return res;
}

MonitorResult check_energy_law(std::span<const EnergyLawEntry> series, double dt,
                               double tol_scale) {
    MonitorResult res;
    res.worst = -1e300;
    res.pass = true;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double budget = dt / 2.0 * series[i].zeta_norm_sq;
        const double tol_e = tol_scale * std::max(1.0, std::abs(series[i - 1].energy));
        const double excess = series[i].energy - series[i - 1].energy - budget;
        res.worst = std::max(res.worst, excess);
        if (excess > tol_e && res.pass) {
            res.pass = false;
            res.detail = "energy law violated at t=" + std::to_string(series[i].t) +
                         " by " + std::to_string(excess);
        }
    }
    if (res.pass) res.detail = "energy law holds, worst excess " + std::to_string(res.worst);
    return res;
}

bool rough_smooth_rough(std::span<const std::pair<double, double>> t_omega) {
    if (t_omega.size() < 3) return false;
    const double omega0 = t_omega.front().second;
    double min_omega = omega0;
    double min_t = t_omega.front().first;
    for (const auto& [t, om] : t_omega) {
        if (om < min_omega) {
            min_omega = om;
            min_t = t;
        }
    }
    return min_omega < omega0 && min_t > t_omega.front().first &&
           t_omega.back().second > omega0;
}

std::optional<double> local_growth_rate(
    std::span<const std::pair<double, double>> t_omega) {
    std::optional<double> rate;
    for (std::size_t i = 1; i < t_omega.size(); ++i) {
        const auto& [t0, o0] = t_omega[i - 1];
        const auto& [t1, o1] = t_omega[i];
        if (o0 <= 0.0 || o1 <= 0.0 || t1 <= t0) continue;
        const double r = (std::log(o1 * o1) - std::log(o0 * o0)) / (t1 - t0);
        rate = rate ? std::max(*rate, r) : r;
    }
    return rate;
}

double energy_lower_bound(const ModelConfig& config) {
    const double c = linear_growth_constant(config.es);
    const double kmin = config.grid.kappa_min();
    const double beta = config.epsilon_sq * kmin * kmin / 4.0;
    const double c_beta = c * c / (4.0 * beta) + c;
    return -c_beta * config.grid.area();
}

double h2_stability_bound(double initial_energy, const ModelConfig& config) {
    return 4.0 / config.epsilon_sq * (initial_energy - energy_lower_bound(config));
}

}  // namespace thinfilm
