#include "thinfilm/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace thinfilm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW plan creation is not thread-safe; creation is serialized and the
// plans are cached per grid. Execution through the new-array interface is
// safe concurrently because plans are created with FFTW_UNALIGNED.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanPair get(const GridSpec& g) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(g.n1, g.n2);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<double> real(g.size());
        std::vector<std::complex<double>> cplx(g.spectral_size());
        PlanPair p;
        p.r2c = fftw_plan_dft_r2c_2d(g.n1, g.n2, real.data(),
                                     reinterpret_cast<fftw_complex*>(cplx.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.c2r = fftw_plan_dft_c2r_2d(g.n1, g.n2,
                                     reinterpret_cast<fftw_complex*>(cplx.data()),
                                     real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p.r2c || !p.c2r) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, p] : plans_) {
            fftw_destroy_plan(p.r2c);
            fftw_destroy_plan(p.c2r);
        }
        fftw_cleanup();
    }
    std::mutex mutex_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace

void GridSpec::validate() const {
    if (!(l1 > 0.0) || !(l2 > 0.0))
        throw std::invalid_argument("GridSpec: domain lengths must be positive");
    if (n1 < 4 || n2 < 4 || n1 % 2 != 0 || n2 % 2 != 0)
        throw std::invalid_argument("GridSpec: n1, n2 must be even and >= 4");
}

double GridSpec::kappa1(int i) const {
    int xi = (i <= n1 / 2) ? i : i - n1;
    return kTwoPi * xi / l1;
}

double GridSpec::kappa2(int j) const { return kTwoPi * j / l2; }

double GridSpec::kappa_min() const { return kTwoPi * std::min(1.0 / l1, 1.0 / l2); }

double GridSpec::kappa_sq_max() const {
    double kx = kTwoPi * (n1 / 2) / l1;
    double ky = kTwoPi * (n2 / 2) / l2;
    return kx * kx + ky * ky;
}

bool all_finite(const RealField& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

SpectralField forward(const RealField& f) {
    f.grid.validate();
    if (f.values.size() != static_cast<std::size_t>(f.grid.size()))
        throw std::invalid_argument("forward: field size mismatch");
    if (!all_finite(f)) throw std::invalid_argument("forward: non-finite field value");
    PlanPair plans = PlanCache::instance().get(f.grid);
    std::vector<double> scratch(f.values);  // r2c may scribble on input
    SpectralField out(f.grid);
    fftw_execute_dft_r2c(plans.r2c, scratch.data(),
                         reinterpret_cast<fftw_complex*>(out.coeffs.data()));
    return out;
}

RealField inverse(const SpectralField& F) {
    F.grid.validate();
    if (F.coeffs.size() != static_cast<std::size_t>(F.grid.spectral_size()))
        throw std::invalid_argument("inverse: spectrum size mismatch");
    const int n1 = F.grid.n1, h2 = F.grid.half2(), ny = F.grid.n2 / 2;
    const double norm = static_cast<double>(F.grid.size());

    // Conjugate-symmetry residue of the self-constrained columns, in
    // field units. Exceeding 1e-8 signals a symmetry-violating bug
    // upstream; below that the residue is discarded by the transform.
    double viol = 0.0;
    for (int j : {0, ny}) {
        for (int i = 0; i < n1; ++i) {
            std::complex<double> a = F.coeffs[static_cast<std::size_t>(i) * h2 + j];
            std::complex<double> b =
                F.coeffs[static_cast<std::size_t>((n1 - i) % n1) * h2 + j];
            viol = std::max(viol, std::abs(a - std::conj(b)) / 2.0);
        }
    }
    if (viol / norm > 1e-8)
        throw std::invalid_argument("inverse: conjugate-symmetry violation of " +
                                    std::to_string(viol / norm) +
                                    " in field units (upstream bug?)");

    PlanPair plans = PlanCache::instance().get(F.grid);
    std::vector<std::complex<double>> scratch(F.coeffs);  // c2r destroys its input
    RealField out(F.grid);
    fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.values.data());
    for (double& v : out.values) v /= norm;
    if (!all_finite(out)) throw std::runtime_error("inverse: non-finite result");
    return out;
}

std::pair<RealField, RealField> gradient(const SpectralField& F) {
    const int n1 = F.grid.n1, h2 = F.grid.half2(), nx = F.grid.n1 / 2, ny = F.grid.n2 / 2;
    SpectralField dx(F.grid), dy(F.grid);
    for (int i = 0; i < n1; ++i) {
        const double kx = (i == nx) ? 0.0 : F.grid.kappa1(i);
        for (int j = 0; j < h2; ++j) {
            const double ky = (j == ny) ? 0.0 : F.grid.kappa2(j);
            const std::complex<double> c = F.coeffs[static_cast<std::size_t>(i) * h2 + j];
            dx.coeffs[static_cast<std::size_t>(i) * h2 + j] =
                std::complex<double>(-kx * c.imag(), kx * c.real());
            dy.coeffs[static_cast<std::size_t>(i) * h2 + j] =
                std::complex<double>(-ky * c.imag(), ky * c.real());
        }
    }
    return {inverse(dx), inverse(dy)};
}

SpectralField divergence(const RealField& vx, const RealField& vy) {
    check_same_grid(vx.grid, vy.grid, "divergence");
    SpectralField fx = forward(vx);
    SpectralField fy = forward(vy);
    const int n1 = fx.grid.n1, h2 = fx.grid.half2(), nx = fx.grid.n1 / 2, ny = fx.grid.n2 / 2;
    SpectralField out(fx.grid);
    for (int i = 0; i < n1; ++i) {
        const double kx = (i == nx) ? 0.0 : fx.grid.kappa1(i);
        for (int j = 0; j < h2; ++j) {
            const double ky = (j == ny) ? 0.0 : fx.grid.kappa2(j);
            const std::complex<double> a = fx.coeffs[static_cast<std::size_t>(i) * h2 + j];
            const std::complex<double> b = fy.coeffs[static_cast<std::size_t>(i) * h2 + j];
            // i*kx*a + i*ky*b
            out.coeffs[static_cast<std::size_t>(i) * h2 + j] = std::complex<double>(
                -kx * a.imag() - ky * b.imag(), kx * a.real() + ky * b.real());
        }
    }
    return out;
}

std::vector<double> laplacian_symbol(const GridSpec& g) {
    g.validate();
    const int n1 = g.n1, h2 = g.half2();
    std::vector<double> s(static_cast<std::size_t>(g.spectral_size()));
    for (int i = 0; i < n1; ++i) {
        const double kx = g.kappa1(i);
        for (int j = 0; j < h2; ++j) {
            const double ky = g.kappa2(j);
            s[static_cast<std::size_t>(i) * h2 + j] = -(kx * kx + ky * ky);
        }
    }
    return s;
}

namespace {

// compensated summation; the mean subtraction in the stepper relies on
// the sum being accurate to a couple of ulps regardless of N
double kahan_sum(const std::vector<double>& values) {
    double sum = 0.0, c = 0.0;
    for (double v : values) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

double integrate(const RealField& f) { return kahan_sum(f.values) * f.grid.cell_area(); }

double mean(const RealField& f) {
    return kahan_sum(f.values) / static_cast<double>(f.grid.size());
}

Seminorms seminorms(const RealField& f) {
    SpectralField F = forward(f);
    const int n1 = f.grid.n1, h2 = f.grid.half2(), ny = f.grid.n2 / 2;
    // Parseval: int f^2 dx = L1*L2/(N1*N2)^2 * sum over the full spectrum.
    const double w = f.grid.area() / (static_cast<double>(f.grid.size()) *
                                      static_cast<double>(f.grid.size()));
    Seminorms out;
    for (int i = 0; i < n1; ++i) {
        const double kx = f.grid.kappa1(i);
        for (int j = 0; j < h2; ++j) {
            const double ky = f.grid.kappa2(j);
            const double k2 = kx * kx + ky * ky;
            const double count = (j == 0 || j == ny) ? 1.0 : 2.0;
            const double p = std::norm(F.coeffs[static_cast<std::size_t>(i) * h2 + j]) *
                             count * w;
            out.l2_sq += p;
            out.grad_sq += k2 * p;
            out.lap_sq += k2 * k2 * p;
        }
    }
    return out;
}

void dealias(SpectralField& F) {
    const int n1 = F.grid.n1, h2 = F.grid.half2();
    const int cut1 = F.grid.n1 / 3, cut2 = F.grid.n2 / 3;
    for (int i = 0; i < n1; ++i) {
        const int xi1 = (i <= n1 / 2) ? i : i - n1;
        for (int j = 0; j < h2; ++j) {
            if (std::abs(xi1) > cut1 || j > cut2)
                F.coeffs[static_cast<std::size_t>(i) * h2 + j] = 0.0;
        }
    }
}

}  // namespace thinfilm
