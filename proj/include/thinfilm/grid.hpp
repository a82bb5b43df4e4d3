#pragma once

// Periodic rectangular grid with FFT-based spectral calculus.
//
// Transform convention: forward() is the unnormalized DFT (the (0,0)
// coefficient equals N1*N2*mean(h)); inverse() divides by N1*N2, so
// inverse(forward(f)) == f to rounding. Real fields are stored row-major
// with the x index outermost; spectra use the half-spectrum layout of
// real-input transforms, N1 x (N2/2+1) complex values.
//
// Odd-order derivative symbols (gradient, divergence) zero the Nyquist
// mode of the differentiated axis; even-order symbols keep it.

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace thinfilm {

struct GridSpec {
    double l1 = 0.0;  // domain edge lengths, > 0
    double l2 = 0.0;
    int n1 = 0;  // grid points per axis, even, >= 4
    int n2 = 0;

    void validate() const;  // throws std::invalid_argument

    std::int64_t size() const { return static_cast<std::int64_t>(n1) * n2; }
    int half2() const { return n2 / 2 + 1; }
    std::int64_t spectral_size() const { return static_cast<std::int64_t>(n1) * half2(); }
    double area() const { return l1 * l2; }
    double cell_area() const { return area() / static_cast<double>(size()); }

    // node coordinates x_i = i*l1/n1, y_j = j*l2/n2
    double x(int i) const { return l1 * i / n1; }
    double y(int j) const { return l2 * j / n2; }

    // wavenumber of integer mode xi: kappa = 2*pi*xi/L
    double kappa1(int i) const;  // i in [0,n1): signed mode i or i-n1
    double kappa2(int j) const;  // j in [0,half2())

    // smallest nonzero |kappa| (discrete Poincare constant is 1/kappa_min)
    double kappa_min() const;
    // largest |kappa|^2 over the retained modes
    double kappa_sq_max() const;

    bool operator==(const GridSpec&) const = default;
};

struct RealField {
    GridSpec grid;
    std::vector<double> values;  // size n1*n2, index i*n2 + j

    RealField() = default;
    explicit RealField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n2 + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n2 + j]; }
};

struct SpectralField {
    GridSpec grid;
    std::vector<std::complex<double>> coeffs;  // size n1*(n2/2+1), index i*(n2/2+1) + j

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.spectral_size()) {}

    std::complex<double>& at(int i, int j) {
        return coeffs[static_cast<std::size_t>(i) * grid.half2() + j];
    }
    std::complex<double> at(int i, int j) const {
        return coeffs[static_cast<std::size_t>(i) * grid.half2() + j];
    }
};

struct Seminorms {
    double l2_sq = 0.0;    // ||f||^2
    double grad_sq = 0.0;  // ||grad f||^2
    double lap_sq = 0.0;   // ||lap f||^2
};

// Unnormalized DFT of the samples. Throws on non-finite input.
SpectralField forward(const RealField& f);

// Inverse DFT (divides by N1*N2). The half-spectrum layout leaves the
// j=0 and j=n2/2 columns with a conjugate-symmetry constraint; a
// violation above 1e-8 (in field units) is rejected as an upstream bug.
RealField inverse(const SpectralField& F);

// Spectral partial derivatives (d/dx, d/dy); Nyquist of the
// differentiated axis is zeroed.
std::pair<RealField, RealField> gradient(const SpectralField& F);

// Spectral divergence of a vector field; Nyquist handled as in gradient.
SpectralField divergence(const RealField& vx, const RealField& vy);

// Per-mode symbol of the Laplacian, s(xi) = -|kappa(xi)|^2, half-spectrum
// layout. The biharmonic symbol is its square.
std::vector<double> laplacian_symbol(const GridSpec& g);

// Rectangle-rule quadrature (spectrally accurate for periodic smooth f).
double integrate(const RealField& f);

double mean(const RealField& f);

// (||f||^2, ||grad f||^2, ||lap f||^2) via Parseval; grad/lap use the
// full |kappa| symbols (Nyquist included) so they stay consistent with
// the implicit operator and the energy quadratic forms.
Seminorms seminorms(const RealField& f);

// Zero all modes with |xi1| > n1/3 or xi2 > n2/3 (2/3-rule mask).
void dealias(SpectralField& F);

bool all_finite(const RealField& f);

}  // namespace thinfilm
