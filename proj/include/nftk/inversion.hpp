#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "nftk/spectra.hpp"

namespace nftk {

// Edge checks in this module pass when the edge value is below 1e-6 or below edge_tol times the
// peak magnitude of the transformed function.
inline constexpr double kDefaultEdgeTol = 1e-3;

// Hilbert transform with multiplier -j sgn(k) (FFT convention e^{-jkw}), so H[1/(1+w^2)] = w/(1+w^2).
// The input is zero-padded to at least four times its length before the FFT.
std::vector<double> hilbert(std::span<const double> f, double edge_tol = kDefaultEdgeTol);

// sqrt(1-|b|^2) exp((j/2) H[ln(1-|b|^2)])
std::vector<Complex> radiation_a(const ContinuousSpectrum& cs, double edge_tol = kDefaultEdgeTol);

struct AllPass {
    UniformGrid omega;
    std::vector<Complex> g;
};

// G = a / radiation_a
AllPass allpass(const ContinuousSpectrum& cs, double edge_tol = kDefaultEdgeTol);

// Phase steps must stay below this for the unwrap to be trusted.
inline constexpr double kMaxPhaseStep = 0.5 * std::numbers::pi;

int count_eigenvalues(std::span<const Complex> g);

struct FitReport {
    std::vector<Complex> eigenvalues;
    double residual = 0.0;
    double seed_residual = 0.0;
    int iterations = 0;
};

struct FitOptions {
    int max_iter = 200;
    double step_tol = 1e-13;
};

// Gauss-Newton fit of the Blaschke product prod (w - l_k)/(w - conj(l_k)) to G, with
// l_k = x_k + j exp(s_k).
FitReport fit_eigenvalues(const AllPass& g, int n, std::span<const Complex> seeds, const FitOptions& opt = {});

Complex blaschke(std::span<const Complex> eigs, Complex lambda);

// exp{(1/2 pi j) int ln(1-|b|^2)/(w - lambda) dw} * Blaschke(lambda). The trapezoid is applied after
// subtracting the integrand's value at Re lambda, whose integral is added back in closed form.
Complex a_from_b_trace(Complex lambda, const ContinuousSpectrum& cs, std::span<const Complex> eigs,
                       double edge_tol = kDefaultEdgeTol);

}  // namespace nftk
