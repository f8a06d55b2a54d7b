#pragma once

#include "nftk/spectra.hpp"

namespace nftk {

// a(lambda) = prod_k (lambda - lambda_k) / (lambda - conj(lambda_k)). Throws PoleError at a conj(lambda_k).
Complex a_closed_form(const DiscreteSpectrum& ds, Complex lambda);
Complex a_derivative_closed_form(const DiscreteSpectrum& ds, Complex lambda);

// N-soliton by successive Darboux dressing, eigenvalues added in ascending imaginary part.
// Scattering the result returns b(lambda_k) = ds[k].b.
TimeSignal synthesize(const DiscreteSpectrum& ds, const TimeGrid& grid);

bool is_symmetric(const DiscreteSpectrum& ds, double tol);

struct TailParams {
    double sigma1 = 0.0;
    double omega1 = 0.0;
    double t0 = 0.0;
    double phi0 = 0.0;
    double phiL = 0.0;
    double phiR = 0.0;
};

enum class Side { Left, Right };

// phi0 is the raw sum of arguments (not reduced mod 2pi).
TailParams tail_parameters(const DiscreteSpectrum& ds);

// -2 sigma1 exp(-j phi_side - 2j omega1 t) sech(2 sigma1 (t -+ t0))
Complex tail_approximation(const TailParams& tp, Side side, double t);

}  // namespace nftk
