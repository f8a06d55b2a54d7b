#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nftk/spectra.hpp"

namespace nftk {

// Symmetric multi-soliton (pure imaginary eigenvalues, unimodular b) truncated to |t| <= T.
class TruncationModel {
public:
    TruncationModel(const DiscreteSpectrum& ds, double T);

    // b(lambda_1) = e^{j phi}; the remaining b values are 1 unless `phases` lists arg b_k for every
    // eigenvalue in ascending sigma order (then phases[0] must equal phi modulo 2 pi).
    static TruncationModel from_sigmas(std::vector<double> sigmas, double phi, double T,
                                       std::vector<double> phases = {});

    const DiscreteSpectrum& spectrum() const { return ds_; }
    double sigma1() const { return sigma1_; }
    double phi() const { return phi_; }
    double t0() const { return t0_; }
    double T() const { return T_; }
    int N() const { return static_cast<int>(ds_.size()); }
    Complex b1_phase() const { return std::exp(kJ * phi_); }
    std::vector<double> sigmas() const;
    std::vector<Complex> eigenvalues() const { return ds_.eigenvalues(); }
    // The closed forms are derived for T > t0.
    bool in_contract() const { return T_ > t0_; }

private:
    DiscreteSpectrum ds_;
    double sigma1_ = 0.0;
    double phi_ = 0.0;
    double t0_ = 0.0;
    double T_ = 0.0;
};

Complex alpha(Complex lambda, const TruncationModel& m);
Complex beta(Complex lambda, const TruncationModel& m);
// alpha*(lambda*) and beta*(lambda*)
Complex alpha_conj(Complex lambda, const TruncationModel& m);
Complex beta_conj(Complex lambda, const TruncationModel& m);

JostPair tail_jost_left(Complex lambda, const TruncationModel& m);
JostPair tail_jost_right(Complex lambda, const TruncationModel& m);

JostPair truncated_jost_real(double omega, const TruncationModel& m);
ContinuousSpectrum truncated_spectrum(const UniformGrid& omega, const TruncationModel& m);

// b(lambda) and b*(lambda*) of the untruncated pulse.
struct BValues {
    Complex b;
    Complex b_conj;
};
using BFunction = std::function<BValues(Complex)>;

// |Im lambda| < sigma1 only. b_fn defaults to zero, which is exact for multi-solitons inside the strip.
JostPair truncated_jost_strip(Complex lambda, const TruncationModel& m, const BFunction& b_fn = {});

// One root per seed: zeros of a(lambda) alpha*(lambda*) -+ beta(lambda) e^{-j phi}, keeping the lower
// branch root. Seeds default to the model eigenvalues. Sorted by ascending imaginary part.
std::vector<Complex> analytic_eigenvalues(const TruncationModel& m, std::vector<Complex> seeds = {});

std::vector<Complex> analytic_b_values(std::span<const Complex> eigs, const TruncationModel& m);

}  // namespace nftk
