#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nftk/spectra.hpp"

namespace nftk {

enum class Scheme {
    // Forward product of cell maps from the left edge.
    PiecewiseConstant2x2,
    // Forward from the left and backward from the right, matched at the cell nearest t = 0.
    ForwardBackwardSplit,
};

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct ScatterConfig {
    Scheme scheme = Scheme::PiecewiseConstant2x2;
    double newton_tol = 1e-6;
    int newton_max_iter = 50;
    double fd_step = 1e-6;
    std::size_t samples = 10000;
    double overflow_bound = 1e150;

    void validate() const;
};

// q(t - tau) maps b(lambda) to b(lambda) * exp(c j lambda tau) with this c.
inline constexpr double kTimeShiftPhaseFactor = -2.0;
Complex time_shift_b(Complex b, Complex lambda, double tau);

JostPair scatter(const TimeSignal& sig, Complex lambda, const ScatterConfig& cfg = {});
std::vector<JostPair> scatter_many(const TimeSignal& sig, std::span<const Complex> lambdas,
                                   const ScatterConfig& cfg = {});

// Throws DivisionError if |a| < 1e-12 anywhere on the grid.
ContinuousSpectrum continuous_spectrum(const TimeSignal& sig, const UniformGrid& omega, const ScatterConfig& cfg = {});

struct EigenSearch {
    std::vector<Complex> roots;
    std::vector<Complex> failed_seeds;
};

// Newton on a(lambda) with central-difference derivatives. Roots closer than 1e-4 plus their Newton error
// estimates |a|/|a'| are merged; output is sorted by ascending imaginary part.
EigenSearch find_eigenvalues(const TimeSignal& sig, std::span<const Complex> seeds, const ScatterConfig& cfg = {});

struct DiscreteAmplitude {
    Complex lambda;
    Complex b;
    Complex qd;
    Complex da;
};

std::vector<DiscreteAmplitude> discrete_amplitudes(const TimeSignal& sig, std::span<const Complex> eigs,
                                                   const ScatterConfig& cfg = {});

// -(1/pi) * trapezoid of ln|a|^2. The edge test is relative: |ln|a|^2| at both ends must not exceed
// edge_tol times the peak |ln|a|^2|.
double energy_continuous(const ContinuousSpectrum& cs, double edge_tol = 1e-3);

// Jost data of one segment at lambda and the conjugate-point values a*(lambda*), b*(lambda*).
struct SegmentJost {
    JostPair at;
    JostPair conj_at;

    // For real lambda the conjugate-point values are plain conjugates.
    static SegmentJost real_axis(JostPair p) { return {p, {std::conj(p.a), std::conj(p.b)}}; }
};

// Jost pair of the concatenation left | mid | right (disjoint ordered supports).
JostPair compose_segments(const SegmentJost& left, const SegmentJost& mid, const SegmentJost& right);

}  // namespace nftk
