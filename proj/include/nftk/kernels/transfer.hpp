#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nftk/spectra.hpp"

namespace nftk::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
// Widest ISA this CPU and build support.
Isa detected_isa();
// Process-wide selection used by the default overloads; starts as detected_isa().
Isa active_isa();
void set_active_isa(Isa isa);

// Piecewise-constant cells of a sampled signal. Cell n is centred on t[n] with width dt.
struct CellTable {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<Complex> q;
    double max_q2 = 0.0;

    // Zero cells are exact identities, so leading and trailing zero samples are dropped.
    static CellTable from_signal(const TimeSignal& sig);
    std::size_t size() const { return q.size(); }
    bool empty() const { return q.empty(); }
    // First cell whose centre is >= t (clamped to [0, size()]).
    std::size_t lower_bound(double t) const;
};

// The cell map is the exact solution of the constant-q system over one cell, written in the
// frame v1' = q e^{2j lambda t} v2, v2' = -q* e^{-2j lambda t} v1. It has unit determinant.
//
// forward: apply cells [begin, end) in increasing order to every (v1[i], v2[i]) at lambdas[i].
// backward: apply the inverse cells from end-1 down to begin.
void propagate_forward(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
                       std::span<Complex> v1, std::span<Complex> v2, Isa isa);
void propagate_backward(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
                        std::span<Complex> v1, std::span<Complex> v2, Isa isa);

inline void propagate_forward(const CellTable& cells, std::size_t begin, std::size_t end,
                              std::span<const Complex> lambdas, std::span<Complex> v1, std::span<Complex> v2) {
    propagate_forward(cells, begin, end, lambdas, v1, v2, active_isa());
}
inline void propagate_backward(const CellTable& cells, std::size_t begin, std::size_t end,
                               std::span<const Complex> lambdas, std::span<Complex> v1, std::span<Complex> v2) {
    propagate_backward(cells, begin, end, lambdas, v1, v2, active_isa());
}

namespace scalar {
void propagate(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
               std::span<Complex> v1, std::span<Complex> v2, bool backward);
}

namespace avx2 {
void propagate(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
               std::span<Complex> v1, std::span<Complex> v2, bool backward);
}

}  // namespace nftk::kernels
