#include <cmath>

#include "nftk/kernels/transfer.hpp"

namespace nftk::kernels::scalar {

namespace {

struct Cell {
    Complex k11, k12, k21, k22;
};

Cell cell_matrix(Complex lambda, Complex q, double t, double dt) {
    const Complex xi = std::sqrt(lambda * lambda + std::norm(q));
    const Complex x = xi * dt;
    const Complex c = std::cos(x);
    Complex s;
    if (std::abs(x) < 1e-4) {
        const Complex x2 = x * x;
        s = dt * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
    } else {
        s = std::sin(x) / xi;
    }
    const Complex e = std::exp(kJ * lambda * dt);
    const Complex p = std::exp(2.0 * kJ * lambda * t);
    return {e * (c - kJ * lambda * s), s * q * p, -s * std::conj(q) / p, (c + kJ * lambda * s) / e};
}

}  // namespace

void propagate(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
               std::span<Complex> v1, std::span<Complex> v2, bool backward) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const Complex lam = lambdas[i];
        Complex x = v1[i], y = v2[i];
        if (!backward) {
            for (std::size_t n = begin; n < end; ++n) {
                const Cell m = cell_matrix(lam, cells.q[n], cells.t[n], cells.dt);
                const Complex nx = m.k11 * x + m.k12 * y;
                y = m.k21 * x + m.k22 * y;
                x = nx;
            }
        } else {
            for (std::size_t n = end; n-- > begin;) {
                const Cell m = cell_matrix(lam, cells.q[n], cells.t[n], cells.dt);
                const Complex nx = m.k22 * x - m.k12 * y;
                y = -m.k21 * x + m.k11 * y;
                x = nx;
            }
        }
        v1[i] = x;
        v2[i] = y;
    }
}

}  // namespace nftk::kernels::scalar
