#include "nftk/soliton.hpp"

#include <cmath>
#include <numbers>

#include "nftk/errors.hpp"

namespace nftk {

namespace {

Complex pole_checked_denominator(Complex lambda, Complex lk) {
    const Complex d = lambda - std::conj(lk);
    if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(lk))) throw PoleError("lambda sits on a pole conj(lambda_k)");
    return d;
}

double wrap_pi(double x) {
    while (x > std::numbers::pi) x -= 2.0 * std::numbers::pi;
    while (x <= -std::numbers::pi) x += 2.0 * std::numbers::pi;
    return x;
}

}  // namespace

Complex a_closed_form(const DiscreteSpectrum& ds, Complex lambda) {
    require_finite(lambda, "lambda");
    Complex a = 1.0;
    for (const auto& e : ds.entries()) a *= (lambda - e.lambda) / pole_checked_denominator(lambda, e.lambda);
    return a;
}

Complex a_derivative_closed_form(const DiscreteSpectrum& ds, Complex lambda) {
    require_finite(lambda, "lambda");
    const std::size_t n = ds.size();
    std::vector<Complex> f(n), df(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex lk = ds[k].lambda;
        const Complex d = pole_checked_denominator(lambda, lk);
        f[k] = (lambda - lk) / d;
        df[k] = (lk - std::conj(lk)) / (d * d);
    }
    Complex sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex term = df[k];
        for (std::size_t i = 0; i < n; ++i)
            if (i != k) term *= f[i];
        sum += term;
    }
    return sum;
}

TimeSignal synthesize(const DiscreteSpectrum& ds, const TimeGrid& grid) {
    if (grid.count == 0 || !(grid.dt > 0.0)) throw ValidationError("synthesis grid must be non-empty with dt > 0");
    const std::size_t n = ds.size();
    const std::size_t m = grid.count;
    std::vector<Complex> q(m, Complex{});
    // phi[k][i] holds the auxiliary solution of eigenvalue k at sample i, rescaled pointwise.
    std::vector<std::vector<Complex>> phi1(n, std::vector<Complex>(m)), phi2(n, std::vector<Complex>(m));
    for (std::size_t k = 0; k < n; ++k) {
        const Complex lk = ds[k].lambda;
        const Complex bk = ds[k].b;
        const double eta = lk.imag();
        for (std::size_t i = 0; i < m; ++i) {
            const double t = grid.t_start + static_cast<double>(i) * grid.dt;
            const double damp = std::abs(eta * t);
            phi1[k][i] = std::exp(-kJ * lk * t - damp);
            phi2[k][i] = -bk * std::exp(kJ * lk * t - damp);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex lk = ds[k].lambda;
        const Complex dl = lk - std::conj(lk);
        for (std::size_t i = 0; i < m; ++i) {
            const Complex p1 = phi1[k][i], p2 = phi2[k][i];
            const double n1 = std::norm(p1), n2 = std::norm(p2);
            const double delta = n1 + n2;
            q[i] += 2.0 * lk.imag() * 2.0 * p1 * std::conj(p2) / delta;
            const Complex s11 = (lk * n1 + std::conj(lk) * n2) / delta;
            const Complex s12 = dl * p1 * std::conj(p2) / delta;
            const Complex s21 = dl * p2 * std::conj(p1) / delta;
            const Complex s22 = (lk * n2 + std::conj(lk) * n1) / delta;
            for (std::size_t j = k + 1; j < n; ++j) {
                const Complex lj = ds[j].lambda;
                const Complex x = phi1[j][i], y = phi2[j][i];
                Complex nx = (lj - s11) * x - s12 * y;
                Complex ny = -s21 * x + (lj - s22) * y;
                const double scale = std::max(std::abs(nx), std::abs(ny));
                if (scale > 0.0) {
                    nx /= scale;
                    ny /= scale;
                }
                phi1[j][i] = nx;
                phi2[j][i] = ny;
            }
        }
    }
    return TimeSignal(grid, std::move(q));
}

bool is_symmetric(const DiscreteSpectrum& ds, double tol) {
    for (const auto& e : ds.entries())
        if (std::abs(e.lambda.real()) > tol || std::abs(std::abs(e.b) - 1.0) > tol) return false;
    return true;
}

TailParams tail_parameters(const DiscreteSpectrum& ds) {
    if (ds.empty()) throw ValidationError("tail parameters need at least one eigenvalue");
    const Complex l1 = ds[0].lambda;
    if (ds.size() > 1 && std::abs(ds[1].lambda.imag() - l1.imag()) <= 1e-9 * l1.imag())
        throw DegenerateSigmaError("minimal imaginary part is shared by two eigenvalues");
    TailParams tp;
    tp.sigma1 = l1.imag();
    tp.omega1 = l1.real();
    for (std::size_t k = 1; k < ds.size(); ++k) {
        const Complex lk = ds[k].lambda;
        const Complex num = l1 - std::conj(lk);
        const Complex den = l1 - lk;
        tp.phi0 += wrap_pi(std::arg(num) - std::arg(den));
        tp.t0 += std::log(std::abs(num) / std::abs(den));
    }
    tp.t0 /= 2.0 * tp.sigma1;
    const double arg_b1 = std::arg(ds[0].b);
    tp.phiL = arg_b1 - tp.phi0;
    tp.phiR = arg_b1 + tp.phi0;
    return tp;
}

Complex tail_approximation(const TailParams& tp, Side side, double t) {
    const double centre = side == Side::Left ? -tp.t0 : tp.t0;
    const double phase = side == Side::Left ? tp.phiL : tp.phiR;
    return -2.0 * tp.sigma1 * std::exp(-kJ * (phase + 2.0 * tp.omega1 * t)) / std::cosh(2.0 * tp.sigma1 * (t - centre));
}

}  // namespace nftk
