#include "nftk/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nftk/errors.hpp"
#include "nftk/kernels/transfer.hpp"

namespace nftk {

namespace {

using kernels::CellTable;

struct RawJost {
    std::vector<Complex> a, b;
    // Projection estimate of b, meaningful only at eigenvalues under the split scheme.
    std::vector<Complex> b_proj;
    std::vector<bool> overflow;
};

bool out_of_range(Complex z, double bound) { return !is_finite(z) || std::abs(z) > bound; }

std::size_t split_index(const CellTable& cells) {
    return std::min(cells.lower_bound(0.0), cells.size());
}

RawJost scatter_raw(const CellTable& cells, std::span<const Complex> lambdas, const ScatterConfig& cfg) {
    const std::size_t n = lambdas.size();
    RawJost out;
    out.a.assign(n, Complex{1.0, 0.0});
    out.b.assign(n, Complex{});
    out.b_proj.assign(n, Complex{});
    out.overflow.assign(n, false);
    if (cells.empty() || n == 0) return out;

    if (cfg.scheme == Scheme::PiecewiseConstant2x2) {
        std::vector<Complex> v1(n, 1.0), v2(n, 0.0);
        kernels::propagate_forward(cells, 0, cells.size(), lambdas, v1, v2);
        for (std::size_t i = 0; i < n; ++i) {
            out.a[i] = v1[i];
            out.b[i] = v2[i];
            out.b_proj[i] = v2[i];
            out.overflow[i] = out_of_range(v1[i], cfg.overflow_bound) || out_of_range(v2[i], cfg.overflow_bound);
        }
        return out;
    }

    const std::size_t m = split_index(cells);
    std::vector<Complex> psi1(n, 1.0), psi2(n, 0.0);
    kernels::propagate_forward(cells, 0, m, lambdas, psi1, psi2);
    // Backward from the right edge: first n entries start at (0,1), the next n at (1,0).
    std::vector<Complex> lam2(2 * n), w1(2 * n), w2(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        lam2[i] = lam2[n + i] = lambdas[i];
        w1[i] = 0.0;
        w2[i] = 1.0;
        w1[n + i] = 1.0;
        w2[n + i] = 0.0;
    }
    kernels::propagate_backward(cells, m, cells.size(), lam2, w1, w2);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex c1 = w1[i], c2 = w2[i], r1 = w1[n + i], r2 = w2[n + i];
        out.a[i] = psi1[i] * c2 - psi2[i] * c1;
        out.b[i] = psi2[i] * r1 - psi1[i] * r2;
        const double cc = std::norm(c1) + std::norm(c2);
        out.b_proj[i] = (std::conj(c1) * psi1[i] + std::conj(c2) * psi2[i]) / cc;
        out.overflow[i] = false;
        for (Complex z : {psi1[i], psi2[i], c1, c2, r1, r2, out.a[i], out.b[i], out.b_proj[i]})
            if (out_of_range(z, cfg.overflow_bound)) out.overflow[i] = true;
    }
    return out;
}

void throw_on_overflow(const RawJost& raw, std::span<const Complex> lambdas) {
    for (std::size_t i = 0; i < raw.overflow.size(); ++i)
        if (raw.overflow[i])
            throw OverflowError("scattering magnitudes exceed the configured bound at lambda = " +
                                std::to_string(lambdas[i].real()) + (lambdas[i].imag() < 0 ? "" : "+") +
                                std::to_string(lambdas[i].imag()) + "j");
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
    if (name == "piecewise_constant" || name == "forward" || name == "PiecewiseConstant2x2")
        return Scheme::PiecewiseConstant2x2;
    if (name == "forward_backward" || name == "ForwardBackwardSplit") return Scheme::ForwardBackwardSplit;
    throw ValidationError("unknown scattering scheme: " + name);
}

std::string scheme_name(Scheme s) {
    return s == Scheme::PiecewiseConstant2x2 ? "piecewise_constant" : "forward_backward";
}

void ScatterConfig::validate() const {
    if (!(newton_tol > 0.0) || !std::isfinite(newton_tol)) throw ValidationError("newton_tol must be > 0");
    if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw ValidationError("fd_step must be > 0");
    if (newton_max_iter < 1) throw ValidationError("newton_max_iter must be >= 1");
    if (samples < 2) throw ValidationError("samples must be >= 2");
    if (!(overflow_bound > 1.0)) throw ValidationError("overflow_bound must exceed 1");
}

Complex time_shift_b(Complex b, Complex lambda, double tau) {
    return b * std::exp(kTimeShiftPhaseFactor * kJ * lambda * tau);
}

std::vector<JostPair> scatter_many(const TimeSignal& sig, std::span<const Complex> lambdas, const ScatterConfig& cfg) {
    cfg.validate();
    for (const auto& l : lambdas) require_finite(l, "lambda");
    const auto cells = CellTable::from_signal(sig);
    const RawJost raw = scatter_raw(cells, lambdas, cfg);
    throw_on_overflow(raw, lambdas);
    std::vector<JostPair> out(lambdas.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {raw.a[i], raw.b[i]};
    return out;
}

JostPair scatter(const TimeSignal& sig, Complex lambda, const ScatterConfig& cfg) {
    return scatter_many(sig, std::span<const Complex>(&lambda, 1), cfg).front();
}

ContinuousSpectrum continuous_spectrum(const TimeSignal& sig, const UniformGrid& omega, const ScatterConfig& cfg) {
    std::vector<Complex> lambdas(omega.count);
    for (std::size_t i = 0; i < omega.count; ++i) lambdas[i] = omega[i];
    const auto jost = scatter_many(sig, lambdas, cfg);
    std::vector<Complex> a(omega.count), b(omega.count);
    for (std::size_t i = 0; i < omega.count; ++i) {
        if (std::abs(jost[i].a) < 1e-12) throw DivisionError("|a(omega)| < 1e-12 on the grid");
        a[i] = jost[i].a;
        b[i] = jost[i].b;
    }
    return ContinuousSpectrum(omega, std::move(a), std::move(b));
}

EigenSearch find_eigenvalues(const TimeSignal& sig, std::span<const Complex> seeds, const ScatterConfig& cfg) {
    cfg.validate();
    for (const auto& s : seeds) {
        require_finite(s, "seed");
        if (!(s.imag() > 0.0)) throw HalfPlaneError("seeds must lie in the open upper half-plane");
    }
    EigenSearch result;
    const auto cells = CellTable::from_signal(sig);
    if (cells.empty() || seeds.empty()) return result;

    struct Candidate {
        Complex lambda;
        double residual;
        // |a| / |a'|, the distance Newton would still move.
        double error;
    };
    std::vector<Candidate> converged;
    std::vector<Complex> current(seeds.begin(), seeds.end());
    std::vector<std::size_t> active(seeds.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
    const double h = cfg.fd_step;

    for (int iter = 0; iter <= cfg.newton_max_iter && !active.empty(); ++iter) {
        std::vector<Complex> probes;
        probes.reserve(3 * active.size());
        for (std::size_t idx : active) {
            probes.push_back(current[idx]);
            probes.push_back(current[idx] + h);
            probes.push_back(current[idx] - h);
        }
        const RawJost raw = scatter_raw(cells, probes, cfg);
        std::vector<std::size_t> still;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const std::size_t idx = active[k];
            if (raw.overflow[3 * k] || raw.overflow[3 * k + 1] || raw.overflow[3 * k + 2]) {
                result.failed_seeds.push_back(seeds[idx]);
                continue;
            }
            const Complex a = raw.a[3 * k];
            const Complex da = (raw.a[3 * k + 1] - raw.a[3 * k + 2]) / (2.0 * h);
            if (std::abs(a) < cfg.newton_tol) {
                const double err = std::abs(da) > 0.0 ? std::abs(a) / std::abs(da) : 0.0;
                converged.push_back({current[idx], std::abs(a), std::isfinite(err) ? err : 0.0});
                continue;
            }
            if (iter == cfg.newton_max_iter) {
                result.failed_seeds.push_back(seeds[idx]);
                continue;
            }
            Complex step = -a / da;
            if (!is_finite(step)) {
                result.failed_seeds.push_back(seeds[idx]);
                continue;
            }
            int halvings = 0;
            while ((current[idx] + step).imag() <= 0.0 && halvings < 30) {
                step *= 0.5;
                ++halvings;
            }
            const Complex next = current[idx] + step;
            if (next.imag() <= 0.0 || std::abs(next) > 1e4) {
                result.failed_seeds.push_back(seeds[idx]);
                continue;
            }
            current[idx] = next;
            still.push_back(idx);
        }
        active = std::move(still);
    }

    // Merge duplicates keeping the smallest residual, so the output does not depend on seed order. Two
    // stopped iterates count as one root when they are closer than 1e-4 plus both error estimates.
    std::sort(converged.begin(), converged.end(), [](const Candidate& x, const Candidate& y) {
        if (x.residual != y.residual) return x.residual < y.residual;
        if (x.lambda.imag() != y.lambda.imag()) return x.lambda.imag() < y.lambda.imag();
        return x.lambda.real() < y.lambda.real();
    });
    std::vector<Candidate> kept;
    for (const auto& c : converged) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Candidate& r) {
            return std::abs(r.lambda - c.lambda) < 1e-4 + r.error + c.error;
        });
        if (!dup) kept.push_back(c);
    }
    for (const auto& c : kept) result.roots.push_back(c.lambda);
    std::sort(result.roots.begin(), result.roots.end(), [](Complex x, Complex y) {
        return x.imag() != y.imag() ? x.imag() < y.imag() : x.real() < y.real();
    });
    if (result.roots.empty()) throw NoConvergenceError("Newton search failed from every seed");
    return result;
}

std::vector<DiscreteAmplitude> discrete_amplitudes(const TimeSignal& sig, std::span<const Complex> eigs,
                                                   const ScatterConfig& cfg) {
    cfg.validate();
    for (const auto& l : eigs) require_finite(l, "eigenvalue");
    const auto cells = CellTable::from_signal(sig);
    const double h = cfg.fd_step;
    std::vector<Complex> probes;
    probes.reserve(3 * eigs.size());
    for (const auto& l : eigs) {
        probes.push_back(l);
        probes.push_back(l + h);
        probes.push_back(l - h);
    }
    const RawJost raw = scatter_raw(cells, probes, cfg);
    throw_on_overflow(raw, probes);
    std::vector<DiscreteAmplitude> out(eigs.size());
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        auto& d = out[k];
        d.lambda = eigs[k];
        d.b = raw.b_proj[3 * k];
        d.da = (raw.a[3 * k + 1] - raw.a[3 * k + 2]) / (2.0 * h);
        if (d.da == Complex{}) throw DivisionError("vanishing derivative of a at an eigenvalue");
        d.qd = d.b / d.da;
        if (out_of_range(d.qd, cfg.overflow_bound)) throw OverflowError("norming constant exceeds the bound");
    }
    return out;
}

double energy_continuous(const ContinuousSpectrum& cs, double edge_tol) {
    const std::size_t n = cs.size();
    std::vector<double> f(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = std::log(std::norm(cs.a()[i]));
        peak = std::max(peak, std::abs(f[i]));
    }
    const double edge = std::max(std::abs(f.front()), std::abs(f.back()));
    if (edge > 1e-6 && edge > edge_tol * peak)
        throw GridTooNarrowError("ln|a|^2 has not decayed at the grid edges");
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < n; ++i) sum += f[i];
    return -sum * cs.omega().step / std::numbers::pi;
}

JostPair compose_segments(const SegmentJost& l, const SegmentJost& m, const SegmentJost& r) {
    const Complex aL = l.at.a, bL = l.at.b;
    const Complex aT = m.at.a, bT = m.at.b, aTc = m.conj_at.a, bTc = m.conj_at.b;
    const Complex aR = r.at.a, bR = r.at.b, aRc = r.conj_at.a, bRc = r.conj_at.b;
    return {aL * aT * aR - bL * bTc * aR - aL * bT * bRc - bL * aTc * bRc,
            aL * aT * bR - bL * bTc * bR + aL * bT * aRc + bL * aTc * aRc};
}

}  // namespace nftk
