#include "nftk/inversion.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>

#include "nftk/errors.hpp"

namespace nftk {

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t padded_length(std::size_t n) {
    std::size_t len = 1;
    while (len < 4 * n) len <<= 1;
    return len;
}

bool edges_decayed(std::span<const double> f, double abs_floor, double edge_tol) {
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(f.front()), std::abs(f.back()));
    return edge <= abs_floor || edge <= edge_tol * peak;
}

std::vector<double> log_one_minus_b2(const ContinuousSpectrum& cs) {
    std::vector<double> f(cs.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double b2 = std::norm(cs.b()[i]);
        if (!(b2 < 1.0)) throw SupercriticalError("|b(omega)| >= 1 on the grid");
        f[i] = std::log1p(-b2);
    }
    return f;
}

struct FftwBuffers {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    explicit FftwBuffers(std::size_t len) {
        real = fftw_alloc_real(len);
        spec = fftw_alloc_complex(len / 2 + 1);
    }
    ~FftwBuffers() {
        fftw_free(real);
        fftw_free(spec);
    }
    FftwBuffers(const FftwBuffers&) = delete;
    FftwBuffers& operator=(const FftwBuffers&) = delete;
};

}  // namespace

std::vector<double> hilbert(std::span<const double> f, double edge_tol) {
    if (f.empty()) return {};
    for (double v : f) require_finite(v, "Hilbert input");
    if (!edges_decayed(f, 1e-6, edge_tol)) throw EdgeDecayError("Hilbert input has not decayed at the grid edges");
    const std::size_t n = f.size();
    const std::size_t len = padded_length(n);
    FftwBuffers buf(len);
    fftw_plan fwd, inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf.real, buf.spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(len), buf.spec, buf.real, FFTW_ESTIMATE);
    }
    std::fill(buf.real, buf.real + len, 0.0);
    std::copy(f.begin(), f.end(), buf.real);
    fftw_execute(fwd);
    const std::size_t half = len / 2;
    buf.spec[0][0] = buf.spec[0][1] = 0.0;
    buf.spec[half][0] = buf.spec[half][1] = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
        const double re = buf.spec[k][0], im = buf.spec[k][1];
        buf.spec[k][0] = im;
        buf.spec[k][1] = -re;
    }
    fftw_execute(inv);
    std::vector<double> out(buf.real, buf.real + n);
    for (auto& v : out) v /= static_cast<double>(len);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    return out;
}

std::vector<Complex> radiation_a(const ContinuousSpectrum& cs, double edge_tol) {
    const auto f = log_one_minus_b2(cs);
    const auto h = hilbert(f, edge_tol);
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::exp(0.5 * f[i]) * std::exp(0.5 * kJ * h[i]);
    return out;
}

AllPass allpass(const ContinuousSpectrum& cs, double edge_tol) {
    const auto ra = radiation_a(cs, edge_tol);
    AllPass g{cs.omega(), std::vector<Complex>(ra.size())};
    for (std::size_t i = 0; i < ra.size(); ++i) g.g[i] = cs.a()[i] / ra[i];
    return g;
}

int count_eigenvalues(std::span<const Complex> g) {
    if (g.size() < 2) return 0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        if (g[i] == Complex{} || !is_finite(g[i]) || !is_finite(g[i + 1]))
            throw PhaseJumpError("all-pass samples must be finite and nonzero");
        const double d = std::arg(g[i + 1] / g[i]);
        if (std::abs(d) >= kMaxPhaseStep) throw PhaseJumpError("phase step too large to unwrap; refine the grid");
        total += d;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

Complex blaschke(std::span<const Complex> eigs, Complex lambda) {
    Complex out = 1.0;
    for (const auto& l : eigs) out *= (lambda - l) / (lambda - std::conj(l));
    return out;
}

namespace {

double fit_residual(const AllPass& g, const Eigen::VectorXd& p, int n) {
    double r = 0.0;
    std::vector<Complex> eigs(n);
    for (int k = 0; k < n; ++k) eigs[k] = {p[2 * k], std::exp(p[2 * k + 1])};
    for (std::size_t i = 0; i < g.g.size(); ++i) r += std::norm(blaschke(eigs, g.omega[i]) - g.g[i]);
    return r;
}

}  // namespace

FitReport fit_eigenvalues(const AllPass& g, int n, std::span<const Complex> seeds, const FitOptions& opt) {
    if (n < 0) throw ValidationError("eigenvalue count must be non-negative");
    if (static_cast<std::size_t>(n) != seeds.size()) throw ValidationError("need exactly one seed per eigenvalue");
    if (g.g.size() != g.omega.count) throw GridMismatchError("all-pass samples and grid differ in length");
    FitReport rep;
    if (n == 0) {
        for (const auto& v : g.g) rep.residual += std::norm(1.0 - v);
        rep.seed_residual = rep.residual;
        return rep;
    }
    for (const auto& s : seeds) {
        require_finite(s, "seed");
        if (!(s.imag() > 0.0)) throw HalfPlaneError("seeds must lie in the open upper half-plane");
    }
    const int winding = count_eigenvalues(g.g);
    if (n > winding) throw IllPosedError("requested more eigenvalues than the phase winding supports");

    const std::size_t m = g.g.size();
    Eigen::VectorXd p(2 * n);
    for (int k = 0; k < n; ++k) {
        p[2 * k] = seeds[k].real();
        p[2 * k + 1] = std::log(seeds[k].imag());
    }
    double res = fit_residual(g, p, n);
    rep.seed_residual = res;
    Eigen::MatrixXd jac(2 * m, 2 * n);
    Eigen::VectorXd r(2 * m);
    std::vector<Complex> eigs(n);
    bool done = false;
    int it = 0;
    for (; it < opt.max_iter && !done; ++it) {
        for (int k = 0; k < n; ++k) eigs[k] = {p[2 * k], std::exp(p[2 * k + 1])};
        for (std::size_t i = 0; i < m; ++i) {
            const double w = g.omega[i];
            const Complex model = blaschke(eigs, w);
            const Complex diff = model - g.g[i];
            r[2 * i] = diff.real();
            r[2 * i + 1] = diff.imag();
            for (int k = 0; k < n; ++k) {
                const Complex l = eigs[k];
                const Complex dx = model * (-1.0 / (w - l) + 1.0 / (w - std::conj(l)));
                const Complex ds = model * (-kJ / (w - l) - kJ / (w - std::conj(l))) * l.imag();
                jac(2 * i, 2 * k) = dx.real();
                jac(2 * i + 1, 2 * k) = dx.imag();
                jac(2 * i, 2 * k + 1) = ds.real();
                jac(2 * i + 1, 2 * k + 1) = ds.imag();
            }
        }
        const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-r);
        if (!delta.allFinite()) throw NoConvergenceError("Gauss-Newton step is not finite");
        double scale = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h, scale *= 0.5) {
            const Eigen::VectorXd trial = p + scale * delta;
            const double tr = fit_residual(g, trial, n);
            if (tr < res) {
                p = trial;
                res = tr;
                improved = true;
                break;
            }
        }
        if (!improved || scale * delta.norm() < opt.step_tol * (1.0 + p.norm())) done = true;
    }
    if (!done) throw NoConvergenceError("all-pass fit did not converge within max_iter");
    rep.iterations = it;
    rep.residual = res;
    for (int k = 0; k < n; ++k) rep.eigenvalues.push_back({p[2 * k], std::exp(p[2 * k + 1])});
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](Complex x, Complex y) { return x.imag() < y.imag(); });
    return rep;
}

Complex a_from_b_trace(Complex lambda, const ContinuousSpectrum& cs, std::span<const Complex> eigs, double edge_tol) {
    require_finite(lambda, "lambda");
    if (!(lambda.imag() > 0.0)) throw HalfPlaneError("trace formula needs Im lambda > 0");
    const auto f = log_one_minus_b2(cs);
    if (!edges_decayed(f, 1e-8, edge_tol)) throw EdgeDecayError("ln(1-|b|^2) has not decayed at the grid edges");
    const UniformGrid& w = cs.omega();
    const double x = lambda.real();
    double f0 = 0.0;
    if (x >= w.start && x <= w.back()) {
        const double pos = (x - w.start) / w.step;
        const std::size_t i = std::min(static_cast<std::size_t>(pos), w.count - 2);
        const double frac = pos - static_cast<double>(i);
        f0 = (1.0 - frac) * f[i] + frac * f[i + 1];
    }
    Complex sum = 0.0;
    for (std::size_t i = 0; i < w.count; ++i) {
        const double weight = (i == 0 || i + 1 == w.count) ? 0.5 : 1.0;
        sum += weight * (f[i] - f0) / (w[i] - lambda);
    }
    Complex integral = sum * w.step + f0 * (std::log(w.back() - lambda) - std::log(w.start - lambda));
    return std::exp(integral / (2.0 * std::numbers::pi * kJ)) * blaschke(eigs, lambda);
}

}  // namespace nftk
