#include "nftk/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nftk/errors.hpp"
#include "nftk/soliton.hpp"

namespace nftk {

namespace {

// Logistic weight e^{-2 s u} / (e^{-2 s u} + e^{2 s u}) with u = T - t0.
double tail_weight(const TruncationModel& m) {
    const double x = 4.0 * m.sigma1() * (m.T() - m.t0());
    return x > 0.0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
}

// ln(e^{-2 s u} + e^{2 s u})
double log_denominator(const TruncationModel& m) {
    const double y = std::abs(2.0 * m.sigma1() * (m.T() - m.t0()));
    return y + std::log1p(std::exp(-2.0 * y));
}

Complex checked_shift(Complex lambda, const TruncationModel& m) {
    const Complex d = lambda + kJ * m.sigma1();
    if (std::abs(d) <= 1e-14 * std::max(1.0, m.sigma1())) throw PoleError("alpha/beta pole at -j sigma1");
    return d;
}

// beta(lambda) e^{-j phi}
Complex beta_reduced(Complex lambda, const TruncationModel& m) {
    const double sign = (m.N() % 2 == 0) ? 1.0 : -1.0;
    const double s1 = m.sigma1();
    return sign * (-2.0 * kJ * s1 / checked_shift(lambda, m)) *
           std::exp(2.0 * kJ * lambda * m.T() - log_denominator(m));
}

// a(lambda) alpha*(lambda*), written without the removable singularity at lambda = j sigma1.
Complex a_alpha_conj(Complex lambda, const TruncationModel& m) {
    const auto& ds = m.spectrum();
    Complex rest = 1.0;
    for (std::size_t k = 1; k < ds.size(); ++k) {
        const Complex lk = ds[k].lambda;
        rest *= (lambda - lk) / (lambda - std::conj(lk));
    }
    const Complex l1 = ds[0].lambda;
    const Complex reduced = rest / (lambda - std::conj(l1));
    return reduced * (lambda - l1) + 2.0 * kJ * m.sigma1() * tail_weight(m) * reduced;
}

Complex branch_value(Complex lambda, const TruncationModel& m, int branch) {
    return a_alpha_conj(lambda, m) - static_cast<double>(branch) * beta_reduced(lambda, m);
}

struct Interval {
    double lo, hi;
};

bool newton_branch(const TruncationModel& m, int branch, Complex seed, Interval iv, Complex& root) {
    Complex z = seed;
    for (int it = 0; it < 100; ++it) {
        const Complex f = branch_value(z, m, branch);
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        const Complex df = (branch_value(z + h, m, branch) - branch_value(z - h, m, branch)) / (2.0 * h);
        const Complex step = -f / df;
        if (!is_finite(step)) return false;
        z += step;
        if (!is_finite(z) || z.imag() <= iv.lo || z.imag() >= iv.hi) return false;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) {
            root = z;
            return true;
        }
    }
    if (std::abs(branch_value(z, m, branch)) < 1e-12) {
        root = z;
        return true;
    }
    return false;
}

// On the imaginary axis both branches are real for the symmetric model: bracket sign changes.
bool scan_branch(const TruncationModel& m, int branch, Interval iv, Complex& root) {
    const double lo = iv.lo + 1e-9;
    const double hi = std::min(iv.hi, lo + 10.0);
    auto f = [&](double y) { return branch_value(Complex{0.0, y}, m, branch).real(); };
    double y0 = lo, f0 = f(y0);
    for (double y1 = lo + 0.05; y0 < hi; y1 = std::min(y1 + 0.05, hi)) {
        const double f1 = f(y1);
        if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 <= 0.0) {
            double a = y0, b = y1, fa = f0;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double c = 0.5 * (a + b);
                const double fc = f(c);
                if (fa * fc <= 0.0) {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
            }
            root = {0.0, 0.5 * (a + b)};
            return true;
        }
        if (y1 >= hi) break;
        y0 = y1;
        f0 = f1;
    }
    return false;
}

}  // namespace

TruncationModel::TruncationModel(const DiscreteSpectrum& ds, double T) : ds_(ds), T_(T) {
    require_finite(T, "T");
    if (!(T > 0.0)) throw ValidationError("truncation window T must be positive");
    if (ds.empty()) throw ValidationError("truncation model needs at least one eigenvalue");
    for (const auto& e : ds.entries()) {
        if (std::abs(e.lambda.real()) > 1e-12 * e.lambda.imag())
            throw ValidationError("truncation model requires pure imaginary eigenvalues");
        if (std::abs(std::abs(e.b) - 1.0) > 1e-9) throw ValidationError("truncation model requires |b_k| = 1");
    }
    const TailParams tp = tail_parameters(ds);
    sigma1_ = tp.sigma1;
    t0_ = tp.t0;
    phi_ = std::arg(ds[0].b);
}

TruncationModel TruncationModel::from_sigmas(std::vector<double> sigmas, double phi, double T,
                                             std::vector<double> phases) {
    require_finite(phi, "phi");
    if (!phases.empty() && phases.size() != sigmas.size())
        throw ValidationError("phases must list one value per sigma");
    std::vector<std::size_t> order(sigmas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigmas[x] < sigmas[y]; });
    std::vector<SpectralPoint> pts;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t i = order[r];
        require_finite(sigmas[i], "sigma");
        if (!(sigmas[i] > 0.0)) throw ValidationError("sigmas must be positive");
        double ph = r == 0 ? phi : 0.0;
        if (!phases.empty()) {
            ph = phases[i];
            if (r == 0 && std::abs(std::remainder(ph - phi, 2.0 * std::numbers::pi)) > 1e-9)
                throw ValidationError("phi disagrees with the phase of the smallest-sigma eigenvalue");
        }
        pts.push_back({Complex{0.0, sigmas[i]}, std::exp(kJ * ph)});
    }
    TruncationModel m(DiscreteSpectrum(std::move(pts)), T);
    m.phi_ = phi;
    return m;
}

std::vector<double> TruncationModel::sigmas() const {
    std::vector<double> out;
    for (const auto& e : ds_.entries()) out.push_back(e.lambda.imag());
    return out;
}

Complex alpha(Complex lambda, const TruncationModel& m) {
    require_finite(lambda, "lambda");
    return 1.0 - tail_weight(m) * 2.0 * kJ * m.sigma1() / checked_shift(lambda, m);
}

Complex beta(Complex lambda, const TruncationModel& m) {
    require_finite(lambda, "lambda");
    return std::exp(kJ * m.phi()) * beta_reduced(lambda, m);
}

Complex alpha_conj(Complex lambda, const TruncationModel& m) { return std::conj(alpha(std::conj(lambda), m)); }
Complex beta_conj(Complex lambda, const TruncationModel& m) { return std::conj(beta(std::conj(lambda), m)); }

JostPair tail_jost_left(Complex lambda, const TruncationModel& m) {
    if (!(lambda.imag() > -m.sigma1())) throw StripError("left tail Jost pair needs Im lambda > -sigma1");
    return {alpha(lambda, m), beta(lambda, m)};
}

JostPair tail_jost_right(Complex lambda, const TruncationModel& m) {
    if (!(std::abs(lambda.imag()) < m.sigma1())) throw StripError("right tail Jost pair needs |Im lambda| < sigma1");
    return {alpha(lambda, m), std::exp(2.0 * kJ * m.phi()) * beta_conj(lambda, m)};
}

JostPair truncated_jost_real(double omega, const TruncationModel& m) {
    require_finite(omega, "omega");
    const Complex a = a_closed_form(m.spectrum(), omega);
    const Complex al = alpha(omega, m), be = beta(omega, m);
    const Complex alc = std::conj(al), bec = std::conj(be);
    const Complex e2 = std::exp(2.0 * kJ * m.phi());
    return {a * alc * alc - std::conj(a) * be * be / e2, -(std::conj(a) * al * be + a * alc * bec * e2)};
}

ContinuousSpectrum truncated_spectrum(const UniformGrid& omega, const TruncationModel& m) {
    std::vector<Complex> a(omega.count), b(omega.count);
    for (std::size_t i = 0; i < omega.count; ++i) {
        const JostPair p = truncated_jost_real(omega[i], m);
        a[i] = p.a;
        b[i] = p.b;
    }
    return ContinuousSpectrum(omega, std::move(a), std::move(b));
}

JostPair truncated_jost_strip(Complex lambda, const TruncationModel& m, const BFunction& b_fn) {
    require_finite(lambda, "lambda");
    if (!(std::abs(lambda.imag()) < m.sigma1())) throw StripError("strip formulas need |Im lambda| < sigma1");
    const Complex a = a_closed_form(m.spectrum(), lambda);
    const Complex ac = 1.0 / a;
    const BValues bv = b_fn ? b_fn(lambda) : BValues{};
    const Complex al = alpha(lambda, m), alc = alpha_conj(lambda, m);
    const Complex be = beta(lambda, m), bec = beta_conj(lambda, m);
    const Complex e2 = std::exp(2.0 * kJ * m.phi());
    const Complex aT = a * alc * alc - ac * be * be / e2 + alc * be * (bv.b_conj + bv.b / e2);
    const Complex bT = -(ac * al * be + a * alc * bec * e2) + al * alc * bv.b - be * bec * bv.b_conj * e2;
    return {aT, bT};
}

std::vector<Complex> analytic_eigenvalues(const TruncationModel& m, std::vector<Complex> seeds) {
    if (seeds.empty()) seeds = m.eigenvalues();
    for (const auto& s : seeds) {
        require_finite(s, "seed");
        if (!(s.imag() > 0.0)) throw HalfPlaneError("seeds must lie in the open upper half-plane");
    }
    std::sort(seeds.begin(), seeds.end(), [](Complex x, Complex y) { return x.imag() < y.imag(); });
    std::vector<Complex> roots;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const double lo = k == 0 ? 0.0 : 0.5 * (seeds[k - 1].imag() + seeds[k].imag());
        const double hi = k + 1 == seeds.size() ? std::numeric_limits<double>::infinity()
                                                : 0.5 * (seeds[k].imag() + seeds[k + 1].imag());
        const Interval iv{lo, hi};
        std::vector<Complex> found;
        for (int branch : {+1, -1}) {
            Complex r;
            if (newton_branch(m, branch, seeds[k], iv, r) || scan_branch(m, branch, iv, r)) found.push_back(r);
        }
        if (found.empty()) continue;
        roots.push_back(*std::min_element(found.begin(), found.end(),
                                          [](Complex x, Complex y) { return x.imag() < y.imag(); }));
    }
    if (roots.empty()) throw NoConvergenceError("no analytic eigenvalue found from any seed");
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) { return x.imag() < y.imag(); });
    std::vector<Complex> unique;
    for (const auto& r : roots)
        if (unique.empty() || std::abs(unique.back() - r) > 1e-9) unique.push_back(r);
    return unique;
}

std::vector<Complex> analytic_b_values(std::span<const Complex> eigs, const TruncationModel& m) {
    const auto& ds = m.spectrum();
    const Complex e2 = std::exp(2.0 * kJ * m.phi());
    std::vector<Complex> out;
    out.reserve(eigs.size());
    for (const auto& lt : eigs) {
        require_finite(lt, "eigenvalue");
        const double gap = lt.imag() - m.sigma1();
        if (std::abs(gap) < 1e-6) throw BranchAmbiguityError("eigenvalue too close to Im = sigma1 to pick a branch");
        const Complex al = alpha(lt, m), alc = alpha_conj(lt, m);
        const Complex be = beta(lt, m), bec = beta_conj(lt, m);
        if (gap < 0.0) {
            const Complex a = a_closed_form(ds, lt);
            out.push_back(-(al * be / a + a * alc * bec * e2));
        } else {
            std::size_t best = 0;
            for (std::size_t k = 1; k < ds.size(); ++k)
                if (std::abs(ds[k].lambda - lt) < std::abs(ds[best].lambda - lt)) best = k;
            const Complex bk = ds[best].b;
            out.push_back(al * alc * bk - be * bec * e2 / bk);
        }
    }
    return out;
}

}  // namespace nftk
