#include "nftk/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nftk/errors.hpp"

namespace nftk {

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(Complex z, const char* what) {
    if (!is_finite(z)) throw ValidationError(std::string(what) + " is not finite");
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " is not finite");
}

UniformGrid UniformGrid::symmetric(double max, std::size_t count) {
    require_finite(max, "grid half-width");
    if (!(max > 0.0) || count < 2) throw ValidationError("symmetric grid needs max > 0 and at least 2 points");
    return {-max, 2.0 * max / static_cast<double>(count - 1), count};
}

bool operator==(const UniformGrid& a, const UniformGrid& b) {
    if (a.count != b.count) return false;
    const double scale = std::max(std::abs(a.start), std::abs(a.step) * static_cast<double>(a.count));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    return std::abs(a.start - b.start) <= tol && std::abs(a.step - b.step) * static_cast<double>(a.count) <= tol;
}

TimeGrid TimeGrid::symmetric(double t_max, std::size_t count) {
    const auto g = UniformGrid::symmetric(t_max, count);
    return {g.start, g.step, g.count};
}

TimeSignal::TimeSignal(double t_start, double dt, std::vector<Complex> samples)
    : t_start_(t_start), dt_(dt), samples_(std::move(samples)) {
    require_finite(t_start_, "t_start");
    require_finite(dt_, "dt");
    if (!(dt_ > 0.0)) throw ValidationError("dt must be positive");
    if (samples_.empty()) throw ValidationError("time signal has no samples");
    for (const auto& q : samples_) require_finite(q, "signal sample");
}

TimeSignal::TimeSignal(const TimeGrid& grid, std::vector<Complex> samples)
    : TimeSignal(grid.t_start, grid.dt, std::move(samples)) {
    if (samples_.size() != grid.count) throw ValidationError("sample count does not match the grid");
}

double TimeSignal::energy() const {
    double e = 0.0;
    for (const auto& q : samples_) e += std::norm(q);
    return e * dt_;
}

TimeSignal truncate(const TimeSignal& sig, double T) {
    require_finite(T, "truncation window");
    if (!(T > 0.0)) throw ValidationError("truncation window must be positive");
    std::vector<Complex> out(sig.samples().begin(), sig.samples().end());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (std::abs(sig.time(i)) > T) out[i] = 0.0;
    return TimeSignal(sig.t_start(), sig.dt(), std::move(out));
}

DiscreteSpectrum::DiscreteSpectrum(std::vector<SpectralPoint> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
        require_finite(e.lambda, "eigenvalue");
        require_finite(e.b, "b coefficient");
        if (!(e.lambda.imag() > 0.0)) throw ValidationError("eigenvalues must lie in the open upper half-plane");
    }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const SpectralPoint& x, const SpectralPoint& y) { return x.lambda.imag() < y.lambda.imag(); });
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (std::size_t k = i + 1; k < entries_.size(); ++k) {
            const double scale = std::max(std::abs(entries_[i].lambda), std::abs(entries_[k].lambda));
            if (std::abs(entries_[i].lambda - entries_[k].lambda) <= 1e-12 * scale)
                throw DegenerateSpectrumError("eigenvalues must be pairwise distinct");
        }
}

std::vector<Complex> DiscreteSpectrum::eigenvalues() const {
    std::vector<Complex> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.lambda);
    return out;
}

ContinuousSpectrum::ContinuousSpectrum(UniformGrid omega, std::vector<Complex> a, std::vector<Complex> b)
    : omega_(omega), a_(std::move(a)), b_(std::move(b)) {
    require_finite(omega_.start, "omega grid start");
    require_finite(omega_.step, "omega grid step");
    if (a_.size() != omega_.count || b_.size() != omega_.count)
        throw GridMismatchError("a, b and omega grid lengths differ");
    if (omega_.count < 2 || !(omega_.step > 0.0)) throw ValidationError("omega grid must be strictly increasing");
    const double mid = omega_.start + 0.5 * omega_.step * static_cast<double>(omega_.count - 1);
    if (std::abs(mid) > 1e-9 * omega_.step * static_cast<double>(omega_.count))
        throw ValidationError("omega grid must be symmetric about 0");
    for (std::size_t i = 0; i < a_.size(); ++i) {
        require_finite(a_[i], "a(omega)");
        require_finite(b_[i], "b(omega)");
    }
}

std::vector<Complex> ContinuousSpectrum::qc() const {
    std::vector<Complex> out(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) out[i] = b_[i] / a_[i];
    return out;
}

Complex propagate_b(Complex b, Complex lambda, double z) { return b * std::exp(-4.0 * kJ * lambda * lambda * z); }

double validate_unitarity(const ContinuousSpectrum& cs) {
    double worst = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i)
        worst = std::max(worst, std::abs(std::norm(cs.a()[i]) + std::norm(cs.b()[i]) - 1.0));
    return worst;
}

}  // namespace nftk
