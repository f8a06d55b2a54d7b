#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nftk {

using Complex = std::complex<double>;

inline constexpr Complex kJ{0.0, 1.0};

bool is_finite(Complex z);

// Throws ValidationError naming `what` if z has a NaN or Inf component.
void require_finite(Complex z, const char* what);
void require_finite(double x, const char* what);

// Uniform grid x_i = start + i*step, i in [0, count).
struct UniformGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double operator[](std::size_t i) const { return start + static_cast<double>(i) * step; }
    double back() const { return (*this)[count - 1]; }

    // count points on [-max, max], both ends included.
    static UniformGrid symmetric(double max, std::size_t count);
};

bool operator==(const UniformGrid& a, const UniformGrid& b);

struct TimeGrid {
    double t_start = 0.0;
    double dt = 1.0;
    std::size_t count = 0;

    // count samples on [-t_max, t_max].
    static TimeGrid symmetric(double t_max, std::size_t count);
};

class TimeSignal {
public:
    TimeSignal(double t_start, double dt, std::vector<Complex> samples);
    TimeSignal(const TimeGrid& grid, std::vector<Complex> samples);

    double t_start() const { return t_start_; }
    double dt() const { return dt_; }
    std::size_t size() const { return samples_.size(); }
    double time(std::size_t i) const { return t_start_ + static_cast<double>(i) * dt_; }
    double t_end() const { return time(samples_.size() - 1); }
    TimeGrid grid() const { return {t_start_, dt_, samples_.size()}; }
    std::span<const Complex> samples() const { return samples_; }
    Complex operator[](std::size_t i) const { return samples_[i]; }

    // Rectangle-rule energy sum |q_i|^2 dt.
    double energy() const;

private:
    double t_start_;
    double dt_;
    std::vector<Complex> samples_;
};

// Zero every sample with |t| > T.
TimeSignal truncate(const TimeSignal& sig, double T);

struct SpectralPoint {
    Complex lambda;
    Complex b;
};

class DiscreteSpectrum {
public:
    DiscreteSpectrum() = default;
    // Sorts by ascending Im(lambda). Rejects Im <= 0, non-finite values and coincident eigenvalues.
    explicit DiscreteSpectrum(std::vector<SpectralPoint> entries);

    std::span<const SpectralPoint> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const SpectralPoint& operator[](std::size_t i) const { return entries_[i]; }
    std::vector<Complex> eigenvalues() const;

private:
    std::vector<SpectralPoint> entries_;
};

struct JostPair {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
};

class ContinuousSpectrum {
public:
    ContinuousSpectrum(UniformGrid omega, std::vector<Complex> a, std::vector<Complex> b);

    const UniformGrid& omega() const { return omega_; }
    std::size_t size() const { return a_.size(); }
    std::span<const Complex> a() const { return a_; }
    std::span<const Complex> b() const { return b_; }
    JostPair at(std::size_t i) const { return {a_[i], b_[i]}; }
    // Q_c = b/a per grid point.
    std::vector<Complex> qc() const;

private:
    UniformGrid omega_;
    std::vector<Complex> a_;
    std::vector<Complex> b_;
};

// b(lambda; z) = b * exp(-4j lambda^2 z).
Complex propagate_b(Complex b, Complex lambda, double z);

// max_i | |a_i|^2 + |b_i|^2 - 1 |
double validate_unitarity(const ContinuousSpectrum& cs);

}  // namespace nftk
