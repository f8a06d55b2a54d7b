#include <algorithm>
#include <array>
#include <cmath>

#include "nftk/kernels/transfer.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define NFTK_HAVE_AVX2_TU 1
#endif

namespace nftk::kernels::avx2 {

#if defined(NFTK_HAVE_AVX2_TU)

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kResync = 64;
constexpr int kMaxDegree = 12;

struct C4 {
    __m256d re, im;
};

inline C4 load(const std::array<Complex, kLanes>& z) {
    return {_mm256_setr_pd(z[0].real(), z[1].real(), z[2].real(), z[3].real()),
            _mm256_setr_pd(z[0].imag(), z[1].imag(), z[2].imag(), z[3].imag())};
}

inline void store(C4 v, std::array<Complex, kLanes>& z) {
    alignas(32) double re[kLanes], im[kLanes];
    _mm256_store_pd(re, v.re);
    _mm256_store_pd(im, v.im);
    for (std::size_t l = 0; l < kLanes; ++l) z[l] = {re[l], im[l]};
}

inline C4 add(C4 a, C4 b) { return {_mm256_add_pd(a.re, b.re), _mm256_add_pd(a.im, b.im)}; }
inline C4 sub(C4 a, C4 b) { return {_mm256_sub_pd(a.re, b.re), _mm256_sub_pd(a.im, b.im)}; }
inline C4 neg(C4 a) {
    const __m256d zero = _mm256_setzero_pd();
    return {_mm256_sub_pd(zero, a.re), _mm256_sub_pd(zero, a.im)};
}

inline C4 mul(C4 a, C4 b) {
    return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
            _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}

// a*b + c*d
inline C4 mul2(C4 a, C4 b, C4 c, C4 d) {
    __m256d re = _mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im));
    __m256d im = _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re));
    re = _mm256_fmadd_pd(c.re, d.re, re);
    re = _mm256_fnmadd_pd(c.im, d.im, re);
    im = _mm256_fmadd_pd(c.re, d.im, im);
    im = _mm256_fmadd_pd(c.im, d.re, im);
    return {re, im};
}

inline C4 mul_scalar(C4 a, double re, double im) {
    const __m256d br = _mm256_set1_pd(re), bi = _mm256_set1_pd(im);
    return {_mm256_fmsub_pd(a.re, br, _mm256_mul_pd(a.im, bi)), _mm256_fmadd_pd(a.re, bi, _mm256_mul_pd(a.im, br))};
}

// sum_k coef[k] z^k with real coefficients
inline C4 horner(C4 z, const double* coef, int degree) {
    C4 acc{_mm256_set1_pd(coef[degree]), _mm256_setzero_pd()};
    for (int k = degree - 1; k >= 0; --k) {
        acc = mul(acc, z);
        acc.re = _mm256_add_pd(acc.re, _mm256_set1_pd(coef[k]));
    }
    return acc;
}

struct Series {
    double cos_coef[kMaxDegree + 1];
    double sinc_coef[kMaxDegree + 1];
    Series() {
        double f = 1.0;
        for (int k = 0; k <= kMaxDegree; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            cos_coef[k] = sign / f;
            f *= static_cast<double>(2 * k + 1);
            sinc_coef[k] = sign / f;
            f *= static_cast<double>(2 * k + 2);
        }
    }
};

const Series& series() {
    static const Series s;
    return s;
}

// Smallest degree whose first dropped cosine term is below double rounding, or -1 when z is too large.
int series_degree(double zmax) {
    if (zmax > 1.0) return -1;
    double term = 1.0, f = 1.0;
    for (int m = 0; m <= kMaxDegree; ++m) {
        term *= zmax;
        f *= static_cast<double>((2 * m + 1) * (2 * m + 2));
        if (term / f < 1e-18) return m;
    }
    return -1;
}

void phases(const std::array<Complex, kLanes>& lam, double t, std::array<Complex, kLanes>& p,
            std::array<Complex, kLanes>& pinv) {
    for (std::size_t l = 0; l < kLanes; ++l) {
        p[l] = std::exp(2.0 * kJ * lam[l] * t);
        pinv[l] = std::exp(-2.0 * kJ * lam[l] * t);
    }
}

void run_batch(const CellTable& cells, std::size_t begin, std::size_t end, const std::array<Complex, kLanes>& lam,
               std::array<Complex, kLanes>& x, std::array<Complex, kLanes>& y, bool backward, int degree) {
    const double dt = cells.dt;
    std::array<Complex, kLanes> l2, e, einv, r, rinv, jl, p, pinv;
    for (std::size_t l = 0; l < kLanes; ++l) {
        l2[l] = lam[l] * lam[l] * dt * dt;
        e[l] = std::exp(kJ * lam[l] * dt);
        einv[l] = std::exp(-kJ * lam[l] * dt);
        r[l] = std::exp(2.0 * kJ * lam[l] * dt);
        rinv[l] = std::exp(-2.0 * kJ * lam[l] * dt);
        jl[l] = kJ * lam[l];
    }
    const C4 vl2 = load(l2), ve = load(e), veinv = load(einv), vjl = load(jl);
    const C4 step = backward ? load(rinv) : load(r);
    const C4 step_inv = backward ? load(r) : load(rinv);
    const __m256d vdt = _mm256_set1_pd(dt);
    const Series& s = series();

    C4 v1 = load(x), v2 = load(y);
    C4 vp{}, vpinv{};
    const std::size_t count = end - begin;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t n = backward ? end - 1 - k : begin + k;
        if (k % kResync == 0) {
            phases(lam, cells.t[n], p, pinv);
            vp = load(p);
            vpinv = load(pinv);
        }
        const Complex q = cells.q[n];
        const C4 z{_mm256_add_pd(vl2.re, _mm256_set1_pd(std::norm(q) * dt * dt)), vl2.im};
        const C4 c = horner(z, s.cos_coef, degree);
        C4 sn = horner(z, s.sinc_coef, degree);
        sn.re = _mm256_mul_pd(sn.re, vdt);
        sn.im = _mm256_mul_pd(sn.im, vdt);
        const C4 jls = mul(vjl, sn);
        const C4 k11 = mul(ve, sub(c, jls));
        const C4 k22 = mul(veinv, add(c, jls));
        const C4 k12 = mul(sn, mul_scalar(vp, q.real(), q.imag()));
        const C4 k21 = neg(mul(sn, mul_scalar(vpinv, q.real(), -q.imag())));
        C4 n1, n2;
        if (!backward) {
            n1 = mul2(k11, v1, k12, v2);
            n2 = mul2(k21, v1, k22, v2);
        } else {
            n1 = mul2(k22, v1, neg(k12), v2);
            n2 = mul2(neg(k21), v1, k11, v2);
        }
        v1 = n1;
        v2 = n2;
        vp = mul(vp, step);
        vpinv = mul(vpinv, step_inv);
    }
    store(v1, x);
    store(v2, y);
}

}  // namespace

void propagate(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
               std::span<Complex> v1, std::span<Complex> v2, bool backward) {
    if (begin >= end) return;
    const double qz = cells.max_q2 * cells.dt * cells.dt;
    for (std::size_t i0 = 0; i0 < lambdas.size(); i0 += kLanes) {
        const std::size_t width = std::min(kLanes, lambdas.size() - i0);
        std::array<Complex, kLanes> lam{}, x{}, y{};
        double lmax = 0.0;
        for (std::size_t l = 0; l < width; ++l) {
            lam[l] = lambdas[i0 + l];
            x[l] = v1[i0 + l];
            y[l] = v2[i0 + l];
            lmax = std::max(lmax, std::norm(lam[l]));
        }
        const int degree = series_degree(lmax * cells.dt * cells.dt + qz);
        if (degree < 0) {
            scalar::propagate(cells, begin, end, lambdas.subspan(i0, width), v1.subspan(i0, width),
                              v2.subspan(i0, width), backward);
            continue;
        }
        run_batch(cells, begin, end, lam, x, y, backward, degree);
        for (std::size_t l = 0; l < width; ++l) {
            v1[i0 + l] = x[l];
            v2[i0 + l] = y[l];
        }
    }
}

#else

void propagate(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
               std::span<Complex> v1, std::span<Complex> v2, bool backward) {
    scalar::propagate(cells, begin, end, lambdas, v1, v2, backward);
}

#endif

}  // namespace nftk::kernels::avx2
