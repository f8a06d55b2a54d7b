#include <algorithm>
#include <atomic>
#include <string>

#include "nftk/errors.hpp"
#include "nftk/kernels/transfer.hpp"

namespace nftk::kernels {

namespace {

std::atomic<Isa>& selection() {
    static std::atomic<Isa> isa{detected_isa()};
    return isa;
}

void check_spans(std::size_t begin, std::size_t end, const CellTable& cells, std::span<const Complex> lambdas,
                 std::span<Complex> v1, std::span<Complex> v2) {
    if (v1.size() != lambdas.size() || v2.size() != lambdas.size())
        throw ValidationError("state vectors and lambdas differ in length");
    if (begin > end || end > cells.size()) throw ValidationError("cell range out of bounds");
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
    if (isa == Isa::Scalar) return true;
#if defined(NFTK_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detected_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return selection().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_supported(isa)) throw ValidationError(std::string("ISA not supported on this host: ") + isa_name(isa));
    selection().store(isa, std::memory_order_relaxed);
}

CellTable CellTable::from_signal(const TimeSignal& sig) {
    CellTable c;
    c.dt = sig.dt();
    const auto s = sig.samples();
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && s[lo] == Complex{}) ++lo;
    while (hi > lo && s[hi - 1] == Complex{}) --hi;
    c.t.reserve(hi - lo);
    c.q.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        c.t.push_back(sig.time(i));
        c.q.push_back(s[i]);
        c.max_q2 = std::max(c.max_q2, std::norm(s[i]));
    }
    return c;
}

std::size_t CellTable::lower_bound(double tm) const {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), tm) - t.begin());
}

void propagate_forward(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
                       std::span<Complex> v1, std::span<Complex> v2, Isa isa) {
    check_spans(begin, end, cells, lambdas, v1, v2);
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2))
        avx2::propagate(cells, begin, end, lambdas, v1, v2, false);
    else
        scalar::propagate(cells, begin, end, lambdas, v1, v2, false);
}

void propagate_backward(const CellTable& cells, std::size_t begin, std::size_t end, std::span<const Complex> lambdas,
                        std::span<Complex> v1, std::span<Complex> v2, Isa isa) {
    check_spans(begin, end, cells, lambdas, v1, v2);
    if (isa == Isa::Avx2 && isa_supported(Isa::Avx2))
        avx2::propagate(cells, begin, end, lambdas, v1, v2, true);
    else
        scalar::propagate(cells, begin, end, lambdas, v1, v2, true);
}

}  // namespace nftk::kernels
