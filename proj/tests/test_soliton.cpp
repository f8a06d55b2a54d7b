#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nftk/errors.hpp"
#include "nftk/scattering.hpp"
#include "nftk/soliton.hpp"

using namespace nftk;
using std::numbers::pi;

namespace {

DiscreteSpectrum four_soliton(const std::vector<double>& phases = {0.0, 0.0, 0.0, 0.0}) {
    const double s[] = {0.5, 1.0, 1.5, 2.0};
    std::vector<SpectralPoint> pts;
    for (int k = 0; k < 4; ++k) pts.push_back({Complex{0.0, s[k]}, std::exp(kJ * phases[k])});
    return DiscreteSpectrum(pts);
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

TEST_CASE("a_closed_form examples") {
    const DiscreteSpectrum one({{kJ, 1.0}});
    CHECK(std::abs(a_closed_form(one, 0.0) - Complex{-1.0, 0.0}) < 1e-15);
    CHECK(std::abs(a_closed_form(four_soliton(), 0.0) - Complex{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(a_closed_form(one, kJ)) == 0.0);
    CHECK_THROWS_AS(a_closed_form(one, -kJ), PoleError);
    CHECK(std::abs(a_closed_form(four_soliton(), 1e6) - 1.0) < 1e-5);
}

TEST_CASE("a_closed_form is unimodular on the real axis") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    const DiscreteSpectrum ds({{Complex{0.3, 0.7}, 1.0}, {Complex{-1.0, 2.0}, 2.0}, {kJ * 0.1, 1.0}});
    for (int i = 0; i < 1000; ++i) CHECK(std::abs(std::abs(a_closed_form(ds, u(gen))) - 1.0) < 1e-14);
}

TEST_CASE("a_derivative_closed_form examples and finite-difference oracle") {
    const DiscreteSpectrum one({{kJ, 1.0}});
    CHECK(std::abs(a_derivative_closed_form(one, kJ) - 1.0 / (2.0 * kJ)) < 1e-15);
    CHECK(std::abs(a_derivative_closed_form(one, 0.0) - Complex{0.0, -2.0}) < 1e-15);
    CHECK_THROWS_AS(a_derivative_closed_form(one, -kJ), PoleError);

    const auto ds = four_soliton();
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> x(-3.0, 3.0), y(0.1, 3.0);
    for (int i = 0; i < 200; ++i) {
        const Complex l{x(gen), y(gen)};
        const double h = 1e-5;
        const Complex fd = (a_closed_form(ds, l + h) - a_closed_form(ds, l - h)) / (2.0 * h);
        const Complex d = a_derivative_closed_form(ds, l);
        CHECK(std::abs(fd - d) <= 1e-6 * (1.0 + std::abs(d)));
    }
}

TEST_CASE("synthesize a single soliton") {
    const auto grid = TimeGrid::symmetric(15.0, 3001);
    for (Complex b : {Complex{1.0, 0.0}, std::exp(kJ * 1.3), Complex{2.0, -0.7}}) {
        const double sigma = 0.5;
        const DiscreteSpectrum ds({{kJ * sigma, b}});
        const TimeSignal q = synthesize(ds, grid);
        const double tc = std::log(std::abs(b)) / (2.0 * sigma);
        double worst = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double t = q.time(i);
            const Complex ref = -2.0 * sigma * std::exp(-kJ * std::arg(b)) * sech(2.0 * sigma * (t - tc));
            worst = std::max(worst, std::abs(q[i] - ref));
        }
        CHECK(worst < 1e-12);
    }
    const TimeSignal q = synthesize(DiscreteSpectrum({{kJ * 0.5, 1.0}}), grid);
    CHECK(std::abs(q[1500]) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("synthesize an empty spectrum gives zero") {
    const TimeSignal q = synthesize(DiscreteSpectrum(), TimeGrid::symmetric(5.0, 101));
    for (auto z : q.samples()) CHECK(z == Complex{});
}

TEST_CASE("symmetric multi-solitons are even in time") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
    for (int trial = 0; trial < 5; ++trial) {
        const auto ds = four_soliton({ph(gen), ph(gen), ph(gen), ph(gen)});
        const TimeSignal q = synthesize(ds, TimeGrid::symmetric(12.0, 10001));
        double worst = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(q[i] - q[q.size() - 1 - i]));
        CHECK(worst < 1e-8);
    }
    const TimeSignal asym = synthesize(DiscreteSpectrum({{kJ * 0.5, 2.0}, {kJ, 1.0}}), TimeGrid::symmetric(12.0, 1001));
    CHECK(std::abs(asym[300] - asym[700]) > 1e-3);
}

TEST_CASE("synthesized energy matches 4 * sum sigma") {
    const TimeSignal q = synthesize(four_soliton({0.1, 2.0, 4.0, 5.5}), TimeGrid::symmetric(14.0, 20001));
    CHECK(q.energy() == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("is_symmetric examples") {
    CHECK(is_symmetric(DiscreteSpectrum({{kJ, std::exp(0.3 * kJ)}}), 1e-9));
    CHECK_FALSE(is_symmetric(DiscreteSpectrum({{kJ, 2.0}}), 1e-9));
    CHECK_FALSE(is_symmetric(DiscreteSpectrum({{Complex{0.1, 1.0}, 1.0}}), 1e-9));
}

TEST_CASE("tail_parameters examples") {
    const auto tp = tail_parameters(four_soliton());
    const double t0_oracle = std::log(3.0) + std::log(2.0) + std::log(5.0 / 3.0);
    CHECK(t0_oracle == doctest::Approx(std::log(10.0)).epsilon(1e-15));
    CHECK(tp.t0 == doctest::Approx(t0_oracle).epsilon(1e-14));
    CHECK(tp.phi0 == doctest::Approx(3.0 * pi).epsilon(1e-14));
    CHECK(tp.sigma1 == 0.5);

    const auto single = tail_parameters(DiscreteSpectrum({{kJ, std::exp(0.4 * kJ)}}));
    CHECK(single.t0 == 0.0);
    CHECK(single.phi0 == 0.0);

    CHECK_THROWS_AS(tail_parameters(DiscreteSpectrum({{Complex{0.1, 0.5}, 1.0}, {Complex{-0.1, 0.5}, 1.0}})),
                    DegenerateSigmaError);
}

TEST_CASE("tail_approximation examples") {
    const auto tp = tail_parameters(four_soliton({0.3, 1.0, 2.0, 3.0}));
    CHECK(std::abs(tail_approximation(tp, Side::Right, tp.t0)) == doctest::Approx(2.0 * tp.sigma1).epsilon(1e-15));
    const double d = 0.7;
    const double ratio = std::abs(tail_approximation(tp, Side::Right, 40.0 + d)) /
                         std::abs(tail_approximation(tp, Side::Right, 40.0));
    CHECK(ratio == doctest::Approx(std::exp(-2.0 * tp.sigma1 * d)).epsilon(1e-12));
    for (double t = -10.0; t <= 10.0; t += 0.37)
        CHECK(std::abs(tail_approximation(tp, Side::Left, -t)) ==
              doctest::Approx(std::abs(tail_approximation(tp, Side::Right, t))).epsilon(1e-14));
}

TEST_CASE("tail approximation error shrinks with the window") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
    const auto ds = four_soliton({ph(gen), ph(gen), ph(gen), ph(gen)});
    const auto tp = tail_parameters(ds);
    const TimeSignal q = synthesize(ds, TimeGrid::symmetric(20.0, 40001));
    double peak = 0.0;
    for (auto z : q.samples()) peak = std::max(peak, std::abs(z));
    auto tail_error = [&](double T) {
        double worst = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double t = q.time(i);
            if (t >= T) worst = std::max(worst, std::abs(q[i] - tail_approximation(tp, Side::Right, t)));
            if (t <= -T) worst = std::max(worst, std::abs(q[i] - tail_approximation(tp, Side::Left, t)));
        }
        return worst / peak;
    };
    double prev = tail_error(3.3);
    MESSAGE("relative tail error at T=3.3: " << prev);
    for (double T = 3.5; T <= 8.0; T += 0.5) {
        const double e = tail_error(T);
        CHECK(e <= prev);
        prev = e;
    }
    CHECK(tail_error(5.0) < 1e-2);
    CHECK(tail_error(8.0) < 1e-4);
}

TEST_CASE("Darboux synthesis and scattering round trip") {
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> sig(0.3, 2.5), ph(0.0, 2.0 * pi);
    std::uniform_int_distribution<int> count(1, 4);
    ScatterConfig cfg;
    cfg.scheme = Scheme::ForwardBackwardSplit;
    cfg.newton_tol = 1e-9;
    for (int trial = 0; trial < 12; ++trial) {
        const int n = count(gen);
        std::vector<double> sigmas;
        while (static_cast<int>(sigmas.size()) < n) {
            const double s = sig(gen);
            bool ok = true;
            for (double o : sigmas) ok = ok && std::abs(o - s) > 0.1;
            if (ok) sigmas.push_back(s);
        }
        std::vector<SpectralPoint> pts;
        for (double s : sigmas) pts.push_back({kJ * s, std::exp(kJ * ph(gen))});
        const DiscreteSpectrum ds(pts);
        const auto tp = tail_parameters(ds);
        const double t_max = tp.t0 + 8.0 / (2.0 * tp.sigma1);
        const auto samples = std::max<std::size_t>(1 << 12, std::bit_ceil(static_cast<std::size_t>(2.0 * t_max / 2e-3)));
        const TimeSignal q = synthesize(ds, TimeGrid::symmetric(t_max, samples));

        std::vector<Complex> seeds;
        for (const auto& p : ds.entries()) seeds.push_back(p.lambda + Complex{0.0, 0.02});
        const auto found = find_eigenvalues(q, seeds, cfg);
        REQUIRE(found.roots.size() == ds.size());
        const auto amps = discrete_amplitudes(q, found.roots, cfg);
        for (std::size_t k = 0; k < ds.size(); ++k) {
            CHECK(std::abs(found.roots[k] - ds[k].lambda) < 1e-4);
            CHECK(std::abs(amps[k].b - ds[k].b) < 1e-3 * std::abs(ds[k].b));
        }
    }
}

TEST_CASE("Darboux seed mapping holds for non-unimodular b") {
    const DiscreteSpectrum ds({{kJ * 0.6, Complex{1.5, 0.8}}, {kJ * 1.1, Complex{0.4, -0.3}}});
    const TimeSignal q = synthesize(ds, TimeGrid::symmetric(20.0, 1 << 14));
    ScatterConfig cfg;
    cfg.scheme = Scheme::ForwardBackwardSplit;
    const auto amps = discrete_amplitudes(q, ds.eigenvalues(), cfg);
    for (std::size_t k = 0; k < ds.size(); ++k) CHECK(std::abs(amps[k].b - ds[k].b) < 1e-3 * std::abs(ds[k].b));
}
