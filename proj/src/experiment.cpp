#include "nftk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "nftk/errors.hpp"
#include "nftk/io.hpp"
#include "nftk/soliton.hpp"
#include "nftk/truncation.hpp"

namespace nftk {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DiscreteSpectrum trial_spectrum(const std::vector<double>& sigmas, const std::vector<double>& phases) {
    std::vector<SpectralPoint> pts;
    for (std::size_t k = 0; k < sigmas.size(); ++k) pts.push_back({{0.0, sigmas[k]}, std::exp(kJ * phases[k])});
    return DiscreteSpectrum(std::move(pts));
}

double t0_of(const std::vector<double>& sigmas) {
    std::vector<SpectralPoint> pts;
    for (double s : sigmas) pts.push_back({{0.0, s}, 1.0});
    return tail_parameters(DiscreteSpectrum(std::move(pts))).t0;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad value for ") + key + ": " + e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
    if (sigmas.empty()) throw ValidationError("sigmas must not be empty");
    for (double s : sigmas)
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("sigmas must be positive");
    if (T_values.empty()) throw ValidationError("T_values must not be empty");
    const double t0 = t0_of(sigmas);
    for (double T : T_values)
        if (!(T > t0) || !std::isfinite(T)) throw ValidationError("every T must exceed t0 = " + io::format_double(t0));
    if (samples_per_pulse < 16) throw ValidationError("samples_per_pulse must be >= 16");
    if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
    if (!(omega_max > 0.0) || omega_count < 16) throw ValidationError("omega grid needs max > 0 and count >= 16");
    if (!(edge_tol > 0.0)) throw ValidationError("edge_tol must be positive");
    scattering.validate();
}

ExperimentConfig experiment_config_from_toml(const std::string& text) {
    const json j = io::parse_toml(text);
    ExperimentConfig c;
    static const std::vector<std::string> known{"sigmas",  "T_values", "n_trials",   "rng_seed",   "samples_per_pulse",
                                                "t_max",   "output_dir", "edge_tol", "threads",    "omega_grid",
                                                "scattering"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError("unknown experiment config key: " + key);
    c.sigmas = get_or(j, "sigmas", c.sigmas);
    c.T_values = get_or(j, "T_values", c.T_values);
    c.n_trials = get_or(j, "n_trials", c.n_trials);
    const auto seed = get_or<long long>(j, "rng_seed", static_cast<long long>(c.rng_seed));
    if (seed < 0) throw ValidationError("rng_seed must be non-negative");
    c.rng_seed = static_cast<std::uint64_t>(seed);
    const auto samples = get_or<long long>(j, "samples_per_pulse", static_cast<long long>(c.samples_per_pulse));
    if (samples < 0) throw ValidationError("samples_per_pulse must be positive");
    c.samples_per_pulse = static_cast<std::size_t>(samples);
    c.t_max = get_or(j, "t_max", c.t_max);
    c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir.string());
    c.edge_tol = get_or(j, "edge_tol", c.edge_tol);
    const auto threads = get_or<long long>(j, "threads", 0);
    if (threads < 0) throw ValidationError("threads must be non-negative");
    c.threads = static_cast<unsigned>(threads);
    if (j.contains("omega_grid")) {
        const json& g = j.at("omega_grid");
        c.omega_max = get_or(g, "max", c.omega_max);
        const auto count = get_or<long long>(g, "count", static_cast<long long>(c.omega_count));
        if (count < 0) throw ValidationError("omega_grid.count must be positive");
        c.omega_count = static_cast<std::size_t>(count);
    }
    if (j.contains("scattering")) {
        json s = j.at("scattering");
        if (!s.contains("scheme")) s["scheme"] = scheme_name(c.scattering.scheme);
        c.scattering = io::scatter_config_from_json(s);
    }
    c.validate();
    return c;
}

json to_json(const ExperimentConfig& c) {
    return {{"sigmas", c.sigmas},
            {"T_values", c.T_values},
            {"n_trials", c.n_trials},
            {"rng_seed", c.rng_seed},
            {"samples_per_pulse", c.samples_per_pulse},
            {"t_max", c.t_max},
            {"omega_grid", {{"max", c.omega_max}, {"count", c.omega_count}}},
            {"edge_tol", c.edge_tol},
            {"scattering", io::to_json(c.scattering)}};
}

std::vector<double> trial_phases(std::uint64_t seed, int trial, std::size_t count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 gen(seq);
    std::vector<double> out(count);
    for (auto& p : out) p = 2.0 * std::numbers::pi * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return out;
}

double nmse_eigenvalue(Complex analytic, std::span<const Complex> numerical, Complex lambda_ref) {
    if (numerical.empty()) throw ValidationError("NMSE needs at least one sample");
    double s = 0.0;
    for (const auto& x : numerical) s += std::norm(analytic - x);
    return s / static_cast<double>(numerical.size()) / std::norm(lambda_ref);
}

double nmse_b(std::span<const Complex> analytic, std::span<const Complex> numerical) {
    if (analytic.size() != numerical.size()) throw ValidationError("analytic and numerical b lists differ in length");
    if (numerical.empty()) throw ValidationError("NMSE needs at least one sample");
    double s = 0.0;
    for (std::size_t i = 0; i < numerical.size(); ++i) {
        if (numerical[i] == Complex{}) throw DivisionError("numerical b is zero");
        s += std::norm(analytic[i] / numerical[i] - 1.0);
    }
    return s / static_cast<double>(numerical.size());
}

double nmse_b(Complex analytic, std::span<const Complex> numerical) {
    const std::vector<Complex> a(numerical.size(), analytic);
    return nmse_b(a, numerical);
}

double l2_spectrum_error(std::span<const Complex> x, std::span<const Complex> y, const UniformGrid& grid) {
    if (x.size() != y.size() || x.size() != grid.count) throw GridMismatchError("L2 error needs equal grids");
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
        s += w * std::norm(x[i] - y[i]);
    }
    return std::sqrt(s * grid.step);
}

double energy_balance_check(const TimeSignal& sig, const ContinuousSpectrum& cs, std::span<const Complex> eigs,
                            double edge_tol) {
    const double et = sig.energy();
    if (et == 0.0) return 0.0;
    double discrete = 0.0;
    for (const auto& l : eigs) discrete += 4.0 * l.imag();
    return std::abs(et - (energy_continuous(cs, edge_tol) + discrete)) / et;
}

std::vector<std::size_t> pair_eigenvalues(std::span<const Complex> analytic, std::span<const Complex> numerical) {
    if (numerical.size() < analytic.size()) return {};
    std::vector<std::size_t> out;
    for (const auto& a : analytic) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < numerical.size(); ++i)
            if (std::abs(numerical[i] - a) < std::abs(numerical[best] - a)) best = i;
        if (std::find(out.begin(), out.end(), best) != out.end()) return {};
        out.push_back(best);
    }
    return out;
}

TruncationResult run_truncation(const TimeSignal& pulse, const DiscreteSpectrum& ds, double T,
                                const ExperimentConfig& cfg) {
    TruncationResult r;
    r.T = T;
    try {
        const TimeSignal qT = truncate(pulse, T);
        const UniformGrid grid = UniformGrid::symmetric(cfg.omega_max, cfg.omega_count);
        const ContinuousSpectrum num = continuous_spectrum(qT, grid, cfg.scattering);
        const TruncationModel model(ds, T);
        const ContinuousSpectrum ana = truncated_spectrum(grid, model);
        r.eg_num = energy_continuous(num, cfg.edge_tol);
        r.eg_anal = energy_continuous(ana, cfg.edge_tol);
        r.l2_a = l2_spectrum_error(num.a(), ana.a(), grid);
        r.l2_b = l2_spectrum_error(num.b(), ana.b(), grid);

        r.eig_anal = analytic_eigenvalues(model);
        r.b_anal = analytic_b_values(r.eig_anal, model);
        auto seeds = ds.eigenvalues();
        seeds.insert(seeds.end(), r.eig_anal.begin(), r.eig_anal.end());
        r.eig_num = find_eigenvalues(qT, seeds, cfg.scattering).roots;
        r.energy_mismatch = energy_balance_check(qT, num, r.eig_num, cfg.edge_tol);
        if (r.eig_num.size() < r.eig_anal.size()) {
            r.lost = true;
            return r;
        }
        const auto pairing = pair_eigenvalues(r.eig_anal, r.eig_num);
        if (pairing.empty() || r.eig_num.size() != r.eig_anal.size()) {
            r.pairing_failed = true;
            return r;
        }
        for (std::size_t idx : pairing) r.eig_num_paired.push_back(r.eig_num[idx]);
        for (const auto& a : discrete_amplitudes(qT, r.eig_num_paired, cfg.scattering)) r.b_num.push_back(a.b);
    } catch (const Error& e) {
        r.failure = e.what();
    }
    return r;
}

EnsembleReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    EnsembleReport rep;
    rep.config = cfg;
    rep.trials.resize(static_cast<std::size_t>(cfg.n_trials));
    const TimeGrid tgrid = TimeGrid::symmetric(cfg.t_max, cfg.samples_per_pulse);
    std::vector<double> sigmas = cfg.sigmas;
    std::sort(sigmas.begin(), sigmas.end());

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < cfg.n_trials; i = next++) {
            TrialRecord& tr = rep.trials[static_cast<std::size_t>(i)];
            tr.trial_id = i;
            tr.phases = trial_phases(cfg.rng_seed, i, sigmas.size());
            const DiscreteSpectrum ds = trial_spectrum(sigmas, tr.phases);
            const TimeSignal pulse = synthesize(ds, tgrid);
            for (double T : cfg.T_values) tr.per_T.push_back(run_truncation(pulse, ds, T, cfg));
        }
    };
    unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(cfg.n_trials));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }

    const double t0 = t0_of(sigmas);
    const std::size_t n = sigmas.size();
    for (std::size_t ti = 0; ti < cfg.T_values.size(); ++ti) {
        const double T = cfg.T_values[ti];
        TruncationSummary s;
        s.T = T;
        s.in_contract = T > t0;
        s.n_trials = cfg.n_trials;
        const auto anal = analytic_eigenvalues(TruncationModel::from_sigmas(sigmas, 0.0, T));
        for (const auto& l : anal) s.lambda_anal.push_back(std::abs(l));

        std::vector<double> eg_num, eg_anal, l2a, l2b, mismatch, arg_err;
        std::vector<std::vector<double>> lam_abs(n);
        std::vector<std::vector<Complex>> lam_num(n), b_num(n), b_ana(n);
        for (const auto& tr : rep.trials) {
            const TruncationResult& r = tr.per_T[ti];
            if (!r.failure.empty()) {
                ++s.n_failed;
                continue;
            }
            eg_num.push_back(r.eg_num);
            eg_anal.push_back(r.eg_anal);
            l2a.push_back(r.l2_a);
            l2b.push_back(r.l2_b);
            mismatch.push_back(r.energy_mismatch);
            if (r.lost) {
                ++s.n_lost;
                continue;
            }
            if (r.pairing_failed) {
                ++s.n_pairing_failed;
                continue;
            }
            ++s.n_ok;
            for (std::size_t k = 0; k < std::min(n, r.eig_num_paired.size()); ++k) {
                lam_abs[k].push_back(std::abs(r.eig_num_paired[k]));
                lam_num[k].push_back(r.eig_num_paired[k]);
                b_num[k].push_back(r.b_num[k]);
                b_ana[k].push_back(r.b_anal[k]);
            }
            if (!r.b_num.empty()) arg_err.push_back(std::pow(std::arg(r.b_anal[0] / r.b_num[0]), 2));
        }
        if (s.n_failed > cfg.n_trials / 2)
            throw NumericalError("more than half of the trials failed at T = " + io::format_double(T));
        s.eg_num_mean = mean(eg_num);
        s.eg_anal_mean = mean(eg_anal);
        s.l2_a_mean = mean(l2a);
        s.l2_b_mean = mean(l2b);
        s.energy_mismatch_mean = mean(mismatch);
        s.nmse_arg_b1 = mean(arg_err);
        for (std::size_t k = 0; k < n; ++k) {
            s.lambda_num_mean.push_back(mean(lam_abs[k]));
            const bool have = !lam_num[k].empty() && k < anal.size();
            s.nmse_lambda.push_back(have ? nmse_eigenvalue(anal[k], lam_num[k], Complex{0.0, sigmas[k]}) : kNaN);
            s.nmse_b.push_back(have ? nmse_b(b_ana[k], b_num[k]) : kNaN);
        }
        rep.per_T.push_back(std::move(s));
    }
    return rep;
}

json summary_json(const EnsembleReport& rep) {
    json per = json::array();
    for (const auto& s : rep.per_T) {
        per.push_back({{"T", s.T},
                       {"in_contract", s.in_contract},
                       {"n_trials", s.n_trials},
                       {"n_ok", s.n_ok},
                       {"n_lost", s.n_lost},
                       {"n_pairing_failed", s.n_pairing_failed},
                       {"n_failed", s.n_failed},
                       {"lambda_num_mean", s.lambda_num_mean},
                       {"lambda_anal", s.lambda_anal},
                       {"eg_num_mean", s.eg_num_mean},
                       {"eg_anal_mean", s.eg_anal_mean},
                       {"nmse_lambda", s.nmse_lambda},
                       {"nmse_b", s.nmse_b},
                       {"nmse_arg_b1", s.nmse_arg_b1},
                       {"l2_a_mean", s.l2_a_mean},
                       {"l2_b_mean", s.l2_b_mean},
                       {"energy_mismatch_mean", s.energy_mismatch_mean}});
    }
    json failures = json::array();
    for (const auto& tr : rep.trials)
        for (const auto& r : tr.per_T)
            if (!r.failure.empty() || r.lost || r.pairing_failed)
                failures.push_back({{"trial", tr.trial_id},
                                    {"T", r.T},
                                    {"lost", r.lost},
                                    {"pairing_failed", r.pairing_failed},
                                    {"error", r.failure}});
    return {{"config", to_json(rep.config)}, {"per_T", per}, {"flagged_trials", failures}};
}

void write_report(const EnsembleReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::write_json_file(dir / "summary.json", summary_json(rep));
    const std::size_t n = rep.config.sigmas.size();
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ValidationError(std::string("cannot write ") + (dir / name).string());
        return out;
    };
    auto f = [](double x) { return io::format_double(x); };

    auto fig2 = open("fig2.csv");
    fig2 << "T";
    for (std::size_t k = 1; k <= n; ++k) fig2 << ",lambda" << k << "_num";
    for (std::size_t k = 1; k <= n; ++k) fig2 << ",lambda" << k << "_anal";
    fig2 << ",eg_num,eg_anal,n_ok,n_lost\n";
    for (const auto& s : rep.per_T) {
        fig2 << f(s.T);
        for (std::size_t k = 0; k < n; ++k) fig2 << ',' << f(k < s.lambda_num_mean.size() ? s.lambda_num_mean[k] : kNaN);
        for (std::size_t k = 0; k < n; ++k) fig2 << ',' << f(k < s.lambda_anal.size() ? s.lambda_anal[k] : kNaN);
        fig2 << ',' << f(s.eg_num_mean) << ',' << f(s.eg_anal_mean) << ',' << s.n_ok << ',' << s.n_lost << '\n';
    }

    auto fig3 = open("fig3.csv");
    fig3 << "T";
    for (std::size_t k = 1; k <= n; ++k) fig3 << ",nmse_lambda" << k;
    fig3 << '\n';
    for (const auto& s : rep.per_T) {
        fig3 << f(s.T);
        for (double v : s.nmse_lambda) fig3 << ',' << f(v);
        fig3 << '\n';
    }

    auto fig4 = open("fig4.csv");
    fig4 << "T";
    for (std::size_t k = 1; k <= n; ++k) fig4 << ",nmse_b" << k;
    fig4 << ",nmse_arg_b1\n";
    for (const auto& s : rep.per_T) {
        fig4 << f(s.T);
        for (double v : s.nmse_b) fig4 << ',' << f(v);
        fig4 << ',' << f(s.nmse_arg_b1) << '\n';
    }

    auto fig5 = open("fig5.csv");
    fig5 << "T,l2_a,l2_b\n";
    for (const auto& s : rep.per_T) fig5 << f(s.T) << ',' << f(s.l2_a_mean) << ',' << f(s.l2_b_mean) << '\n';
}

}  // namespace nftk
