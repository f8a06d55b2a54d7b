#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nftk/errors.hpp"
#include "nftk/experiment.hpp"
#include "nftk/inversion.hpp"
#include "nftk/io.hpp"
#include "nftk/kernels/transfer.hpp"
#include "nftk/scattering.hpp"
#include "nftk/soliton.hpp"
#include "nftk/truncation.hpp"

namespace {

using nftk::Complex;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

Complex parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw nftk::ValidationError("expected RE,IM but got '" + s + "'");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw nftk::ValidationError("expected RE,IM but got '" + s + "'");
    }
}

template <class F>
void with_output(const std::string& path, F&& write) {
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nftk::ValidationError("cannot write " + path);
    write(out);
}

template <class T, class F>
T with_input(const std::string& path, F&& read) {
    if (path == "-") return read(std::cin);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nftk::ValidationError("cannot open " + path);
    return read(in);
}

std::vector<Complex> collect_guesses(const std::vector<std::string>& guesses, const std::string& guess_file) {
    std::vector<Complex> out;
    for (const auto& g : guesses) out.push_back(parse_point(g));
    if (!guess_file.empty())
        for (const auto& l : nftk::io::spectrum_from_json(nftk::io::read_json_file(guess_file)).eigenvalues())
            out.push_back(l);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear Fourier toolkit for truncated multi-soliton pulses"};
    app.require_subcommand(1);
    std::string isa = "auto";
    app.add_option("--isa", isa, "Transfer kernel: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    // synthesize
    auto* syn = app.add_subcommand("synthesize", "Discrete spectrum JSON -> signal CSV (Darboux)");
    std::string syn_in, syn_out = "-";
    double syn_tmax = 12.0;
    std::size_t syn_samples = 10000;
    syn->add_option("--spectrum", syn_in, "DiscreteSpectrum JSON")->required();
    syn->add_option("--t-max", syn_tmax, "Grid covers [-t_max, t_max]");
    syn->add_option("--samples", syn_samples, "Number of samples");
    syn->add_option("--out", syn_out, "Signal CSV ('-' for stdout)");

    // nft
    auto* nft = app.add_subcommand("nft", "Signal CSV -> discrete spectrum JSON + continuous CSV");
    std::string nft_in, nft_config, nft_scheme, nft_spec_out, nft_cont_out, nft_guess_file;
    std::vector<std::string> nft_guesses;
    double nft_wmax = 20.0;
    std::size_t nft_wcount = 4096;
    nft->add_option("--signal", nft_in, "Signal CSV")->required();
    nft->add_option("--config", nft_config, "TOML file with a [scattering] section");
    nft->add_option("--scheme", nft_scheme, "piecewise_constant or forward_backward");
    nft->add_option("--omega-max", nft_wmax, "Continuous grid covers [-max, max]");
    nft->add_option("--omega-count", nft_wcount, "Continuous grid points");
    nft->add_option("--guess", nft_guesses, "Newton seed RE,IM (repeatable)");
    nft->add_option("--guess-spectrum", nft_guess_file, "Seed Newton from the eigenvalues of a spectrum JSON");
    nft->add_option("--out-spectrum", nft_spec_out, "Discrete spectrum JSON")->required();
    nft->add_option("--out-continuous", nft_cont_out, "Continuous spectrum CSV");

    // truncate-analytic
    auto* ta = app.add_subcommand("truncate-analytic", "Truncation model JSON -> analytic spectrum JSON/CSV");
    std::string ta_in, ta_spec_out, ta_cont_out;
    double ta_wmax = 20.0;
    std::size_t ta_wcount = 4096;
    ta->add_option("--model", ta_in, "TruncationModel JSON")->required();
    ta->add_option("--omega-max", ta_wmax, "Continuous grid covers [-max, max]");
    ta->add_option("--omega-count", ta_wcount, "Continuous grid points");
    ta->add_option("--out-spectrum", ta_spec_out, "Analytic eigenvalues and b values (JSON)")->required();
    ta->add_option("--out-continuous", ta_cont_out, "Analytic continuous spectrum CSV");

    // eigs-from-continuous
    auto* efc = app.add_subcommand("eigs-from-continuous", "Continuous CSV -> eigenvalue JSON (all-pass fit)");
    std::string efc_in, efc_out = "-", efc_guess_file;
    std::vector<std::string> efc_guesses;
    int efc_count = -1;
    double efc_edge = nftk::kDefaultEdgeTol;
    efc->add_option("--continuous", efc_in, "Continuous spectrum CSV")->required();
    efc->add_option("--count", efc_count, "Number of eigenvalues (default: winding count)");
    efc->add_option("--guess", efc_guesses, "Fit seed RE,IM (repeatable)");
    efc->add_option("--guess-spectrum", efc_guess_file, "Seed the fit from a spectrum JSON");
    efc->add_option("--edge-tol", efc_edge, "Relative edge-decay tolerance for the Hilbert transform");
    efc->add_option("--out", efc_out, "Fit report JSON ('-' for stdout)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run the truncation ensemble and write the report directory");
    std::string exp_config, exp_out;
    long long exp_seed = -1;
    int exp_trials = -1;
    unsigned exp_threads = 0;
    exp->add_option("--config", exp_config, "Experiment TOML")->required();
    exp->add_option("--seed", exp_seed, "Override rng_seed");
    exp->add_option("--trials", exp_trials, "Override n_trials");
    exp->add_option("--out", exp_out, "Override output_dir");
    exp->add_option("--threads", exp_threads, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (isa == "scalar") nftk::kernels::set_active_isa(nftk::kernels::Isa::Scalar);
        if (isa == "avx2") nftk::kernels::set_active_isa(nftk::kernels::Isa::Avx2);

        if (*syn) {
            const auto ds = nftk::io::spectrum_from_json(nftk::io::read_json_file(syn_in));
            const auto sig = nftk::synthesize(ds, nftk::TimeGrid::symmetric(syn_tmax, syn_samples));
            with_output(syn_out, [&](std::ostream& os) { nftk::io::write_signal_csv(os, sig); });
        } else if (*nft) {
            nftk::ScatterConfig cfg;
            if (!nft_config.empty()) cfg = nftk::io::scatter_config_from_toml(nftk::io::read_text_file(nft_config));
            if (!nft_scheme.empty()) cfg.scheme = nftk::parse_scheme(nft_scheme);
            const auto sig =
                with_input<nftk::TimeSignal>(nft_in, [](std::istream& is) { return nftk::io::read_signal_csv(is); });
            auto seeds = collect_guesses(nft_guesses, nft_guess_file);
            if (seeds.empty())
                for (int k = 1; k <= 30; ++k) seeds.push_back({0.0, 0.1 * k});
            const auto grid = nftk::UniformGrid::symmetric(nft_wmax, nft_wcount);
            const auto cs = nftk::continuous_spectrum(sig, grid, cfg);
            nftk::EigenSearch search;
            try {
                search = nftk::find_eigenvalues(sig, seeds, cfg);
            } catch (const nftk::NoConvergenceError&) {
                search.failed_seeds = seeds;
            }
            const auto amps = nftk::discrete_amplitudes(sig, search.roots, cfg);
            json eig = json::array();
            for (const auto& a : amps)
                eig.push_back({{"re", a.lambda.real()},
                               {"im", a.lambda.imag()},
                               {"b_re", a.b.real()},
                               {"b_im", a.b.imag()},
                               {"qd_re", a.qd.real()},
                               {"qd_im", a.qd.imag()}});
            json failed = json::array();
            for (const auto& s : search.failed_seeds) failed.push_back({{"re", s.real()}, {"im", s.imag()}});
            json out{{"eigenvalues", eig}, {"failed_seeds", failed}, {"scattering", nftk::io::to_json(cfg)}};
            try {
                out["continuous_energy"] = nftk::energy_continuous(cs);
            } catch (const nftk::GridTooNarrowError&) {
                out["continuous_energy"] = nullptr;
            }
            nftk::io::write_json_file(nft_spec_out, out);
            if (!nft_cont_out.empty())
                with_output(nft_cont_out, [&](std::ostream& os) { nftk::io::write_continuous_csv(os, cs); });
            std::cerr << "found " << amps.size() << " eigenvalue(s); " << search.failed_seeds.size()
                      << " seed(s) did not converge\n";
        } else if (*ta) {
            const auto model = nftk::io::model_from_json(nftk::io::read_json_file(ta_in));
            if (!model.in_contract())
                std::cerr << "warning: T <= t0 = " << model.t0() << ", closed forms are outside their contract\n";
            const auto eigs = nftk::analytic_eigenvalues(model);
            const auto bs = nftk::analytic_b_values(eigs, model);
            json arr = json::array();
            for (std::size_t k = 0; k < eigs.size(); ++k)
                arr.push_back(
                    {{"re", eigs[k].real()}, {"im", eigs[k].imag()}, {"b_re", bs[k].real()}, {"b_im", bs[k].imag()}});
            const auto cs = nftk::truncated_spectrum(nftk::UniformGrid::symmetric(ta_wmax, ta_wcount), model);
            json out{{"model", nftk::io::to_json(model)},
                     {"t0", model.t0()},
                     {"N", model.N()},
                     {"in_contract", model.in_contract()},
                     {"eigenvalues", arr}};
            try {
                out["continuous_energy"] = nftk::energy_continuous(cs);
            } catch (const nftk::GridTooNarrowError&) {
                out["continuous_energy"] = nullptr;
            }
            nftk::io::write_json_file(ta_spec_out, out);
            if (!ta_cont_out.empty())
                with_output(ta_cont_out, [&](std::ostream& os) { nftk::io::write_continuous_csv(os, cs); });
        } else if (*efc) {
            const auto cs = with_input<nftk::ContinuousSpectrum>(
                efc_in, [](std::istream& is) { return nftk::io::read_continuous_csv(is); });
            const auto g = nftk::allpass(cs, efc_edge);
            const int winding = nftk::count_eigenvalues(g.g);
            const int n = efc_count >= 0 ? efc_count : winding;
            auto seeds = collect_guesses(efc_guesses, efc_guess_file);
            if (seeds.empty())
                for (int k = 1; k <= n; ++k) seeds.push_back({0.0, 0.5 * k});
            const auto rep = nftk::fit_eigenvalues(g, n, seeds);
            json out = nftk::io::to_json(rep);
            out["winding_count"] = winding;
            with_output(efc_out, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
        } else if (*exp) {
            auto cfg = nftk::experiment_config_from_toml(nftk::io::read_text_file(exp_config));
            if (exp_seed >= 0) cfg.rng_seed = static_cast<std::uint64_t>(exp_seed);
            if (exp_trials >= 0) cfg.n_trials = exp_trials;
            if (!exp_out.empty()) cfg.output_dir = exp_out;
            if (exp_threads) cfg.threads = exp_threads;
            const auto start = std::chrono::steady_clock::now();
            const auto rep = nftk::run_experiment(cfg);
            nftk::write_report(rep, cfg.output_dir);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::cerr << cfg.n_trials << " trials x " << cfg.T_values.size() << " windows in " << secs << " s ("
                      << nftk::kernels::isa_name(nftk::kernels::active_isa()) << " kernel) -> "
                      << cfg.output_dir.string() << '\n';
        }
    } catch (const nftk::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const nftk::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
