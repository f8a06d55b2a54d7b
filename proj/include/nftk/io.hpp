#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "nftk/inversion.hpp"
#include "nftk/scattering.hpp"
#include "nftk/spectra.hpp"
#include "nftk/truncation.hpp"

namespace nftk::io {

using nlohmann::json;

// {"eigenvalues":[{"re":..,"im":..,"b_re":..,"b_im":..}]}
json to_json(const DiscreteSpectrum& ds);
DiscreteSpectrum spectrum_from_json(const json& j);

// {"sigmas":[..],"phi":..,"T":..} with optional "phases"
json to_json(const TruncationModel& m);
TruncationModel model_from_json(const json& j);

// {"eigenvalues":[{"re","im"}],"residual":..,"iterations":..}
json to_json(const FitReport& r);

// TOML document as a JSON tree (tables become objects).
json parse_toml(const std::string& text);

// Keys of a [scattering] section; absent keys keep their defaults.
ScatterConfig scatter_config_from_json(const json& j);
ScatterConfig scatter_config_from_toml(const std::string& toml_text);
json to_json(const ScatterConfig& c);

// Header t,re,im. Rejects non-uniform time columns.
void write_signal_csv(std::ostream& os, const TimeSignal& sig);
TimeSignal read_signal_csv(std::istream& is);

// Header omega,a_re,a_im,b_re,b_im
void write_continuous_csv(std::ostream& os, const ContinuousSpectrum& cs);
ContinuousSpectrum read_continuous_csv(std::istream& is);

json read_json_file(const std::filesystem::path& p);
void write_json_file(const std::filesystem::path& p, const json& j);
std::string read_text_file(const std::filesystem::path& p);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace nftk::io
