#include "nftk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "nftk/errors.hpp"
#include "toml.hpp"

namespace nftk::io {

namespace {

double number_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ValidationError(std::string("missing numeric field: ") + key);
    return j.at(key).get<double>();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw ValidationError("not a number: '" + t + "'");
    return v;
}

std::vector<std::vector<double>> read_table(std::istream& is, const std::vector<std::string>& header) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty CSV input");
    auto cols = split_csv(line);
    for (auto& c : cols) c = trim(c);
    if (cols != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ValidationError("CSV header must be " + want);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) throw ValidationError("CSV row has the wrong number of columns");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("CSV has no data rows");
    return rows;
}

UniformGrid grid_from_column(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n < 2) throw ValidationError("a grid needs at least two rows");
    const double start = rows.front()[0];
    const double step = (rows.back()[0] - start) / static_cast<double>(n - 1);
    if (!(step > 0.0)) throw ValidationError("grid must be strictly increasing");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(rows[i][0] - (start + static_cast<double>(i) * step)) > 1e-6 * step)
            throw ValidationError("grid is not uniform");
    return {start, step, n};
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json to_json(const DiscreteSpectrum& ds) {
    json arr = json::array();
    for (const auto& e : ds.entries())
        arr.push_back({{"re", e.lambda.real()}, {"im", e.lambda.imag()}, {"b_re", e.b.real()}, {"b_im", e.b.imag()}});
    return {{"eigenvalues", arr}};
}

DiscreteSpectrum spectrum_from_json(const json& j) {
    if (!j.is_object() || !j.contains("eigenvalues") || !j.at("eigenvalues").is_array())
        throw ValidationError("spectrum JSON needs an \"eigenvalues\" array");
    std::vector<SpectralPoint> pts;
    for (const auto& e : j.at("eigenvalues")) {
        const double bre = e.contains("b_re") ? number_field(e, "b_re") : 1.0;
        const double bim = e.contains("b_im") ? number_field(e, "b_im") : 0.0;
        pts.push_back({{number_field(e, "re"), number_field(e, "im")}, {bre, bim}});
    }
    return DiscreteSpectrum(std::move(pts));
}

json to_json(const TruncationModel& m) {
    std::vector<double> phases;
    for (const auto& e : m.spectrum().entries()) phases.push_back(std::arg(e.b));
    phases.front() = m.phi();
    return {{"sigmas", m.sigmas()}, {"phi", m.phi()}, {"T", m.T()}, {"phases", phases}};
}

TruncationModel model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("sigmas") || !j.at("sigmas").is_array())
        throw ValidationError("model JSON needs a \"sigmas\" array");
    std::vector<double> sigmas;
    for (const auto& s : j.at("sigmas")) {
        if (!s.is_number()) throw ValidationError("sigmas must be numbers");
        sigmas.push_back(s.get<double>());
    }
    std::vector<double> phases;
    if (j.contains("phases"))
        for (const auto& p : j.at("phases")) {
            if (!p.is_number()) throw ValidationError("phases must be numbers");
            phases.push_back(p.get<double>());
        }
    return TruncationModel::from_sigmas(std::move(sigmas), number_field(j, "phi"), number_field(j, "T"),
                                        std::move(phases));
}

json to_json(const FitReport& r) {
    json arr = json::array();
    for (const auto& l : r.eigenvalues) arr.push_back({{"re", l.real()}, {"im", l.imag()}});
    return {{"eigenvalues", arr}, {"residual", r.residual}, {"iterations", r.iterations}};
}

ScatterConfig scatter_config_from_json(const json& j) {
    ScatterConfig c;
    if (!j.is_object()) throw ValidationError("scattering section must be an object");
    try {
        for (const auto& [key, value] : j.items()) {
        if (key == "scheme") {
            c.scheme = parse_scheme(value.get<std::string>());
        } else if (key == "newton_tol") {
            c.newton_tol = value.get<double>();
        } else if (key == "newton_max_iter") {
            c.newton_max_iter = value.get<int>();
        } else if (key == "fd_step") {
            c.fd_step = value.get<double>();
        } else if (key == "samples") {
            const auto s = value.get<long long>();
            if (s < 2) throw ValidationError("samples must be >= 2");
            c.samples = static_cast<std::size_t>(s);
        } else if (key == "overflow_bound") {
            c.overflow_bound = value.get<double>();
        } else {
            throw ValidationError("unknown [scattering] key: " + key);
        }
    }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad [scattering] value: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

json toml_to_json(const toml::node& n) {
    if (auto t = n.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
        return out;
    }
    if (auto a = n.as_array()) {
        json out = json::array();
        for (const auto& v : *a) out.push_back(toml_to_json(v));
        return out;
    }
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    if (auto v = n.as_string()) return v->get();
    throw ValidationError("unsupported TOML value type");
}

}  // namespace

json parse_toml(const std::string& text) {
    toml::table tbl;
    try {
        tbl = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw ValidationError(std::string("TOML parse error: ") + std::string(e.description()));
    }
    return toml_to_json(tbl);
}

ScatterConfig scatter_config_from_toml(const std::string& text) {
    const json j = parse_toml(text);
    if (j.contains("scattering")) return scatter_config_from_json(j.at("scattering"));
    return scatter_config_from_json(j);
}

json to_json(const ScatterConfig& c) {
    return {{"scheme", scheme_name(c.scheme)},
            {"newton_tol", c.newton_tol},
            {"newton_max_iter", c.newton_max_iter},
            {"fd_step", c.fd_step},
            {"samples", c.samples}};
}

void write_signal_csv(std::ostream& os, const TimeSignal& sig) {
    os << "t,re,im\n";
    for (std::size_t i = 0; i < sig.size(); ++i)
        os << format_double(sig.time(i)) << ',' << format_double(sig[i].real()) << ','
           << format_double(sig[i].imag()) << '\n';
}

TimeSignal read_signal_csv(std::istream& is) {
    const auto rows = read_table(is, {"t", "re", "im"});
    if (rows.size() == 1) return TimeSignal(rows[0][0], 1.0, {Complex{rows[0][1], rows[0][2]}});
    const UniformGrid g = grid_from_column(rows);
    std::vector<Complex> q;
    for (const auto& r : rows) q.emplace_back(r[1], r[2]);
    return TimeSignal(g.start, g.step, std::move(q));
}

void write_continuous_csv(std::ostream& os, const ContinuousSpectrum& cs) {
    os << "omega,a_re,a_im,b_re,b_im\n";
    for (std::size_t i = 0; i < cs.size(); ++i)
        os << format_double(cs.omega()[i]) << ',' << format_double(cs.a()[i].real()) << ','
           << format_double(cs.a()[i].imag()) << ',' << format_double(cs.b()[i].real()) << ','
           << format_double(cs.b()[i].imag()) << '\n';
}

ContinuousSpectrum read_continuous_csv(std::istream& is) {
    const auto rows = read_table(is, {"omega", "a_re", "a_im", "b_re", "b_im"});
    const UniformGrid g = grid_from_column(rows);
    std::vector<Complex> a, b;
    for (const auto& r : rows) {
        a.emplace_back(r[1], r[2]);
        b.emplace_back(r[3], r[4]);
    }
    return ContinuousSpectrum(g, std::move(a), std::move(b));
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& p) {
    try {
        return json::parse(read_text_file(p));
    } catch (const json::exception& e) {
        throw ValidationError("invalid JSON in " + p.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& p, const json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

}  // namespace nftk::io
