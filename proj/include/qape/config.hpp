#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qape/estimator.hpp"
#include "qape/vdb.hpp"

namespace qape {

/// Shortest round-trip decimal for a double; the one formatting used in every
/// emitted artifact so identical configs produce byte-identical output.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Compact fixed-precision form for grid/axis columns (bin centers carry
/// float-accumulation dust that full round-trip printing would expose).
inline std::string format_grid(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
}

/// Fully resolved run parameters. Defaults reproduce the worked example the
/// detector chapter of the README walks through: n=15, sigma=0.9, bin width
/// 0.1, BPSK alphabet, t = n + 4, subspace backend.
struct RunConfig {
    int n = 15;
    double sigma = 0.9;
    double bin_width = 0.1;
    double range_min = -5.0;
    double range_max = 5.0;
    std::vector<double> alphabet = {-1.0, 1.0};
    int t = 0;  // 0 -> n + 4
    std::string backend = "subspace";
    std::string format;  // csv | json; empty -> subcommand default
    std::string output;  // path; empty -> stdout
    int samples = 0;
    std::uint64_t seed = 0;
    // subcommand parameters
    double r = 0.0;
    bool has_r = false;
    double s = 0.0;
    bool has_s = false;
    double grid_min = 0.0;
    bool has_grid_min = false;
    double grid_max = 0.0;
    bool has_grid_max = false;
    std::int64_t iterations = -1;  // search: -1 -> derive from classical count

    int resolved_t() const { return t > 0 ? t : n + 4; }
};

inline SystemModel make_model(const RunConfig& config) {
    SystemModel model;
    model.database_qubits = config.n;
    model.source_alphabet = config.alphabet;
    model.noise_sigma = config.sigma;
    model.quantizer = Quantizer{config.bin_width, config.range_min, config.range_max};
    validate_model(model);
    return model;
}

inline PdfBackend parse_backend(const std::string& name) {
    if (name == "classical") return PdfBackend::classical;
    if (name == "subspace" || name == "quantum") return PdfBackend::quantum_subspace;
    if (name == "full") return PdfBackend::quantum_full;
    throw std::invalid_argument("unknown backend '" + name +
                                "' (expected classical, subspace/quantum, or full)");
}

inline EstimatorConfig make_estimator_config(const RunConfig& config) {
    EstimatorConfig est;
    est.backend = parse_backend(config.backend);
    est.counting_qubits = config.resolved_t();
    return est;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    }
}

inline std::vector<double> parse_alphabet(const std::string& value) {
    std::vector<double> symbols;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) symbols.push_back(parse_double("alphabet", item));
    }
    if (symbols.empty()) throw std::invalid_argument("config key 'alphabet': empty list");
    return symbols;
}

} // namespace detail

/// Apply one `key = value` assignment. Shared by the config-file loader and by
/// tests replaying an echoed header.
inline void apply_config_entry(RunConfig& config, const std::string& key,
                               const std::string& value) {
    if (key == "n") {
        config.n = static_cast<int>(detail::parse_double(key, value));
    } else if (key == "sigma") {
        config.sigma = detail::parse_double(key, value);
    } else if (key == "bin_width") {
        config.bin_width = detail::parse_double(key, value);
    } else if (key == "range_min") {
        config.range_min = detail::parse_double(key, value);
    } else if (key == "range_max") {
        config.range_max = detail::parse_double(key, value);
    } else if (key == "alphabet") {
        config.alphabet = detail::parse_alphabet(value);
    } else if (key == "t") {
        config.t = static_cast<int>(detail::parse_double(key, value));
    } else if (key == "backend") {
        config.backend = value;
    } else if (key == "format") {
        config.format = value;
    } else if (key == "samples") {
        config.samples = static_cast<int>(detail::parse_double(key, value));
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(detail::parse_double(key, value));
    } else if (key == "r") {
        config.r = detail::parse_double(key, value);
        config.has_r = true;
    } else if (key == "s") {
        config.s = detail::parse_double(key, value);
        config.has_s = true;
    } else if (key == "grid_min") {
        config.grid_min = detail::parse_double(key, value);
        config.has_grid_min = true;
    } else if (key == "grid_max") {
        config.grid_max = detail::parse_double(key, value);
        config.has_grid_max = true;
    } else if (key == "iterations") {
        config.iterations = static_cast<std::int64_t>(detail::parse_double(key, value));
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

/// Line-oriented `key = value` config file. Blank lines and `#` comments are
/// skipped; unknown keys and lines without '=' are errors.
inline void load_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        }
        apply_config_entry(config, detail::trim(stripped.substr(0, eq)),
                           detail::trim(stripped.substr(eq + 1)));
    }
}

/// Which optional parameters a subcommand echoes.
struct EchoFields {
    bool t = false;
    bool backend = false;
    bool r = false;
    bool s = false;
    bool grid = false;
    bool iterations = false;
    bool sampling = false;
};

/// Resolved-parameter echo, one `key = value` per line. Every emitted artifact
/// carries these (as `# `-comments in CSV, as a "config" object in JSON), and
/// feeding them back through load_config_file reproduces the run byte for byte.
inline std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& config,
                                                                    const EchoFields& fields) {
    std::vector<std::pair<std::string, std::string>> entries;
    entries.emplace_back("n", std::to_string(config.n));
    entries.emplace_back("sigma", format_double(config.sigma));
    entries.emplace_back("bin_width", format_double(config.bin_width));
    entries.emplace_back("range_min", format_double(config.range_min));
    entries.emplace_back("range_max", format_double(config.range_max));
    std::string alphabet;
    for (std::size_t i = 0; i < config.alphabet.size(); ++i) {
        if (i) alphabet += ",";
        alphabet += format_double(config.alphabet[i]);
    }
    entries.emplace_back("alphabet", alphabet);
    if (fields.t) entries.emplace_back("t", std::to_string(config.resolved_t()));
    if (fields.backend) entries.emplace_back("backend", config.backend);
    if (fields.r) entries.emplace_back("r", format_double(config.r));
    if (fields.s) entries.emplace_back("s", format_double(config.s));
    if (fields.grid) {
        // resolved bounds are bin centers; print them on the grid scale so the
        // echo stays clean (re-parsing lands in the same bin either way)
        entries.emplace_back("grid_min", format_grid(config.grid_min));
        entries.emplace_back("grid_max", format_grid(config.grid_max));
    }
    if (fields.iterations) entries.emplace_back("iterations", std::to_string(config.iterations));
    if (fields.sampling && config.samples > 0) {
        entries.emplace_back("samples", std::to_string(config.samples));
        entries.emplace_back("seed", std::to_string(config.seed));
    }
    entries.emplace_back("format", config.format);
    return entries;
}

} // namespace qape
