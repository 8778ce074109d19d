// qape: quantum-assisted pdf estimation over a virtual AWGN database.
// Subcommands wire the library together and emit CSV/JSON with a resolved
// config echo so every artifact is reproducible from its own header.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "qape/config.hpp"
#include "qape/counting.hpp"
#include "qape/detector.hpp"
#include "qape/estimator.hpp"
#include "qape/grover.hpp"
#include "qape/vdb.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qape;

struct Cli {
    RunConfig flags;         // values bound to CLI11 options
    std::string config_path; // --config
    std::string alphabet_arg;
    std::vector<std::string> kl_files;
};

void add_common_flags(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.config_path, "key = value config file; flags override it");
    sub->add_option("--n", cli.flags.n, "database register size in qubits (N = 2^n)");
    sub->add_option("--sigma", cli.flags.sigma, "noise standard deviation");
    sub->add_option("--bin_width,--bin-width", cli.flags.bin_width, "quantizer bin width");
    sub->add_option("--range_min,--range-min", cli.flags.range_min, "quantizer grid anchor (a bin center)");
    sub->add_option("--range_max,--range-max", cli.flags.range_max, "default sweep limit");
    sub->add_option("--alphabet", cli.alphabet_arg, "comma-separated source symbols");
    sub->add_option("--format", cli.flags.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", cli.flags.output, "output path (default stdout)");
}

void add_counting_flags(CLI::App* sub, Cli& cli) {
    sub->add_option("--t", cli.flags.t, "counting-register qubits (default n + 4)");
    sub->add_option("--backend", cli.flags.backend,
                    "classical | subspace (alias quantum) | full");
}

/// defaults -> config file -> explicitly passed flags.
RunConfig resolve(const CLI::App* sub, const Cli& cli) {
    RunConfig config;
    if (sub->get_option_no_throw("--config") != nullptr && sub->count("--config") > 0) {
        load_config_file(config, cli.config_path);
    }
    auto take = [&](const char* name, auto member) {
        if (sub->get_option_no_throw(name) != nullptr && sub->count(name) > 0) {
            config.*member = cli.flags.*member;
        }
    };
    take("--n", &RunConfig::n);
    take("--sigma", &RunConfig::sigma);
    take("--bin_width", &RunConfig::bin_width);
    take("--range_min", &RunConfig::range_min);
    take("--range_max", &RunConfig::range_max);
    take("--format", &RunConfig::format);
    take("--output", &RunConfig::output);
    take("--t", &RunConfig::t);
    take("--backend", &RunConfig::backend);
    take("--samples", &RunConfig::samples);
    take("--seed", &RunConfig::seed);
    take("--iterations", &RunConfig::iterations);
    if (sub->get_option_no_throw("--alphabet") != nullptr && sub->count("--alphabet") > 0) {
        config.alphabet = detail::parse_alphabet(cli.alphabet_arg);
    }
    auto take_opt = [&](const char* name, auto member, auto flag) {
        if (sub->get_option_no_throw(name) != nullptr && sub->count(name) > 0) {
            config.*member = cli.flags.*member;
            config.*flag = true;
        }
    };
    take_opt("--r", &RunConfig::r, &RunConfig::has_r);
    take_opt("--s", &RunConfig::s, &RunConfig::has_s);
    take_opt("--grid_min", &RunConfig::grid_min, &RunConfig::has_grid_min);
    take_opt("--grid_max", &RunConfig::grid_max, &RunConfig::has_grid_max);
    return config;
}

void write_out(const RunConfig& config, const std::string& text) {
    if (config.output.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + config.output + "'");
    out << text;
}

std::string csv_echo(const RunConfig& config, const EchoFields& fields) {
    std::string header;
    for (const auto& [key, value] : echo_config(config, fields)) {
        header += "# " + key + " = " + value + "\n";
    }
    return header;
}

ordered_json json_echo(const RunConfig& config, const EchoFields& fields) {
    ordered_json obj;
    for (const auto& [key, value] : echo_config(config, fields)) obj[key] = value;
    return obj;
}

std::string dump_json(const ordered_json& obj) { return obj.dump(2) + "\n"; }

/// Column label for a symbol: -1 -> mass_minus1, +1 -> mass_plus1, 0.5 -> mass_plus0.5.
std::string mass_column(double symbol) {
    return std::string("mass_") + (symbol < 0.0 ? "minus" : "plus") + format_double(std::abs(symbol));
}

std::vector<double> resolve_grid(const SystemModel& model, RunConfig& config,
                                 double default_lo, double default_hi) {
    const Quantizer& q = model.quantizer;
    const double lo = config.has_grid_min ? config.grid_min : default_lo;
    const double hi = config.has_grid_max ? config.grid_max : default_hi;
    const std::int64_t ilo = q.bin_index(lo);
    const std::int64_t ihi = q.bin_index(hi);
    if (ilo > ihi) throw std::invalid_argument("empty grid: grid_min above grid_max");
    // echo the resolved bounds so a replayed config regenerates the same grid
    config.grid_min = q.bin_center(ilo);
    config.grid_max = q.bin_center(ihi);
    config.has_grid_min = config.has_grid_max = true;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(ihi - ilo + 1));
    for (std::int64_t i = ilo; i <= ihi; ++i) grid.push_back(q.bin_center(i));
    return grid;
}

CountingBackend counting_backend(const std::string& name) {
    const PdfBackend backend = parse_backend(name);
    if (backend == PdfBackend::classical) {
        throw std::invalid_argument("count: backend must be subspace or full (counting is the quantum path)");
    }
    return backend == PdfBackend::quantum_full ? CountingBackend::full_statevector
                                               : CountingBackend::subspace;
}

int run_count(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (!config.has_r || !config.has_s) {
        throw std::invalid_argument("count: --marked-bin (or --r) and --s are required");
    }
    if (config.format.empty()) config.format = "csv";
    const SystemModel model = make_model(config);
    const int t = config.resolved_t();

    CountingConfig counting;
    counting.database_qubits = model.database_qubits;
    counting.counting_qubits = t;
    counting.backend = counting_backend(config.backend);
    const CountingOutcome outcome = quantum_count(match_oracle(model, config.r, config.s), counting);
    const std::uint64_t M_true = classical_count(model, config.r, config.s);
    const std::uint64_t N = model.database_size();

    std::uint64_t mode = outcome.most_probable_outcome;
    if (config.samples > 0) {
        std::map<std::uint64_t, int> tally;
        for (std::uint64_t m : sample_outcomes(outcome.outcome_distribution, config.samples, config.seed)) {
            ++tally[m];
        }
        int best = 0;
        for (const auto& [m, hits] : tally) {
            if (hits > best) {
                best = hits;
                mode = m;
            }
        }
    }
    const double M_hat = outcome.count_estimates[mode];

    EchoFields fields;
    fields.t = fields.backend = fields.r = fields.s = fields.sampling = true;
    if (config.format == "csv") {
        std::string text = csv_echo(config, fields);
        text += "outcome,probability,count_estimate\n";
        for (std::size_t m = 0; m < outcome.outcome_distribution.probabilities.size(); ++m) {
            text += std::to_string(m) + "," +
                    format_double(outcome.outcome_distribution.probabilities[m]) + "," +
                    format_double(outcome.count_estimates[m]) + "\n";
        }
        write_out(config, text);
    } else {
        ordered_json obj;
        obj["config"] = json_echo(config, fields);
        obj["N"] = N;
        obj["M_true"] = M_true;
        obj["t"] = t;
        obj["M_hat"] = M_hat;
        obj["bound"] = counting_error_bound(M_true, N, t);
        obj["most_probable_outcome"] = mode;
        obj["mode_source"] = config.samples > 0 ? "sampled" : "exact";
        write_out(config, dump_json(obj));
    }
    return 0;
}

int run_search(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (!config.has_r || !config.has_s) {
        throw std::invalid_argument("search: --r and --s are required");
    }
    if (config.format.empty()) config.format = "csv";
    const SystemModel model = make_model(config);
    const Oracle oracle = match_oracle(model, config.r, config.s);
    std::uint64_t iterations;
    if (config.iterations >= 0) {
        iterations = static_cast<std::uint64_t>(config.iterations);
    } else {
        // classical assist: derive k from a ground-truth sweep (echoed below)
        iterations = optimal_iterations(model.database_size(), classical_count(model, config.r, config.s));
    }
    config.iterations = static_cast<std::int64_t>(iterations);
    const MeasurementDistribution dist = search(oracle, iterations);

    EchoFields fields;
    fields.r = fields.s = fields.iterations = true;
    if (config.format == "csv") {
        std::string text = csv_echo(config, fields);
        text += "index,probability,marked\n";
        for (std::size_t x = 0; x < dist.probabilities.size(); ++x) {
            text += std::to_string(x) + "," + format_double(dist.probabilities[x]) + "," +
                    (oracle.marked(x) ? "1" : "0") + "\n";
        }
        write_out(config, text);
    } else {
        const std::uint64_t M = classical_count(model, config.r, config.s);
        const GroverTrace trace = predict_search(model.database_size(), M, iterations);
        double marked_mass = 0.0;
        for (std::size_t x = 0; x < dist.probabilities.size(); ++x) {
            if (oracle.marked(x)) marked_mass += dist.probabilities[x];
        }
        ordered_json obj;
        obj["config"] = json_echo(config, fields);
        obj["iterations"] = iterations;
        obj["theta"] = trace.theta;
        obj["predicted_success"] = trace.success_probability;
        obj["marked_mass"] = marked_mass;
        write_out(config, dump_json(obj));
    }
    return 0;
}

int run_estimate_point(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (!config.has_r || !config.has_s) {
        throw std::invalid_argument("estimate-point: --r and --s are required");
    }
    if (config.format.empty()) config.format = "json";
    const SystemModel model = make_model(config);
    const EstimatorConfig est = make_estimator_config(config);
    const double mass = estimate_point(model, config.r, config.s, est);
    const double N = static_cast<double>(model.database_size());
    // bound on the mass scale; the quantum path only knows M^, so plug it in
    const double bound =
        est.backend == PdfBackend::classical
            ? 0.0
            : counting_error_bound(static_cast<std::uint64_t>(std::llround(mass * N)),
                                   model.database_size(), est.counting_qubits) / N;

    EchoFields fields;
    fields.t = fields.backend = fields.r = fields.s = true;
    if (config.format == "json") {
        ordered_json obj;
        obj["config"] = json_echo(config, fields);
        obj["r"] = config.r;
        obj["s"] = config.s;
        obj["mass"] = mass;
        obj["density"] = mass / model.quantizer.bin_width;
        obj["bound"] = bound;
        write_out(config, dump_json(obj));
    } else {
        std::string text = csv_echo(config, fields);
        text += "r,mass,density,bound\n";
        text += format_grid(config.r) + "," + format_double(mass) + "," +
                format_double(mass / model.quantizer.bin_width) + "," + format_double(bound) + "\n";
        write_out(config, text);
    }
    return 0;
}

int run_estimate_pdf(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (!config.has_s) throw std::invalid_argument("estimate-pdf: --s is required");
    if (config.format.empty()) config.format = "csv";
    const SystemModel model = make_model(config);
    const EstimatorConfig est = make_estimator_config(config);
    const std::vector<double> grid =
        resolve_grid(model, config, config.s - 4.0 * model.noise_sigma,
                     config.s + 4.0 * model.noise_sigma);
    const PdfEstimate estimate = estimate_pdf(model, config.s, grid, est);
    if (estimate.off_center_inputs > 0) {
        std::cerr << "qape: warning: " << estimate.off_center_inputs
                  << " grid value(s) were not bin centers and were quantized\n";
    }

    EchoFields fields;
    fields.t = fields.backend = fields.s = fields.grid = true;
    if (config.format == "csv") {
        std::string text = csv_echo(config, fields);
        text += "r,mass,density\n";
        for (std::size_t j = 0; j < estimate.grid.size(); ++j) {
            text += format_grid(estimate.grid[j]) + "," + format_double(estimate.mass[j]) + "," +
                    format_double(estimate.density[j]) + "\n";
        }
        write_out(config, text);
    } else {
        ordered_json obj;
        obj["config"] = json_echo(config, fields);
        obj["grid"] = estimate.grid;
        obj["mass"] = estimate.mass;
        obj["density"] = estimate.density;
        write_out(config, dump_json(obj));
    }
    return 0;
}

ordered_json decision_json(const Decision& decision) {
    ordered_json obj;
    obj["received"] = decision.received;
    ordered_json scores = ordered_json::array();
    for (const SymbolScore& score : decision.per_symbol) {
        scores.push_back({{"s", score.symbol},
                          {"count_estimate", score.count_estimate},
                          {"mass", score.mass}});
    }
    obj["per_symbol"] = scores;
    obj["chosen"] = decision.chosen;
    if (std::isinf(decision.margin)) {
        obj["margin"] = nullptr;  // JSON has no infinity literal
        obj["one_sided"] = true;
    } else {
        obj["margin"] = decision.margin;
        obj["one_sided"] = false;
    }
    obj["tied"] = decision.tied;
    return obj;
}

int run_detect(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (!config.has_r) throw std::invalid_argument("detect: --r is required");
    if (config.format.empty()) config.format = "json";
    const SystemModel model = make_model(config);
    const Decision decision = ml_decide(model, config.r, make_estimator_config(config));

    EchoFields fields;
    fields.t = fields.backend = fields.r = true;
    if (config.format == "json") {
        ordered_json obj;
        obj["config"] = json_echo(config, fields);
        obj.update(decision_json(decision));
        write_out(config, dump_json(obj));
    } else {
        std::string text = csv_echo(config, fields);
        text += "s,count_estimate,mass\n";
        for (const SymbolScore& score : decision.per_symbol) {
            text += format_grid(score.symbol) + "," + format_double(score.count_estimate) + "," +
                    format_double(score.mass) + "\n";
        }
        text += "# chosen = " + format_double(decision.chosen) + "\n";
        write_out(config, text);
    }
    return 0;
}

int run_detect_sweep(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (config.format.empty()) config.format = "csv";
    const SystemModel model = make_model(config);
    const EstimatorConfig est = make_estimator_config(config);
    double lo = model.source_alphabet.front(), hi = model.source_alphabet.front();
    for (double s : model.source_alphabet) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const std::vector<double> grid =
        resolve_grid(model, config, lo - 4.0 * model.noise_sigma, hi + 4.0 * model.noise_sigma);

    EchoFields fields;
    fields.t = fields.backend = fields.grid = true;
    std::string text = csv_echo(config, fields);
    text += "r,chosen";
    for (double s : model.source_alphabet) text += "," + mass_column(s);
    text += "\n";
    int skipped = 0;
    ordered_json rows = ordered_json::array();
    for (double r : grid) {
        Decision decision;
        try {
            decision = ml_decide(model, r, est);
        } catch (const std::runtime_error&) {
            ++skipped;  // no symbol reaches this bin
            continue;
        }
        text += format_grid(r) + "," + format_double(decision.chosen);
        for (const SymbolScore& score : decision.per_symbol) {
            text += "," + format_double(score.mass);
        }
        text += "\n";
        if (config.format == "json") rows.push_back(decision_json(decision));
    }
    if (skipped > 0) {
        std::cerr << "qape: warning: skipped " << skipped << " grid bin(s) outside modeled support\n";
    }
    if (config.format == "csv") {
        write_out(config, text);
    } else {
        ordered_json obj;
        obj["config"] = json_echo(config, fields);
        obj["decisions"] = rows;
        write_out(config, dump_json(obj));
    }
    return 0;
}

/// Read the r and mass columns of an estimate-pdf CSV (echo comments skipped).
void read_pdf_csv(const std::string& path, std::vector<double>& grid, std::vector<double>& mass) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pdf file '" + path + "'");
    std::string line;
    int r_col = -1, mass_col = -1;
    while (std::getline(in, line)) {
        const std::string stripped = qape::detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream stream(stripped);
        std::string cell;
        while (std::getline(stream, cell, ',')) cells.push_back(qape::detail::trim(cell));
        if (r_col < 0) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "r") r_col = static_cast<int>(i);
                if (cells[i] == "mass") mass_col = static_cast<int>(i);
            }
            if (r_col < 0 || mass_col < 0) {
                throw std::runtime_error(path + ": expected a header row naming r and mass columns");
            }
            continue;
        }
        if (static_cast<int>(cells.size()) <= std::max(r_col, mass_col)) {
            throw std::runtime_error(path + ": short row '" + stripped + "'");
        }
        grid.push_back(qape::detail::parse_double("r", cells[r_col]));
        mass.push_back(qape::detail::parse_double("mass", cells[mass_col]));
    }
    if (grid.empty()) throw std::runtime_error(path + ": no data rows");
}

int run_kl(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (config.format.empty()) config.format = "json";
    std::vector<double> grid_p, mass_p, grid_q, mass_q;
    read_pdf_csv(cli.kl_files[0], grid_p, mass_p);
    read_pdf_csv(cli.kl_files[1], grid_q, mass_q);
    if (grid_p.size() != grid_q.size() || !std::equal(grid_p.begin(), grid_p.end(), grid_q.begin())) {
        throw std::invalid_argument("kl: the two pdf files are on different grids");
    }
    const double kl = kl_divergence(mass_p, mass_q);
    if (config.format == "json") {
        ordered_json obj;
        obj["p"] = cli.kl_files[0];
        obj["q"] = cli.kl_files[1];
        if (std::isinf(kl)) {
            obj["kl"] = nullptr;
            obj["infinite"] = true;
        } else {
            obj["kl"] = kl;
            obj["infinite"] = false;
        }
        write_out(config, dump_json(obj));
    } else {
        std::string text = "# p = " + cli.kl_files[0] + "\n# q = " + cli.kl_files[1] + "\n";
        text += "kl\n";
        text += (std::isinf(kl) ? std::string("inf") : format_double(kl)) + "\n";
        write_out(config, text);
    }
    return 0;
}

int run_dump_vdb(const CLI::App* sub, const Cli& cli) {
    RunConfig config = resolve(sub, cli);
    if (!config.has_s) {
        config.s = 0.0;
        if (!config.alphabet.empty()) config.s = config.alphabet.front();
        config.has_s = true;
    }
    if (config.format.empty()) config.format = "csv";
    const SystemModel model = make_model(config);

    EchoFields fields;
    fields.s = true;
    std::string text = csv_echo(config, fields);
    text += "x,n_x,g\n";
    const std::uint64_t N = model.database_size();
    for (std::uint64_t x = 0; x < N; ++x) {
        text += std::to_string(x) + "," + format_double(model.noise(x)) + "," +
                format_grid(g(model, config.s, x)) + "\n";
    }
    write_out(config, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-assisted pdf estimation over a virtual AWGN database"};
    app.require_subcommand(1);
    Cli cli;

    CLI::App* count = app.add_subcommand("count", "quantum counting of entries matching a bin");
    add_common_flags(count, cli);
    add_counting_flags(count, cli);
    count->add_option("--marked-bin,--r", cli.flags.r, "observed value whose bin is counted");
    count->add_option("--s", cli.flags.s, "source symbol");
    count->add_option("--samples", cli.flags.samples, "sampled readout: number of shots");
    count->add_option("--seed", cli.flags.seed, "sampled readout: RNG seed");

    CLI::App* search_cmd = app.add_subcommand("search", "Grover search demonstration");
    add_common_flags(search_cmd, cli);
    search_cmd->add_option("--r", cli.flags.r, "observed value defining the oracle");
    search_cmd->add_option("--s", cli.flags.s, "source symbol");
    search_cmd->add_option("--iterations", cli.flags.iterations,
                           "Grover iterations (default: floor(pi/4 sqrt(N/M)) from a classical sweep)");

    CLI::App* point = app.add_subcommand("estimate-point", "pdf estimate at a single point");
    add_common_flags(point, cli);
    add_counting_flags(point, cli);
    point->add_option("--r", cli.flags.r, "evaluation point");
    point->add_option("--s", cli.flags.s, "source symbol");

    CLI::App* pdf = app.add_subcommand("estimate-pdf", "whole-pdf sweep over a bin-center grid");
    add_common_flags(pdf, cli);
    add_counting_flags(pdf, cli);
    pdf->add_option("--s", cli.flags.s, "source symbol");
    pdf->add_option("--grid_min,--grid-min", cli.flags.grid_min, "sweep start (default s - 4 sigma)");
    pdf->add_option("--grid_max,--grid-max", cli.flags.grid_max, "sweep end (default s + 4 sigma)");

    CLI::App* detect = app.add_subcommand("detect", "maximum-likelihood symbol decision");
    add_common_flags(detect, cli);
    add_counting_flags(detect, cli);
    detect->add_option("--r", cli.flags.r, "received value");

    CLI::App* sweep = app.add_subcommand("detect-sweep", "ML decision over a grid of received values");
    add_common_flags(sweep, cli);
    add_counting_flags(sweep, cli);
    sweep->add_option("--grid_min,--grid-min", cli.flags.grid_min, "sweep start");
    sweep->add_option("--grid_max,--grid-max", cli.flags.grid_max, "sweep end");

    CLI::App* kl = app.add_subcommand("kl", "KL divergence between two estimate-pdf CSV files");
    kl->add_option("files", cli.kl_files, "pdf CSV files: p then q")->expected(2)->required();
    kl->add_option("--format", cli.flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    kl->add_option("--output", cli.flags.output, "output path (default stdout)");

    CLI::App* dump = app.add_subcommand("dump-vdb", "dump x, n_x, g(s,x) rows");
    add_common_flags(dump, cli);
    dump->add_option("--s", cli.flags.s, "source symbol (default: first alphabet entry)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (count->parsed()) return run_count(count, cli);
        if (search_cmd->parsed()) return run_search(search_cmd, cli);
        if (point->parsed()) return run_estimate_point(point, cli);
        if (pdf->parsed()) return run_estimate_pdf(pdf, cli);
        if (detect->parsed()) return run_detect(detect, cli);
        if (sweep->parsed()) return run_detect_sweep(sweep, cli);
        if (kl->parsed()) return run_kl(kl, cli);
        if (dump->parsed()) return run_dump_vdb(dump, cli);
    } catch (const std::exception& err) {
        std::cerr << "qape: " << err.what() << "\n";
        return 1;
    }
    std::cerr << "qape: no subcommand\n";
    return 1;
}
