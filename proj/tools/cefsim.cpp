// cefsim: merit-order emission factors and load-shift studies from the
// command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cefsim/analysis.hpp"
#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"
#include "cefsim/ingest.hpp"
#include "cefsim/loadshift.hpp"
#include "cefsim/merit_order.hpp"
#include "cefsim/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cefsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

struct GlobalOptions {
    std::string config;
    std::string data_dir = ".";
    std::string out_dir;
    unsigned jobs = 1;
};

struct ScenarioOptions {
    std::vector<std::string> scenarios;
    std::string method = "PWL";
    std::optional<double> carbon_price;
};

Settings load_settings(const GlobalOptions& g) {
    std::string path = g.config;
    if (path.empty()) {
        if (const char* env = std::getenv("CEFSIM_CONFIG"); env && *env) path = env;
    }
    if (path.empty()) path = CEFSIM_DEFAULT_CONFIG;
    return Settings::load(path);
}

fs::path out_dir(const GlobalOptions& g) { return g.out_dir.empty() ? fs::path(g.data_dir) : fs::path(g.out_dir); }

std::vector<ScenarioKey> select_scenarios(const Workspace& ws, const ScenarioOptions& s) {
    const auto method = method_from_string(s.method);
    if (!method) throw ConfigError("unknown method '" + s.method + "'");
    std::vector<ScenarioKey> keys;
    for (const auto& text : s.scenarios) keys.push_back(parse_scenario_key(text, *method));
    if (keys.empty()) keys = ws.discover(*method);
    if (keys.empty()) throw DataError("no scenarios selected and none found in " + ws.normalized_dir().string());
    return keys;
}

std::string relative_to(const fs::path& path, const fs::path& base) {
    return fs::path(path).lexically_relative(base).generic_string();
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream ss;
    fn(ss);
    return ss.str();
}

// Per-scenario outcome collected for the manifest.
struct Outcome {
    ScenarioKey key;
    bool ok = false;
    std::string error;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
    json warnings = json::object();
};

std::optional<double> fill_fraction(const Workspace& ws, const ScenarioKey& key, std::size_t hours,
                                    std::size_t columns) {
    const auto path = ws.normalized_dir() / fmt::format("fill_report_{}_{}.csv", key.country, key.year);
    if (!fs::exists(path) || hours * columns == 0) return std::nullopt;
    const auto table = csv::read_file(path.string());
    const auto kind = table.column("kind");
    std::size_t filled = 0;
    for (const auto& row : table.rows) {
        if (kind && *kind < row.size() && row[*kind] != "outlier") ++filled;
    }
    return static_cast<double>(filled) / static_cast<double>(hours * columns);
}

int finish(const std::string& command, const Workspace& ws, const fs::path& out,
           const std::vector<Outcome>& outcomes) {
    json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = ws.config_hash();
    manifest["scenarios"] = json::array();
    std::size_t failed = 0;
    for (const auto& o : outcomes) {
        json s;
        s["country"] = o.key.country;
        s["year"] = o.key.year;
        s["method"] = std::string(to_string(o.key.method));
        s["status"] = o.ok ? "ok" : "failed";
        if (!o.ok) {
            s["error"] = o.error;
            ++failed;
            std::cerr << fmt::format("error: {}: {}\n", o.key.tag(), o.error);
        }
        s["inputs"] = json::array();
        for (const auto& p : o.inputs) {
            if (fs::exists(p)) {
                s["inputs"].push_back({{"path", relative_to(p, ws.normalized_dir())}, {"sha256", sha256_file(p)}});
            }
        }
        s["outputs"] = json::array();
        for (const auto& p : o.outputs) {
            s["outputs"].push_back({{"path", relative_to(p, out)}, {"sha256", sha256_file(p)}});
        }
        s["warnings"] = o.warnings;
        manifest["scenarios"].push_back(std::move(s));
    }
    write_text(out / fmt::format("manifest_{}.json", command), manifest.dump(2) + "\n");
    if (failed == 0) return kExitOk;
    return kExitPartial;
}

int cmd_ingest(const GlobalOptions& g) {
    const auto settings = load_settings(g);
    const auto report = ingest_directory(g.data_dir, out_dir(g), settings);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << fmt::format("ingested {} generation series, wrote {} files to {}\n",
                             report.series.size(), report.outputs.size(),
                             (out_dir(g) / "normalized").string());
    return kExitOk;
}

// Runs `body` for every selected scenario on the worker pool.
template <typename Body>
std::vector<Outcome> for_each_scenario(const Workspace& ws, const std::vector<ScenarioKey>& keys,
                                       unsigned jobs, Body&& body) {
    std::vector<Outcome> outcomes(keys.size());
    parallel_for(keys.size(), jobs, [&](std::size_t i) {
        auto& o = outcomes[i];
        o.key = keys[i];
        o.inputs = ws.inputs_for(keys[i]);
        try {
            body(keys[i], o);
            o.ok = true;
        } catch (const std::exception& e) {
            o.error = e.what();
            o.outputs.clear();
        }
    });
    return outcomes;
}

void add_cef_warnings(const Workspace& ws, const ScenarioResult& run, Outcome& o) {
    o.warnings["saturated_hours"] = run.cef.saturated_hours();
    o.warnings["invalid_xef_hours"] = run.cef.invalid_xef_hours();
    const auto generation = ws.generation(o.key.country, o.key.year);
    if (auto f = fill_fraction(ws, o.key, generation.size(), generation.columns.size())) {
        o.warnings["fill_fraction"] = csv::format_number(*f);
    }
    double excluded = 0.0;
    double total = 0.0;
    for (const auto& [fuel, col] : generation.columns) {
        for (const auto& v : col) {
            total += *v;
            if (run.config.residual_load_exclude.count(fuel)) excluded += *v;
        }
    }
    if (excluded > 0.0 && total > 0.0) {
        o.warnings["excluded_generation_share"] = csv::format_number(excluded / total);
    }
    if (!run.order.provenance().notes.empty()) o.warnings["merit_order"] = run.order.provenance().notes;
}

int cmd_compute(const GlobalOptions& g, const ScenarioOptions& s) {
    const Workspace ws(g.data_dir, load_settings(g));
    const auto keys = select_scenarios(ws, s);
    const auto out = out_dir(g);
    auto outcomes = for_each_scenario(ws, keys, g.jobs, [&](const ScenarioKey& key, Outcome& o) {
        const auto run = run_scenario(ws, key, s.carbon_price);
        const auto cef_path = out / fmt::format("cef_{}.csv", key.tag());
        const auto mo_path = out / fmt::format("merit_order_{}.csv", key.tag());
        write_text(cef_path, render([&](std::ostream& os) { write_cef_csv(os, run.cef); }));
        write_text(mo_path, render([&](std::ostream& os) { write_merit_order_csv(os, run.order); }));
        o.outputs = {cef_path, mo_path};
        add_cef_warnings(ws, run, o);
    });
    return finish("compute", ws, out, outcomes);
}

int cmd_shift(const GlobalOptions& g, const ScenarioOptions& s, const std::vector<std::string>& driver_names) {
    std::vector<Driver> drivers;
    for (const auto& name : driver_names) {
        if (name == "all") {
            drivers = {Driver::price, Driver::xef, Driver::mef};
            break;
        }
        const auto d = driver_from_string(name);
        if (!d) throw ConfigError("unknown driver '" + name + "'");
        drivers.push_back(*d);
    }
    const Workspace ws(g.data_dir, load_settings(g));
    const auto keys = select_scenarios(ws, s);
    const auto out = out_dir(g);
    auto outcomes = for_each_scenario(ws, keys, g.jobs, [&](const ScenarioKey& key, Outcome& o) {
        const auto run = run_scenario(ws, key, s.carbon_price);
        for (Driver d : drivers) {
            const auto report = run_shift_study(run.cef, d);
            const auto stem = fmt::format("shift_{}_{}", key.tag(), to_string(d));
            const auto events = out / (stem + "_events.csv");
            const auto summary = out / (stem + "_summary.txt");
            write_text(events, render([&](std::ostream& os) { write_shift_events_csv(os, report); }));
            write_text(summary, render([&](std::ostream& os) { write_shift_summary(os, report); }));
            o.outputs.push_back(events);
            o.outputs.push_back(summary);
            o.warnings[fmt::format("{}_skipped_days", to_string(d))] = report.skipped_days;
            std::cout << fmt::format("{} driver={} dc_pct={} dxe_pct={} dme_pct={} events={}\n", key.tag(),
                                     to_string(d), report.dc_pct ? csv::format_number(*report.dc_pct) : "na",
                                     report.dxe_pct ? csv::format_number(*report.dxe_pct) : "na",
                                     report.dme_pct ? csv::format_number(*report.dme_pct) : "na",
                                     report.events.size());
        }
    });
    return finish("shift", ws, out, outcomes);
}

int cmd_sweep(const GlobalOptions& g, const ScenarioOptions& s, const std::string& grid_spec,
              const std::string& weighting_name) {
    const auto grid = parse_grid(grid_spec);
    Weighting weighting;
    if (weighting_name == "capacity") {
        weighting = Weighting::capacity;
    } else if (weighting_name == "plant") {
        weighting = Weighting::plant;
    } else {
        throw ConfigError("weighting must be capacity or plant");
    }
    const Workspace ws(g.data_dir, load_settings(g));
    const auto keys = select_scenarios(ws, s);
    const auto out = out_dir(g);
    const double element = ws.settings().element_mw;
    // Scenarios run one after another; the grid is spread over the workers.
    auto outcomes = for_each_scenario(ws, keys, 1, [&](const ScenarioKey& key, Outcome& o) {
        const auto config = ws.scenario(key, s.carbon_price);
        const auto factory = ws.factory(key, config);
        const auto curve = carbon_price_sweep(factory, grid, weighting, element, 0.01, g.jobs);
        const auto generation = ws.generation(key.country, key.year);
        const Driver price_driver = Driver::price;
        const auto rows = shift_study_vs_carbon_price(factory, generation, config, {&price_driver, 1}, grid, g.jobs);

        const auto path = out / fmt::format("sweep_{}.csv", key.tag());
        write_text(path, render([&](std::ostream& os) {
                       csv::write_row(os, {"c_ghg_eur_t", "r", "dc_pct", "dxe_pct", "dme_pct"});
                       auto cell = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string(); };
                       for (std::size_t i = 0; i < grid.size(); ++i) {
                           csv::write_row(os, {csv::format_number(grid[i]), cell(curve.r[i]), cell(rows[i].dc_pct),
                                               cell(rows[i].dxe_pct), cell(rows[i].dme_pct)});
                       }
                   }));
        const auto summary = out / fmt::format("sweep_{}_summary.txt", key.tag());
        write_text(summary, render([&](std::ostream& os) {
                       os << "weighting = " << weighting_name << '\n';
                       os << "grid = " << grid_spec << '\n';
                       os << "zero_crossing_eur_t = "
                          << (curve.zero_crossing ? csv::format_number(*curve.zero_crossing) : std::string("none"))
                          << '\n';
                   }));
        o.outputs = {path, summary};
        std::cout << fmt::format("{} zero_crossing={}\n", key.tag(),
                                 curve.zero_crossing ? csv::format_number(*curve.zero_crossing) : "none");
    });
    return finish("sweep", ws, out, outcomes);
}

int cmd_validate(const GlobalOptions& g, const ScenarioOptions& s, const std::string& reference_name,
                 const std::string& candidate_name) {
    const auto reference = method_from_string(reference_name);
    const auto candidate = method_from_string(candidate_name);
    if (!reference || !candidate) throw ConfigError("unknown reference or candidate method");
    const Workspace ws(g.data_dir, load_settings(g));
    ScenarioOptions ref_opts = s;
    ref_opts.method = reference_name;
    const auto keys = select_scenarios(ws, ref_opts);
    const auto out = out_dir(g);
    const double element = ws.settings().element_mw;
    auto outcomes = for_each_scenario(ws, keys, g.jobs, [&](const ScenarioKey& key, Outcome& o) {
        ScenarioKey cand_key = key;
        cand_key.method = *candidate;
        const auto ref_run = run_scenario(ws, key, s.carbon_price);
        const auto cand_run = run_scenario(ws, cand_key, s.carbon_price);
        const auto report = validation_errors({ref_run.order, ref_run.cef}, {cand_run.order, cand_run.cef}, element);
        const auto path = out / fmt::format("validation_{}_{}_{}_vs_{}.csv", key.country, key.year,
                                            to_string(*reference), to_string(*candidate));
        write_text(path, render([&](std::ostream& os) { write_validation_csv(os, report, key.year); }));
        o.outputs = {path};
        for (const auto& p : ws.inputs_for(cand_key)) o.inputs.push_back(p);
        o.warnings["excluded_reference_zero"] = {
            {"mo_emission", report.mo_emission.excluded}, {"mef", report.mef.excluded}, {"xef", report.xef.excluded}};
    });
    return finish("validate", ws, out, outcomes);
}

int cmd_envelope(const GlobalOptions& g, const std::string& plants_path, int year, const std::string& country) {
    const auto settings = load_settings(g);
    std::ifstream in(plants_path, std::ios::binary);
    if (!in) throw DataError("cannot open " + plants_path);
    const auto list = load_plant_list(in, year, settings.column_map, country);
    const auto envelope = efficiency_envelope_from_regression(list.plants);
    std::cout << "[efficiency_envelope]\n";
    for (const auto& [fuel, b] : envelope) {
        std::cout << fmt::format("{} = [{}, {}]\n", to_string(fuel), csv::format_number(b.eta_min),
                                 csv::format_number(b.eta_max));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Merit-order carbon emission factors and load-shift studies"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Config file (default: $CEFSIM_CONFIG or the shipped default)");
    app.add_option("--data-dir", g.data_dir, "Input data directory")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Output directory (default: data dir)");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();

    ScenarioOptions s;
    auto add_scenario_flags = [&](CLI::App* sub) {
        sub->add_option("--scenario", s.scenarios, "CC:YYYY[:METHOD], repeatable (default: all ingested)");
        sub->add_option("--method", s.method, "PP | PWL | PWLv")->capture_default_str();
        sub->add_option("--carbon-price", s.carbon_price, "Carbon price override in EUR/t");
    };

    auto* ingest = app.add_subcommand("ingest", "Clean and normalize raw input files");

    auto* compute = app.add_subcommand("compute", "Compute hourly CEF series per scenario");
    add_scenario_flags(compute);

    std::vector<std::string> drivers{"price"};
    auto* shift = app.add_subcommand("shift", "Daily 1 kWh load-shift study");
    add_scenario_flags(shift);
    shift->add_option("--driver", drivers, "price | xef | mef | all")->capture_default_str();

    std::string grid = "0:300:5";
    std::string weighting = "capacity";
    auto* sweep = app.add_subcommand("sweep", "Carbon-price sensitivity of the merit order");
    add_scenario_flags(sweep);
    sweep->add_option("--cghg-grid", grid, "start:stop:step in EUR/t")->capture_default_str();
    sweep->add_option("--weighting", weighting, "capacity | plant")->capture_default_str();

    std::string reference = "PP";
    std::string candidate = "PWLv";
    auto* validate = app.add_subcommand("validate", "Relative errors of a candidate method against a reference");
    add_scenario_flags(validate);
    validate->add_option("--reference", reference)->capture_default_str();
    validate->add_option("--candidate", candidate)->capture_default_str();

    std::string plants_path;
    int year = 0;
    std::string country;
    auto* envelope = app.add_subcommand("envelope", "Fit per-fuel efficiency envelopes from a plant list");
    envelope->add_option("--plants", plants_path)->required();
    envelope->add_option("--year", year)->required();
    envelope->add_option("--country", country);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitFatal;
    }

    try {
        if (*ingest) return cmd_ingest(g);
        if (*compute) return cmd_compute(g, s);
        if (*shift) return cmd_shift(g, s, drivers);
        if (*sweep) return cmd_sweep(g, s, grid, weighting);
        if (*validate) return cmd_validate(g, s, reference, candidate);
        if (*envelope) return cmd_envelope(g, plants_path, year, country);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFatal;
    }
    return kExitFatal;
}
