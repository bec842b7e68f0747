#include "cefsim/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace fs = std::filesystem;

namespace cefsim {
namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

const std::regex kGenerationFile{R"(generation_([A-Z]{2})_(\d{4})\.csv)"};
const std::regex kCapacityFile{R"(capacity_(\d{4})\.csv)"};

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string ScenarioKey::tag() const {
    return fmt::format("{}_{}_{}", country, year, to_string(method));
}

ScenarioKey parse_scenario_key(std::string_view text, Method default_method) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() < 2 || parts.size() > 3) {
        throw ConfigError("scenario must look like CC:YYYY[:METHOD], got '" + std::string(text) + "'");
    }
    ScenarioKey key;
    key.country = csv::trim(parts[0]);
    const auto year = csv::parse_number(parts[1]);
    if (key.country.empty() || !year) {
        throw ConfigError("scenario must look like CC:YYYY[:METHOD], got '" + std::string(text) + "'");
    }
    key.year = static_cast<int>(*year);
    key.method = default_method;
    if (parts.size() == 3) {
        const auto m = method_from_string(csv::trim(parts[2]));
        if (!m) throw ConfigError("unknown method '" + parts[2] + "'");
        key.method = *m;
    }
    return key;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string sha256_file(const fs::path& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

IngestReport ingest_directory(const fs::path& data_dir, const fs::path& out_dir,
                              const Settings& settings) {
    if (!fs::is_directory(data_dir)) throw DataError("data directory not found: " + data_dir.string());
    const auto norm = out_dir / "normalized";
    IngestReport report;

    std::map<int, CapacityTable> capacities;
    for (const auto& path : sorted_entries(data_dir)) {
        std::smatch m;
        const auto name = path.filename().string();
        if (std::regex_match(name, m, kCapacityFile)) {
            auto in = open_input(path);
            capacities[std::stoi(m[1])] = load_installed_capacity(in, settings.column_map);
        }
    }

    std::set<int> years;
    for (const auto& path : sorted_entries(data_dir)) {
        std::smatch m;
        const auto name = path.filename().string();
        if (!std::regex_match(name, m, kGenerationFile)) continue;
        const std::string country = m[1];
        const int year = std::stoi(m[2]);
        auto cap = capacities.find(year);
        if (cap == capacities.end() || !cap->second.count(country)) {
            throw DataError(fmt::format("missing installed capacity for {} {}", country, year));
        }
        auto in = open_input(path);
        GenerationSeries raw;
        try {
            raw = parse_generation_csv(in, settings.column_map, country, year);
        } catch (const Error& e) {
            throw DataError(fmt::format("{}: {}", path.string(), e.what()));
        }
        const auto clean = preprocess_generation(raw, settings.zscore_threshold);
        for (const auto& w : clean.warnings) {
            report.warnings.push_back(fmt::format("{} {}: {}", country, year, w));
        }
        const auto gen_path = norm / fmt::format("generation_{}_{}.csv", country, year);
        const auto fill_path = norm / fmt::format("fill_report_{}_{}.csv", country, year);
        {
            auto out = open_output(gen_path);
            write_generation_csv(out, clean);
        }
        {
            auto out = open_output(fill_path);
            write_fill_report_csv(out, clean);
        }
        report.outputs.push_back(gen_path);
        report.outputs.push_back(fill_path);
        report.series.emplace_back(country, year);
        years.insert(year);
    }

    for (const auto& [year, table] : capacities) {
        const auto path = norm / fmt::format("capacity_{}.csv", year);
        auto out = open_output(path);
        write_installed_capacity_csv(out, table);
        report.outputs.push_back(path);
    }

    if (fs::exists(data_dir / "plants.csv")) {
        for (int year : years) {
            auto in = open_input(data_dir / "plants.csv");
            const auto list = load_plant_list(in, year, settings.column_map);
            for (const auto& r : list.rejected) {
                report.warnings.push_back(
                    fmt::format("plants.csv line {} ({}): {}", r.line, r.id, r.reason));
            }
            const auto path = norm / fmt::format("plants_{}.csv", year);
            auto out = open_output(path);
            write_plant_list_csv(out, list.plants);
            report.outputs.push_back(path);
        }
    }

    if (fs::exists(data_dir / "fuel_params.csv")) {
        FuelParamsTable table;
        auto in = open_input(data_dir / "fuel_params.csv");
        table.merge_csv(in, settings.column_map);
        fs::create_directories(norm);
        fs::copy_file(data_dir / "fuel_params.csv", norm / "fuel_params.csv",
                      fs::copy_options::overwrite_existing);
        report.outputs.push_back(norm / "fuel_params.csv");
    }

    if (fs::exists(data_dir / "eua_prices.csv")) {
        auto in = open_input(data_dir / "eua_prices.csv");
        const auto prices = load_eua_prices(in);
        const auto path = norm / "carbon_price.csv";
        auto out = open_output(path);
        csv::write_row(out, {"year", "carbon_price_eur_t"});
        for (int year : years) {
            try {
                csv::write_row(out, {std::to_string(year),
                                     csv::format_number(annual_carbon_price(prices, year))});
            } catch (const DataError& e) {
                report.warnings.push_back(e.what());
            }
        }
        report.outputs.push_back(path);
    }
    return report;
}

Workspace::Workspace(fs::path data_dir, Settings settings)
    : data_dir_(std::move(data_dir)), settings_(std::move(settings)) {
    const auto norm = normalized_dir();
    if (fs::exists(norm / "fuel_params.csv")) {
        auto in = open_input(norm / "fuel_params.csv");
        settings_.fuel_params.merge_csv(in, settings_.column_map);
    }
    if (fs::exists(norm / "carbon_price.csv")) {
        const auto table = csv::read_file((norm / "carbon_price.csv").string());
        for (const auto& row : table.rows) {
            if (row.size() < 2) continue;
            const auto y = csv::parse_number(row[0]);
            const auto p = csv::parse_number(row[1]);
            if (y && p) carbon_prices_[static_cast<int>(*y)] = *p;
        }
    }
}

std::vector<ScenarioKey> Workspace::discover(Method method) const {
    std::vector<ScenarioKey> keys;
    for (const auto& path : sorted_entries(normalized_dir())) {
        std::smatch m;
        const auto name = path.filename().string();
        if (std::regex_match(name, m, kGenerationFile)) {
            keys.push_back({m[1], std::stoi(m[2]), method});
        }
    }
    return keys;
}

GenerationSeries Workspace::generation(const std::string& country, int year) const {
    const auto path = normalized_dir() / fmt::format("generation_{}_{}.csv", country, year);
    if (!fs::exists(path)) {
        throw DataError(fmt::format("no normalized generation for {} {}; run ingest first", country, year));
    }
    auto in = open_input(path);
    auto series = parse_generation_csv(in, settings_.column_map, country, year);
    if (!series.complete()) {
        throw DataError(fmt::format("normalized generation for {} {} has gaps", country, year));
    }
    return series;
}

std::vector<PowerPlant> Workspace::plants(const std::string& country, int year) const {
    const auto path = normalized_dir() / fmt::format("plants_{}.csv", year);
    if (!fs::exists(path)) throw DataError(fmt::format("no plant list for {}", year));
    auto in = open_input(path);
    auto list = load_plant_list(in, year, settings_.column_map, country);
    if (list.plants.empty()) {
        throw DataError(fmt::format("plant list has no active plants for {} {}", country, year));
    }
    return std::move(list.plants);
}

std::map<Fuel, double> Workspace::installed_capacity(const std::string& country, int year) const {
    const auto path = normalized_dir() / fmt::format("capacity_{}.csv", year);
    if (!fs::exists(path)) {
        throw DataError(fmt::format("missing installed capacity for {} {}", country, year));
    }
    auto in = open_input(path);
    const auto table = load_installed_capacity(in, settings_.column_map);
    auto it = table.find(country);
    if (it == table.end()) {
        throw DataError(fmt::format("missing installed capacity for {} {}", country, year));
    }
    return it->second;
}

ScenarioConfig Workspace::scenario(const ScenarioKey& key, std::optional<double> carbon_price) const {
    if (!carbon_price) {
        if (auto it = carbon_prices_.find(key.year); it != carbon_prices_.end()) {
            carbon_price = it->second;
        }
    }
    return settings_.scenario(key.country, key.year, key.method, carbon_price);
}

MeritOrder Workspace::merit_order(const ScenarioKey& key, const ScenarioConfig& config) const {
    return factory(key, config)(config.carbon_price);
}

MeritOrderFactory Workspace::factory(const ScenarioKey& key, const ScenarioConfig& config) const {
    const auto hash = config_hash();
    switch (key.method) {
        case Method::pp: {
            auto plants = this->plants(key.country, key.year);
            return [plants = std::move(plants), params = config.fuel_params, hash](double price) {
                auto order = build_merit_order_pp(plants, params, price);
                auto prov = order.provenance();
                prov.config_hash = hash;
                return MeritOrder::from_blocks(order.blocks(), prov);
            };
        }
        case Method::pwl:
        case Method::pwlv: {
            std::map<Fuel, double> caps;
            if (key.method == Method::pwl) {
                caps = installed_capacity(key.country, key.year);
            } else {
                const auto path = normalized_dir() / fmt::format("plants_{}.csv", key.year);
                if (!fs::exists(path)) throw DataError("PWLv requires plant-list capacities");
                caps = capacity_from_plants(this->plants(key.country, key.year));
            }
            return [caps = std::move(caps), config, hash](double price) {
                auto cfg = config;
                cfg.carbon_price = price;
                auto order = build_merit_order_pwl(caps, cfg);
                auto prov = order.provenance();
                prov.config_hash = hash;
                return MeritOrder::from_blocks(order.blocks(), prov);
            };
        }
    }
    throw ConfigError("unknown method");
}

std::vector<fs::path> Workspace::inputs_for(const ScenarioKey& key) const {
    const auto norm = normalized_dir();
    std::vector<fs::path> paths{norm / fmt::format("generation_{}_{}.csv", key.country, key.year)};
    if (key.method == Method::pwl) {
        paths.push_back(norm / fmt::format("capacity_{}.csv", key.year));
    } else {
        paths.push_back(norm / fmt::format("plants_{}.csv", key.year));
    }
    for (const char* extra : {"fuel_params.csv", "carbon_price.csv"}) {
        if (fs::exists(norm / extra)) paths.push_back(norm / extra);
    }
    return paths;
}

std::string Workspace::config_hash() const { return sha256_hex(settings_.source_text); }

ScenarioResult run_scenario(const Workspace& workspace, const ScenarioKey& key,
                            std::optional<double> carbon_price) {
    auto config = workspace.scenario(key, carbon_price);
    const auto generation = workspace.generation(key.country, key.year);
    auto order = workspace.merit_order(key, config);
    auto cef = compute_cef_series(order, generation, config);
    return ScenarioResult{std::move(config), std::move(order), std::move(cef)};
}

}  // namespace cefsim
