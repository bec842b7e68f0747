#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cefsim/analysis.hpp"
#include "cefsim/dispatch.hpp"
#include "cefsim/ingest.hpp"
#include "cefsim/merit_order.hpp"
#include "cefsim/parallel.hpp"
#include "cefsim/scenario.hpp"

namespace cefsim {

// Data directory layout:
//
//   generation_<CC>_<YYYY>.csv   raw generation export per country-year
//   capacity_<YYYY>.csv          installed capacity, country x fuel
//   plants.csv                   plant list (PP, PWLv)
//   fuel_params.csv              optional, merged over the config
//   eua_prices.csv               optional weekly allowance prices
//   normalized/                  written by ingest, read by every other step
struct ScenarioKey {
    std::string country;
    int year = 0;
    Method method = Method::pwl;

    // "DE_2019_PWL"
    std::string tag() const;
};

// "DE:2019[:PWL]"
ScenarioKey parse_scenario_key(std::string_view text, Method default_method = Method::pwl);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct IngestReport {
    std::vector<std::filesystem::path> outputs;
    std::vector<std::string> warnings;
    // (country, year) pairs whose generation file was processed
    std::vector<std::pair<std::string, int>> series;
};

// Normalizes every input of `data_dir` into `out_dir/normalized`. Throws
// DataError naming (country, year) when installed capacity is missing.
IngestReport ingest_directory(const std::filesystem::path& data_dir,
                              const std::filesystem::path& out_dir, const Settings& settings);

// Read access to a normalized data directory.
class Workspace {
public:
    Workspace(std::filesystem::path data_dir, Settings settings);

    const Settings& settings() const { return settings_; }
    std::filesystem::path normalized_dir() const { return data_dir_ / "normalized"; }

    std::vector<ScenarioKey> discover(Method method) const;

    GenerationSeries generation(const std::string& country, int year) const;
    std::vector<PowerPlant> plants(const std::string& country, int year) const;
    std::map<Fuel, double> installed_capacity(const std::string& country, int year) const;

    // Carbon price precedence: explicit override, EUA-derived annual mean,
    // config table.
    ScenarioConfig scenario(const ScenarioKey& key,
                            std::optional<double> carbon_price = std::nullopt) const;

    MeritOrder merit_order(const ScenarioKey& key, const ScenarioConfig& config) const;
    MeritOrderFactory factory(const ScenarioKey& key, const ScenarioConfig& config) const;

    // Paths read for a scenario, for run manifests.
    std::vector<std::filesystem::path> inputs_for(const ScenarioKey& key) const;

    std::string config_hash() const;

private:
    std::filesystem::path data_dir_;
    Settings settings_;
    std::map<int, double> carbon_prices_;
};

struct ScenarioResult {
    ScenarioConfig config;
    MeritOrder order;
    CefSeries cef;
};

ScenarioResult run_scenario(const Workspace& workspace, const ScenarioKey& key,
                            std::optional<double> carbon_price = std::nullopt);

}  // namespace cefsim
