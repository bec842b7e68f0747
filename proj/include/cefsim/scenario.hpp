#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cefsim/config.hpp"
#include "cefsim/fuel.hpp"
#include "cefsim/fuel_params.hpp"
#include "cefsim/generation.hpp"

namespace cefsim {

// PP: plant list with known efficiencies. PWL: virtual plants from installed
// capacities. PWLv: PWL fed with plant-list capacities, for validation.
enum class Method { pp, pwl, pwlv };

std::string_view to_string(Method method);
std::optional<Method> method_from_string(std::string_view text);

struct EnvelopeBounds {
    double eta_min = 0.0;
    double eta_max = 0.0;
};

// Per-fuel efficiency range of the linear efficiency ramp.
using EfficiencyEnvelope = std::map<Fuel, EnvelopeBounds>;

struct ScenarioConfig {
    std::string country;
    int year = 0;
    Method method = Method::pwl;
    double carbon_price = 0.0;             // EUR/t
    double transmission_efficiency = 1.0;  // eta^T
    double delta_t_h = 1.0;
    double k_cc = 0.0;  // combined-cycle share of gas capacity
    std::map<Fuel, double> avg_plant_size_mw;
    EfficiencyEnvelope envelope;
    FuelParams fuel_params;
    // Conventional fuels left out of the residual load.
    std::set<Fuel> residual_load_exclude{Fuel::other_conv};

    // Throws ConfigError on violated invariants.
    void validate() const;
};

// Everything a config file carries, independent of a particular scenario.
struct Settings {
    double delta_t_h = 1.0;
    double zscore_threshold = 12.0;
    double element_mw = 10.0;
    std::set<Fuel> residual_load_exclude{Fuel::other_conv};
    ColumnMap column_map;
    std::map<std::string, double> transmission_efficiency;
    std::map<std::string, double> k_cc;
    std::map<int, double> carbon_price;
    FuelParamsTable fuel_params;
    EfficiencyEnvelope envelope;
    std::map<Fuel, double> default_avg_plant_size;
    std::map<std::string, std::map<Fuel, double>> avg_plant_size;
    std::string source_text;

    static Settings from_document(const config::Document& doc);
    static Settings load(const std::string& path);

    // Missing country-specific average plant sizes fall back to the
    // cross-country defaults.
    std::map<Fuel, double> plant_sizes_for(const std::string& country) const;

    // Throws ConfigError naming the missing entry.
    ScenarioConfig scenario(const std::string& country, int year, Method method,
                            std::optional<double> carbon_price_override = std::nullopt) const;
};

}  // namespace cefsim
