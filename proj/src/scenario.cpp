#include "cefsim/scenario.hpp"

#include <charconv>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim {
namespace {

Fuel require_fuel(std::string_view name, std::string_view where) {
    if (auto f = fuel_from_string(name)) return *f;
    throw ConfigError(fmt::format("[{}]: unknown fuel '{}'", where, name));
}

int require_year(std::string_view text, std::string_view where) {
    int year = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(fmt::format("[{}]: '{}' is not a year", where, text));
    }
    return year;
}

std::map<Fuel, double> fuel_numbers(const config::Document& doc, const std::string& table) {
    std::map<Fuel, double> out;
    if (const auto* t = doc.table(table)) {
        for (const auto& [key, _] : *t) out[require_fuel(key, table)] = *doc.number(table, key);
    }
    return out;
}

std::map<std::string, double> country_numbers(const config::Document& doc,
                                              const std::string& table) {
    std::map<std::string, double> out;
    if (const auto* t = doc.table(table)) {
        for (const auto& [key, _] : *t) out[key] = *doc.number(table, key);
    }
    return out;
}

void read_fuel_param_table(const config::Document& doc, const std::string& table, int year,
                           const std::string& country, FuelParamsTable& out) {
    const auto* t = doc.table(table);
    if (!t) return;
    for (const auto& [key, _] : *t) {
        const auto pair = *doc.numbers(table, key);
        if (pair.size() != 2) {
            throw ConfigError(fmt::format("[{}] {}: expected [emission_t_per_mwh, price_eur_per_mwh]",
                                          table, key));
        }
        out.add(year, country, require_fuel(key, table), FuelParam{pair[0], pair[1]});
    }
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
        case Method::pp: return "PP";
        case Method::pwl: return "PWL";
        case Method::pwlv: return "PWLv";
    }
    return "unknown";
}

std::optional<Method> method_from_string(std::string_view text) {
    const auto lower = csv::to_lower(text);
    if (lower == "pp") return Method::pp;
    if (lower == "pwl") return Method::pwl;
    if (lower == "pwlv") return Method::pwlv;
    return std::nullopt;
}

void ScenarioConfig::validate() const {
    if (!(transmission_efficiency > 0.0 && transmission_efficiency <= 1.0)) {
        throw ConfigError(fmt::format("transmission efficiency {} outside (0, 1]",
                                      transmission_efficiency));
    }
    if (!(k_cc >= 0.0 && k_cc <= 1.0)) {
        throw ConfigError(fmt::format("combined-cycle share {} outside [0, 1]", k_cc));
    }
    if (!(delta_t_h > 0.0)) throw ConfigError("time step width must be positive");
    if (!(carbon_price >= 0.0)) throw ConfigError("carbon price must be non-negative");
    for (const auto& [fuel, b] : envelope) {
        if (!(b.eta_min > 0.0 && b.eta_min <= b.eta_max && b.eta_max <= 1.0)) {
            throw ConfigError(fmt::format("invalid efficiency envelope for {}: ({}, {})",
                                          to_string(fuel), b.eta_min, b.eta_max));
        }
    }
    for (const auto& [fuel, size] : avg_plant_size_mw) {
        if (!(size > 0.0)) {
            throw ConfigError(fmt::format("average plant size for {} must be positive",
                                          to_string(fuel)));
        }
    }
}

Settings Settings::from_document(const config::Document& doc) {
    Settings s;
    s.source_text = doc.source();
    if (auto v = doc.number("general", "delta_t_h")) s.delta_t_h = *v;
    if (auto v = doc.number("general", "zscore_threshold")) s.zscore_threshold = *v;
    if (auto v = doc.number("general", "element_mw")) s.element_mw = *v;
    if (auto v = doc.strings("general", "residual_load_exclude")) {
        s.residual_load_exclude.clear();
        for (const auto& name : *v) s.residual_load_exclude.insert(require_fuel(name, "general"));
    }
    if (!(s.zscore_threshold > 0.0)) throw ConfigError("zscore_threshold must be positive");
    if (!(s.element_mw > 0.0)) throw ConfigError("element_mw must be positive");

    if (const auto* names = doc.table("fuel_names")) {
        for (const auto& [label, _] : *names) {
            s.column_map.add(label, require_fuel(*doc.string("fuel_names", label), "fuel_names"));
        }
    }
    s.transmission_efficiency = country_numbers(doc, "transmission_efficiency");
    s.k_cc = country_numbers(doc, "k_cc");
    for (const auto& [key, value] : country_numbers(doc, "carbon_price")) {
        s.carbon_price[require_year(key, "carbon_price")] = value;
    }

    for (const auto& year_key : doc.subtables("fuel_params")) {
        const int year = require_year(year_key, "fuel_params");
        const auto base = "fuel_params." + year_key;
        read_fuel_param_table(doc, base, year, "", s.fuel_params);
        for (const auto& country : doc.subtables(base)) {
            read_fuel_param_table(doc, base + "." + country, year, country, s.fuel_params);
        }
    }

    if (const auto* env = doc.table("efficiency_envelope")) {
        for (const auto& [key, _] : *env) {
            const auto pair = *doc.numbers("efficiency_envelope", key);
            if (pair.size() != 2) {
                throw ConfigError("[efficiency_envelope] " + key + ": expected [eta_min, eta_max]");
            }
            s.envelope[require_fuel(key, "efficiency_envelope")] = {pair[0], pair[1]};
        }
    }

    s.default_avg_plant_size = fuel_numbers(doc, "avg_plant_size.default");
    for (const auto& country : doc.subtables("avg_plant_size")) {
        if (country == "default") continue;
        s.avg_plant_size[country] = fuel_numbers(doc, "avg_plant_size." + country);
    }
    return s;
}

Settings Settings::load(const std::string& path) {
    return from_document(config::Document::load(path));
}

std::map<Fuel, double> Settings::plant_sizes_for(const std::string& country) const {
    auto sizes = default_avg_plant_size;
    if (auto it = avg_plant_size.find(country); it != avg_plant_size.end()) {
        for (const auto& [fuel, size] : it->second) sizes[fuel] = size;
    }
    return sizes;
}

ScenarioConfig Settings::scenario(const std::string& country, int year, Method method,
                                  std::optional<double> carbon_price_override) const {
    ScenarioConfig cfg;
    cfg.country = country;
    cfg.year = year;
    cfg.method = method;
    cfg.delta_t_h = delta_t_h;
    cfg.residual_load_exclude = residual_load_exclude;

    if (carbon_price_override) {
        cfg.carbon_price = *carbon_price_override;
    } else if (auto it = carbon_price.find(year); it != carbon_price.end()) {
        cfg.carbon_price = it->second;
    } else {
        throw ConfigError(fmt::format("no carbon price for {}; supply an EUA series or override",
                                      year));
    }
    auto eta = transmission_efficiency.find(country);
    if (eta == transmission_efficiency.end()) {
        throw ConfigError("no transmission efficiency for " + country);
    }
    cfg.transmission_efficiency = eta->second;
    if (auto k = k_cc.find(country); k != k_cc.end()) {
        cfg.k_cc = k->second;
    } else if (method == Method::pwl) {
        throw ConfigError("no combined-cycle share (k_cc) for " + country);
    }
    if (!fuel_params.has_year(year)) {
        throw ConfigError(fmt::format("no fuel parameters for {}", year));
    }
    cfg.fuel_params = fuel_params.resolve(year, country);
    cfg.envelope = envelope;
    cfg.avg_plant_size_mw = plant_sizes_for(country);
    cfg.validate();
    return cfg;
}

}  // namespace cefsim
