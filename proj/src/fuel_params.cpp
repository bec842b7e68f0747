#include "cefsim/fuel_params.hpp"

#include <istream>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"
#include "cefsim/generation.hpp"

namespace cefsim {

void FuelParams::set(Fuel fuel, FuelParam param) {
    if (!(param.emission_t_per_mwh >= 0.0) || !(param.price_eur_per_mwh >= 0.0)) {
        throw ConfigError(fmt::format("negative fuel parameter for {}", to_string(fuel)));
    }
    params_[fuel] = param;
}

const FuelParam* FuelParams::find(Fuel fuel) const {
    auto it = params_.find(fuel);
    return it == params_.end() ? nullptr : &it->second;
}

const FuelParam& FuelParams::at(Fuel fuel) const {
    if (const auto* p = find(fuel)) return *p;
    throw ConfigError(fmt::format("no fuel parameters for {}", to_string(fuel)));
}

void FuelParamsTable::add(int year, const std::string& country, Fuel fuel, FuelParam param) {
    FuelParams check;
    check.set(fuel, param);
    rows_[{year, country, fuel}] = param;
}

bool FuelParamsTable::has_year(int year) const {
    for (const auto& [key, _] : rows_) {
        if (std::get<0>(key) == year) return true;
    }
    return false;
}

FuelParams FuelParamsTable::resolve(int year, const std::string& country) const {
    FuelParams out;
    for (const auto& [key, param] : rows_) {
        const auto& [y, c, fuel] = key;
        if (y == year && c.empty()) out.set(fuel, param);
    }
    for (const auto& [key, param] : rows_) {
        const auto& [y, c, fuel] = key;
        if (y == year && !c.empty() && c == country) out.set(fuel, param);
    }
    if (!out.contains(Fuel::gas_cc)) {
        if (const auto* gas = out.find(Fuel::gas)) out.set(Fuel::gas_cc, *gas);
    }
    return out;
}

void FuelParamsTable::merge_csv(std::istream& in, const ColumnMap& names) {
    const auto table = csv::read(in);
    const auto year_col = table.column("year");
    const auto country_col = table.column("country");
    const auto fuel_col = table.column("fuel");
    const auto em_col = table.column("emission_t_per_mwh");
    const auto price_col = table.column("price_eur_per_mwh");
    if (!year_col || !fuel_col || !em_col || !price_col) {
        throw ParseError(
            "fuel params CSV needs columns year, fuel, emission_t_per_mwh, price_eur_per_mwh");
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        auto cell = [&](std::size_t c) { return c < row.size() ? row[c] : std::string(); };
        const auto year = csv::parse_number(cell(*year_col));
        const auto fuel = names.resolve(cell(*fuel_col));
        const auto em = csv::parse_number(cell(*em_col));
        const auto price = csv::parse_number(cell(*price_col));
        if (!year || !fuel || !em || !price) {
            throw ParseError(fmt::format("fuel params line {}: malformed row", table.line_numbers[i]));
        }
        const auto country = country_col ? csv::trim(cell(*country_col)) : std::string();
        add(static_cast<int>(*year), country, *fuel, FuelParam{*em, *price});
    }
}

}  // namespace cefsim
