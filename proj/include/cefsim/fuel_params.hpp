#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "cefsim/fuel.hpp"

namespace cefsim {

class ColumnMap;

struct FuelParam {
    double emission_t_per_mwh = 0.0;  // per MWh of fuel
    double price_eur_per_mwh = 0.0;   // per MWh of fuel
};

// Fuel parameters resolved for a single (year, country).
class FuelParams {
public:
    FuelParams() = default;

    void set(Fuel fuel, FuelParam param);
    bool contains(Fuel fuel) const { return params_.count(fuel) != 0; }
    const FuelParam* find(Fuel fuel) const;
    // Throws ConfigError for fuels without parameters.
    const FuelParam& at(Fuel fuel) const;

    const std::map<Fuel, FuelParam>& all() const { return params_; }

private:
    std::map<Fuel, FuelParam> params_;
};

// Year- and optionally country-specific fuel parameters.
class FuelParamsTable {
public:
    // Empty country means "all countries".
    void add(int year, const std::string& country, Fuel fuel, FuelParam param);

    // Country-specific rows override generic ones. gas_cc inherits the gas
    // row when it has none of its own.
    FuelParams resolve(int year, const std::string& country) const;

    bool has_year(int year) const;
    bool empty() const { return rows_.empty(); }

    // Columns: year, country, fuel, emission_t_per_mwh, price_eur_per_mwh.
    // Rows from `in` are merged over existing ones.
    void merge_csv(std::istream& in, const ColumnMap& names);

private:
    std::map<std::tuple<int, std::string, Fuel>, FuelParam> rows_;
};

}  // namespace cefsim
