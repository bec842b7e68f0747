#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cefsim {

// Generation fuel types. gas_cc is the combined-cycle share of gas capacity
// and is treated as a fuel type of its own.
enum class Fuel {
    nuclear,
    lignite,
    coal,
    coal_gas,
    gas,
    gas_cc,
    oil,
    oil_shale,
    peat,
    waste,
    other_conv,
    biomass,
    hydro,
    hydro_reservoir,
    pumped_hydro,
    geothermal,
    marine,
    solar,
    wind_onshore,
    wind_offshore,
    other_res,
};

enum class FuelClass { conv, res };

inline constexpr std::array<Fuel, 21> kAllFuels = {
    Fuel::nuclear,      Fuel::lignite,   Fuel::coal,         Fuel::coal_gas,
    Fuel::gas,          Fuel::gas_cc,    Fuel::oil,          Fuel::oil_shale,
    Fuel::peat,         Fuel::waste,     Fuel::other_conv,   Fuel::biomass,
    Fuel::hydro,        Fuel::hydro_reservoir, Fuel::pumped_hydro, Fuel::geothermal,
    Fuel::marine,       Fuel::solar,     Fuel::wind_onshore, Fuel::wind_offshore,
    Fuel::other_res,
};

std::string_view to_string(Fuel fuel);

// Parses a canonical fuel name ("lignite", "gas_cc", ...). Returns nullopt for
// anything else; source-specific labels go through ColumnMap instead.
std::optional<Fuel> fuel_from_string(std::string_view name);

FuelClass fuel_class(Fuel fuel);

inline bool is_conventional(Fuel fuel) { return fuel_class(fuel) == FuelClass::conv; }

}  // namespace cefsim
