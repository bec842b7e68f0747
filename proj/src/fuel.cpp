#include "cefsim/fuel.hpp"

namespace cefsim {

std::string_view to_string(Fuel fuel) {
    switch (fuel) {
        case Fuel::nuclear: return "nuclear";
        case Fuel::lignite: return "lignite";
        case Fuel::coal: return "coal";
        case Fuel::coal_gas: return "coal_gas";
        case Fuel::gas: return "gas";
        case Fuel::gas_cc: return "gas_cc";
        case Fuel::oil: return "oil";
        case Fuel::oil_shale: return "oil_shale";
        case Fuel::peat: return "peat";
        case Fuel::waste: return "waste";
        case Fuel::other_conv: return "other_conv";
        case Fuel::biomass: return "biomass";
        case Fuel::hydro: return "hydro";
        case Fuel::hydro_reservoir: return "hydro_reservoir";
        case Fuel::pumped_hydro: return "pumped_hydro";
        case Fuel::geothermal: return "geothermal";
        case Fuel::marine: return "marine";
        case Fuel::solar: return "solar";
        case Fuel::wind_onshore: return "wind_onshore";
        case Fuel::wind_offshore: return "wind_offshore";
        case Fuel::other_res: return "other_res";
    }
    return "unknown";
}

std::optional<Fuel> fuel_from_string(std::string_view name) {
    for (Fuel f : kAllFuels) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

FuelClass fuel_class(Fuel fuel) {
    switch (fuel) {
        case Fuel::nuclear:
        case Fuel::lignite:
        case Fuel::coal:
        case Fuel::coal_gas:
        case Fuel::gas:
        case Fuel::gas_cc:
        case Fuel::oil:
        case Fuel::oil_shale:
        case Fuel::peat:
        case Fuel::waste:
        case Fuel::other_conv:
            return FuelClass::conv;
        default:
            return FuelClass::res;
    }
}

}  // namespace cefsim
