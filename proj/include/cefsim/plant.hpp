#pragma once

#include <optional>
#include <string>

#include "cefsim/fuel.hpp"

namespace cefsim {

struct PowerPlant {
    std::string id;
    std::string country;
    Fuel fuel = Fuel::other_conv;
    double capacity_mw = 0.0;
    double efficiency = 1.0;  // net electrical efficiency in (0, 1]
    int commissioned = 0;
    std::optional<int> shutdown;

    // Commissioned no later than `year` and not yet shut down in it.
    bool active_in(int year) const {
        return commissioned <= year && (!shutdown || year < *shutdown);
    }
};

}  // namespace cefsim
