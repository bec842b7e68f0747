#include "cefsim/merit_order.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim {

MeritOrder MeritOrder::from_blocks(std::vector<DispatchBlock> blocks, Provenance provenance) {
    if (blocks.empty()) throw DataError("merit order needs at least one block");
    for (const auto& b : blocks) {
        if (!(b.capacity_mw > 0.0) || !std::isfinite(b.capacity_mw)) {
            throw DataError(fmt::format("block {} has non-positive capacity", b.id));
        }
    }
    std::stable_sort(blocks.begin(), blocks.end(), [](const DispatchBlock& a, const DispatchBlock& b) {
        if (a.marginal_cost != b.marginal_cost) return a.marginal_cost < b.marginal_cost;
        if (a.emission_intensity != b.emission_intensity) {
            return a.emission_intensity < b.emission_intensity;
        }
        const auto fa = to_string(a.fuel);
        const auto fb = to_string(b.fuel);
        if (fa != fb) return fa < fb;
        return a.capacity_mw < b.capacity_mw;
    });
    double cumulative = 0.0;
    for (auto& b : blocks) {
        cumulative += b.capacity_mw;
        b.cumulative_mw = cumulative;
    }
    MeritOrder order;
    order.blocks_ = std::move(blocks);
    order.provenance_ = std::move(provenance);
    return order;
}

double plant_emission_intensity(const PowerPlant& plant, const FuelParams& params) {
    if (!(plant.efficiency > 0.0)) {
        throw DataError(fmt::format("plant {} has non-positive efficiency", plant.id));
    }
    return params.at(plant.fuel).emission_t_per_mwh / plant.efficiency;
}

double plant_marginal_cost(const PowerPlant& plant, const FuelParams& params, double carbon_price) {
    if (!(plant.efficiency > 0.0)) {
        throw DataError(fmt::format("plant {} has non-positive efficiency", plant.id));
    }
    if (!(carbon_price >= 0.0)) throw DataError("carbon price must be non-negative");
    const auto& p = params.at(plant.fuel);
    return p.price_eur_per_mwh / plant.efficiency +
           (p.emission_t_per_mwh / plant.efficiency) * carbon_price;
}

DispatchBlock make_block(const PowerPlant& plant, const FuelParams& params, double carbon_price) {
    DispatchBlock b;
    b.id = plant.id;
    b.fuel = plant.fuel;
    b.capacity_mw = plant.capacity_mw;
    b.efficiency = plant.efficiency;
    b.marginal_cost = plant_marginal_cost(plant, params, carbon_price);
    b.emission_intensity = plant_emission_intensity(plant, params);
    return b;
}

MeritOrder build_merit_order_pp(const std::vector<PowerPlant>& plants, const FuelParams& params,
                                double carbon_price) {
    Provenance prov;
    prov.method = Method::pp;
    prov.carbon_price = carbon_price;
    std::vector<DispatchBlock> blocks;
    blocks.reserve(plants.size());
    std::map<Fuel, std::size_t> skipped;
    for (const auto& p : plants) {
        if (!params.contains(p.fuel)) {
            ++skipped[p.fuel];
            continue;
        }
        blocks.push_back(make_block(p, params, carbon_price));
    }
    for (const auto& [fuel, n] : skipped) {
        prov.notes.push_back(fmt::format("{} {} plants without fuel parameters not dispatched", n,
                                         to_string(fuel)));
    }
    if (blocks.empty()) throw DataError("no dispatchable plants for the PP merit order");
    return MeritOrder::from_blocks(std::move(blocks), std::move(prov));
}

GasSplit split_gas_capacity(double gas_mw, double k_cc) {
    if (!(k_cc >= 0.0 && k_cc <= 1.0)) {
        throw DataError(fmt::format("combined-cycle share {} outside [0, 1]", k_cc));
    }
    GasSplit split;
    split.combined_cycle_mw = k_cc * gas_mw;
    split.open_cycle_mw = gas_mw - split.combined_cycle_mw;
    return split;
}

EnvelopeBounds fit_envelope(std::span<const double> positions, std::span<const double> efficiencies) {
    if (positions.size() != efficiencies.size() || positions.empty()) {
        throw DataError("envelope fit needs matching, non-empty inputs");
    }
    const double n = static_cast<double>(positions.size());
    const double mx = std::accumulate(positions.begin(), positions.end(), 0.0) / n;
    const double my = std::accumulate(efficiencies.begin(), efficiencies.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        sxx += (positions[i] - mx) * (positions[i] - mx);
        sxy += (positions[i] - mx) * (efficiencies[i] - my);
    }
    if (!(sxx > 0.0)) return {my, my};
    const double slope = sxy / sxx;
    const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
    double a = my + slope * (*lo - mx);
    double b = my + slope * (*hi - mx);
    if (a > b) std::swap(a, b);
    // A steep fit can leave the physical range at the ends.
    a = std::clamp(a, 1e-6, 1.0);
    b = std::clamp(b, 1e-6, 1.0);
    return {a, b};
}

EfficiencyEnvelope efficiency_envelope_from_regression(const std::vector<PowerPlant>& plants) {
    std::map<Fuel, std::vector<const PowerPlant*>> by_fuel;
    for (const auto& p : plants) by_fuel[p.fuel].push_back(&p);
    EfficiencyEnvelope out;
    for (auto& [fuel, group] : by_fuel) {
        std::stable_sort(group.begin(), group.end(), [](const PowerPlant* a, const PowerPlant* b) {
            return a->efficiency > b->efficiency;
        });
        std::vector<double> pos;
        std::vector<double> eff;
        double cumulative = 0.0;
        for (const auto* p : group) {
            pos.push_back(cumulative + 0.5 * p->capacity_mw);
            eff.push_back(p->efficiency);
            cumulative += p->capacity_mw;
        }
        out[fuel] = fit_envelope(pos, eff);
    }
    return out;
}

std::vector<PowerPlant> discretize_virtual_plants(const std::map<Fuel, double>& capacity_mw,
                                                  const std::map<Fuel, double>& avg_size_mw,
                                                  const EfficiencyEnvelope& envelope) {
    std::vector<PowerPlant> out;
    for (const auto& [fuel, capacity] : capacity_mw) {
        if (!(capacity >= 0.0)) {
            throw DataError(fmt::format("negative capacity for {}", to_string(fuel)));
        }
        if (capacity == 0.0) continue;
        const auto size = avg_size_mw.find(fuel);
        if (size == avg_size_mw.end()) {
            throw ConfigError(fmt::format("no average plant size for {}", to_string(fuel)));
        }
        if (!(size->second > 0.0)) {
            throw ConfigError(fmt::format("average plant size for {} must be positive",
                                          to_string(fuel)));
        }
        const auto env = envelope.find(fuel);
        if (env == envelope.end()) {
            throw ConfigError(fmt::format("no efficiency envelope for {}", to_string(fuel)));
        }
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(capacity / size->second)));
        const double unit = capacity / static_cast<double>(n);
        const double span = env->second.eta_max - env->second.eta_min;
        for (std::size_t i = 0; i < n; ++i) {
            PowerPlant p;
            p.id = fmt::format("{}-{}", to_string(fuel), i);
            p.fuel = fuel;
            p.capacity_mw = unit;
            p.efficiency = env->second.eta_min +
                           (static_cast<double>(i) + 0.5) / static_cast<double>(n) * span;
            out.push_back(std::move(p));
        }
    }
    return out;
}

MeritOrder build_merit_order_pwl(const std::map<Fuel, double>& installed_mw,
                                 const ScenarioConfig& config) {
    std::map<Fuel, double> capacities;
    std::vector<std::string> notes;
    for (const auto& [fuel, mw] : installed_mw) {
        if (!is_conventional(fuel) || mw == 0.0) continue;
        if (!config.fuel_params.contains(fuel)) {
            notes.push_back(fmt::format("{} MW of {} without fuel parameters not dispatched",
                                        csv::format_number(mw), to_string(fuel)));
            continue;
        }
        capacities[fuel] += mw;
    }
    if (capacities.count(Fuel::gas) && !installed_mw.count(Fuel::gas_cc)) {
        const auto split = split_gas_capacity(capacities[Fuel::gas], config.k_cc);
        capacities[Fuel::gas] = split.open_cycle_mw;
        if (split.combined_cycle_mw > 0.0) {
            if (!config.fuel_params.contains(Fuel::gas_cc)) {
                throw ConfigError("no fuel parameters for gas_cc");
            }
            capacities[Fuel::gas_cc] = split.combined_cycle_mw;
        }
    }
    double total = 0.0;
    for (const auto& [_, mw] : capacities) total += mw;
    if (!(total > 0.0)) throw DataError("no dispatchable capacity for the PWL merit order");

    const auto plants =
        discretize_virtual_plants(capacities, config.avg_plant_size_mw, config.envelope);
    std::vector<DispatchBlock> blocks;
    blocks.reserve(plants.size());
    for (const auto& p : plants) blocks.push_back(make_block(p, config.fuel_params, config.carbon_price));

    Provenance prov;
    prov.method = config.method == Method::pwlv ? Method::pwlv : Method::pwl;
    prov.carbon_price = config.carbon_price;
    prov.notes = std::move(notes);
    return MeritOrder::from_blocks(std::move(blocks), std::move(prov));
}

void write_merit_order_csv(std::ostream& out, const MeritOrder& order) {
    csv::write_row(out, {"rank", "fuel", "capacity_mw", "cum_capacity_mw", "efficiency",
                         "marginal_cost_eur_mwh", "emission_intensity_t_mwh"});
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& b = order[i];
        csv::write_row(out, {std::to_string(i + 1), std::string(to_string(b.fuel)),
                             csv::format_number(b.capacity_mw), csv::format_number(b.cumulative_mw),
                             csv::format_number(b.efficiency), csv::format_number(b.marginal_cost),
                             csv::format_number(b.emission_intensity)});
    }
}

}  // namespace cefsim
