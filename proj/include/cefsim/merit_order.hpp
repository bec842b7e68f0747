#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cefsim/fuel.hpp"
#include "cefsim/fuel_params.hpp"
#include "cefsim/plant.hpp"
#include "cefsim/scenario.hpp"

namespace cefsim {

struct DispatchBlock {
    std::string id;
    Fuel fuel = Fuel::other_conv;
    double capacity_mw = 0.0;
    double efficiency = 1.0;
    double marginal_cost = 0.0;       // EUR/MWh_el
    double emission_intensity = 0.0;  // t/MWh_el
    double cumulative_mw = 0.0;       // end of this block along the stack
};

struct Provenance {
    Method method = Method::pp;
    double carbon_price = 0.0;
    std::string config_hash;
    std::vector<std::string> notes;
};

// Cost-sorted stack of dispatch blocks. Immutable once built.
class MeritOrder {
public:
    // Sorts by marginal cost; ties go to the lower emission intensity, then
    // fuel name, then capacity, then input order. Throws DataError for an
    // empty list or a block without positive capacity.
    static MeritOrder from_blocks(std::vector<DispatchBlock> blocks, Provenance provenance = {});

    const std::vector<DispatchBlock>& blocks() const { return blocks_; }
    const DispatchBlock& operator[](std::size_t i) const { return blocks_[i]; }
    std::size_t size() const { return blocks_.size(); }
    double total_capacity() const { return blocks_.back().cumulative_mw; }
    const Provenance& provenance() const { return provenance_; }

    // Start of block i along the stack (cumulative capacity of blocks before it).
    double block_start(std::size_t i) const { return i == 0 ? 0.0 : blocks_[i - 1].cumulative_mw; }

private:
    MeritOrder() = default;

    std::vector<DispatchBlock> blocks_;
    Provenance provenance_;
};

// epsilon_f / eta
double plant_emission_intensity(const PowerPlant& plant, const FuelParams& params);

// x_f / eta + (epsilon_f / eta) * carbon price
double plant_marginal_cost(const PowerPlant& plant, const FuelParams& params, double carbon_price);

DispatchBlock make_block(const PowerPlant& plant, const FuelParams& params, double carbon_price);

// One block per plant. Plants whose fuel has no parameters are not
// dispatchable and are left out (noted in the provenance).
MeritOrder build_merit_order_pp(const std::vector<PowerPlant>& plants, const FuelParams& params,
                                double carbon_price);

struct GasSplit {
    double combined_cycle_mw = 0.0;
    double open_cycle_mw = 0.0;
};

GasSplit split_gas_capacity(double gas_mw, double k_cc);

// OLS line through (position, efficiency), evaluated at the smallest and
// largest position. A single distinct position yields the mean efficiency
// for both bounds.
EnvelopeBounds fit_envelope(std::span<const double> positions, std::span<const double> efficiencies);

// Per fuel, plants are stacked by descending efficiency and each plant is
// placed at the midpoint of its capacity segment; the envelope is the fitted
// line at the first and last position.
EfficiencyEnvelope efficiency_envelope_from_regression(const std::vector<PowerPlant>& plants);

// Splits each fuel's capacity into n = max(1, round(C / size)) equal virtual
// plants whose efficiencies are the segment midpoints of the linear ramp
// eta_min -> eta_max.
std::vector<PowerPlant> discretize_virtual_plants(const std::map<Fuel, double>& capacity_mw,
                                                  const std::map<Fuel, double>& avg_size_mw,
                                                  const EfficiencyEnvelope& envelope);

// Gas is split by k_cc unless gas_cc capacity is given explicitly. Only
// conventional fuels with fuel parameters become blocks.
MeritOrder build_merit_order_pwl(const std::map<Fuel, double>& installed_mw,
                                 const ScenarioConfig& config);

// rank, fuel, capacity_mw, cum_capacity_mw, efficiency, marginal_cost_eur_mwh,
// emission_intensity_t_mwh
void write_merit_order_csv(std::ostream& out, const MeritOrder& order);

}  // namespace cefsim
