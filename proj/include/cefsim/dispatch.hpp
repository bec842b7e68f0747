#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cefsim/generation.hpp"
#include "cefsim/merit_order.hpp"
#include "cefsim/scenario.hpp"
#include "cefsim/time.hpp"

namespace cefsim {

struct ResidualLoad {
    std::vector<double> residual_mw;  // sum of conventional generation
    std::vector<double> total_mw;     // sum of all generation
    std::vector<double> conv_share;   // residual / total, 0 when total is 0
    std::vector<double> res_share;    // 1 - conv_share, 0 when total is 0

    double mean_res_share() const;
};

// Residual load proxied by conventional generation. Fuels in `exclude` count
// towards total generation only.
ResidualLoad residual_load(const GenerationSeries& series,
                           const std::set<Fuel>& exclude = {Fuel::other_conv});

struct MarginalBlock {
    std::size_t index = 0;
    // Residual load exceeded the stack; the last block was used.
    bool saturated = false;
};

// The block p with start(p) < residual <= end(p). Zero residual maps to the
// first block.
MarginalBlock marginal_block(const MeritOrder& order, double residual_mw);

// Emission intensity of the marginal block over transmission efficiency.
double mef_at(const MeritOrder& order, double residual_mw, double transmission_efficiency);

// Per-block utilisation: 1 for blocks fully below the residual load, 0 above
// it, the dispatched fraction for the straddled block. Residual load beyond
// the stack fills every block.
std::vector<double> utilization(const MeritOrder& order, double residual_mw);

// Dispatched emissions over transmission-adjusted generation. nullopt when
// total generation is not positive.
std::optional<double> xef_at(const MeritOrder& order, double residual_mw,
                             double total_generation_mwh, double transmission_efficiency,
                             double delta_t_h);

struct CefRecord {
    TimePoint time;
    double residual_mw = 0.0;
    double total_generation_mw = 0.0;
    Fuel marginal_fuel = Fuel::other_conv;
    double marginal_cost = 0.0;
    double mef = 0.0;
    std::optional<double> xef;
    bool saturated = false;
};

struct CefSeries {
    std::string country;
    int year = 0;
    Method method = Method::pwl;
    double carbon_price = 0.0;
    std::vector<CefRecord> records;

    std::size_t size() const { return records.size(); }
    std::size_t saturated_hours() const;
    std::size_t invalid_xef_hours() const;
};

CefSeries compute_cef_series(const MeritOrder& order, const GenerationSeries& generation,
                             const ScenarioConfig& config);

// timestamp, residual_load_mw, marginal_fuel, marginal_cost_eur_mwh,
// mef_t_per_mwh, xef_t_per_mwh, saturated_flag
void write_cef_csv(std::ostream& out, const CefSeries& series);
CefSeries read_cef_csv(std::istream& in);

}  // namespace cefsim
