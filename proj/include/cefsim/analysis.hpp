#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cefsim/dispatch.hpp"
#include "cefsim/generation.hpp"
#include "cefsim/loadshift.hpp"
#include "cefsim/merit_order.hpp"
#include "cefsim/scenario.hpp"

namespace cefsim {

struct CorrelationResult {
    std::optional<double> r;  // nullopt when a rank vector is constant
    std::size_t n = 0;
    std::string context;
};

// Pearson correlation of average ranks (ties share their mean rank).
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

// Average ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// Samples the stack every `element_mw` (the block containing each element's
// midpoint), so that blocks weigh by capacity.
std::vector<std::size_t> discretize_elements(const MeritOrder& order, double element_mw = 10.0);

enum class Weighting { capacity, plant };

// Spearman r between marginal cost and emission intensity along the stack.
CorrelationResult merit_order_correlation(const MeritOrder& order,
                                          Weighting weighting = Weighting::capacity,
                                          double element_mw = 10.0);

using MeritOrderFactory = std::function<MeritOrder(double carbon_price)>;

struct SweepCurve {
    std::vector<double> carbon_prices;
    std::vector<std::optional<double>> r;
    std::optional<double> zero_crossing;
};

// "start:stop:step", stop inclusive within half a step.
std::vector<double> parse_grid(const std::string& text);

// Rebuilds the merit order at each grid point. The first sign change of r
// is refined by bisection on the carbon price to within `tolerance`.
SweepCurve carbon_price_sweep(const MeritOrderFactory& factory, std::span<const double> grid,
                              Weighting weighting = Weighting::capacity,
                              double element_mw = 10.0, double tolerance = 0.01,
                              unsigned jobs = 1);

struct ShiftSweepRow {
    double carbon_price = 0.0;
    Driver driver = Driver::price;
    std::optional<double> dc_pct;
    std::optional<double> dxe_pct;
    std::optional<double> dme_pct;
};

// Full recompute per grid point: merit order -> CEF series -> shift study.
std::vector<ShiftSweepRow> shift_study_vs_carbon_price(const MeritOrderFactory& factory,
                                                       const GenerationSeries& generation,
                                                       const ScenarioConfig& config,
                                                       std::span<const Driver> drivers,
                                                       std::span<const double> grid,
                                                       unsigned jobs = 1);

struct ErrorStat {
    double value_pct = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;  // reference value was zero (or invalid)
};

struct ValidationReport {
    ErrorStat mo_cost;
    ErrorStat mo_emission;
    ErrorStat price;
    ErrorStat mef;
    ErrorStat xef;
    ErrorStat mean_price;
    ErrorStat mean_mef;
    ErrorStat mean_xef;
};

struct ScenarioOutputs {
    const MeritOrder& order;
    const CefSeries& cef;
};

// Relative errors of a candidate against a reference: along the stack per
// element, per hour, and of the annual means. Reference values of zero are
// excluded and counted.
ValidationReport validation_errors(const ScenarioOutputs& reference, const ScenarioOutputs& candidate,
                                   double element_mw = 10.0);

// error_name, year, value_pct
void write_validation_csv(std::ostream& out, const ValidationReport& report, int year,
                          bool with_header = true);

}  // namespace cefsim
