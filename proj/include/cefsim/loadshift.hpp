#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cefsim/dispatch.hpp"
#include "cefsim/fuel.hpp"
#include "cefsim/time.hpp"

namespace cefsim {

enum class Driver { price, xef, mef };

std::string_view to_string(Driver driver);
std::optional<Driver> driver_from_string(std::string_view text);

// One daily shift of `shifted_kwh` from the day's highest-signal hour
// (source) to its lowest (sink).
struct ShiftEvent {
    std::chrono::sys_days date;
    std::size_t source_index = 0;
    std::size_t sink_index = 0;
    int source_hour = 0;
    int sink_hour = 0;
    double shifted_kwh = 1.0;
};

struct ShiftEvents {
    std::vector<ShiftEvent> events;
    std::size_t skipped_days = 0;     // partial days or days with invalid values
    std::size_t zero_spread_days = 0;  // complete days without a shift
};

// Days are grouped by calendar date; only days with all 24 hours in order
// and finite values are used. Ties resolve to the earliest hour. Days whose
// maximum equals their minimum produce no event.
ShiftEvents daily_shift_events(std::span<const TimePoint> index, std::span<const double> signal,
                               double shifted_kwh = 1.0);

struct ShiftSignals {
    std::span<const double> price;
    std::span<const double> xef;
    std::span<const double> mef;
    // Marginal fuel per hour; leaves the fuel histogram empty when absent.
    std::span<const Fuel> marginal_fuel;
};

struct EvaluatedShift {
    ShiftEvent event;
    std::optional<Fuel> source_fuel;
    std::optional<Fuel> sink_fuel;
    double source_price = 0.0, sink_price = 0.0;
    double source_xef = 0.0, sink_xef = 0.0;
    double source_mef = 0.0, sink_mef = 0.0;
};

// Relative changes of the shifted energy's cost and emissions:
// 100 * sum(sink - source) / sum(source), per metric.
struct ShiftReport {
    std::optional<Driver> driver;
    std::vector<EvaluatedShift> events;
    std::optional<double> dc_pct;
    std::optional<double> dxe_pct;
    std::optional<double> dme_pct;
    std::map<std::pair<Fuel, Fuel>, std::size_t> fuel_pairs;  // source => sink
    std::array<std::size_t, 24> source_hours{};
    std::array<std::size_t, 24> sink_hours{};
    std::size_t skipped_days = 0;
    std::size_t zero_spread_days = 0;
};

ShiftReport evaluate_shifts(const ShiftEvents& events, const ShiftSignals& signals);

// Shift events driven by one signal of the CEF series, evaluated on all three.
// Hours with an invalid XEF count as invalid for every driver.
ShiftReport run_shift_study(const CefSeries& cef, Driver driver, double shifted_kwh = 1.0);

// date, source_hour, sink_hour, src_fuel, sink_fuel, d_price, d_xef, d_mef
void write_shift_events_csv(std::ostream& out, const ShiftReport& report);

// Flat key = value summary.
void write_shift_summary(std::ostream& out, const ShiftReport& report);

}  // namespace cefsim
