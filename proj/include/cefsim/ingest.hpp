#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cefsim/fuel.hpp"
#include "cefsim/generation.hpp"
#include "cefsim/plant.hpp"
#include "cefsim/time.hpp"

namespace cefsim {

// Reads a generation export: one timestamp column plus one column per fuel
// label. Columns the map cannot resolve are skipped with a warning. Empty or
// unparseable cells become missing; negative values are treated as missing.
// Resolution is inferred from the timestamp spacing. `year` defaults to the
// calendar year of the first timestamp.
GenerationSeries parse_generation_csv(std::istream& in, const ColumnMap& columns,
                                      std::string country = {},
                                      std::optional<int> year = std::nullopt);

// Hour-beginning mean of sub-hourly power values over the full calendar
// year. Hours without any observation stay missing.
GenerationSeries resample_hourly(const GenerationSeries& raw);

struct OutlierFlag {
    std::size_t index;
    Fuel fuel;
    double zscore;
};

// Per-column Z-score (population standard deviation) over observed values.
// Zero-variance columns are skipped with a warning appended to `warnings`.
std::vector<OutlierFlag> detect_outliers_zscore(const GenerationSeries& series, double threshold,
                                                std::vector<std::string>* warnings = nullptr);

// Turns flagged points into missing values and records them as outliers.
void apply_outlier_flags(GenerationSeries& series, const std::vector<OutlierFlag>& flags);

// Forward fill; leading gaps are backfilled from the first observation.
// Columns with no observation at all are dropped with a warning.
GenerationSeries fill_missing(const GenerationSeries& series);

// resample -> flag outliers -> fill.
GenerationSeries preprocess_generation(const GenerationSeries& raw, double zscore_threshold);

// Canonical generation CSV: "timestamp" then canonical fuel names.
void write_generation_csv(std::ostream& out, const GenerationSeries& series);
void write_fill_report_csv(std::ostream& out, const GenerationSeries& series);

struct RejectedRow {
    std::size_t line = 0;
    std::string id;
    std::string reason;
};

struct PlantList {
    std::vector<PowerPlant> plants;
    std::vector<RejectedRow> rejected;
    std::size_t inactive = 0;
    std::size_t other_country = 0;
};

// Columns: id, country, fuel, capacity_mw, efficiency, commissioned[, shutdown].
// Dates may be plain years or ISO dates; only the year is used. An empty
// `country` keeps every country.
PlantList load_plant_list(std::istream& in, int year, const ColumnMap& fuels,
                          const std::string& country = {});

void write_plant_list_csv(std::ostream& out, const std::vector<PowerPlant>& plants);

// Installed capacity matrix: a "country" column and one column per fuel label.
using CapacityTable = std::map<std::string, std::map<Fuel, double>>;
CapacityTable load_installed_capacity(std::istream& in, const ColumnMap& fuels);
void write_installed_capacity_csv(std::ostream& out, const CapacityTable& table);

// Sum of active plant capacities per fuel.
std::map<Fuel, double> capacity_from_plants(const std::vector<PowerPlant>& plants);

struct PricePoint {
    TimePoint time;
    double price;
};

// Columns: date, price (EUR/t).
std::vector<PricePoint> load_eua_prices(std::istream& in);

// Mean of the weekly allowance prices within `year`. Throws DataError when
// the year has no observation.
double annual_carbon_price(const std::vector<PricePoint>& weekly, int year);

}  // namespace cefsim
