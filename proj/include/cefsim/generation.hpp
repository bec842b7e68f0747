#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cefsim/fuel.hpp"
#include "cefsim/time.hpp"

namespace cefsim {

enum class FillKind { forward_fill, backfill, outlier };

std::string_view to_string(FillKind kind);

struct FillRecord {
    TimePoint time;
    Fuel fuel;
    FillKind kind;

    friend bool operator==(const FillRecord&, const FillRecord&) = default;
};

// Per-fuel net generation in MWh/h (average MW over the interval).
// nullopt marks a missing observation.
using GenerationColumn = std::vector<std::optional<double>>;

struct GenerationSeries {
    std::string country;
    int year = 0;
    int resolution_minutes = 60;
    std::vector<TimePoint> index;
    std::map<Fuel, GenerationColumn> columns;
    std::vector<FillRecord> fill_report;
    std::vector<std::string> warnings;

    std::size_t size() const { return index.size(); }
    std::size_t missing_count() const;
    bool complete() const { return missing_count() == 0; }

    // Value at (fuel, t); throws DataError if absent or missing.
    double at(Fuel fuel, std::size_t t) const;
    // Sum over all columns at t; requires a complete series.
    double total_at(std::size_t t) const;

    // Share of (t, fuel) points that were imputed by fill_missing.
    double fill_fraction() const;
};

// Maps source column labels ("Fossil Brown coal/Lignite") to fuels.
// Canonical fuel names always resolve; labels match case-insensitively.
class ColumnMap {
public:
    ColumnMap() = default;

    void add(std::string_view label, Fuel fuel);
    std::optional<Fuel> resolve(std::string_view label) const;
    std::size_t size() const { return labels_.size(); }

private:
    std::map<std::string, Fuel> labels_;
};

}  // namespace cefsim
