#include "cefsim/generation.hpp"

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim {

std::string_view to_string(FillKind kind) {
    switch (kind) {
        case FillKind::forward_fill: return "forward_fill";
        case FillKind::backfill: return "backfill";
        case FillKind::outlier: return "outlier";
    }
    return "unknown";
}

std::size_t GenerationSeries::missing_count() const {
    std::size_t n = 0;
    for (const auto& [_, col] : columns) {
        for (const auto& v : col) n += v ? 0 : 1;
    }
    return n;
}

double GenerationSeries::at(Fuel fuel, std::size_t t) const {
    auto it = columns.find(fuel);
    if (it == columns.end()) {
        throw DataError(fmt::format("no generation column for {}", to_string(fuel)));
    }
    const auto& v = it->second.at(t);
    if (!v) {
        throw DataError(fmt::format("missing generation for {} at {}", to_string(fuel),
                                    format_timestamp(index.at(t))));
    }
    return *v;
}

double GenerationSeries::total_at(std::size_t t) const {
    double total = 0.0;
    for (const auto& [fuel, _] : columns) total += at(fuel, t);
    return total;
}

double GenerationSeries::fill_fraction() const {
    const std::size_t points = index.size() * columns.size();
    if (points == 0) return 0.0;
    std::size_t filled = 0;
    for (const auto& r : fill_report) filled += r.kind == FillKind::outlier ? 0 : 1;
    return static_cast<double>(filled) / static_cast<double>(points);
}

void ColumnMap::add(std::string_view label, Fuel fuel) {
    labels_[csv::to_lower(csv::trim(label))] = fuel;
}

std::optional<Fuel> ColumnMap::resolve(std::string_view label) const {
    const auto key = csv::to_lower(csv::trim(label));
    if (auto it = labels_.find(key); it != labels_.end()) return it->second;
    return fuel_from_string(key);
}

}  // namespace cefsim
