#include "cefsim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim {
namespace {

constexpr std::string_view kTimestampNames[] = {"timestamp", "datetime", "time", "date",
                                                "utc", "mtu", "start"};

std::optional<std::size_t> find_timestamp_column(const csv::Table& table) {
    for (auto name : kTimestampNames) {
        if (auto c = table.column(name)) return c;
    }
    // pandas index exports leave the first header cell empty
    if (!table.header.empty() && csv::trim(table.header[0]).empty()) return 0;
    return std::nullopt;
}

std::optional<int> leading_year(std::string_view text) {
    const auto t = csv::trim(text);
    if (t.size() < 4) return std::nullopt;
    int year = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + 4, year);
    if (ec != std::errc{} || ptr != t.data() + 4) return std::nullopt;
    if (t.size() > 4 && t[4] != '-' && t[4] != '.' && t[4] != '/') {
        // e.g. "2019.0" from spreadsheet exports
        auto v = csv::parse_number(t);
        if (!v) return std::nullopt;
        return static_cast<int>(*v);
    }
    return year;
}

std::string cell(const std::vector<std::string>& row, std::optional<std::size_t> c) {
    if (!c || *c >= row.size()) return {};
    return row[*c];
}

}  // namespace

GenerationSeries parse_generation_csv(std::istream& in, const ColumnMap& columns,
                                      std::string country, std::optional<int> year) {
    const auto table = csv::read(in);
    const auto ts_col = find_timestamp_column(table);
    if (!ts_col) throw ParseError("generation CSV has no timestamp column");

    GenerationSeries series;
    series.country = std::move(country);

    // Column index -> fuel, merging duplicate labels of the same fuel.
    std::vector<std::pair<std::size_t, Fuel>> mapped;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == *ts_col) continue;
        const auto fuel = columns.resolve(table.header[c]);
        if (!fuel) {
            series.warnings.push_back(
                fmt::format("unknown fuel column '{}' skipped", csv::trim(table.header[c])));
            continue;
        }
        for (const auto& [_, f] : mapped) {
            if (f == *fuel) {
                series.warnings.push_back(fmt::format("column '{}' merged into {}",
                                                      csv::trim(table.header[c]), to_string(*fuel)));
                break;
            }
        }
        mapped.emplace_back(c, *fuel);
    }

    struct Row {
        TimePoint time;
        std::size_t line;
        const std::vector<std::string>* cells;
    };
    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        try {
            rows.push_back({parse_timestamp(cell(table.rows[i], ts_col)), table.line_numbers[i],
                            &table.rows[i]});
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("line {}: {}", table.line_numbers[i], e.what()));
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].time == rows[i - 1].time) {
            throw ParseError(fmt::format("line {}: duplicate timestamp {}", rows[i].line,
                                         format_timestamp(rows[i].time)));
        }
    }

    std::set<Fuel> fuels;
    for (const auto& [_, f] : mapped) fuels.insert(f);
    for (Fuel f : fuels) series.columns[f].assign(rows.size(), std::nullopt);

    std::size_t negative = 0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        series.index.push_back(rows[t].time);
        for (const auto& [c, fuel] : mapped) {
            auto v = csv::parse_number(cell(*rows[t].cells, c));
            if (v && *v < 0.0) {
                ++negative;
                v.reset();
            }
            auto& slot = series.columns[fuel][t];
            if (v) slot = slot.value_or(0.0) + *v;
        }
    }
    if (negative) {
        series.warnings.push_back(fmt::format("{} negative values treated as missing", negative));
    }

    int resolution = 60;
    for (std::size_t i = 1; i < series.index.size(); ++i) {
        const auto step = static_cast<int>((series.index[i] - series.index[i - 1]).count());
        if (i == 1 || step < resolution) resolution = step;
    }
    series.resolution_minutes = resolution;
    if (year) {
        series.year = *year;
    } else if (!series.index.empty()) {
        series.year = year_of(series.index.front());
    }
    return series;
}

GenerationSeries resample_hourly(const GenerationSeries& raw) {
    const int res = raw.resolution_minutes;
    if (res <= 0 || 60 % res != 0) {
        throw DataError(fmt::format("resolution of {} minutes does not divide an hour", res));
    }
    if (raw.year == 0) throw DataError("generation series has no year");

    GenerationSeries out;
    out.country = raw.country;
    out.year = raw.year;
    out.resolution_minutes = 60;
    out.warnings = raw.warnings;
    out.fill_report = raw.fill_report;

    const auto start = year_start(raw.year);
    const int hours = hours_in_year(raw.year);
    out.index.reserve(hours);
    for (int h = 0; h < hours; ++h) out.index.push_back(start + std::chrono::hours{h});

    struct Acc {
        double sum = 0.0;
        int n = 0;
    };
    std::map<Fuel, std::vector<Acc>> acc;
    for (const auto& [fuel, _] : raw.columns) acc[fuel].assign(hours, Acc{});

    std::size_t outside = 0;
    for (std::size_t i = 0; i < raw.index.size(); ++i) {
        const auto t = raw.index[i];
        const auto hour = hour_floor(t);
        const auto offset = static_cast<int>((t - hour).count());
        if (offset % res != 0) {
            throw DataError(fmt::format("irregular spacing within hour {}", format_timestamp(hour)));
        }
        const auto h = std::chrono::duration_cast<std::chrono::hours>(hour - start).count();
        if (h < 0 || h >= hours) {
            ++outside;
            continue;
        }
        for (const auto& [fuel, col] : raw.columns) {
            if (const auto& v = col[i]) {
                auto& a = acc[fuel][static_cast<std::size_t>(h)];
                a.sum += *v;
                ++a.n;
            }
        }
    }
    if (outside) {
        out.warnings.push_back(
            fmt::format("{} records outside {} dropped", outside, raw.year));
    }
    for (const auto& [fuel, cells] : acc) {
        auto& col = out.columns[fuel];
        col.resize(cells.size());
        for (std::size_t h = 0; h < cells.size(); ++h) {
            if (cells[h].n > 0) col[h] = cells[h].sum / cells[h].n;
        }
    }
    return out;
}

std::vector<OutlierFlag> detect_outliers_zscore(const GenerationSeries& series, double threshold,
                                                std::vector<std::string>* warnings) {
    if (!(threshold > 0.0)) throw DataError("Z-score threshold must be positive");
    std::vector<OutlierFlag> flags;
    for (const auto& [fuel, col] : series.columns) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& v : col) {
            if (v) {
                sum += *v;
                ++n;
            }
        }
        if (n == 0) continue;
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& v : col) {
            if (v) ss += (*v - mean) * (*v - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        if (!(sd > 0.0)) {
            if (warnings) {
                warnings->push_back(
                    fmt::format("zero variance in {}; Z-score skipped", to_string(fuel)));
            }
            continue;
        }
        for (std::size_t t = 0; t < col.size(); ++t) {
            if (!col[t]) continue;
            const double z = (*col[t] - mean) / sd;
            if (std::abs(z) > threshold) flags.push_back({t, fuel, z});
        }
    }
    return flags;
}

void apply_outlier_flags(GenerationSeries& series, const std::vector<OutlierFlag>& flags) {
    for (const auto& f : flags) {
        series.columns.at(f.fuel).at(f.index).reset();
        series.fill_report.push_back({series.index.at(f.index), f.fuel, FillKind::outlier});
    }
}

GenerationSeries fill_missing(const GenerationSeries& series) {
    GenerationSeries out = series;
    out.columns.clear();
    for (const auto& [fuel, col] : series.columns) {
        const auto first = std::find_if(col.begin(), col.end(), [](const auto& v) { return v.has_value(); });
        if (first == col.end()) {
            out.warnings.push_back(
                fmt::format("{} has no observations; column dropped", to_string(fuel)));
            continue;
        }
        auto& filled = out.columns[fuel];
        filled = col;
        const auto lead = static_cast<std::size_t>(first - col.begin());
        for (std::size_t t = 0; t < lead; ++t) {
            filled[t] = **first;
            out.fill_report.push_back({out.index[t], fuel, FillKind::backfill});
        }
        for (std::size_t t = lead + 1; t < filled.size(); ++t) {
            if (!filled[t]) {
                filled[t] = filled[t - 1];
                out.fill_report.push_back({out.index[t], fuel, FillKind::forward_fill});
            }
        }
    }
    return out;
}

GenerationSeries preprocess_generation(const GenerationSeries& raw, double zscore_threshold) {
    auto hourly = resample_hourly(raw);
    const auto flags = detect_outliers_zscore(hourly, zscore_threshold, &hourly.warnings);
    apply_outlier_flags(hourly, flags);
    return fill_missing(hourly);
}

void write_generation_csv(std::ostream& out, const GenerationSeries& series) {
    std::vector<std::string> header{"timestamp"};
    for (const auto& [fuel, _] : series.columns) header.emplace_back(to_string(fuel));
    csv::write_row(out, header);
    std::vector<std::string> row;
    for (std::size_t t = 0; t < series.index.size(); ++t) {
        row.clear();
        row.push_back(format_timestamp(series.index[t]));
        for (const auto& [_, col] : series.columns) {
            row.push_back(col[t] ? csv::format_number(*col[t]) : std::string());
        }
        csv::write_row(out, row);
    }
}

void write_fill_report_csv(std::ostream& out, const GenerationSeries& series) {
    auto records = series.fill_report;
    std::stable_sort(records.begin(), records.end(), [](const FillRecord& a, const FillRecord& b) {
        return std::tie(a.time, a.fuel) < std::tie(b.time, b.fuel);
    });
    csv::write_row(out, {"timestamp", "fuel", "kind"});
    for (const auto& r : records) {
        csv::write_row(out, {format_timestamp(r.time), std::string(to_string(r.fuel)),
                             std::string(to_string(r.kind))});
    }
}

PlantList load_plant_list(std::istream& in, int year, const ColumnMap& fuels,
                          const std::string& country) {
    const auto table = csv::read(in);
    const auto id_col = table.column("id");
    const auto country_col = table.column("country");
    const auto fuel_col = table.column("fuel");
    const auto cap_col = table.column("capacity_mw");
    const auto eff_col = table.column("efficiency");
    const auto comm_col = table.column("commissioned");
    const auto shut_col = table.column("shutdown");
    if (!fuel_col || !cap_col || !eff_col || !comm_col) {
        throw ParseError("plant list needs columns fuel, capacity_mw, efficiency, commissioned");
    }

    PlantList result;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto line = table.line_numbers[i];
        PowerPlant p;
        p.id = id_col ? csv::trim(cell(row, id_col)) : fmt::format("line{}", line);
        p.country = csv::trim(cell(row, country_col));
        auto reject = [&](std::string reason) {
            result.rejected.push_back({line, p.id, std::move(reason)});
        };

        if (!country.empty() && p.country != country) {
            ++result.other_country;
            continue;
        }
        const auto fuel = fuels.resolve(cell(row, fuel_col));
        if (!fuel) {
            reject(fmt::format("unknown fuel '{}'", csv::trim(cell(row, fuel_col))));
            continue;
        }
        p.fuel = *fuel;
        const auto commissioned = leading_year(cell(row, comm_col));
        if (!commissioned) {
            reject("missing commissioning date");
            continue;
        }
        p.commissioned = *commissioned;
        const auto shut_text = csv::trim(cell(row, shut_col));
        if (!shut_text.empty()) {
            p.shutdown = leading_year(shut_text);
            if (!p.shutdown) {
                reject(fmt::format("malformed shutdown date '{}'", shut_text));
                continue;
            }
        }
        if (!p.active_in(year)) {
            ++result.inactive;
            continue;
        }
        const auto cap = csv::parse_number(cell(row, cap_col));
        if (!cap || *cap <= 0.0) {
            reject("capacity must be positive");
            continue;
        }
        p.capacity_mw = *cap;
        const auto eff = csv::parse_number(cell(row, eff_col));
        if (!eff) {
            reject("missing efficiency");
            continue;
        }
        if (!(*eff > 0.0 && *eff <= 1.0)) {
            reject(fmt::format("efficiency {} outside (0, 1]", *eff));
            continue;
        }
        p.efficiency = *eff;
        result.plants.push_back(std::move(p));
    }
    return result;
}

void write_plant_list_csv(std::ostream& out, const std::vector<PowerPlant>& plants) {
    csv::write_row(out, {"id", "country", "fuel", "capacity_mw", "efficiency", "commissioned",
                         "shutdown"});
    for (const auto& p : plants) {
        csv::write_row(out, {p.id, p.country, std::string(to_string(p.fuel)),
                             csv::format_number(p.capacity_mw), csv::format_number(p.efficiency),
                             std::to_string(p.commissioned),
                             p.shutdown ? std::to_string(*p.shutdown) : std::string()});
    }
}

CapacityTable load_installed_capacity(std::istream& in, const ColumnMap& fuels) {
    const auto table = csv::read(in);
    const auto country_col = table.column("country");
    if (!country_col) throw ParseError("installed capacity CSV needs a country column");
    std::vector<std::pair<std::size_t, Fuel>> mapped;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == *country_col) continue;
        if (auto f = fuels.resolve(table.header[c])) mapped.emplace_back(c, *f);
    }
    CapacityTable out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto country = csv::trim(cell(row, country_col));
        if (country.empty()) continue;
        auto& caps = out[country];
        for (const auto& [c, fuel] : mapped) {
            const auto text = cell(row, c);
            if (csv::trim(text).empty()) continue;
            const auto v = csv::parse_number(text);
            if (!v || *v < 0.0) {
                throw DataError(fmt::format("installed capacity line {}: invalid value '{}' for {}",
                                            table.line_numbers[i], csv::trim(text),
                                            to_string(fuel)));
            }
            caps[fuel] += *v;
        }
    }
    return out;
}

void write_installed_capacity_csv(std::ostream& out, const CapacityTable& table) {
    std::set<Fuel> fuels;
    for (const auto& [_, caps] : table) {
        for (const auto& [f, __] : caps) fuels.insert(f);
    }
    std::vector<std::string> header{"country"};
    for (Fuel f : fuels) header.emplace_back(to_string(f));
    csv::write_row(out, header);
    for (const auto& [country, caps] : table) {
        std::vector<std::string> row{country};
        for (Fuel f : fuels) {
            auto it = caps.find(f);
            row.push_back(it == caps.end() ? std::string() : csv::format_number(it->second));
        }
        csv::write_row(out, row);
    }
}

std::map<Fuel, double> capacity_from_plants(const std::vector<PowerPlant>& plants) {
    std::map<Fuel, double> out;
    for (const auto& p : plants) out[p.fuel] += p.capacity_mw;
    return out;
}

std::vector<PricePoint> load_eua_prices(std::istream& in) {
    const auto table = csv::read(in);
    auto date_col = table.column("date");
    if (!date_col) date_col = table.column("timestamp");
    const auto price_col = table.column("price");
    if (!date_col || !price_col) throw ParseError("EUA price CSV needs columns date, price");
    std::vector<PricePoint> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto price = csv::parse_number(cell(row, price_col));
        if (!price) continue;
        try {
            out.push_back({parse_timestamp(cell(row, date_col)), *price});
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("EUA prices line {}: {}", table.line_numbers[i], e.what()));
        }
    }
    return out;
}

double annual_carbon_price(const std::vector<PricePoint>& weekly, int year) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : weekly) {
        if (year_of(p.time) == year) {
            sum += p.price;
            ++n;
        }
    }
    if (n == 0) {
        throw DataError(fmt::format(
            "no allowance prices in {}; set the carbon price explicitly", year));
    }
    return sum / static_cast<double>(n);
}

}  // namespace cefsim
