#include "cefsim/dispatch.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim {

double ResidualLoad::mean_res_share() const {
    if (res_share.empty()) return 0.0;
    return std::accumulate(res_share.begin(), res_share.end(), 0.0) /
           static_cast<double>(res_share.size());
}

ResidualLoad residual_load(const GenerationSeries& series, const std::set<Fuel>& exclude) {
    ResidualLoad out;
    const auto n = series.size();
    out.residual_mw.assign(n, 0.0);
    out.total_mw.assign(n, 0.0);
    for (const auto& [fuel, col] : series.columns) {
        const bool counts = is_conventional(fuel) && !exclude.count(fuel);
        for (std::size_t t = 0; t < n; ++t) {
            if (!col[t]) {
                throw DataError(fmt::format("generation gap for {} at {}", to_string(fuel),
                                            format_timestamp(series.index[t])));
            }
            out.total_mw[t] += *col[t];
            if (counts) out.residual_mw[t] += *col[t];
        }
    }
    out.conv_share.resize(n);
    out.res_share.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double total = out.total_mw[t];
        out.conv_share[t] = total > 0.0 ? out.residual_mw[t] / total : 0.0;
        out.res_share[t] = total > 0.0 ? 1.0 - out.conv_share[t] : 0.0;
    }
    return out;
}

MarginalBlock marginal_block(const MeritOrder& order, double residual_mw) {
    if (order.size() == 0) throw DataError("empty merit order");
    if (residual_mw < 0.0) throw DataError("negative residual load");
    const auto& blocks = order.blocks();
    if (residual_mw > order.total_capacity()) return {blocks.size() - 1, true};
    // First block whose end is >= residual: start < residual <= end.
    const auto it = std::lower_bound(blocks.begin(), blocks.end(), residual_mw,
                                     [](const DispatchBlock& b, double r) { return b.cumulative_mw < r; });
    return {static_cast<std::size_t>(it - blocks.begin()), false};
}

double mef_at(const MeritOrder& order, double residual_mw, double transmission_efficiency) {
    return order[marginal_block(order, residual_mw).index].emission_intensity /
           transmission_efficiency;
}

std::vector<double> utilization(const MeritOrder& order, double residual_mw) {
    if (residual_mw < 0.0) throw DataError("negative residual load");
    std::vector<double> gamma(order.size(), 0.0);
    for (std::size_t p = 0; p < order.size(); ++p) {
        const auto& b = order[p];
        const double start = order.block_start(p);
        if (b.cumulative_mw <= residual_mw) {
            gamma[p] = 1.0;
        } else if (start >= residual_mw) {
            gamma[p] = 0.0;
        } else {
            gamma[p] = (residual_mw - start) / b.capacity_mw;
        }
    }
    return gamma;
}

std::optional<double> xef_at(const MeritOrder& order, double residual_mw,
                             double total_generation_mwh, double transmission_efficiency,
                             double delta_t_h) {
    if (!(total_generation_mwh > 0.0)) return std::nullopt;
    if (residual_mw < 0.0) throw DataError("negative residual load");
    // Sum of intensity times generation share, so a single block carrying
    // all generation gives exactly its intensity.
    double weighted = 0.0;
    for (std::size_t p = 0; p < order.size(); ++p) {
        const auto& b = order[p];
        const double start = order.block_start(p);
        double dispatched_mw = 0.0;
        if (b.cumulative_mw <= residual_mw) {
            dispatched_mw = b.capacity_mw;
        } else if (start < residual_mw) {
            dispatched_mw = residual_mw - start;
        }
        weighted += b.emission_intensity * (dispatched_mw * delta_t_h / total_generation_mwh);
    }
    return weighted / transmission_efficiency;
}

std::size_t CefSeries::saturated_hours() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const CefRecord& r) { return r.saturated; }));
}

std::size_t CefSeries::invalid_xef_hours() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const CefRecord& r) { return !r.xef; }));
}

CefSeries compute_cef_series(const MeritOrder& order, const GenerationSeries& generation,
                             const ScenarioConfig& config) {
    if (!generation.country.empty() && !config.country.empty() &&
        generation.country != config.country) {
        throw DataError(fmt::format("generation for {} used with a {} scenario", generation.country,
                                    config.country));
    }
    if (generation.year != 0 && config.year != 0 && generation.year != config.year) {
        throw DataError(fmt::format("generation for {} used with a {} scenario", generation.year,
                                    config.year));
    }
    const auto load = residual_load(generation, config.residual_load_exclude);
    CefSeries out;
    out.country = config.country;
    out.year = config.year;
    out.method = config.method;
    out.carbon_price = config.carbon_price;
    out.records.resize(generation.size());
    for (std::size_t t = 0; t < generation.size(); ++t) {
        auto& r = out.records[t];
        r.time = generation.index[t];
        r.residual_mw = load.residual_mw[t];
        r.total_generation_mw = load.total_mw[t];
        const auto pick = marginal_block(order, r.residual_mw);
        const auto& block = order[pick.index];
        r.marginal_fuel = block.fuel;
        r.marginal_cost = block.marginal_cost;
        r.mef = block.emission_intensity / config.transmission_efficiency;
        r.saturated = pick.saturated;
        r.xef = xef_at(order, r.residual_mw, r.total_generation_mw * config.delta_t_h,
                       config.transmission_efficiency, config.delta_t_h);
    }
    return out;
}

void write_cef_csv(std::ostream& out, const CefSeries& series) {
    csv::write_row(out, {"timestamp", "residual_load_mw", "marginal_fuel", "marginal_cost_eur_mwh",
                         "mef_t_per_mwh", "xef_t_per_mwh", "saturated_flag"});
    for (const auto& r : series.records) {
        csv::write_row(out, {format_timestamp(r.time), csv::format_number(r.residual_mw),
                             std::string(to_string(r.marginal_fuel)),
                             csv::format_number(r.marginal_cost), csv::format_number(r.mef),
                             r.xef ? csv::format_number(*r.xef) : std::string(),
                             r.saturated ? "1" : "0"});
    }
}

CefSeries read_cef_csv(std::istream& in) {
    const auto table = csv::read(in);
    const auto ts = table.column("timestamp");
    const auto resid = table.column("residual_load_mw");
    const auto fuel = table.column("marginal_fuel");
    const auto cost = table.column("marginal_cost_eur_mwh");
    const auto mef = table.column("mef_t_per_mwh");
    const auto xef = table.column("xef_t_per_mwh");
    const auto sat = table.column("saturated_flag");
    if (!ts || !resid || !fuel || !cost || !mef || !xef || !sat) {
        throw ParseError("CEF CSV is missing required columns");
    }
    CefSeries out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.size() < table.header.size()) {
            throw ParseError(fmt::format("CEF CSV line {}: too few fields", table.line_numbers[i]));
        }
        CefRecord r;
        r.time = parse_timestamp(row[*ts]);
        const auto f = fuel_from_string(csv::trim(row[*fuel]));
        const auto res_v = csv::parse_number(row[*resid]);
        const auto cost_v = csv::parse_number(row[*cost]);
        const auto mef_v = csv::parse_number(row[*mef]);
        if (!f || !res_v || !cost_v || !mef_v) {
            throw ParseError(fmt::format("CEF CSV line {}: malformed row", table.line_numbers[i]));
        }
        r.marginal_fuel = *f;
        r.residual_mw = *res_v;
        r.marginal_cost = *cost_v;
        r.mef = *mef_v;
        r.xef = csv::parse_number(row[*xef]);
        r.saturated = csv::trim(row[*sat]) == "1";
        out.records.push_back(r);
    }
    if (!out.records.empty()) out.year = year_of(out.records.front().time);
    return out;
}

}  // namespace cefsim
