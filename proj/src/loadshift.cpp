#include "cefsim/loadshift.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim {

std::string_view to_string(Driver driver) {
    switch (driver) {
        case Driver::price: return "price";
        case Driver::xef: return "xef";
        case Driver::mef: return "mef";
    }
    return "unknown";
}

std::optional<Driver> driver_from_string(std::string_view text) {
    const auto lower = csv::to_lower(text);
    if (lower == "price") return Driver::price;
    if (lower == "xef") return Driver::xef;
    if (lower == "mef") return Driver::mef;
    return std::nullopt;
}

ShiftEvents daily_shift_events(std::span<const TimePoint> index, std::span<const double> signal,
                               double shifted_kwh) {
    if (index.size() != signal.size()) throw DataError("signal and index lengths differ");
    ShiftEvents out;
    std::size_t begin = 0;
    while (begin < index.size()) {
        const auto day = date_of(index[begin]);
        std::size_t end = begin;
        while (end < index.size() && date_of(index[end]) == day) ++end;

        bool usable = end - begin == 24;
        for (std::size_t i = begin; usable && i < end; ++i) {
            usable = hour_of_day(index[i]) == static_cast<int>(i - begin) &&
                     index[i] == hour_floor(index[i]) && std::isfinite(signal[i]);
        }
        if (!usable) {
            ++out.skipped_days;
            begin = end;
            continue;
        }
        std::size_t hi = begin;
        std::size_t lo = begin;
        for (std::size_t i = begin + 1; i < end; ++i) {
            if (signal[i] > signal[hi]) hi = i;
            if (signal[i] < signal[lo]) lo = i;
        }
        if (signal[hi] == signal[lo]) {
            ++out.zero_spread_days;
        } else {
            out.events.push_back({day, hi, lo, static_cast<int>(hi - begin),
                                  static_cast<int>(lo - begin), shifted_kwh});
        }
        begin = end;
    }
    return out;
}

ShiftReport evaluate_shifts(const ShiftEvents& events, const ShiftSignals& signals) {
    if (signals.price.size() != signals.xef.size() || signals.price.size() != signals.mef.size()) {
        throw DataError("price, XEF and MEF series must share one index");
    }
    const bool with_fuels = !signals.marginal_fuel.empty();
    if (with_fuels && signals.marginal_fuel.size() != signals.price.size()) {
        throw DataError("marginal fuel series must share the signal index");
    }
    ShiftReport report;
    report.skipped_days = events.skipped_days;
    report.zero_spread_days = events.zero_spread_days;

    double c_src = 0.0, c_delta = 0.0;
    double x_src = 0.0, x_delta = 0.0;
    double m_src = 0.0, m_delta = 0.0;
    for (const auto& e : events.events) {
        if (e.source_index >= signals.price.size() || e.sink_index >= signals.price.size()) {
            throw DataError("shift event outside the signal index");
        }
        EvaluatedShift s;
        s.event = e;
        s.source_price = signals.price[e.source_index];
        s.sink_price = signals.price[e.sink_index];
        s.source_xef = signals.xef[e.source_index];
        s.sink_xef = signals.xef[e.sink_index];
        s.source_mef = signals.mef[e.source_index];
        s.sink_mef = signals.mef[e.sink_index];
        if (with_fuels) {
            s.source_fuel = signals.marginal_fuel[e.source_index];
            s.sink_fuel = signals.marginal_fuel[e.sink_index];
            ++report.fuel_pairs[{*s.source_fuel, *s.sink_fuel}];
        }
        ++report.source_hours.at(static_cast<std::size_t>(e.source_hour));
        ++report.sink_hours.at(static_cast<std::size_t>(e.sink_hour));

        const double kwh = e.shifted_kwh;
        c_src += kwh * s.source_price;
        c_delta += kwh * (s.sink_price - s.source_price);
        x_src += kwh * s.source_xef;
        x_delta += kwh * (s.sink_xef - s.source_xef);
        m_src += kwh * s.source_mef;
        m_delta += kwh * (s.sink_mef - s.source_mef);
        report.events.push_back(s);
    }
    auto relative = [](double delta, double base) -> std::optional<double> {
        if (base == 0.0) return std::nullopt;
        return 100.0 * delta / base;
    };
    if (!report.events.empty()) {
        report.dc_pct = relative(c_delta, c_src);
        report.dxe_pct = relative(x_delta, x_src);
        report.dme_pct = relative(m_delta, m_src);
    }
    return report;
}

ShiftReport run_shift_study(const CefSeries& cef, Driver driver, double shifted_kwh) {
    const auto n = cef.size();
    std::vector<TimePoint> index(n);
    std::vector<double> price(n), xef(n), mef(n);
    std::vector<Fuel> fuels(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t t = 0; t < n; ++t) {
        const auto& r = cef.records[t];
        index[t] = r.time;
        price[t] = r.marginal_cost;
        xef[t] = r.xef.value_or(nan);
        mef[t] = r.mef;
        fuels[t] = r.marginal_fuel;
    }
    // An invalid XEF hour poisons the day for every driver so that studies
    // with different drivers see the same set of days.
    std::vector<double> driving(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double v = driver == Driver::price ? price[t] : driver == Driver::xef ? xef[t] : mef[t];
        driving[t] = std::isfinite(xef[t]) ? v : nan;
    }
    const auto events = daily_shift_events(index, driving, shifted_kwh);
    auto report = evaluate_shifts(events, {price, xef, mef, fuels});
    report.driver = driver;
    return report;
}

void write_shift_events_csv(std::ostream& out, const ShiftReport& report) {
    csv::write_row(out, {"date", "source_hour", "sink_hour", "src_fuel", "sink_fuel", "d_price",
                         "d_xef", "d_mef"});
    for (const auto& s : report.events) {
        csv::write_row(out, {format_date(s.event.date), std::to_string(s.event.source_hour),
                             std::to_string(s.event.sink_hour),
                             s.source_fuel ? std::string(to_string(*s.source_fuel)) : std::string(),
                             s.sink_fuel ? std::string(to_string(*s.sink_fuel)) : std::string(),
                             csv::format_number(s.sink_price - s.source_price),
                             csv::format_number(s.sink_xef - s.source_xef),
                             csv::format_number(s.sink_mef - s.source_mef)});
    }
}

void write_shift_summary(std::ostream& out, const ShiftReport& report) {
    auto pct = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string("na"); };
    out << "# relative change = 100 * sum(sink - source) / sum(source) over shift events\n";
    out << "driver = " << (report.driver ? to_string(*report.driver) : "none") << '\n';
    out << "optimized = "
        << (report.driver ? (*report.driver == Driver::price ? "dc_pct"
                             : *report.driver == Driver::xef ? "dxe_pct"
                                                              : "dme_pct")
                          : "none")
        << '\n';
    out << "dc_pct = " << pct(report.dc_pct) << '\n';
    out << "dxe_pct = " << pct(report.dxe_pct) << '\n';
    out << "dme_pct = " << pct(report.dme_pct) << '\n';
    out << "n_events = " << report.events.size() << '\n';
    out << "n_skipped_days = " << report.skipped_days << '\n';
    out << "n_zero_spread_days = " << report.zero_spread_days << '\n';
    for (const auto& [pair, count] : report.fuel_pairs) {
        out << "pair." << to_string(pair.first) << "=>" << to_string(pair.second) << " = " << count
            << '\n';
    }
}

}  // namespace cefsim
