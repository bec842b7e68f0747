#include "cefsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"
#include "cefsim/parallel.hpp"

namespace cefsim {

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 share ranks i+1..j
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("spearman: inputs differ in length");
    if (x.size() < 2) throw DataError("spearman: need at least two samples");
    CorrelationResult result;
    result.n = x.size();
    result.context = "series";
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = (n + 1.0) / 2.0;  // both rank vectors
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return result;
    result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return result;
}

std::vector<std::size_t> discretize_elements(const MeritOrder& order, double element_mw) {
    if (!(element_mw > 0.0)) throw DataError("element size must be positive");
    const double total = order.total_capacity();
    const auto count = static_cast<std::size_t>(std::ceil(total / element_mw));
    std::vector<std::size_t> out;
    out.reserve(count);
    std::size_t block = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double mid = std::min((static_cast<double>(k) + 0.5) * element_mw, total);
        while (block + 1 < order.size() && order[block].cumulative_mw < mid) ++block;
        out.push_back(block);
    }
    return out;
}

CorrelationResult merit_order_correlation(const MeritOrder& order, Weighting weighting,
                                          double element_mw) {
    std::vector<double> cost;
    std::vector<double> emission;
    if (weighting == Weighting::capacity) {
        for (auto b : discretize_elements(order, element_mw)) {
            cost.push_back(order[b].marginal_cost);
            emission.push_back(order[b].emission_intensity);
        }
    } else {
        for (const auto& b : order.blocks()) {
            cost.push_back(b.marginal_cost);
            emission.push_back(b.emission_intensity);
        }
    }
    CorrelationResult result;
    result.context = "merit_order";
    if (order.size() < 2 || cost.size() < 2) {
        result.n = cost.size();
        return result;
    }
    result = spearman(cost, emission);
    result.context = "merit_order";
    return result;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        const auto token = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        const auto v = csv::parse_number(token);
        if (!v) throw ConfigError("malformed grid '" + text + "', expected start:stop:step");
        parts.push_back(*v);
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw ConfigError("malformed grid '" + text + "', expected start:stop:step");
    }
    std::vector<double> grid;
    const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 0.5));
    for (long i = 0; i <= steps; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return grid;
}

SweepCurve carbon_price_sweep(const MeritOrderFactory& factory, std::span<const double> grid,
                              Weighting weighting, double element_mw, double tolerance,
                              unsigned jobs) {
    if (grid.empty()) throw DataError("carbon price grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DataError("carbon price grid must be strictly increasing");
    }
    auto r_at = [&](double price) { return merit_order_correlation(factory(price), weighting, element_mw).r; };

    SweepCurve curve;
    curve.carbon_prices.assign(grid.begin(), grid.end());
    curve.r.resize(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t i) { curve.r[i] = r_at(grid[i]); });

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const auto& a = curve.r[i];
        const auto& b = curve.r[i + 1];
        if (a && *a == 0.0) {
            curve.zero_crossing = grid[i];
            break;
        }
        if (!a || !b) continue;
        if (*b == 0.0) {
            curve.zero_crossing = grid[i + 1];
            break;
        }
        if ((*a < 0.0) == (*b < 0.0)) continue;
        const bool lo_negative = *a < 0.0;
        double lo = grid[i];
        double hi = grid[i + 1];
        while (hi - lo > tolerance) {
            const double mid = 0.5 * (lo + hi);
            const auto r = r_at(mid);
            if (!r || *r == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((*r < 0.0) == lo_negative) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        curve.zero_crossing = 0.5 * (lo + hi);
        break;
    }
    return curve;
}

std::vector<ShiftSweepRow> shift_study_vs_carbon_price(const MeritOrderFactory& factory,
                                                       const GenerationSeries& generation,
                                                       const ScenarioConfig& config,
                                                       std::span<const Driver> drivers,
                                                       std::span<const double> grid,
                                                       unsigned jobs) {
    std::vector<ShiftSweepRow> rows(grid.size() * drivers.size());
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        auto cfg = config;
        cfg.carbon_price = grid[i];
        const auto order = factory(grid[i]);
        const auto cef = compute_cef_series(order, generation, cfg);
        for (std::size_t d = 0; d < drivers.size(); ++d) {
            const auto report = run_shift_study(cef, drivers[d]);
            rows[i * drivers.size() + d] = {grid[i], drivers[d], report.dc_pct, report.dxe_pct,
                                            report.dme_pct};
        }
    });
    return rows;
}

namespace {

struct RelativeAccumulator {
    double sum = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;

    void add(double candidate, double reference) {
        if (reference == 0.0 || !std::isfinite(reference) || !std::isfinite(candidate)) {
            ++excluded;
            return;
        }
        sum += std::abs(candidate - reference) / std::abs(reference);
        ++used;
    }

    ErrorStat stat() const {
        return {used ? 100.0 * sum / static_cast<double>(used) : 0.0, used, excluded};
    }
};

ErrorStat mean_error(const std::vector<double>& candidate, const std::vector<double>& reference) {
    ErrorStat e;
    if (reference.empty()) return e;
    const double mc = std::accumulate(candidate.begin(), candidate.end(), 0.0) /
                      static_cast<double>(candidate.size());
    const double mr = std::accumulate(reference.begin(), reference.end(), 0.0) /
                      static_cast<double>(reference.size());
    if (mr == 0.0) {
        e.excluded = 1;
        return e;
    }
    e.value_pct = 100.0 * std::abs(mc - mr) / std::abs(mr);
    e.used = reference.size();
    return e;
}

}  // namespace

ValidationReport validation_errors(const ScenarioOutputs& reference, const ScenarioOutputs& candidate,
                                   double element_mw) {
    ValidationReport report;

    const auto ref_el = discretize_elements(reference.order, element_mw);
    const auto cand_el = discretize_elements(candidate.order, element_mw);
    const auto n_el = std::min(ref_el.size(), cand_el.size());
    RelativeAccumulator mo_c, mo_e;
    for (std::size_t k = 0; k < n_el; ++k) {
        const auto& r = reference.order[ref_el[k]];
        const auto& c = candidate.order[cand_el[k]];
        mo_c.add(c.marginal_cost, r.marginal_cost);
        mo_e.add(c.emission_intensity, r.emission_intensity);
    }
    report.mo_cost = mo_c.stat();
    report.mo_emission = mo_e.stat();

    const auto& rr = reference.cef.records;
    const auto& cr = candidate.cef.records;
    if (rr.size() != cr.size()) throw DataError("reference and candidate series differ in length");
    RelativeAccumulator p, m, x;
    std::vector<double> rp, cp, rm, cm, rx, cx;
    for (std::size_t t = 0; t < rr.size(); ++t) {
        if (rr[t].time != cr[t].time) throw DataError("reference and candidate series are not aligned");
        p.add(cr[t].marginal_cost, rr[t].marginal_cost);
        m.add(cr[t].mef, rr[t].mef);
        rp.push_back(rr[t].marginal_cost);
        cp.push_back(cr[t].marginal_cost);
        rm.push_back(rr[t].mef);
        cm.push_back(cr[t].mef);
        if (rr[t].xef && cr[t].xef) {
            x.add(*cr[t].xef, *rr[t].xef);
            rx.push_back(*rr[t].xef);
            cx.push_back(*cr[t].xef);
        } else {
            ++x.excluded;
        }
    }
    report.price = p.stat();
    report.mef = m.stat();
    report.xef = x.stat();
    report.mean_price = mean_error(cp, rp);
    report.mean_mef = mean_error(cm, rm);
    report.mean_xef = mean_error(cx, rx);
    return report;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report, int year,
                          bool with_header) {
    if (with_header) csv::write_row(out, {"error_name", "year", "value_pct"});
    const std::pair<const char*, const ErrorStat*> rows[] = {
        {"mo_cost", &report.mo_cost},       {"mo_emission", &report.mo_emission},
        {"price", &report.price},           {"mef", &report.mef},
        {"xef", &report.xef},               {"mean_price", &report.mean_price},
        {"mean_mef", &report.mean_mef},     {"mean_xef", &report.mean_xef},
    };
    for (const auto& [name, stat] : rows) {
        csv::write_row(out, {name, std::to_string(year), csv::format_number(stat->value_pct)});
    }
}

}  // namespace cefsim
