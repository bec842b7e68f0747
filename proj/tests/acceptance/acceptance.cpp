// Acceptance suite: one PASS/FAIL/SKIPPED line per criterion. Exit status is
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cefsim/analysis.hpp"
#include "cefsim/config.hpp"
#include "cefsim/dispatch.hpp"
#include "cefsim/loadshift.hpp"
#include "cefsim/merit_order.hpp"
#include "cefsim/pipeline.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace cefsim;
using testsupport::Rng;
using testsupport::uniform;
using testsupport::uniform_int;

namespace {

struct Outcome {
    enum Status { pass, fail, skipped } status = fail;
    std::string detail;
};

Outcome ok(std::string d) { return {Outcome::pass, std::move(d)}; }
Outcome bad(std::string d) { return {Outcome::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::skipped, std::move(d)}; }

fs::path scratch(const std::string& name) {
    const auto dir = fs::path(CEFSIM_TEST_SCRATCH) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// 1. XEF against a per-plant accumulator; utilisation conserves energy.
Outcome xef_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_rel = 0.0;
    double worst_energy = 0.0;
    std::size_t hours = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Rng rng(seed);
        const auto blocks = testsupport::random_blocks(rng, uniform_int(rng, 1, 6));
        std::vector<std::pair<double, DispatchBlock>> by_cost;
        for (const auto& b : blocks) by_cost.emplace_back(b.marginal_cost, b);
        const auto order = MeritOrder::from_blocks(blocks);
        const int n = uniform_int(rng, 1, 72);
        const double eta = uniform(rng, 0.85, 1.0);
        std::vector<double> conv, wind;
        for (int t = 0; t < n; ++t) {
            conv.push_back(uniform(rng, 0.0, order.total_capacity() * 1.1));
            wind.push_back(uniform_int(rng, 0, 3) == 0 ? 0.0 : uniform(rng, 0.0, 800.0));
        }
        const auto gen = testsupport::make_series("XX", 2019, {{Fuel::coal, conv}, {Fuel::wind_onshore, wind}});
        ScenarioConfig config;
        config.country = "XX";
        config.year = 2019;
        config.transmission_efficiency = eta;
        const auto cef = compute_cef_series(order, gen, config);
        for (int t = 0; t < n; ++t) {
            const auto& rec = cef.records[static_cast<std::size_t>(t)];
            const double total_mwh = conv[t] + wind[t];
            const auto h = testsupport::brute_force_dispatch(by_cost, conv[t], 1.0);
            if (!(total_mwh > 0.0)) {
                if (rec.xef) return bad(fmt::format("seed {} hour {}: XEF defined without generation", seed, t));
                continue;
            }
            if (!rec.xef) return bad(fmt::format("seed {} hour {}: XEF missing", seed, t));
            const double oracle = h.emissions_t / (eta * total_mwh);
            const double rel = std::abs(*rec.xef - oracle) / std::max(std::abs(oracle), 1e-300);
            if (oracle != 0.0) worst_rel = std::max(worst_rel, rel);
            else if (*rec.xef != 0.0) return bad(fmt::format("seed {} hour {}: nonzero XEF", seed, t));

            const auto gamma = utilization(order, conv[t]);
            double energy = 0.0;
            for (std::size_t p = 0; p < order.size(); ++p) energy += gamma[p] * order[p].capacity_mw;
            const double diff = std::abs(energy - std::min(conv[t], order.total_capacity())) / order.total_capacity();
            worst_energy = std::max(worst_energy, diff);
            if (std::abs(energy - h.dispatched_mwh) > 1e-12 * order.total_capacity()) {
                return bad(fmt::format("seed {} hour {}: dispatched energy differs from accumulator", seed, t));
            }
            ++hours;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto detail = fmt::format("{} hours, max rel err {:.3g}, max energy residual {:.3g}, {:.2f} s", hours,
                                    worst_rel, worst_energy, secs);
    if (worst_rel > 1e-9 || worst_energy > 1e-12 || secs >= 10.0) return bad(detail);
    return ok(detail);
}

// 2. One block and no renewables: MEF and XEF coincide.
Outcome single_block_identity() {
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Rng rng(seed);
        auto blocks = testsupport::random_blocks(rng, 1);
        const auto order = MeritOrder::from_blocks(blocks);
        std::vector<double> conv;
        for (int t = 0; t < 48; ++t) conv.push_back(uniform(rng, 1e-3, order.total_capacity()));
        ScenarioConfig config;
        config.country = "XX";
        config.year = 2019;
        config.transmission_efficiency = uniform(rng, 0.85, 1.0);
        const auto cef = compute_cef_series(order, testsupport::make_series("XX", 2019, {{Fuel::coal, conv}}), config);
        for (const auto& r : cef.records) {
            if (!r.xef || *r.xef != r.mef) {
                return bad(fmt::format("seed {}: MEF {:.17g} vs XEF {:.17g}", seed, r.mef, r.xef.value_or(NAN)));
            }
            ++checked;
        }
    }
    return ok(fmt::format("{} hours identical", checked));
}

// 3. At 10 000 EUR/t the stack is sorted by intensity. Intensities count as
// distinct when they differ by more than the widest fuel-cost gap divided by
// the carbon price (54.31 / 0.25 / 10000 < 0.025); closer pairs can keep
// their fuel-cost order at any finite price.
Outcome merit_order_limit() {
    constexpr double c = 10000.0;
    constexpr double min_gap = 0.025;
    double worst = 1.0;
    std::size_t stacks = 0, undefined = 0, unrestricted_below = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Rng rng(seed);
        const auto candidates = testsupport::random_plants(rng, uniform_int(rng, 2, 40));
        const auto params = testsupport::params_2019();
        const auto raw = build_merit_order_pp(candidates, params, c);
        if (const auto r = merit_order_correlation(raw).r; r && *r < 0.999) ++unrestricted_below;

        std::vector<PowerPlant> plants;
        std::vector<double> kept;
        for (const auto& p : candidates) {
            const double eps = params.at(p.fuel).emission_t_per_mwh / p.efficiency;
            const bool clash = std::any_of(kept.begin(), kept.end(),
                                           [&](double e) { return std::abs(e - eps) <= min_gap; });
            if (clash) continue;
            kept.push_back(eps);
            plants.push_back(p);
        }
        if (plants.size() < 2) continue;
        const auto r = merit_order_correlation(build_merit_order_pp(plants, params, c));
        ++stacks;
        if (!r.r) {
            ++undefined;
            continue;
        }
        worst = std::min(worst, *r.r);
    }
    const auto detail = fmt::format("{} stacks, min r = {:.6f}, undefined {}; unfiltered stacks below 0.999: {}",
                                    stacks, worst, undefined, unrestricted_below);
    return worst >= 0.999 && undefined == 0 ? ok(detail) : bad(detail);
}

// 4. Price-driven shifts raise marginal emissions in the two-fuel system.
Outcome dilemma() {
    const auto config = testsupport::dilemma_config(5.0);
    const auto order = build_merit_order_pp(testsupport::dilemma_plants(), config.fuel_params, 5.0);
    const auto cef = compute_cef_series(order, testsupport::dilemma_generation(7), config);
    const auto price = run_shift_study(cef, Driver::price);
    const auto mef = run_shift_study(cef, Driver::mef);
    const auto price_enum = testsupport::enumerate_shifts(cef, Driver::price);
    const auto mef_enum = testsupport::enumerate_shifts(cef, Driver::mef);
    if (!price.dme_pct || !price.dxe_pct || !mef.dme_pct) return bad("shift study produced no events");
    const auto detail = fmt::format("price: dME {:+.2f}% dXE {:+.2f}%; mef: dME {:+.2f}%; enumeration {:+.2f}/{:+.2f}/{:+.2f}",
                                    *price.dme_pct, *price.dxe_pct, *mef.dme_pct, price_enum.dme_pct,
                                    price_enum.dxe_pct, mef_enum.dme_pct);
    const bool signs = *price.dme_pct > 0 && *price.dxe_pct < 0 && *mef.dme_pct < 0;
    const bool agree = price_enum.dme_pct > 0 && price_enum.dxe_pct < 0 && mef_enum.dme_pct < 0;
    return signs && agree ? ok(detail) : bad(detail);
}

// 5. MEF-driven shifts never cause more marginal emissions than the others.
Outcome driver_dominance() {
    std::size_t compared = 0, pct_reversed = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const auto cef = testsupport::random_cef_series(rng, 30, uniform(rng, 0.9, 1.0));
        const auto m = run_shift_study(cef, Driver::mef);
        const auto p = run_shift_study(cef, Driver::price);
        const auto x = run_shift_study(cef, Driver::xef);
        // Marginal emissions changed by each driver's shifted energy.
        auto delta_me = [](const ShiftReport& r) {
            double d = 0.0;
            for (const auto& e : r.events) d += (e.sink_mef - e.source_mef) * e.event.shifted_kwh;
            return d;
        };
        const double dm = delta_me(m), dp = delta_me(p), dx = delta_me(x);
        if (dm > dp || dm > dx) {
            return bad(fmt::format("seed {}: dME mef {:.6g}, price {:.6g}, xef {:.6g}", seed, dm, dp, dx));
        }
        if (m.dme_pct && p.dme_pct && x.dme_pct && (*m.dme_pct > *p.dme_pct || *m.dme_pct > *x.dme_pct)) {
            ++pct_reversed;
        }
        ++compared;
    }
    return ok(fmt::format("{} series; relative dME ordering reversed in {}", compared, pct_reversed));
}

// 6. Validation against itself is zero; 1% scaling is 1%.
Outcome validation_reflexivity() {
    Rng rng(11);
    const auto plants = testsupport::random_plants(rng, 30);
    const auto config = testsupport::dilemma_config(25.0);
    const auto order = build_merit_order_pp(plants, config.fuel_params, 25.0);
    std::vector<double> conv, wind;
    for (int t = 0; t < 24 * 14; ++t) {
        conv.push_back(uniform(rng, 0.0, order.total_capacity()));
        wind.push_back(uniform(rng, 0.0, 2000.0));
    }
    const auto cef =
        compute_cef_series(order, testsupport::make_series("XX", 2019, {{Fuel::coal, conv}, {Fuel::wind_onshore, wind}}),
                           config);
    const auto self = validation_errors({order, cef}, {order, cef});
    auto blocks = order.blocks();
    for (auto& b : blocks) {
        b.marginal_cost *= 1.01;
        b.emission_intensity *= 1.01;
    }
    auto scaled_cef = cef;
    for (auto& r : scaled_cef.records) {
        r.marginal_cost *= 1.01;
        r.mef *= 1.01;
        if (r.xef) *r.xef *= 1.01;
    }
    const auto scaled_order = MeritOrder::from_blocks(blocks);
    const auto pert = validation_errors({order, cef}, {scaled_order, scaled_cef});
    const std::vector<std::pair<const char*, std::pair<double, double>>> stats{
        {"mo_cost", {self.mo_cost.value_pct, pert.mo_cost.value_pct}},
        {"mo_emission", {self.mo_emission.value_pct, pert.mo_emission.value_pct}},
        {"price", {self.price.value_pct, pert.price.value_pct}},
        {"mef", {self.mef.value_pct, pert.mef.value_pct}},
        {"xef", {self.xef.value_pct, pert.xef.value_pct}},
        {"mean_price", {self.mean_price.value_pct, pert.mean_price.value_pct}},
        {"mean_mef", {self.mean_mef.value_pct, pert.mean_mef.value_pct}},
        {"mean_xef", {self.mean_xef.value_pct, pert.mean_xef.value_pct}},
    };
    std::string worst;
    double worst_dev = 0.0;
    for (const auto& [name, v] : stats) {
        if (v.first != 0.0) return bad(fmt::format("{} self error {:.3g}", name, v.first));
        const double dev = std::abs(v.second - 1.0);
        if (dev >= worst_dev) {
            worst_dev = dev;
            worst = name;
        }
    }
    const auto detail = fmt::format("self = 0 for all, max |delta - 1%| = {:.2g} ({})", worst_dev, worst);
    return worst_dev <= 0.001 ? ok(detail) : bad(detail);
}

#ifdef CEFSIM_CLI
int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + CEFSIM_CLI + "\" --config \"" + CEFSIM_DEFAULT_CONFIG + "\" " + args +
                            " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

// 7. compute output does not depend on the worker count.
Outcome determinism() {
#ifdef CEFSIM_CLI
    const auto root = scratch("determinism");
    testsupport::write_raw_data_dir(root / "raw", {2019, 2020}, {"DE", "FR", "NL"});
    if (cli("--data-dir " + (root / "raw").string() + " --out-dir " + (root / "work").string() + " ingest") != 0) {
        return bad("ingest failed");
    }
    const std::string scenarios =
        " compute --scenario DE:2019 --scenario FR:2019 --scenario NL:2019 --scenario DE:2020 --scenario DE:2019:PP "
        "--scenario NL:2020:PP --scenario FR:2019:PWLv";
    for (const char* jobs : {"1", "8"}) {
        const int rc = cli("--jobs " + std::string(jobs) + " --data-dir " + (root / "work").string() + " --out-dir " +
                           (root / ("out" + std::string(jobs))).string() + scenarios);
        if (rc != 0) return bad(fmt::format("compute --jobs {} exited {}", jobs, rc));
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(root / "out1")) {
        if (entry.path().extension() != ".csv") continue;
        const auto other = root / "out8" / entry.path().filename();
        if (!fs::exists(other)) return bad("missing " + other.filename().string());
        if (testsupport::read_file(entry.path()) != testsupport::read_file(other)) {
            return bad(entry.path().filename().string() + " differs");
        }
        ++files;
    }
    for (const auto& entry : fs::directory_iterator(root / "out8")) {
        if (entry.path().extension() == ".csv" && !fs::exists(root / "out1" / entry.path().filename())) {
            return bad("extra " + entry.path().filename().string());
        }
    }
    if (files != 14) return bad(fmt::format("expected 14 CSVs, found {}", files));
    return ok(fmt::format("{} CSVs byte-identical", files));
#else
    return bad("command-line tool was not built");
#endif
}

// Full-data checks run against an ingested workspace named by
// CEFSIM_FULL_DATA_DIR (the directory holding normalized/).
const char* full_data_dir() {
    const char* dir = std::getenv("CEFSIM_FULL_DATA_DIR");
    return dir && *dir ? dir : nullptr;
}

Workspace full_workspace() {
    const char* cfg = std::getenv("CEFSIM_CONFIG");
    return Workspace(full_data_dir(), Settings::load(cfg && *cfg ? cfg : CEFSIM_DEFAULT_CONFIG));
}

// 8. German 2019 correlation curve.
Outcome germany_sweep() {
    if (!full_data_dir()) return skip("CEFSIM_FULL_DATA_DIR not set");
    const auto ws = full_workspace();
    const ScenarioKey key{"DE", 2019, Method::pp};
    const auto config = ws.scenario(key, 24.9);
    const auto factory = ws.factory(key, config);
    const auto t0 = std::chrono::steady_clock::now();
    const double r24 = merit_order_correlation(factory(24.9)).r.value_or(NAN);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double r100 = merit_order_correlation(factory(100.0)).r.value_or(NAN);
    const auto grid = parse_grid("0:300:5");
    const auto curve = carbon_price_sweep(factory, grid);
    const double cross = curve.zero_crossing.value_or(NAN);
    const auto detail =
        fmt::format("r(24.9) = {:.3f}, r(100) = {:.3f}, crossing = {:.2f} EUR/t, {:.2f} s per point", r24, r100, cross, secs);
    const bool pass = std::abs(r24 + 0.13) <= 0.05 && std::abs(r100 - 0.40) <= 0.05 && std::abs(cross - 42.6) <= 2.0 &&
                      secs < 60.0;
    return pass ? ok(detail) : bad(detail);
}

// 9. PP against PWLv for Germany 2015-2019.
Outcome germany_validation() {
    if (!full_data_dir()) return skip("CEFSIM_FULL_DATA_DIR not set");
    const auto ws = full_workspace();
    double worst = 0.0;
    std::string where;
    for (int year = 2015; year <= 2019; ++year) {
        const auto pp = run_scenario(ws, {"DE", year, Method::pp});
        const auto pwlv = run_scenario(ws, {"DE", year, Method::pwlv});
        const auto v = validation_errors({pp.order, pp.cef}, {pwlv.order, pwlv.cef});
        for (const auto& [name, stat] : std::vector<std::pair<const char*, ErrorStat>>{
                 {"price", v.price},
                 {"xef", v.xef},
                 {"mo_cost", v.mo_cost},
                 {"mean_price", v.mean_price},
                 {"mean_mef", v.mean_mef},
                 {"mean_xef", v.mean_xef}}) {
            if (stat.value_pct >= worst) {
                worst = stat.value_pct;
                where = fmt::format("{} {}", name, year);
            }
        }
    }
    const auto detail = fmt::format("largest bounded error {:.2f}% ({})", worst, where);
    return worst < 2.5 ? ok(detail) : bad(detail);
}

// 10. Countries where price-driven shifts raise marginal emissions.
Outcome country_signs() {
    if (!full_data_dir()) return skip("CEFSIM_FULL_DATA_DIR not set");
    const auto ws = full_workspace();
    const std::set<std::string> expected{"AT", "DE", "ES", "GR", "HU", "IE", "PT", "RO"};
    std::set<std::string> got;
    std::size_t studied = 0;
    for (const auto& key : ws.discover(Method::pwl)) {
        if (key.year != 2019) continue;
        const auto result = run_scenario(ws, key);
        const auto r = run_shift_study(result.cef, Driver::price);
        ++studied;
        if (r.dme_pct && *r.dme_pct > 0) got.insert(key.country);
    }
    std::string list;
    for (const auto& c : got) list += (list.empty() ? "" : ",") + c;
    const auto detail = fmt::format("{} countries studied, dME > 0 in [{}]", studied, list);
    return got == expected ? ok(detail) : bad(detail);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 xef-oracle", xef_oracle},
        {"2 single-block-identity", single_block_identity},
        {"3 merit-order-limit", merit_order_limit},
        {"4 dilemma-fixture", dilemma},
        {"5 driver-dominance", driver_dominance},
        {"6 validation-reflexivity", validation_reflexivity},
        {"7 determinism", determinism},
        {"8 de-2019-sweep", germany_sweep},
        {"9 de-pp-vs-pwlv", germany_validation},
        {"10 country-signs", country_signs},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = bad(std::string("exception: ") + e.what());
        }
        const char* label = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIPPED";
        if (o.status == Outcome::fail) ++failures;
        std::cout << label << "  " << name << "  " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
