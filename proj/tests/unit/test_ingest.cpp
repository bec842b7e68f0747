#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "cefsim/error.hpp"
#include "cefsim/ingest.hpp"
#include "cefsim/scenario.hpp"
#include "synthetic.hpp"

using namespace cefsim;
using testsupport::make_series;

namespace {

const ColumnMap& columns() {
    static const ColumnMap map = Settings::load(CEFSIM_DEFAULT_CONFIG).column_map;
    return map;
}

GenerationSeries parse(const std::string& text, std::optional<int> year = std::nullopt) {
    std::istringstream in(text);
    return parse_generation_csv(in, columns(), "DE", year);
}

GenerationSeries one_column(std::vector<std::optional<double>> values, Fuel fuel = Fuel::coal) {
    auto s = make_series("DE", 2019, {{fuel, std::vector<double>(values.size(), 0.0)}});
    s.columns[fuel] = std::move(values);
    return s;
}

}  // namespace

TEST(ParseGeneration, QuarterHourTwoFuels) {
    const auto s = parse(
        "timestamp,Fossil Gas,Nuclear\n"
        "2019-01-01 00:00,1,2\n2019-01-01 00:15,1,2\n2019-01-01 00:30,1,2\n2019-01-01 00:45,1,2\n");
    EXPECT_EQ(s.resolution_minutes, 15);
    EXPECT_EQ(s.year, 2019);
    EXPECT_EQ(s.size() * s.columns.size(), 8u);
}

TEST(ParseGeneration, EmptyCellIsMissing) {
    const auto s = parse("timestamp,Fossil Gas,Nuclear\n2019-01-01 00:00,,2\n2019-01-01 01:00,3,2\n");
    EXPECT_FALSE(s.columns.at(Fuel::gas)[0].has_value());
    EXPECT_EQ(s.columns.at(Fuel::gas)[1], 3.0);
    EXPECT_EQ(s.missing_count(), 1u);
}

TEST(ParseGeneration, RenamesTransparencyLabels) {
    const auto s = parse("timestamp,Fossil Brown coal/Lignite,Wind Offshore\n2019-01-01 00:00,5,6\n");
    EXPECT_EQ(s.columns.count(Fuel::lignite), 1u);
    EXPECT_EQ(s.columns.count(Fuel::wind_offshore), 1u);
}

TEST(ParseGeneration, UnknownColumnWarnsAndIsSkipped) {
    const auto s = parse("timestamp,Coal,Flux capacitor\n2019-01-01 00:00,5,6\n");
    EXPECT_EQ(s.columns.size(), 1u);
    ASSERT_EQ(s.warnings.size(), 1u);
    EXPECT_NE(s.warnings[0].find("Flux capacitor"), std::string::npos);
}

TEST(ParseGeneration, MissingTimestampColumnIsFatal) {
    EXPECT_THROW(parse("when,coal\n2019-01-01 00:00,5\n"), ParseError);
}

TEST(ParseGeneration, DuplicateTimestampIsFatal) {
    EXPECT_THROW(parse("timestamp,coal\n2019-01-01 00:00,5\n2019-01-01 00:00,6\n"), ParseError);
}

TEST(ParseGeneration, NegativeValuesBecomeMissing) {
    const auto s = parse("timestamp,coal\n2019-01-01 00:00,-5\n");
    EXPECT_FALSE(s.columns.at(Fuel::coal)[0].has_value());
    EXPECT_FALSE(s.warnings.empty());
}

TEST(ParseGeneration, MtuIntervalsAndDuplicateFuelLabelsSum) {
    const auto s = parse(
        "MTU,Fossil Gas,Fossil Coal-derived gas,Gas\n"
        "01.01.2019 00:00 - 01.01.2019 01:00,1,2,4\n");
    EXPECT_EQ(s.columns.at(Fuel::gas)[0], 5.0);
    EXPECT_EQ(s.columns.at(Fuel::coal_gas)[0], 2.0);
}

TEST(ResampleHourly, ConstantQuarterHours) {
    auto s = parse("timestamp,coal\n2019-01-01 00:00,100\n2019-01-01 00:15,100\n"
                   "2019-01-01 00:30,100\n2019-01-01 00:45,100\n");
    const auto h = resample_hourly(s);
    EXPECT_EQ(h.size(), 8760u);
    EXPECT_EQ(h.columns.at(Fuel::coal)[0], 100.0);
    EXPECT_FALSE(h.columns.at(Fuel::coal)[1].has_value());
}

TEST(ResampleHourly, MeanNotSum) {
    auto s = parse("timestamp,coal\n2019-01-01 00:00,0\n2019-01-01 00:15,100\n"
                   "2019-01-01 00:30,100\n2019-01-01 00:45,200\n");
    EXPECT_EQ(resample_hourly(s).columns.at(Fuel::coal)[0], 100.0);
}

TEST(ResampleHourly, HourlyInputIsIdentity) {
    testsupport::Rng rng(7);
    std::vector<double> v;
    for (int t = 0; t < 8760; ++t) v.push_back(testsupport::uniform(rng, 0, 1000));
    const auto s = make_series("DE", 2019, {{Fuel::coal, v}});
    const auto h = resample_hourly(s);
    ASSERT_EQ(h.size(), s.size());
    for (std::size_t t = 0; t < v.size(); ++t) ASSERT_EQ(*h.columns.at(Fuel::coal)[t], v[t]);
}

TEST(ResampleHourly, IrregularSpacingNamesHour) {
    auto s = parse("timestamp,coal\n2019-01-01 00:00,1\n2019-01-01 00:15,1\n2019-01-01 03:20,1\n");
    try {
        resample_hourly(s);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("2019-01-01T03:00"), std::string::npos) << e.what();
    }
}

TEST(ResampleHourly, ConservesMeanPower) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        testsupport::Rng rng(seed);
        GenerationSeries raw;
        raw.year = 2019;
        raw.resolution_minutes = 15;
        auto& col = raw.columns[Fuel::gas];
        double sum = 0.0;
        for (int i = 0; i < 8760 * 4; ++i) {
            raw.index.push_back(year_start(2019) + std::chrono::minutes(15 * i));
            const double v = testsupport::uniform(rng, 0, 5000);
            col.emplace_back(v);
            sum += v;
        }
        const auto h = resample_hourly(raw);
        double hsum = 0.0;
        for (const auto& v : h.columns.at(Fuel::gas)) hsum += *v;
        EXPECT_NEAR(hsum / 8760.0, sum / (8760.0 * 4), 1e-9 * sum / (8760.0 * 4)) << "seed " << seed;
    }
}

TEST(Outliers, SpikeInTenPoints) {
    // Single spike a among zeros: mean a/n, population SD a*sqrt(n-1)/n,
    // so z = sqrt(n-1) = 3 for n = 10.
    std::vector<std::optional<double>> v(10, 50.0);
    v[6] = 50.0 + 1000.0;
    const auto s = one_column(v);
    const auto flags = detect_outliers_zscore(s, 2.5);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0].index, 6u);
    EXPECT_NEAR(flags[0].zscore, 3.0, 1e-12);
    EXPECT_TRUE(detect_outliers_zscore(s, 12.0).empty());
}

TEST(Outliers, ConstantColumnWarnsWithoutFlags) {
    std::vector<std::string> warnings;
    const auto flags = detect_outliers_zscore(one_column(std::vector<std::optional<double>>(20, 7.0)), 12.0,
                                              &warnings);
    EXPECT_TRUE(flags.empty());
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("zero variance"), std::string::npos);
}

TEST(Outliers, BelowAndAboveThresholdTwelve) {
    // Same closed form: z = sqrt(n-1). n = 122 gives 11, n = 170 gives 13.
    std::vector<std::optional<double>> v(122, 0.0);
    v[0] = 1.0;
    EXPECT_TRUE(detect_outliers_zscore(one_column(v), 12.0).empty());
    std::vector<std::optional<double>> w(170, 0.0);
    w[100] = 1.0;
    const auto flags = detect_outliers_zscore(one_column(w), 12.0);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_NEAR(flags[0].zscore, 13.0, 1e-9);
}

TEST(Outliers, IdempotentAfterRefill) {
    for (std::uint64_t seed = 11; seed < 31; ++seed) {
        testsupport::Rng rng(seed);
        std::vector<std::optional<double>> v;
        for (int t = 0; t < 2000; ++t) v.emplace_back(testsupport::uniform(rng, 900, 1100));
        const int spikes = testsupport::uniform_int(rng, 1, 3);
        for (int k = 0; k < spikes; ++k) {
            v[static_cast<std::size_t>(testsupport::uniform_int(rng, 0, 1999))] = 1e6;
        }
        auto s = one_column(v);
        const auto flags = detect_outliers_zscore(s, 12.0);
        ASSERT_FALSE(flags.empty()) << "seed " << seed;
        apply_outlier_flags(s, flags);
        const auto refilled = fill_missing(s);
        EXPECT_TRUE(detect_outliers_zscore(refilled, 12.0).empty()) << "seed " << seed;
    }
}

TEST(FillMissing, ForwardFill) {
    const auto f = fill_missing(one_column({5.0, std::nullopt, std::nullopt, 7.0}));
    const auto& c = f.columns.at(Fuel::coal);
    EXPECT_EQ(c, (GenerationColumn{5.0, 5.0, 5.0, 7.0}));
    ASSERT_EQ(f.fill_report.size(), 2u);
    EXPECT_EQ(f.fill_report[0].kind, FillKind::forward_fill);
}

TEST(FillMissing, LeadingGapBackfilled) {
    const auto f = fill_missing(one_column({std::nullopt, 3.0, 4.0}));
    EXPECT_EQ(f.columns.at(Fuel::coal), (GenerationColumn{3.0, 3.0, 4.0}));
    ASSERT_EQ(f.fill_report.size(), 1u);
    EXPECT_EQ(f.fill_report[0].kind, FillKind::backfill);
}

TEST(FillMissing, EmptyColumnDropped) {
    auto s = one_column({1.0, 2.0});
    s.columns[Fuel::oil] = {std::nullopt, std::nullopt};
    const auto f = fill_missing(s);
    EXPECT_EQ(f.columns.count(Fuel::oil), 0u);
    EXPECT_FALSE(f.warnings.empty());
}

TEST(FillMissing, FillFraction) {
    std::vector<std::optional<double>> v(1000, 10.0);
    for (int k = 0; k < 19; ++k) v[static_cast<std::size_t>(50 * k + 3)].reset();
    EXPECT_DOUBLE_EQ(fill_missing(one_column(v)).fill_fraction(), 0.019);
}

TEST(FillMissing, GapFreeAndEveryFillReported) {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        testsupport::Rng rng(seed);
        auto s = make_series("DE", 2019, {{Fuel::coal, std::vector<double>(300, 0.0)},
                                          {Fuel::gas, std::vector<double>(300, 0.0)}});
        std::set<std::pair<std::size_t, Fuel>> gaps;
        for (auto& [fuel, col] : s.columns) {
            for (std::size_t t = 0; t < col.size(); ++t) {
                if (testsupport::uniform(rng, 0, 1) < 0.2) {
                    col[t].reset();
                    gaps.insert({t, fuel});
                } else {
                    col[t] = testsupport::uniform(rng, 0, 100);
                }
            }
        }
        const auto f = fill_missing(s);
        EXPECT_TRUE(f.complete());
        std::set<std::pair<std::size_t, Fuel>> reported;
        for (const auto& r : f.fill_report) {
            const auto t = static_cast<std::size_t>((r.time - f.index[0]) / std::chrono::hours(1));
            reported.insert({t, r.fuel});
        }
        EXPECT_EQ(reported, gaps) << "seed " << seed;
    }
}

TEST(GenerationCsv, RoundTripsBitExactly) {
    testsupport::Rng rng(3);
    std::vector<double> a, b;
    for (int t = 0; t < 500; ++t) {
        a.push_back(std::round(testsupport::uniform(rng, 0, 1e5) * 100) / 100);
        b.push_back(testsupport::uniform(rng, 0, 10));
    }
    auto s = make_series("DE", 2019, {{Fuel::lignite, a}, {Fuel::solar, b}});
    std::ostringstream first;
    write_generation_csv(first, s);
    std::istringstream in(first.str());
    const auto back = parse_generation_csv(in, ColumnMap{}, "DE");
    std::ostringstream second;
    write_generation_csv(second, back);
    EXPECT_EQ(first.str(), second.str());
}

TEST(Preprocess, FlagsOutlierThenFills) {
    std::vector<double> v(8760, 1000.0);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] += static_cast<double>(t % 7);
    v[4000] = 1e7;
    auto raw = make_series("DE", 2019, {{Fuel::coal, v}});
    const auto clean = preprocess_generation(raw, 12.0);
    EXPECT_TRUE(clean.complete());
    EXPECT_EQ(*clean.columns.at(Fuel::coal)[4000], v[3999]);
    std::size_t outliers = 0;
    for (const auto& r : clean.fill_report) outliers += r.kind == FillKind::outlier;
    EXPECT_EQ(outliers, 1u);
}

namespace {

PlantList plants(const std::string& rows, int year, const std::string& country = {}) {
    std::istringstream in("id,country,fuel,capacity_mw,efficiency,commissioned,shutdown\n" + rows);
    return load_plant_list(in, year, columns(), country);
}

}  // namespace

TEST(PlantList, ActivityWindow) {
    const auto l = plants(
        "a,DE,coal,100,0.4,2020,\n"
        "b,DE,coal,100,0.4,1990,2018\n"
        "c,DE,Hard coal,100,0.4,1990-05-01,2020-01-01\n",
        2019);
    ASSERT_EQ(l.plants.size(), 1u);
    EXPECT_EQ(l.plants[0].id, "c");
    EXPECT_EQ(l.plants[0].fuel, Fuel::coal);
    EXPECT_EQ(l.inactive, 2u);
}

TEST(PlantList, RejectsBadRowsWithReason) {
    const auto l = plants(
        "a,DE,coal,0,0.4,1990,\n"
        "b,DE,coal,100,1.2,1990,\n"
        "c,DE,unobtainium,100,0.4,1990,\n"
        "d,DE,lignite,100,0.35,1990,\n",
        2019);
    ASSERT_EQ(l.plants.size(), 1u);
    ASSERT_EQ(l.rejected.size(), 3u);
    EXPECT_EQ(l.rejected[0].line, 2u);
    EXPECT_NE(l.rejected[0].reason.find("capacity"), std::string::npos);
    EXPECT_NE(l.rejected[1].reason.find("efficiency"), std::string::npos);
}

TEST(PlantList, CountryFilter) {
    const auto l = plants("a,DE,coal,100,0.4,1990,\nb,AT,gas,100,0.4,1990,\nc,LU,gas,10,0.4,1990,\n", 2019, "DE");
    ASSERT_EQ(l.plants.size(), 1u);
    EXPECT_EQ(l.other_country, 2u);
}

TEST(Capacity, MatrixAndPlantSums) {
    std::istringstream in("country,Nuclear,Fossil Gas,Solar\nDE,9500,30000,\nFR,63000,,9000\n");
    const auto t = load_installed_capacity(in, columns());
    EXPECT_EQ(t.at("DE").at(Fuel::nuclear), 9500.0);
    EXPECT_EQ(t.at("DE").count(Fuel::solar), 0u);
    EXPECT_EQ(t.at("FR").at(Fuel::solar), 9000.0);

    const auto l = plants("a,DE,coal,100,0.4,1990,\nb,DE,coal,50,0.4,1990,\nc,DE,gas,20,0.4,1990,\n", 2019);
    const auto sums = capacity_from_plants(l.plants);
    EXPECT_EQ(sums.at(Fuel::coal), 150.0);
    EXPECT_EQ(sums.at(Fuel::gas), 20.0);
}

TEST(CarbonPrice, AnnualMean) {
    std::istringstream constant("date,price\n2019-01-07,10\n2019-01-14,10\n2019-01-21,10\n");
    EXPECT_DOUBLE_EQ(annual_carbon_price(load_eua_prices(constant), 2019), 10.0);
    std::istringstream two("date,price\n2018-12-31,99\n2019-01-07,10\n2019-01-14,30\n");
    EXPECT_DOUBLE_EQ(annual_carbon_price(load_eua_prices(two), 2019), 20.0);
    std::istringstream none("date,price\n2018-01-07,10\n");
    EXPECT_THROW(annual_carbon_price(load_eua_prices(none), 2019), DataError);
}
