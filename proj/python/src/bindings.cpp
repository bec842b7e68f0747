#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "cefsim/analysis.hpp"
#include "cefsim/dispatch.hpp"
#include "cefsim/error.hpp"
#include "cefsim/loadshift.hpp"
#include "cefsim/merit_order.hpp"
#include "cefsim/pipeline.hpp"

namespace py = pybind11;
using namespace cefsim;

namespace {

Fuel fuel_arg(const std::string& name) {
    const auto f = fuel_from_string(name);
    if (!f) throw ConfigError("unknown fuel '" + name + "'");
    return *f;
}

Method method_arg(const std::string& name) {
    const auto m = method_from_string(name);
    if (!m) throw ConfigError("unknown method '" + name + "'");
    return *m;
}

Driver driver_arg(const std::string& name) {
    const auto d = driver_from_string(name);
    if (!d) throw ConfigError("unknown driver '" + name + "'");
    return *d;
}

Weighting weighting_arg(const std::string& name) {
    if (name == "capacity") return Weighting::capacity;
    if (name == "plant") return Weighting::plant;
    throw ConfigError("unknown weighting '" + name + "'");
}

py::object optional_float(const std::optional<double>& v) {
    return v ? py::object(py::float_(*v)) : py::none();
}

FuelParams fuel_params_arg(const std::map<std::string, std::pair<double, double>>& table) {
    FuelParams p;
    for (const auto& [name, v] : table) p.set(fuel_arg(name), {v.first, v.second});
    return p;
}

py::dict block_dict(const DispatchBlock& b) {
    py::dict d;
    d["id"] = b.id;
    d["fuel"] = std::string(to_string(b.fuel));
    d["capacity_mw"] = b.capacity_mw;
    d["cumulative_mw"] = b.cumulative_mw;
    d["efficiency"] = b.efficiency;
    d["marginal_cost"] = b.marginal_cost;
    d["emission_intensity"] = b.emission_intensity;
    return d;
}

template <class F>
py::array_t<double> column(const CefSeries& s, F get) {
    py::array_t<double> out(static_cast<py::ssize_t>(s.size()));
    auto view = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < s.size(); ++i) view(static_cast<py::ssize_t>(i)) = get(s.records[i]);
    return out;
}

py::dict report_dict(const ShiftReport& r) {
    py::dict d;
    d["driver"] = r.driver ? py::object(py::str(std::string(to_string(*r.driver)))) : py::none();
    d["dc_pct"] = optional_float(r.dc_pct);
    d["dxe_pct"] = optional_float(r.dxe_pct);
    d["dme_pct"] = optional_float(r.dme_pct);
    d["n_events"] = r.events.size();
    d["skipped_days"] = r.skipped_days;
    d["zero_spread_days"] = r.zero_spread_days;
    py::dict pairs;
    for (const auto& [k, n] : r.fuel_pairs) {
        pairs[py::str(std::string(to_string(k.first)) + "=>" + std::string(to_string(k.second)))] = n;
    }
    d["fuel_pairs"] = pairs;
    py::list events;
    for (const auto& e : r.events) {
        py::dict ev;
        ev["date"] = format_date(e.event.date);
        ev["source_hour"] = e.event.source_hour;
        ev["sink_hour"] = e.event.sink_hour;
        ev["d_price"] = e.sink_price - e.source_price;
        ev["d_xef"] = e.sink_xef - e.source_xef;
        ev["d_mef"] = e.sink_mef - e.source_mef;
        events.append(ev);
    }
    d["events"] = events;
    return d;
}

py::dict validation_dict(const ValidationReport& v) {
    py::dict d;
    auto put = [&](const char* name, const ErrorStat& s) {
        py::dict e;
        e["value_pct"] = s.value_pct;
        e["used"] = s.used;
        e["excluded"] = s.excluded;
        d[name] = e;
    };
    put("mo_cost", v.mo_cost);
    put("mo_emission", v.mo_emission);
    put("price", v.price);
    put("mef", v.mef);
    put("xef", v.xef);
    put("mean_price", v.mean_price);
    put("mean_mef", v.mean_mef);
    put("mean_xef", v.mean_xef);
    return d;
}

py::dict curve_dict(const SweepCurve& c) {
    py::dict d;
    d["carbon_prices"] = c.carbon_prices;
    py::list r;
    for (const auto& v : c.r) r.append(optional_float(v));
    d["r"] = r;
    d["zero_crossing"] = optional_float(c.zero_crossing);
    return d;
}

struct PyWorkspace {
    Workspace ws;
    PyWorkspace(const std::filesystem::path& dir, const std::string& config) : ws(dir, Settings::load(config)) {}
};

}  // namespace

PYBIND11_MODULE(_cefsim, m) {
    m.doc() = "Carbon emission factors from merit-order dispatch";
    m.attr("DEFAULT_CONFIG") = CEFSIM_DEFAULT_CONFIG;

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    static py::exception<ParseError> parse(m, "ParseError", base.ptr());
    static py::exception<DataError> data(m, "DataError", base.ptr());
    static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::set_error(parse, e.what());
        } catch (const DataError& e) {
            py::set_error(data, e.what());
        } catch (const ConfigError& e) {
            py::set_error(config, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<MeritOrder>(m, "MeritOrder")
        .def_static(
            "from_blocks",
            [](const std::vector<py::dict>& rows) {
                std::vector<DispatchBlock> blocks;
                for (const auto& r : rows) {
                    DispatchBlock b;
                    b.id = r.contains("id") ? r["id"].cast<std::string>() : "b" + std::to_string(blocks.size());
                    b.fuel = fuel_arg(r["fuel"].cast<std::string>());
                    b.capacity_mw = r["capacity_mw"].cast<double>();
                    if (r.contains("efficiency")) b.efficiency = r["efficiency"].cast<double>();
                    b.marginal_cost = r["marginal_cost"].cast<double>();
                    b.emission_intensity = r["emission_intensity"].cast<double>();
                    blocks.push_back(std::move(b));
                }
                return MeritOrder::from_blocks(std::move(blocks));
            },
            py::arg("blocks"))
        .def_static(
            "from_plants",
            [](const std::vector<py::dict>& rows, const std::map<std::string, std::pair<double, double>>& params,
               double carbon_price) {
                std::vector<PowerPlant> plants;
                for (const auto& r : rows) {
                    PowerPlant p;
                    p.id = r.contains("id") ? r["id"].cast<std::string>() : "p" + std::to_string(plants.size());
                    p.fuel = fuel_arg(r["fuel"].cast<std::string>());
                    p.capacity_mw = r["capacity_mw"].cast<double>();
                    p.efficiency = r["efficiency"].cast<double>();
                    plants.push_back(std::move(p));
                }
                return build_merit_order_pp(plants, fuel_params_arg(params), carbon_price);
            },
            py::arg("plants"), py::arg("fuel_params"), py::arg("carbon_price"),
            "fuel_params maps fuel name to (emission t/MWh_fuel, price EUR/MWh_fuel).")
        .def("__len__", &MeritOrder::size)
        .def_property_readonly("total_capacity", &MeritOrder::total_capacity)
        .def_property_readonly("blocks",
                               [](const MeritOrder& o) {
                                   py::list out;
                                   for (const auto& b : o.blocks()) out.append(block_dict(b));
                                   return out;
                               })
        .def_property_readonly("notes", [](const MeritOrder& o) { return o.provenance().notes; })
        .def(
            "correlation",
            [](const MeritOrder& o, const std::string& weighting, double element_mw) {
                return optional_float(merit_order_correlation(o, weighting_arg(weighting), element_mw).r);
            },
            py::arg("weighting") = "capacity", py::arg("element_mw") = 10.0)
        .def("marginal_block",
             [](const MeritOrder& o, double residual_mw) {
                 const auto b = marginal_block(o, residual_mw);
                 return py::make_tuple(b.index, b.saturated);
             })
        .def("to_csv", [](const MeritOrder& o) {
            std::ostringstream out;
            write_merit_order_csv(out, o);
            return out.str();
        });

    py::class_<CefSeries>(m, "CefSeries")
        .def_readonly("country", &CefSeries::country)
        .def_readonly("year", &CefSeries::year)
        .def_readonly("carbon_price", &CefSeries::carbon_price)
        .def("__len__", &CefSeries::size)
        .def_property_readonly("timestamps",
                               [](const CefSeries& s) {
                                   std::vector<std::string> out;
                                   for (const auto& r : s.records) out.push_back(format_timestamp(r.time));
                                   return out;
                               })
        .def_property_readonly("marginal_fuel",
                               [](const CefSeries& s) {
                                   std::vector<std::string> out;
                                   for (const auto& r : s.records) out.emplace_back(to_string(r.marginal_fuel));
                                   return out;
                               })
        .def_property_readonly("residual_mw",
                               [](const CefSeries& s) { return column(s, [](const CefRecord& r) { return r.residual_mw; }); })
        .def_property_readonly("marginal_cost",
                               [](const CefSeries& s) { return column(s, [](const CefRecord& r) { return r.marginal_cost; }); })
        .def_property_readonly("mef", [](const CefSeries& s) { return column(s, [](const CefRecord& r) { return r.mef; }); })
        .def_property_readonly("xef",
                               [](const CefSeries& s) {
                                   return column(s, [](const CefRecord& r) {
                                       return r.xef.value_or(std::numeric_limits<double>::quiet_NaN());
                                   });
                               })
        .def_property_readonly("saturated_hours", &CefSeries::saturated_hours)
        .def_property_readonly("invalid_xef_hours", &CefSeries::invalid_xef_hours)
        .def("to_csv", [](const CefSeries& s) {
            std::ostringstream out;
            write_cef_csv(out, s);
            return out.str();
        });

    m.def(
        "compute_cef",
        [](const MeritOrder& order, const std::map<std::string, std::vector<double>>& generation, int year,
           double transmission_efficiency, double carbon_price) {
            GenerationSeries g;
            g.year = year;
            std::size_t n = 0;
            for (const auto& [name, values] : generation) {
                if (n && values.size() != n) throw DataError("generation columns differ in length");
                n = values.size();
                auto& col = g.columns[fuel_arg(name)];
                for (double v : values) {
                    col.push_back(std::isfinite(v) ? std::optional<double>(v) : std::nullopt);
                }
            }
            for (std::size_t t = 0; t < n; ++t) g.index.push_back(year_start(year) + std::chrono::hours(t));
            ScenarioConfig config;
            config.year = year;
            config.transmission_efficiency = transmission_efficiency;
            config.carbon_price = carbon_price;
            return compute_cef_series(order, g, config);
        },
        py::arg("order"), py::arg("generation"), py::arg("year") = 2019, py::arg("transmission_efficiency") = 1.0,
        py::arg("carbon_price") = 0.0,
        "Hourly emission factors. `generation` maps fuel names to hourly MW values starting on 1 January.");

    m.def(
        "shift_study",
        [](const CefSeries& cef, const std::string& driver, double kwh) {
            return report_dict(run_shift_study(cef, driver_arg(driver), kwh));
        },
        py::arg("cef"), py::arg("driver") = "price", py::arg("shifted_kwh") = 1.0);

    m.def(
        "spearman",
        [](const std::vector<double>& x, const std::vector<double>& y) { return optional_float(spearman(x, y).r); },
        py::arg("x"), py::arg("y"));

    m.def(
        "validation_errors",
        [](const MeritOrder& ref_order, const CefSeries& ref_cef, const MeritOrder& cand_order,
           const CefSeries& cand_cef, double element_mw) {
            return validation_dict(validation_errors({ref_order, ref_cef}, {cand_order, cand_cef}, element_mw));
        },
        py::arg("reference_order"), py::arg("reference_cef"), py::arg("candidate_order"), py::arg("candidate_cef"),
        py::arg("element_mw") = 10.0);

    m.def("parse_grid", &parse_grid, py::arg("text"));

    m.def(
        "ingest",
        [](const std::filesystem::path& data_dir, const std::filesystem::path& out_dir, const std::string& config) {
            const auto report = ingest_directory(data_dir, out_dir, Settings::load(config));
            py::dict d;
            d["outputs"] = report.outputs;
            d["warnings"] = report.warnings;
            return d;
        },
        py::arg("data_dir"), py::arg("out_dir"), py::arg("config"));

    py::class_<PyWorkspace>(m, "Workspace")
        .def(py::init<const std::filesystem::path&, const std::string&>(), py::arg("data_dir"), py::arg("config"))
        .def(
            "discover",
            [](const PyWorkspace& w, const std::string& method) {
                std::vector<std::string> out;
                for (const auto& k : w.ws.discover(method_arg(method))) {
                    out.push_back(k.country + ":" + std::to_string(k.year) + ":" + std::string(to_string(k.method)));
                }
                return out;
            },
            py::arg("method") = "PWL")
        .def(
            "run",
            [](const PyWorkspace& w, const std::string& scenario, std::optional<double> carbon_price) {
                py::gil_scoped_release release;
                auto result = run_scenario(w.ws, parse_scenario_key(scenario), carbon_price);
                return std::make_pair(std::move(result.order), std::move(result.cef));
            },
            py::arg("scenario"), py::arg("carbon_price") = py::none(),
            "Returns (MeritOrder, CefSeries) for 'CC:YYYY[:METHOD]'.")
        .def(
            "sweep",
            [](const PyWorkspace& w, const std::string& scenario, const std::string& grid,
               const std::string& weighting, unsigned jobs) {
                const auto key = parse_scenario_key(scenario);
                const auto config = w.ws.scenario(key);
                const auto points = parse_grid(grid);
                py::gil_scoped_release release;
                const auto curve = carbon_price_sweep(w.ws.factory(key, config), points, weighting_arg(weighting),
                                                      w.ws.settings().element_mw, 0.01, jobs);
                py::gil_scoped_acquire acquire;
                return curve_dict(curve);
            },
            py::arg("scenario"), py::arg("grid") = "0:300:5", py::arg("weighting") = "capacity", py::arg("jobs") = 1);
}
