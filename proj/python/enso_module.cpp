#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "enso/assimilation.hpp"
#include "enso/causal.hpp"
#include "enso/diagnostics.hpp"
#include "enso/estimation.hpp"
#include "enso/io.hpp"
#include "enso/latent.hpp"
#include "enso/library.hpp"
#include "enso/model.hpp"
#include "enso/parallel.hpp"
#include "enso/stats.hpp"

namespace py = pybind11;
using namespace enso;

namespace {

Trajectory make_trajectory(const std::vector<std::string>& vars,
                           const std::vector<double>& times, const Matrix& values,
                           int calendar_offset_months) {
  Trajectory t;
  t.vars = StateVarSet(vars);
  t.times = times;
  t.values = values;
  t.calendar_offset_months = calendar_offset_months;
  if (t.values.rows() != static_cast<long>(t.times.size()) ||
      t.values.cols() != t.vars.size())
    throw DimensionError("values must be (len(times), len(vars))");
  return t;
}

}  // namespace

PYBIND11_MODULE(enso, m) {
  m.doc() = "Stochastic conceptual ENSO models: simulation, causal structure "
            "learning, ensemble smoothing, and validation metrics";

  py::register_exception<Error>(m, "EnsoError");

  // ---- model core ---------------------------------------------------------
  py::class_<StateVarSet>(m, "StateVarSet")
      .def(py::init<std::vector<std::string>>())
      .def_property_readonly("names", &StateVarSet::names)
      .def("index_of", &StateVarSet::index_of)
      .def("__len__", &StateVarSet::size)
      .def("__repr__", [](const StateVarSet& s) {
        std::string r = "StateVarSet([";
        for (int i = 0; i < s.size(); ++i) r += (i ? ", " : "") + s.name(i);
        return r + "])";
      });

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_property_readonly("vars", [](const ModelSpec& s) { return s.vars; })
      .def_property_readonly("variant", [](const ModelSpec& s) { return variant_name(s.variant_id); })
      .def("n_terms", [](const ModelSpec& s) {
        std::size_t n = 0;
        for (const auto& eq : s.equations) n += eq.size();
        return n;
      })
      .def("to_json", &model_to_json)
      .def("__repr__", [](const ModelSpec& s) {
        return "ModelSpec(" + variant_name(s.variant_id) + ", " +
               std::to_string(s.vars.size()) + " vars)";
      });

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init(&make_trajectory), py::arg("vars"), py::arg("times"),
           py::arg("values"), py::arg("calendar_offset_months") = kDefaultCalendarOffsetMonths)
      .def_property_readonly("vars", [](const Trajectory& t) { return t.vars; })
      .def_property_readonly("times", [](const Trajectory& t) { return t.times; })
      .def_property_readonly("values", [](const Trajectory& t) { return t.values; })
      .def_readonly("calendar_offset_months", &Trajectory::calendar_offset_months)
      .def("column", &Trajectory::column)
      .def("select", [](const Trajectory& t, const std::vector<std::string>& vars) {
        return t.select(StateVarSet(vars));
      })
      .def("__len__", &Trajectory::n_samples);

  m.def("build_model", [](const std::string& variant) {
    return build_model(variant_from_name(variant));
  });
  m.def("model_from_json", &model_from_json);
  m.def("drift", &drift, py::arg("model"), py::arg("state"), py::arg("t"));
  m.def("diffusion", &diffusion, py::arg("model"), py::arg("state"), py::arg("t"));
  m.def(
      "integrate",
      [](const ModelSpec& model, double dt, double duration, double burn_in,
         int output_stride, std::uint64_t seed, py::object initial_state,
         int calendar_offset_months) {
        SimConfig cfg;
        cfg.dt = dt;
        cfg.duration = duration;
        cfg.burn_in = burn_in;
        cfg.output_stride = output_stride;
        cfg.seed = seed;
        cfg.calendar_offset_months = calendar_offset_months;
        if (!initial_state.is_none()) cfg.initial_state = initial_state.cast<Vector>();
        return integrate(model, cfg);
      },
      py::arg("model"), py::arg("dt") = 0.01, py::arg("duration") = 60.0,
      py::arg("burn_in") = 0.0, py::arg("output_stride") = 50, py::arg("seed") = 0,
      py::arg("initial_state") = py::none(),
      py::arg("calendar_offset_months") = kDefaultCalendarOffsetMonths);
  m.def("convert_units", [](double value, const std::string& quantity, bool to_nondim) {
    return convert_units(value, quantity_from_name(quantity),
                         to_nondim ? UnitDirection::ToNonDim : UnitDirection::ToPhysical);
  }, py::arg("value"), py::arg("quantity"), py::arg("to_nondim") = true);

  // ---- function library ---------------------------------------------------
  py::class_<FunctionLibrary>(m, "FunctionLibrary")
      .def_property_readonly("labels", [](const FunctionLibrary& lib) {
        std::vector<std::string> out;
        for (int i = 0; i < lib.size(); ++i) out.push_back(lib.label(i));
        return out;
      })
      .def("__len__", &FunctionLibrary::size)
      .def("manifest_json", &library_manifest_json);

  py::class_<DesignMatrix>(m, "DesignMatrix")
      .def_property_readonly("values", [](const DesignMatrix& d) { return d.values; })
      .def_property_readonly("library", [](const DesignMatrix& d) { return d.library; })
      .def_property_readonly("times", [](const DesignMatrix& d) { return d.times; });

  py::class_<DerivativeSeries>(m, "DerivativeSeries")
      .def_property_readonly("values", [](const DerivativeSeries& d) { return d.values; })
      .def_property_readonly("times", [](const DerivativeSeries& d) { return d.times; });

  m.def("build_library", [](const std::vector<std::string>& vars, bool seasonal) {
    return build_library(StateVarSet(vars), seasonal);
  }, py::arg("vars"), py::arg("seasonal") = false);
  m.def("evaluate_library", &evaluate_library);
  m.def("estimate_derivatives", &estimate_derivatives);

  // ---- causal inference ---------------------------------------------------
  py::class_<AbsolutePolicy>(m, "AbsolutePolicy").def(py::init<double>(), py::arg("threshold") = 0.0);
  py::class_<BootstrapPolicy>(m, "BootstrapPolicy")
      .def(py::init([](int n_shuffles, int block_len, double quantile, std::uint64_t seed) {
             return BootstrapPolicy{n_shuffles, block_len, quantile, seed};
           }),
           py::arg("n_shuffles") = 100, py::arg("block_len") = 100,
           py::arg("quantile") = 0.99, py::arg("seed") = 0);

  py::class_<StructurePattern>(m, "StructurePattern")
      .def_property_readonly("mask", [](const StructurePattern& p) {
        Eigen::MatrixXi m = p.mask.cast<int>();
        return m;
      })
      .def("count", &StructurePattern::count);

  py::class_<CausationEntropyMatrix>(m, "CausationEntropyMatrix")
      .def_property_readonly("values", [](const CausationEntropyMatrix& c) { return c.values; })
      .def_property_readonly("library", [](const CausationEntropyMatrix& c) { return c.library; })
      .def_property_readonly("equation_names",
                             [](const CausationEntropyMatrix& c) { return c.equation_names; })
      .def_readonly("negatives_clipped", &CausationEntropyMatrix::negatives_clipped);

  py::class_<LearnedStructure>(m, "LearnedStructure")
      .def_readonly("cem", &LearnedStructure::cem)
      .def_readonly("pattern", &LearnedStructure::pattern);

  m.def("gaussian_causation_entropy", &gaussian_causation_entropy, py::arg("x"),
        py::arg("Y"), py::arg("z"));
  m.def("causation_entropy_matrix", &causation_entropy_matrix);
  m.def(
      "learn_structure",
      [](const DerivativeSeries& derivs, const DesignMatrix& design, py::object policy,
         bool keep_constant) {
        SelectionPolicy p = AbsolutePolicy{0.0};
        if (py::isinstance<BootstrapPolicy>(policy)) p = policy.cast<BootstrapPolicy>();
        else if (py::isinstance<AbsolutePolicy>(policy)) p = policy.cast<AbsolutePolicy>();
        else if (!policy.is_none()) throw ConfigError("policy must be AbsolutePolicy or BootstrapPolicy");
        else p = BootstrapPolicy{};
        return learn_structure(derivs, design, p, keep_constant);
      },
      py::arg("derivs"), py::arg("design"), py::arg("policy") = py::none(),
      py::arg("keep_constant") = true);

  // ---- estimation ---------------------------------------------------------
  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("noise_sigmas", [](const FitResult& f) { return f.noise_sigmas; })
      .def_property_readonly("residual_rms", [](const FitResult& f) { return f.residual_rms; })
      .def("coefficient_of", &FitResult::coefficient_of)
      .def("coefficients", [](const FitResult& f) {
        py::dict out;
        for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
          py::dict eq;
          for (const auto& [entry, coeff] : f.coefficients[i])
            eq[py::str(f.library.label(entry))] = coeff;
          out[py::str(f.equation_vars.name(static_cast<int>(i)))] = eq;
        }
        return out;
      })
      .def("to_json", &fit_to_json);

  py::class_<RegressionData>(m, "RegressionData")
      .def_readonly("design", &RegressionData::design)
      .def_readonly("derivs", &RegressionData::derivs);

  m.def("make_regression_data", &make_regression_data);
  m.def("mle_fit", &mle_fit);
  m.def("estimate_noise", &estimate_noise);
  m.def(
      "assemble",
      [](const FitResult& fit, py::dict overrides) {
        std::map<std::string, NoiseSpec> ov;
        const StateVarSet& vars = fit.library.vars;
        for (const auto& [k, v] : overrides) {
          const auto name = k.cast<std::string>();
          const auto kind = v.cast<std::string>();
          if (kind == "wind")
            ov[name] = WindMultiplicativeNoise{0.8999, 4.5, 0.25, vars.index_of("TC")};
          else if (kind == "decadal")
            ov[name] = DecadalMultiplicativeNoise{2.0 / 60.0, 0.0, 4.0, vars.index_of(name)};
          else
            throw ConfigError("override must be 'wind' or 'decadal'");
        }
        return assemble(fit, ov);
      },
      py::arg("fit"), py::arg("noise_overrides") = py::dict());

  // ---- assimilation -------------------------------------------------------
  py::class_<ObservationSet>(m, "ObservationSet")
      .def_property_readonly("times", [](const ObservationSet& o) { return o.times; })
      .def_property_readonly("series", [](const ObservationSet& o) { return o.series; });

  py::class_<PosteriorSeries>(m, "PosteriorSeries")
      .def_property_readonly("hidden_vars", [](const PosteriorSeries& p) { return p.hidden_vars; })
      .def_property_readonly("times", [](const PosteriorSeries& p) { return p.times; })
      .def_property_readonly("mean", [](const PosteriorSeries& p) { return p.mean; })
      .def_property_readonly("std", [](const PosteriorSeries& p) { return p.std; });

  m.def("observations_from_trajectory", &observations_from_trajectory, py::arg("traj"),
        py::arg("observed"), py::arg("noise_fraction") = 0.05, py::arg("stride") = 1);
  m.def(
      "enks_recover",
      [](const ModelSpec& model, const ObservationSet& obs, int ensemble_size,
         std::uint64_t seed, double inner_dt, double inflation) {
        SmootherOptions opt;
        opt.inner_dt = inner_dt;
        opt.inflation = inflation;
        return enks_recover(model, obs, ensemble_size, seed, opt);
      },
      py::arg("model"), py::arg("obs"), py::arg("ensemble_size") = 100,
      py::arg("seed") = 0, py::arg("inner_dt") = 0.01, py::arg("inflation") = 1.02);
  m.def(
      "conditional_sample",
      [](const ModelSpec& model, const ObservationSet& obs,
         const std::vector<std::string>& hidden, int n_samples, std::uint64_t seed,
         int ensemble_size) {
        SmootherOptions opt;
        opt.ensemble_size = ensemble_size;
        return conditional_sample(model, obs, StateVarSet(hidden), n_samples, seed, opt);
      },
      py::arg("model"), py::arg("obs"), py::arg("hidden_vars"), py::arg("n_samples") = 1,
      py::arg("seed") = 0, py::arg("ensemble_size") = 100);
  m.def("correlation_score", &correlation_score);

  // ---- latent learning ----------------------------------------------------
  py::class_<LatentLearnResult>(m, "LatentLearnResult")
      .def_readonly("model", &LatentLearnResult::model)
      .def_readonly("converged", &LatentLearnResult::converged)
      .def_readonly("iteration_trace", &LatentLearnResult::iteration_trace)
      .def_property_readonly("latent_samples",
                             [](const LatentLearnResult& r) { return r.latent_samples; })
      .def_readonly("pattern", &LatentLearnResult::pattern)
      .def_readonly("fit", &LatentLearnResult::fit);

  py::class_<IdentifiabilityReport>(m, "IdentifiabilityReport")
      .def_readonly("equations", &IdentifiabilityReport::equations)
      .def_readonly("products", &IdentifiabilityReport::products)
      .def_readonly("latent_sample_std", &IdentifiabilityReport::latent_sample_std);

  m.def(
      "learn_with_latent",
      [](const Trajectory& obs_traj, int n_latent, int max_iters, double tol,
         int ensemble_size, bool seasonal, py::object policy, std::uint64_t seed) {
        LatentConfig cfg;
        cfg.n_latent = n_latent;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.ensemble_size = ensemble_size;
        cfg.seasonal_library = seasonal;
        SelectionPolicy p = BootstrapPolicy{};
        if (py::isinstance<BootstrapPolicy>(policy)) p = policy.cast<BootstrapPolicy>();
        else if (py::isinstance<AbsolutePolicy>(policy)) p = policy.cast<AbsolutePolicy>();
        return learn_with_latent(obs_traj, cfg, p, seed);
      },
      py::arg("obs_traj"), py::arg("n_latent") = 1, py::arg("max_iters") = 20,
      py::arg("tol") = 1e-2, py::arg("ensemble_size") = 100, py::arg("seasonal") = true,
      py::arg("policy") = py::none(), py::arg("seed") = 0);
  m.def("identifiability_report", &identifiability_report);

  // ---- diagnostics --------------------------------------------------------
  py::class_<MonthlySeries>(m, "MonthlySeries")
      .def(py::init([](std::vector<double> values, int start_month, int start_year,
                       const std::string& name, bool celsius) {
             MonthlySeries s;
             s.values = std::move(values);
             s.start_month = start_month;
             s.start_year = start_year;
             s.name = name;
             s.celsius = celsius;
             return s;
           }),
           py::arg("values"), py::arg("start_month") = 0, py::arg("start_year") = 0,
           py::arg("name") = "", py::arg("celsius") = false)
      .def_readonly("values", &MonthlySeries::values)
      .def_readonly("start_month", &MonthlySeries::start_month)
      .def_readonly("start_year", &MonthlySeries::start_year)
      .def_readonly("celsius", &MonthlySeries::celsius)
      .def("__len__", &MonthlySeries::n_months);

  py::enum_<EventKind>(m, "EventKind")
      .value("EP", EventKind::EP)
      .value("CP", EventKind::CP)
      .value("LaNina", EventKind::LaNina);

  py::class_<Event>(m, "Event")
      .def_readonly("year", &Event::year)
      .def_readonly("kind", &Event::kind)
      .def_readonly("djf_tc", &Event::djf_tc)
      .def_readonly("djf_te", &Event::djf_te)
      .def_readonly("extreme", &Event::extreme)
      .def_readonly("multiyear_id", &Event::multiyear_id);

  py::class_<EventCatalog>(m, "EventCatalog")
      .def_readonly("events", &EventCatalog::events)
      .def_readonly("span_years", &EventCatalog::span_years)
      .def("count_el_nino", &EventCatalog::count_el_nino)
      .def("count_extreme", &EventCatalog::count_extreme)
      .def("count_multiyear_el_nino", &EventCatalog::count_multiyear_el_nino)
      .def("count_multiyear_la_nina", &EventCatalog::count_multiyear_la_nina);

  py::class_<SegmentStats>(m, "SegmentStats")
      .def_property_readonly("counts", [](const SegmentStats& s) { return s.counts; })
      .def_property_readonly("median", [](const SegmentStats& s) { return s.median; })
      .def_property_readonly("p5", [](const SegmentStats& s) { return s.p5; })
      .def_property_readonly("p95", [](const SegmentStats& s) { return s.p95; });

  py::class_<LongRunStats>(m, "LongRunStats")
      .def_readonly("seasonal_variance", &LongRunStats::seasonal_variance)
      .def_readonly("pdf_grid", &LongRunStats::pdf_grid)
      .def_readonly("pdf_density", &LongRunStats::pdf_density)
      .def_readonly("acf", &LongRunStats::acf)
      .def_readonly("variance", &LongRunStats::variance)
      .def_readonly("skewness", &LongRunStats::skewness)
      .def_readonly("kurtosis", &LongRunStats::kurtosis);

  py::class_<RegressionProfile>(m, "RegressionProfile")
      .def_readonly("longitudes", &RegressionProfile::longitudes)
      .def_readonly("r_c", &RegressionProfile::r_c)
      .def_readonly("r_e", &RegressionProfile::r_e);

  py::class_<BivariatePoint>(m, "BivariatePoint")
      .def_readonly("year", &BivariatePoint::year)
      .def_readonly("kind", &BivariatePoint::kind)
      .def_readonly("peak_longitude", &BivariatePoint::peak_longitude)
      .def_readonly("peak_amplitude", &BivariatePoint::peak_amplitude);

  m.def("monthly_series_from_trajectory", &monthly_series_from_trajectory,
        py::arg("traj"), py::arg("var"), py::arg("to_celsius") = true);
  m.def("remove_monthly_climatology", &remove_monthly_climatology);
  m.def("segment_series", &segment_series, py::arg("series"), py::arg("years") = 70);
  m.def("classify_events", &classify_events);
  m.def("occurrence_frequencies", &occurrence_frequencies, py::arg("catalogs"),
        py::arg("required_years") = 70);
  m.def("long_run_stats", &long_run_stats, py::arg("series"), py::arg("max_lag_months") = 60);
  m.def("regression_profile", &regression_profile);
  m.def("synthetic_regression_profile", &synthetic_regression_profile);
  m.def("bivariate_diagram", &bivariate_diagram);

  // ---- io -----------------------------------------------------------------
  py::class_<IndexDataset>(m, "IndexDataset")
      .def_readonly("years", &IndexDataset::years)
      .def_readonly("months", &IndexDataset::months)
      .def_readonly("columns", &IndexDataset::columns)
      .def("__len__", &IndexDataset::n_rows);

  m.def("load_index_csv", &load_index_csv);
  m.def("compute_anomalies", [](const IndexDataset& ds, int first, int last) {
    return compute_anomalies(ds, YearRange{first, last});
  });
  m.def("to_model_units", &to_model_units);
  m.def("monthly_series_from_dataset", &monthly_series_from_dataset);
  m.def("save_model", &save_model);
  m.def("load_model", &load_model);
  m.def("write_trajectory_csv", [](const Trajectory& t, const std::string& csv,
                                   const std::string& sidecar) {
    write_trajectory_csv(t, csv, sidecar, Variant::Custom, t.dt(), 0);
  }, py::arg("traj"), py::arg("csv_path"), py::arg("sidecar_path") = "");
  m.def("load_trajectory_csv", &load_trajectory_csv, py::arg("csv_path"),
        py::arg("sidecar_path") = "");

  m.def("set_max_threads", &set_max_threads);
  m.attr("__version__") = "0.1.0";
  m.attr("DEFAULT_CALENDAR_OFFSET_MONTHS") = kDefaultCalendarOffsetMonths;
}
