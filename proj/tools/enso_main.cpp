// Command-line driver: simulate / learn / latent-learn / assimilate /
// validate, each configured by one section of a JSON config file.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "enso/assimilation.hpp"
#include "enso/causal.hpp"
#include "enso/diagnostics.hpp"
#include "enso/estimation.hpp"
#include "enso/io.hpp"
#include "enso/latent.hpp"
#include "enso/library.hpp"
#include "enso/model.hpp"
#include "enso/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace enso;

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void log_info(const std::string& msg) {
  if (g_log_level >= 1) std::cerr << "[enso] " << msg << "\n";
}

// Unknown config keys are rejected so typos fail loudly.
void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + context);
}

SelectionPolicy parse_policy(const json& j, std::uint64_t seed) {
  if (j.is_null()) return BootstrapPolicy{100, 100, 0.99, seed};
  check_keys(j, {"type", "threshold", "n_shuffles", "block_len", "quantile"}, "policy");
  const std::string type = j.value("type", "bootstrap");
  if (type == "absolute") return AbsolutePolicy{j.value("threshold", 0.0)};
  if (type == "bootstrap")
    return BootstrapPolicy{j.value("n_shuffles", 100), j.value("block_len", 100),
                           j.value("quantile", 0.99), seed};
  throw ConfigError("policy type must be 'absolute' or 'bootstrap'");
}

std::map<std::string, NoiseSpec> parse_noise_overrides(const json& j,
                                                       const StateVarSet& vars) {
  std::map<std::string, NoiseSpec> overrides;
  if (j.is_null()) return overrides;
  for (const auto& [var, form] : j.items()) {
    const std::string kind = form.get<std::string>();
    if (kind == "wind") {
      const int tc = vars.index_of("TC");
      if (tc < 0) throw ConfigError("wind noise override needs a TC variable");
      overrides[var] = WindMultiplicativeNoise{0.8999, 4.5, 0.25, tc};
    } else if (kind == "decadal") {
      const int iv = vars.index_of(var);
      if (iv < 0) throw ConfigError("decadal override names unknown variable");
      overrides[var] = DecadalMultiplicativeNoise{2.0 / 60.0, 0.0, 4.0, iv};
    } else {
      throw ConfigError("noise override must be 'wind' or 'decadal'");
    }
  }
  return overrides;
}

Trajectory load_config_trajectory(const json& section, const fs::path& base) {
  const std::string csv = section.at("trajectory_csv").get<std::string>();
  const std::string sidecar = section.value("sidecar", "");
  const fs::path csv_path = fs::path(csv).is_absolute() ? fs::path(csv) : base / csv;
  fs::path sc;
  if (!sidecar.empty())
    sc = fs::path(sidecar).is_absolute() ? fs::path(sidecar) : base / sidecar;
  return load_trajectory_csv(csv_path.string(), sc.string());
}

// ---------------------------------------------------------------------------
int run_simulate(const json& section, std::uint64_t seed, const fs::path& out_dir) {
  check_keys(section,
             {"variant", "years", "burn_in_years", "dt", "output_stride",
              "calendar_offset_months", "initial_state", "output_prefix"},
             "simulate");
  const Variant variant = variant_from_name(section.at("variant").get<std::string>());
  const double years = section.at("years").get<double>();
  const double burn_in_years = section.value("burn_in_years", 10.0);

  SimConfig cfg;
  cfg.dt = section.value("dt", 0.01);
  cfg.burn_in = burn_in_years * 6.0;
  cfg.duration = cfg.burn_in + years * 6.0;
  cfg.output_stride =
      section.value("output_stride",
                    std::max(1, static_cast<int>(std::llround(kMonthNondim / cfg.dt))));
  cfg.seed = seed;
  cfg.calendar_offset_months =
      section.value("calendar_offset_months", kDefaultCalendarOffsetMonths);
  if (section.contains("initial_state")) {
    const auto v = section.at("initial_state").get<std::vector<double>>();
    cfg.initial_state = Eigen::Map<const Vector>(v.data(), v.size());
  }

  ModelSpec model = build_model(variant);
  Trajectory traj = integrate(model, cfg);

  // drop the sample at t = burn_in so rows = stored months exactly
  if (traj.n_samples() > 1) {
    Trajectory tail;
    tail.vars = traj.vars;
    tail.times.assign(traj.times.begin() + 1, traj.times.end());
    tail.values = traj.values.bottomRows(traj.n_samples() - 1);
    tail.calendar_offset_months = (traj.calendar_offset_months + 1) % 12;
    traj = std::move(tail);
  }

  const std::string prefix = section.value("output_prefix", "trajectory");
  const fs::path csv = out_dir / (prefix + ".csv");
  const fs::path meta = out_dir / (prefix + ".meta.json");
  write_trajectory_csv(traj, csv.string(), meta.string(), variant, cfg.dt, seed);
  log_info("wrote " + csv.string() + " (" + std::to_string(traj.n_samples()) + " rows)");
  return 0;
}

// ---------------------------------------------------------------------------
int run_learn(const json& section, std::uint64_t seed, const fs::path& out_dir,
              const fs::path& base) {
  check_keys(section,
             {"trajectory_csv", "sidecar", "variables", "seasonal", "policy",
              "keep_constant", "noise_overrides", "output_prefix"},
             "learn");
  Trajectory traj = load_config_trajectory(section, base);
  if (section.contains("variables"))
    traj = traj.select(StateVarSet(section.at("variables").get<std::vector<std::string>>()));

  const bool seasonal = section.value("seasonal", true);
  const bool keep_constant = section.value("keep_constant", true);
  const SelectionPolicy policy = parse_policy(section.value("policy", json()), seed);

  const FunctionLibrary library = build_library(traj.vars, seasonal);
  RegressionData data = make_regression_data(traj, library);
  log_info("library of " + std::to_string(library.size()) + " candidates over " +
           std::to_string(data.design.n_samples()) + " samples");
  LearnedStructure structure = learn_structure(data.derivs, data.design, policy, keep_constant);
  FitResult fit = mle_fit(structure.pattern, data.design, data.derivs);
  ModelSpec model =
      assemble(fit, parse_noise_overrides(section.value("noise_overrides", json()), traj.vars));

  const std::string prefix = section.value("output_prefix", "learned");
  save_model(model, (out_dir / (prefix + "_model.json")).string());
  write_text_file((out_dir / (prefix + "_fit.json")).string(), fit_to_json(fit));
  write_text_file((out_dir / (prefix + "_library.json")).string(),
                  library_manifest_json(library));
  write_cem_csv(structure.cem, &structure.pattern,
                (out_dir / (prefix + "_cem.csv")).string());
  log_info("selected " + std::to_string(structure.pattern.count()) + " terms");
  return 0;
}

// ---------------------------------------------------------------------------
int run_latent_learn(const json& section, std::uint64_t seed, const fs::path& out_dir,
                     const fs::path& base) {
  check_keys(section,
             {"trajectory_csv", "sidecar", "variables", "n_latent", "max_iters", "tol",
              "ensemble_size", "seasonal", "latent_noise", "policy", "output_prefix"},
             "latent_learn");
  Trajectory traj = load_config_trajectory(section, base);
  if (section.contains("variables"))
    traj = traj.select(StateVarSet(section.at("variables").get<std::vector<std::string>>()));

  LatentConfig cfg;
  cfg.n_latent = section.value("n_latent", 1);
  cfg.max_iters = section.value("max_iters", 20);
  cfg.tol = section.value("tol", 1e-2);
  cfg.ensemble_size = section.value("ensemble_size", 100);
  cfg.seasonal_library = section.value("seasonal", true);
  if (section.contains("latent_noise"))
    cfg.latent_noise = section.at("latent_noise").get<double>();
  const SelectionPolicy policy = parse_policy(section.value("policy", json()), seed);

  LatentLearnResult result = learn_with_latent(traj, cfg, policy, seed);
  IdentifiabilityReport report = identifiability_report(result);

  const std::string prefix = section.value("output_prefix", "latent");
  save_model(result.model, (out_dir / (prefix + "_model.json")).string());
  write_trajectory_csv(result.latent_samples, (out_dir / (prefix + "_samples.csv")).string(),
                       "", Variant::Custom, result.latent_samples.dt(), seed);

  // iteration trace CSV
  {
    std::ofstream trace((out_dir / (prefix + "_trace.csv")).string());
    trace << "iteration,parameter_change\n";
    for (std::size_t i = 0; i < result.iteration_trace.size(); ++i)
      trace << (i + 1) << "," << result.iteration_trace[i] << "\n";
  }
  json jr;
  jr["converged"] = result.converged;
  jr["iterations"] = result.iteration_trace.size() + 1;
  jr["latent_sample_std"] = report.latent_sample_std;
  json products = json::object();
  for (std::size_t i = 0; i < report.equations.size(); ++i)
    products[report.equations[i]] = report.products[i];
  jr["identifiable_products"] = products;
  write_text_file((out_dir / (prefix + "_report.json")).string(), jr.dump(2) + "\n");
  log_info(std::string("latent learning ") +
           (result.converged ? "converged" : "stopped at max_iters"));
  return 0;
}

// ---------------------------------------------------------------------------
int run_assimilate(const json& section, std::uint64_t seed, const fs::path& out_dir,
                   const fs::path& base) {
  check_keys(section,
             {"variant", "model_json", "trajectory_csv", "sidecar", "observed",
              "obs_noise_fraction", "obs_stride", "ensemble_size", "inflation",
              "output_prefix"},
             "assimilate");
  ModelSpec model;
  if (section.contains("model_json")) {
    const fs::path p = base / section.at("model_json").get<std::string>();
    model = load_model(p.string());
  } else {
    model = build_model(variant_from_name(section.at("variant").get<std::string>()));
  }
  Trajectory traj = load_config_trajectory(section, base);

  const auto observed = section.at("observed").get<std::vector<std::string>>();
  ObservationSet obs = observations_from_trajectory(
      traj, observed, section.value("obs_noise_fraction", 0.05),
      section.value("obs_stride", 1));
  SmootherOptions options;
  options.inflation = section.value("inflation", 1.02);

  PosteriorSeries post = enks_recover(model, obs, section.value("ensemble_size", 500),
                                      seed, options);

  const std::string prefix = section.value("output_prefix", "posterior");
  write_posterior_csv(post, (out_dir / (prefix + ".csv")).string());

  // correlation against the source trajectory where it carries the truth
  json scores = json::object();
  for (int j = 0; j < post.hidden_vars.size(); ++j) {
    const std::string& name = post.hidden_vars.name(j);
    if (traj.vars.index_of(name) < 0) continue;
    const Vector truth = traj.column(name);
    Vector recovered(post.mean.rows());
    for (long k = 0; k < post.mean.rows(); ++k) recovered[k] = post.mean(k, j);
    Vector truth_at_obs(post.mean.rows());
    const int stride = section.value("obs_stride", 1);
    for (long k = 0; k < post.mean.rows(); ++k) truth_at_obs[k] = truth[k * stride];
    scores[name] = correlation_score(recovered, truth_at_obs);
  }
  write_text_file((out_dir / (prefix + "_scores.json")).string(), scores.dump(2) + "\n");
  log_info("posterior written for " + std::to_string(post.hidden_vars.size()) +
           " hidden variables");
  return 0;
}

// ---------------------------------------------------------------------------
int run_validate(const json& section, std::uint64_t seed, const fs::path& out_dir,
                 const fs::path& base) {
  check_keys(section,
             {"variant", "model_json", "trajectory_csv", "sidecar", "years",
              "burn_in_years", "dt", "segment_years", "max_lag_months", "metrics",
              "index_csv", "climatology", "output_prefix"},
             "validate");
  json metrics = section.value("metrics", json::object());
  check_keys(metrics,
             {"seasonal_variance", "pdf", "acf", "moments", "events", "bivariate"},
             "validate.metrics");
  auto enabled = [&](const std::string& name) { return metrics.value(name, true); };

  // model trajectory: simulate or ingest
  Trajectory traj;
  if (section.contains("trajectory_csv")) {
    traj = load_config_trajectory(section, base);
  } else {
    ModelSpec model;
    if (section.contains("model_json"))
      model = load_model((base / section.at("model_json").get<std::string>()).string());
    else
      model = build_model(variant_from_name(section.value("variant", "Reference")));
    SimConfig cfg;
    cfg.dt = section.value("dt", 0.01);
    cfg.burn_in = section.value("burn_in_years", 100.0) * 6.0;
    cfg.duration = cfg.burn_in + section.value("years", 2000.0) * 6.0;
    cfg.output_stride = std::max(1, static_cast<int>(std::llround(kMonthNondim / cfg.dt)));
    cfg.seed = seed;
    traj = integrate(model, cfg);
    log_info("simulated " + std::to_string(section.value("years", 2000.0)) + " years");
  }

  const int segment_years = section.value("segment_years", 70);
  const int max_lag = section.value("max_lag_months", 60);

  MonthlySeries tc = remove_monthly_climatology(
      monthly_series_from_trajectory(traj, "TC", true));
  MonthlySeries te = remove_monthly_climatology(
      monthly_series_from_trajectory(traj, "TE", true));

  json report;
  report["segment_years"] = segment_years;

  if (enabled("seasonal_variance") || enabled("pdf") || enabled("acf") ||
      enabled("moments")) {
    for (const auto* s : {&tc, &te}) {
      LongRunStats stats = long_run_stats(*s, max_lag);
      json js;
      if (enabled("seasonal_variance")) {
        js["seasonal_variance"] = stats.seasonal_variance;
        int peak = 0;
        for (int m = 1; m < 12; ++m)
          if (stats.seasonal_variance[m] > stats.seasonal_variance[peak]) peak = m;
        js["seasonal_variance_peak_month"] = peak + 1;  // 1 = January
        std::ofstream f((out_dir / ("seasonal_variance_" + s->name + ".csv")).string());
        f << "month,variance\n";
        for (int m = 0; m < 12; ++m) f << (m + 1) << "," << stats.seasonal_variance[m] << "\n";
      }
      if (enabled("pdf")) {
        std::ofstream f((out_dir / ("pdf_" + s->name + ".csv")).string());
        f << "value,density\n";
        for (std::size_t g = 0; g < stats.pdf_grid.size(); ++g)
          f << stats.pdf_grid[g] << "," << stats.pdf_density[g] << "\n";
      }
      if (enabled("acf")) {
        js["acf"] = stats.acf;
        std::ofstream f((out_dir / ("acf_" + s->name + ".csv")).string());
        f << "lag_months,acf\n";
        for (std::size_t l = 0; l < stats.acf.size(); ++l) f << l << "," << stats.acf[l] << "\n";
      }
      if (enabled("moments")) {
        js["variance"] = stats.variance;
        js["skewness"] = stats.skewness;
        js["kurtosis"] = stats.kurtosis;
        // per-segment box statistics
        std::vector<double> vvar, vskew, vkurt;
        for (const auto& seg : segment_series(*s, segment_years)) {
          const MomentSet m = central_moments(seg.values);
          vvar.push_back(m.variance);
          vskew.push_back(m.skewness);
          vkurt.push_back(m.kurtosis);
        }
        if (!vvar.empty()) {
          js["segments"] = {
              {"variance", {{"median", percentile(vvar, 50)}, {"p5", percentile(vvar, 5)}, {"p95", percentile(vvar, 95)}}},
              {"skewness", {{"median", percentile(vskew, 50)}, {"p5", percentile(vskew, 5)}, {"p95", percentile(vskew, 95)}}},
              {"kurtosis", {{"median", percentile(vkurt, 50)}, {"p5", percentile(vkurt, 5)}, {"p95", percentile(vkurt, 95)}}}};
        }
      }
      report[s->name] = js;
    }
  }

  if (enabled("events") || enabled("bivariate")) {
    const auto tc_segments = segment_series(tc, segment_years);
    const auto te_segments = segment_series(te, segment_years);
    std::vector<EventCatalog> catalogs;
    for (std::size_t i = 0; i < tc_segments.size(); ++i)
      catalogs.push_back(classify_events(tc_segments[i], te_segments[i]));

    if (enabled("events")) {
      SegmentStats stats = occurrence_frequencies(catalogs, segment_years);
      json jevents;
      std::ofstream f((out_dir / "event_boxes.csv").string());
      f << "category,median,p5,p95\n";
      for (int j = 0; j < kEventCategories; ++j) {
        jevents[kEventCategoryNames[j]] = {{"median", stats.median[j]},
                                           {"p5", stats.p5[j]},
                                           {"p95", stats.p95[j]}};
        f << kEventCategoryNames[j] << "," << stats.median[j] << "," << stats.p5[j]
          << "," << stats.p95[j] << "\n";
      }

      // observational comparison from an ingested index CSV
      if (section.contains("index_csv")) {
        const fs::path p = base / section.at("index_csv").get<std::string>();
        IndexDataset ds = load_index_csv(p.string());
        YearRange span{ds.years.front(), ds.years.back()};
        if (section.contains("climatology")) {
          const json& c = section.at("climatology");
          check_keys(c, {"first", "last"}, "validate.climatology");
          span = {c.at("first").get<int>(), c.at("last").get<int>()};
        }
        IndexDataset anom = compute_anomalies(ds, span);
        EventCatalog obs_catalog =
            classify_events(monthly_series_from_dataset(anom, "nino4"),
                            monthly_series_from_dataset(anom, "nino3"));
        const double obs_counts[kEventCategories] = {
            static_cast<double>(obs_catalog.count_el_nino()),
            static_cast<double>(obs_catalog.count(EventKind::EP)),
            static_cast<double>(obs_catalog.count(EventKind::CP)),
            static_cast<double>(obs_catalog.count_extreme()),
            static_cast<double>(obs_catalog.count_multiyear_el_nino()),
            static_cast<double>(obs_catalog.count(EventKind::LaNina)),
            static_cast<double>(obs_catalog.count_multiyear_la_nina())};
        int within = 0;
        json jobs;
        for (int j = 0; j < kEventCategories; ++j) {
          // observed span may differ from segment length; scale to per-segment rate
          const double scale =
              static_cast<double>(segment_years) / obs_catalog.span_years;
          const double scaled = obs_counts[j] * scale;
          const bool in_box = scaled >= stats.p5[j] && scaled <= stats.p95[j];
          within += in_box;
          jobs[kEventCategoryNames[j]] = {{"count", obs_counts[j]},
                                          {"scaled_count", scaled},
                                          {"within_box", in_box}};
        }
        jevents["observed"] = jobs;
        jevents["observed_within_box"] = within;
      }
      report["events"] = jevents;
    }

    if (enabled("bivariate")) {
      const RegressionProfile profile = synthetic_regression_profile();
      std::vector<double> ep_amp, cp_amp;
      std::ofstream f((out_dir / "bivariate_points.csv").string());
      f << "segment,year,kind,peak_longitude,peak_amplitude\n";
      for (std::size_t i = 0; i < catalogs.size(); ++i) {
        for (const auto& p : bivariate_diagram(catalogs[i], profile)) {
          (p.kind == EventKind::EP ? ep_amp : cp_amp).push_back(p.peak_amplitude);
          f << i << "," << p.year << "," << (p.kind == EventKind::EP ? "EP" : "CP")
            << "," << p.peak_longitude << "," << p.peak_amplitude << "\n";
        }
      }
      json jb;
      if (!ep_amp.empty()) jb["ep_median_peak"] = percentile(ep_amp, 50);
      if (!cp_amp.empty()) jb["cp_median_peak"] = percentile(cp_amp, 50);
      jb["ep_events"] = ep_amp.size();
      jb["cp_events"] = cp_amp.size();
      report["bivariate"] = jb;
    }
  }

  const std::string prefix = section.value("output_prefix", "validation");
  write_text_file((out_dir / (prefix + "_report.json")).string(), report.dump(2) + "\n");
  log_info("validation report written");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic conceptual ENSO models: simulation, structure learning, "
               "assimilation, and validation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_override;
  int threads = 0;

  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--seed", seed_override, "Override the config seed");
  app.add_option("--out", out_override, "Output directory");
  app.add_option("--threads", threads, "Worker thread cap");

  auto* cmd_simulate = app.add_subcommand("simulate", "Integrate a catalog or custom model");
  auto* cmd_learn = app.add_subcommand("learn", "Causal structure discovery + MLE fit");
  auto* cmd_latent = app.add_subcommand("latent-learn", "Joint model + latent-series learning");
  auto* cmd_assim = app.add_subcommand("assimilate", "Ensemble Kalman smoother recovery");
  auto* cmd_validate = app.add_subcommand("validate", "Metric suite over a model or trajectory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) set_max_threads(threads);

    const json config = json::parse(read_text_file(config_path));
    check_keys(config,
               {"seed", "output_dir", "log_level", "threads", "simulate", "learn",
                "latent_learn", "assimilate", "validate"},
               "config");
    const std::string log_level = config.value("log_level", "info");
    g_log_level = log_level == "quiet" ? 0 : log_level == "debug" ? 2 : 1;
    if (threads == 0 && config.contains("threads"))
      set_max_threads(config.at("threads").get<int>());

    std::uint64_t seed = config.value("seed", 0ULL);
    if (seed_override) seed = *seed_override;

    fs::path out_dir = out_override.empty()
                           ? fs::path(config.value("output_dir", "."))
                           : fs::path(out_override);
    fs::create_directories(out_dir);
    const fs::path base = fs::path(config_path).parent_path();

    auto section = [&](const char* name) -> const json& {
      if (!config.contains(name))
        throw ConfigError(std::string("config lacks a '") + name + "' section");
      return config.at(name);
    };

    if (cmd_simulate->parsed()) return run_simulate(section("simulate"), seed, out_dir);
    if (cmd_learn->parsed()) return run_learn(section("learn"), seed, out_dir, base);
    if (cmd_latent->parsed())
      return run_latent_learn(section("latent_learn"), seed, out_dir, base);
    if (cmd_assim->parsed()) return run_assimilate(section("assimilate"), seed, out_dir, base);
    if (cmd_validate->parsed()) return run_validate(section("validate"), seed, out_dir, base);
    throw ConfigError("no subcommand");
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"type", typeid(e).name()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
