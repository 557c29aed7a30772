#include "enso/latent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "enso/rng.hpp"

namespace enso {

namespace {

std::vector<std::string> latent_names(int n_latent) {
  std::vector<std::string> names;
  for (int j = 0; j < n_latent; ++j)
    names.push_back("latent_" + std::to_string(j + 1));
  return names;
}

double column_std(const Vector& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().mean());
}

// Rescales the latent variables of `model` so each has unit stationary
// variance under its own damped-linear equation; couplings scale inversely.
// Returns the scale factors applied to each latent (old amplitude).
std::vector<double> normalize_latent_scale(ModelSpec& model,
                                           const std::vector<int>& latent_idx) {
  std::vector<double> scales;
  for (int lv : latent_idx) {
    double damping = 0.0, sigma = 0.0;
    for (const auto& term : model.equations[lv]) {
      const auto& exps = term.monomial.exponents();
      if (exps.size() == 1 && exps[0].first == lv && exps[0].second == 1 &&
          term.seasonal == Seasonal::Constant)
        damping = term.coefficient;
    }
    if (const auto* a = std::get_if<AdditiveNoise>(&model.noise[lv])) sigma = a->sigma;
    double scale = 1.0;
    if (damping < 0.0 && sigma > 0.0) scale = sigma / std::sqrt(-2.0 * damping);
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
    scales.push_back(scale);

    // latent* = latent / scale: terms with latent power p gain scale^p, and
    // the latent equation itself is divided by scale.
    for (int eq = 0; eq < model.vars.size(); ++eq) {
      for (auto& term : model.equations[eq]) {
        int p = 0;
        for (const auto& [v, pow] : term.monomial.exponents())
          if (v == lv) p = pow;
        term.coefficient *= std::pow(scale, p);
        if (eq == lv) term.coefficient /= scale;
      }
      if (eq == lv) {
        if (auto* a = std::get_if<AdditiveNoise>(&model.noise[eq])) a->sigma /= scale;
      }
    }
  }
  return scales;
}

Vector flatten_fit(const FitResult& fit, int M) {
  Vector theta = Vector::Zero(static_cast<long>(fit.coefficients.size()) * M);
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i)
    for (const auto& [entry, coeff] : fit.coefficients[i])
      theta[static_cast<long>(i) * M + entry] = coeff;
  return theta;
}

}  // namespace

FunctionLibrary build_latent_library(const StateVarSet& observed, int n_latent,
                                     bool seasonal) {
  std::vector<std::string> all = observed.names();
  for (const auto& n : latent_names(n_latent)) all.push_back(n);
  const StateVarSet full(all);

  // observed-only entries, remapped onto the augmented variable set
  FunctionLibrary base = build_library(observed, seasonal);
  std::vector<int> map(observed.size());
  for (int v = 0; v < observed.size(); ++v) map[v] = full.index_of(observed.name(v));

  FunctionLibrary lib;
  lib.vars = full;
  for (const auto& e : base.entries)
    lib.entries.push_back({e.monomial.remapped(map), e.seasonal});

  for (int j = 0; j < n_latent; ++j) {
    const int lv = observed.size() + j;
    lib.entries.push_back({Monomial::linear(lv), Seasonal::Constant});
    for (int v = 0; v < observed.size(); ++v)
      lib.entries.push_back({Monomial({{map[v], 1}, {lv, 1}}), Seasonal::Constant});
  }
  return lib;
}

LatentLearnResult learn_with_latent(const Trajectory& obs_traj,
                                    const LatentConfig& config,
                                    const SelectionPolicy& policy,
                                    std::uint64_t seed) {
  if (config.n_latent < 1) throw ConfigError("n_latent must be >= 1");
  if (config.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(config.tol > 0.0)) throw ConfigError("tol must be > 0");

  const StateVarSet observed = obs_traj.vars;
  const int n_obs = observed.size();
  const int n_lat = config.n_latent;
  const int N = obs_traj.n_samples();
  const auto lat_names = latent_names(n_lat);

  std::vector<std::string> full_names = observed.names();
  for (const auto& nm : lat_names) full_names.push_back(nm);
  const StateVarSet full_vars(full_names);

  const FunctionLibrary library = build_latent_library(observed, n_lat, config.seasonal_library);
  const int M = library.size();

  // ---- initial latent series -------------------------------------------
  Matrix latent(N, n_lat);
  if (config.init == LatentConfig::Init::Noise) {
    Rng rng(seed, 7001);
    for (int j = 0; j < n_lat; ++j)
      for (int k = 0; k < N; ++k) latent(k, j) = rng.normal();
  } else {
    // Residual init: fit the observed-only model and seed the latent from
    // the most autocorrelated equation residuals (unresolved colored forcing).
    const FunctionLibrary obs_lib = build_library(observed, config.seasonal_library);
    RegressionData data = make_regression_data(obs_traj, obs_lib);
    LearnedStructure ls = learn_structure(data.derivs, data.design, policy, true);
    FitResult fit0 = mle_fit(ls.pattern, data.design, data.derivs);

    std::vector<int> order(n_obs);
    for (int i = 0; i < n_obs; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(fit0.residual_lag1[a]) > std::abs(fit0.residual_lag1[b]);
    });
    for (int j = 0; j < n_lat; ++j) {
      const int eq = order[j % n_obs];
      Vector res = data.derivs.values.col(eq);
      for (const auto& [entry, coeff] : fit0.coefficients[eq])
        res -= coeff * data.design.values.col(entry);
      const double sd = column_std(res);
      for (int k = 0; k + 1 < N; ++k) latent(k, j) = res[k] / (sd > 0 ? sd : 1.0);
      latent(N - 1, j) = latent(N - 2, j);
    }
  }

  LatentLearnResult result;
  result.observed_vars = observed;
  result.library = library;

  const std::vector<std::string> observed_names = observed.names();
  std::vector<int> latent_idx;
  for (int j = 0; j < n_lat; ++j) latent_idx.push_back(n_obs + j);

  Trajectory aug;
  aug.vars = full_vars;
  aug.times = obs_traj.times;
  aug.calendar_offset_months = obs_traj.calendar_offset_months;
  aug.values.resize(N, n_obs + n_lat);
  aug.values.leftCols(n_obs) = obs_traj.values;

  Vector theta_prev;
  int settled = 0, growing = 0;
  double prev_change = 0.0;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    aug.values.rightCols(n_lat) = latent;

    RegressionData data = make_regression_data(aug, library);
    LearnedStructure ls = learn_structure(data.derivs, data.design, policy, true);

    // The latent process is damped-linear by construction: keep its own
    // linear term in the support so the sampled process stays stationary.
    for (int j = 0; j < n_lat; ++j) {
      const int lv = n_obs + j;
      const int lin = library.find(Monomial::linear(lv), Seasonal::Constant);
      ls.pattern.mask(lv, lin) = true;
    }
    FitResult fit = mle_fit(ls.pattern, data.design, data.derivs);

    // guard rails on the latent equation: damping must stay negative
    for (int j = 0; j < n_lat; ++j) {
      const int lv = n_obs + j;
      const int lin = library.find(Monomial::linear(lv), Seasonal::Constant);
      for (auto& [entry, coeff] : fit.coefficients[lv])
        if (entry == lin && coeff >= -1e-3) coeff = -config.init_damping;
      if (config.latent_noise) fit.noise_sigmas[lv] = *config.latent_noise;
    }

    ModelSpec model = assemble(fit);
    normalize_latent_scale(model, latent_idx);
    model.variant_id = Variant::Custom;

    // convergence bookkeeping on the normalized coefficient vector
    FitResult norm_fit = fit;
    {
      // read normalized coefficients back off the model terms
      for (int eq = 0; eq < model.vars.size(); ++eq) {
        std::size_t t = 0;
        for (auto& [entry, coeff] : norm_fit.coefficients[eq]) {
          coeff = model.equations[eq][t].coefficient;
          ++t;
        }
      }
    }
    Vector theta = flatten_fit(norm_fit, M);
    if (iter > 0) {
      const double denom = std::max(theta_prev.norm(), 1e-12);
      const double change = (theta - theta_prev).norm() / denom;
      result.iteration_trace.push_back(change);
      if (change < config.tol) {
        ++settled;
      } else {
        settled = 0;
      }
      growing = (iter > 1 && change > prev_change) ? growing + 1 : 0;
      prev_change = change;
      if (growing >= 3) {
        std::ostringstream os;
        os << "latent learning diverging; parameter-change trace:";
        for (double c : result.iteration_trace) os << " " << c;
        throw Error(os.str());
      }
    }
    theta_prev = theta;

    result.model = model;
    result.fit = fit;
    result.pattern = ls.pattern;

    if (settled >= 2 || iter == config.max_iters - 1) {
      result.converged = settled >= 2;
      break;
    }

    // ---- conditional sampling of the latent series ----------------------
    ObservationSet obs = observations_from_trajectory(obs_traj, observed_names,
                                                      config.obs_noise_fraction, 1);
    SmootherOptions smoother = config.smoother;
    smoother.ensemble_size = config.ensemble_size;
    StateVarSet latent_vars(lat_names);
    auto samples = conditional_sample(model, obs, latent_vars, 1,
                                      seed + 17 * (iter + 1), smoother);
    latent = samples[0];
  }

  result.latent_samples.vars = StateVarSet(lat_names);
  result.latent_samples.times = obs_traj.times;
  result.latent_samples.calendar_offset_months = obs_traj.calendar_offset_months;
  result.latent_samples.values = latent;
  return result;
}

IdentifiabilityReport identifiability_report(const LatentLearnResult& result) {
  IdentifiabilityReport report;
  const int n_obs = result.observed_vars.size();
  const int n_lat = result.model.vars.size() - n_obs;
  if (n_lat < 1) throw ConfigError("result has no latent variables");

  const int lv = n_obs;  // first latent
  const double sample_std = column_std(result.latent_samples.values.col(0));
  report.latent_sample_std = sample_std;

  for (int eq = 0; eq < n_obs; ++eq) {
    double coupling = 0.0;
    for (const auto& term : result.model.equations[eq]) {
      const auto& exps = term.monomial.exponents();
      if (exps.size() == 1 && exps[0].first == lv && exps[0].second == 1 &&
          term.seasonal == Seasonal::Constant)
        coupling = term.coefficient;
    }
    if (coupling != 0.0) {
      report.equations.push_back(result.model.vars.name(eq));
      report.products.push_back(std::abs(coupling) * sample_std);
    }
  }

  report.normalized_model = result.model;
  report.normalized_latent = result.latent_samples;
  if (sample_std > 0.0) {
    report.normalized_latent.values /= sample_std;
    // stored-sample normalization: couplings absorb the sample amplitude
    for (int eq = 0; eq < report.normalized_model.vars.size(); ++eq) {
      for (auto& term : report.normalized_model.equations[eq]) {
        int p = 0;
        for (const auto& [v, pow] : term.monomial.exponents())
          if (v >= n_obs) p += pow;
        term.coefficient *= std::pow(sample_std, p);
        if (eq >= n_obs) term.coefficient /= sample_std;
      }
      if (eq >= n_obs)
        if (auto* a = std::get_if<AdditiveNoise>(&report.normalized_model.noise[eq]))
          a->sigma /= sample_std;
    }
  }
  return report;
}

}  // namespace enso
