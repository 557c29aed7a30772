#include "enso/assimilation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "enso/parallel.hpp"
#include "enso/rng.hpp"

namespace enso {

void ObservationSet::validate(const StateVarSet& model_vars) const {
  if (observed_vars.size() == 0) throw ConfigError("no observed variables");
  for (const auto& name : observed_vars.names())
    if (model_vars.index_of(name) < 0)
      throw CatalogError("observed variable " + name + " not in model");
  if (series.rows() != n_times() || series.cols() != observed_vars.size())
    throw DimensionError("observation series shape mismatch");
  if (obs_noise_std.size() != observed_vars.size())
    throw DimensionError("obs_noise_std length mismatch");
  for (int j = 0; j < obs_noise_std.size(); ++j)
    if (!(obs_noise_std[j] > 0.0)) throw ConfigError("obs noise std must be > 0");
  if (n_times() < 2) throw DataLengthError("need >= 2 observation times");
  const double dt = times[1] - times[0];
  for (int k = 1; k + 1 < n_times(); ++k)
    if (std::abs(times[k + 1] - times[k] - dt) > 1e-9)
      throw ConfigError("non-uniform observation times");
}

ObservationSet observations_from_trajectory(const Trajectory& traj,
                                            const std::vector<std::string>& observed,
                                            double noise_fraction, int stride) {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  ObservationSet obs;
  obs.observed_vars = StateVarSet(observed);
  const int rows = (traj.n_samples() + stride - 1) / stride;
  obs.series.resize(rows, obs.observed_vars.size());
  obs.times.resize(rows);
  obs.obs_noise_std.resize(obs.observed_vars.size());
  for (int j = 0; j < obs.observed_vars.size(); ++j) {
    const Vector col = traj.column(obs.observed_vars.name(j));
    const double sd = std::sqrt((col.array() - col.mean()).square().mean());
    obs.obs_noise_std[j] = std::max(noise_fraction * sd, 1e-8);
    for (int k = 0; k < rows; ++k) obs.series(k, j) = col[k * stride];
  }
  for (int k = 0; k < rows; ++k) obs.times[k] = traj.times[k * stride];
  return obs;
}

namespace {

struct EnsembleHistory {
  std::vector<Matrix> forecast;  // per analysis time: vars x members
  std::vector<Matrix> analysis;
};

// Draw the initial ensemble from a spin-up run, sampling one state per year
// so the seasonal phase at every sample matches the first observation time.
Matrix initial_ensemble(const ModelSpec& model, double t0, int n_ens,
                        std::uint64_t seed, const SmootherOptions& opt) {
  const int n = model.vars.size();
  double phase = std::fmod(t0, 6.0);
  if (phase < 0.0) phase += 6.0;
  SimConfig cfg;
  cfg.dt = opt.inner_dt;
  cfg.burn_in = opt.spinup + phase;
  cfg.duration = cfg.burn_in + 6.0 * n_ens;
  cfg.output_stride = std::max(1, static_cast<int>(std::llround(6.0 / opt.inner_dt)));
  cfg.seed = seed ^ 0x5eedULL;
  Trajectory spin = integrate(model, cfg);
  Matrix ens(n, n_ens);
  for (int j = 0; j < n_ens; ++j)
    ens.col(j) = spin.values.row(std::min(j, spin.n_samples() - 1)).transpose();
  return ens;
}

void propagate_member(const ModelSpec& model, Vector& state, double t_from,
                      double t_to, double dt_hint, Rng& rng,
                      const std::vector<int>& reflect_vars,
                      const std::vector<std::pair<double, double>>& reflect_bounds) {
  const int steps = std::max(1, static_cast<int>(std::llround((t_to - t_from) / dt_hint)));
  const double dt = (t_to - t_from) / steps;
  const double sqrt_dt = std::sqrt(dt);
  const int n = model.vars.size();
  for (int s = 0; s < steps; ++s) {
    const double t = t_from + s * dt;
    Vector incr(n);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& term : model.equations[i]) sum += term.evaluate(state, t);
      incr[i] = sum * dt + noise_amplitude(model.noise[i], state, t) * sqrt_dt * rng.normal();
    }
    state += incr;
    for (std::size_t r = 0; r < reflect_vars.size(); ++r) {
      double x = state[reflect_vars[r]];
      const auto [lo, hi] = reflect_bounds[r];
      while (x < lo || x > hi) {
        if (x < lo) x = 2.0 * lo - x;
        if (x > hi) x = 2.0 * hi - x;
      }
      state[reflect_vars[r]] = x;
    }
    if (!state.allFinite()) {
      std::vector<double> sv(state.data(), state.data() + state.size());
      throw IntegrationBlowupError("ensemble member blew up at t = " + std::to_string(t + dt),
                                   t + dt, sv);
    }
  }
}

EnsembleHistory run_filter(const ModelSpec& model, const ObservationSet& obs,
                           int ensemble_size, std::uint64_t seed,
                           const SmootherOptions& opt) {
  model.validate();
  obs.validate(model.vars);
  if (ensemble_size < 20) throw ConfigError("ensemble_size must be >= 20");

  const int n = model.vars.size();
  const int m = ensemble_size;
  const int K = obs.n_times();
  const int p = obs.observed_vars.size();

  std::vector<int> obs_idx(p);
  for (int j = 0; j < p; ++j) obs_idx[j] = model.vars.index_of(obs.observed_vars.name(j));

  std::vector<int> reflect_vars;
  std::vector<std::pair<double, double>> reflect_bounds;
  for (int i = 0; i < n; ++i)
    if (const auto* d = std::get_if<DecadalMultiplicativeNoise>(&model.noise[i])) {
      reflect_vars.push_back(i);
      reflect_bounds.emplace_back(d->lower + 1e-6, d->upper - 1e-6);
    }

  Matrix ens = initial_ensemble(model, obs.times[0], m, seed, opt);
  std::vector<Rng> member_rng;
  member_rng.reserve(m);
  for (int j = 0; j < m; ++j) member_rng.emplace_back(seed, 1000 + j);

  EnsembleHistory hist;
  hist.forecast.resize(K);
  hist.analysis.resize(K);

  for (int k = 0; k < K; ++k) {
    if (k > 0) {
      parallel_for(m, [&](std::size_t j) {
        Vector state = ens.col(j);
        propagate_member(model, state, obs.times[k - 1], obs.times[k], opt.inner_dt,
                         member_rng[j], reflect_vars, reflect_bounds);
        ens.col(j) = state;
      });
    }
    hist.forecast[k] = ens;

    // analysis with multiplicative inflation and perturbed observations
    Vector mean = ens.rowwise().mean();
    Matrix anom = (ens.colwise() - mean) * opt.inflation;
    ens = anom.colwise() + mean;

    Matrix HA(p, m);
    for (int j = 0; j < p; ++j) HA.row(j) = anom.row(obs_idx[j]);
    const double scale = 1.0 / static_cast<double>(m - 1);
    Matrix S = HA * HA.transpose() * scale;
    for (int j = 0; j < p; ++j) S(j, j) += obs.obs_noise_std[j] * obs.obs_noise_std[j];
    Eigen::LDLT<Matrix> ldlt(S);

    Rng obs_rng(seed ^ opt.obs_seed_salt, static_cast<std::uint64_t>(k));
    Matrix innovations(p, m);
    for (int j = 0; j < m; ++j)
      for (int q = 0; q < p; ++q)
        innovations(q, j) = obs.series(k, q) + obs.obs_noise_std[q] * obs_rng.normal() -
                            ens(obs_idx[q], j);

    // X += P H^T S^{-1} innovations, with P H^T = anom (H anom)^T / (m-1)
    Matrix gain_applied = anom * (HA.transpose() * ldlt.solve(innovations)) * scale;
    ens += gain_applied;

    const Vector post_mean = ens.rowwise().mean();
    const Vector spread =
        ((ens.colwise() - post_mean).array().square().rowwise().sum() / (m - 1))
            .sqrt();
    if (spread.minCoeff() < 1e-10)
      throw Error("ensemble collapse (spread < 1e-10); increase inflation or obs noise");

    hist.analysis[k] = ens;
  }
  return hist;
}

// Backward ensemble smoothing pass (fixed interval): overwrites analysis
// ensembles with smoothed ones.
void smooth_backward(EnsembleHistory& hist) {
  const int K = static_cast<int>(hist.analysis.size());
  if (K < 2) return;
  const int n = static_cast<int>(hist.analysis[0].rows());
  const int m = static_cast<int>(hist.analysis[0].cols());
  const double scale = 1.0 / static_cast<double>(m - 1);

  for (int k = K - 2; k >= 0; --k) {
    const Matrix& Xa = hist.analysis[k];
    const Matrix& Xf = hist.forecast[k + 1];
    const Matrix& Xs = hist.analysis[k + 1];  // already smoothed

    const Vector ma = Xa.rowwise().mean();
    const Vector mf = Xf.rowwise().mean();
    Matrix Aa = Xa.colwise() - ma;
    Matrix Af = Xf.colwise() - mf;

    Matrix cross = Aa * Af.transpose() * scale;     // cov(Xa_k, Xf_{k+1})
    Matrix Pf = Af * Af.transpose() * scale;        // cov(Xf_{k+1})
    Pf.diagonal().array() += 1e-12 * std::max(Pf.trace() / n, 1e-30);
    Eigen::LDLT<Matrix> ldlt(Pf);
    Matrix J = ldlt.solve(cross.transpose()).transpose();  // cross * Pf^{-1}

    hist.analysis[k] = Xa + J * (Xs - Xf);
  }
}

StateVarSet complement_vars(const StateVarSet& all, const StateVarSet& observed) {
  std::vector<std::string> hidden;
  for (const auto& name : all.names())
    if (observed.index_of(name) < 0) hidden.push_back(name);
  if (hidden.empty()) hidden = all.names();  // fully observed: report everything
  return StateVarSet(hidden);
}

}  // namespace

PosteriorSeries enks_recover(const ModelSpec& model, const ObservationSet& obs,
                             int ensemble_size, std::uint64_t seed,
                             const SmootherOptions& options) {
  EnsembleHistory hist = run_filter(model, obs, ensemble_size, seed, options);
  smooth_backward(hist);

  PosteriorSeries post;
  post.hidden_vars = complement_vars(model.vars, obs.observed_vars);
  post.times = obs.times;
  post.ensemble_size = ensemble_size;
  const int K = obs.n_times();
  const int h = post.hidden_vars.size();
  post.mean.resize(K, h);
  post.std.resize(K, h);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < h; ++j) {
      const int vi = model.vars.index_of(post.hidden_vars.name(j));
      const auto row = hist.analysis[k].row(vi);
      const double mu = row.mean();
      post.mean(k, j) = mu;
      post.std(k, j) =
          std::sqrt((row.array() - mu).square().sum() / (ensemble_size - 1));
    }
  }
  return post;
}

std::vector<Matrix> conditional_sample(const ModelSpec& model, const ObservationSet& obs,
                                       const StateVarSet& hidden_vars, int n_samples,
                                       std::uint64_t seed,
                                       const SmootherOptions& options) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const int ensemble_size = std::max({n_samples, options.ensemble_size, 20});
  for (const auto& name : hidden_vars.names())
    if (model.vars.index_of(name) < 0)
      throw CatalogError("hidden variable " + name + " not in model");

  EnsembleHistory hist = run_filter(model, obs, ensemble_size, seed, options);
  smooth_backward(hist);

  const int K = obs.n_times();
  std::vector<Matrix> samples(n_samples, Matrix(K, hidden_vars.size()));
  for (int s = 0; s < n_samples; ++s)
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < hidden_vars.size(); ++j)
        samples[s](k, j) = hist.analysis[k](model.vars.index_of(hidden_vars.name(j)), s);
  return samples;
}

}  // namespace enso
