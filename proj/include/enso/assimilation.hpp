#pragma once

#include <cstdint>
#include <vector>

#include "enso/model.hpp"
#include "enso/stats.hpp"

namespace enso {

struct ObservationSet {
  StateVarSet observed_vars;   // subset of the model variables
  Matrix series;               // time x observed variable
  std::vector<double> times;   // uniform spacing
  Vector obs_noise_std;        // per observed variable, > 0

  int n_times() const { return static_cast<int>(times.size()); }
  void validate(const StateVarSet& model_vars) const;
};

// Observations taken from a trajectory at every `stride`-th sample with
// noise_fraction * climatological std as the observation error.
ObservationSet observations_from_trajectory(const Trajectory& traj,
                                            const std::vector<std::string>& observed,
                                            double noise_fraction = 0.05,
                                            int stride = 1);

struct SmootherOptions {
  double inner_dt = 0.01;      // integration step between analyses
  double inflation = 1.02;     // multiplicative anomaly inflation per analysis
  double spinup = 120.0;       // spin-up length before drawing the initial ensemble
  int ensemble_size = 0;       // conditional_sample only: 0 = max(n_samples, 20)
  std::uint64_t obs_seed_salt = 0x0b5ULL;
};

struct PosteriorSeries {
  StateVarSet hidden_vars;
  std::vector<double> times;
  Matrix mean;   // time x hidden variable
  Matrix std;    // time x hidden variable
  int ensemble_size = 0;
};

// Forward ensemble Kalman filter with perturbed observations followed by a
// single backward ensemble smoothing pass (fixed interval). Deterministic
// given (model, obs, ensemble_size, seed).
PosteriorSeries enks_recover(const ModelSpec& model, const ObservationSet& obs,
                             int ensemble_size, std::uint64_t seed,
                             const SmootherOptions& options = {});

// Posterior trajectory samples: smoothed ensemble members restricted to
// `hidden_vars` (one matrix per sample, time x hidden). Their mean converges
// to the enks_recover mean as n_samples grows.
std::vector<Matrix> conditional_sample(const ModelSpec& model, const ObservationSet& obs,
                                       const StateVarSet& hidden_vars, int n_samples,
                                       std::uint64_t seed,
                                       const SmootherOptions& options = {});

}  // namespace enso
