#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enso/assimilation.hpp"
#include "enso/causal.hpp"
#include "enso/estimation.hpp"
#include "enso/model.hpp"

namespace enso {

struct LatentConfig {
  int n_latent = 1;
  int max_iters = 20;
  double tol = 1e-2;  // relative coefficient change, must hold 2 iterations
  std::optional<double> latent_noise;  // fixed additive sigma; empty = fitted

  // Latent-series initialization: Residual seeds the series from the
  // observed-equation residuals of a latent-free fit (the equation with the
  // most autocorrelated residual); Noise starts from white noise.
  enum class Init { Residual, Noise };
  Init init = Init::Residual;
  double init_damping = 1.0;  // latent-equation prior: dx/dt = -damping x + sigma dW
  double init_sigma = 1.0;

  bool seasonal_library = true;
  int ensemble_size = 100;        // smoother members for conditional sampling
  double obs_noise_fraction = 0.05;
  SmootherOptions smoother{};
};

struct LatentLearnResult {
  ModelSpec model;            // observed + latent variables, latent normalized
  Trajectory latent_samples;  // sampled latent series on the observation grid
  std::vector<double> iteration_trace;  // relative parameter-change norms
  bool converged = false;
  FitResult fit;
  FunctionLibrary library;
  StructurePattern pattern;
  StateVarSet observed_vars;
};

// Candidate set for the augmented system: the full (seasonal) library over
// the observed variables plus, per latent, the linear latent candidate and
// the observed x latent bilinear products (latent terms unmodulated).
FunctionLibrary build_latent_library(const StateVarSet& observed, int n_latent,
                                     bool seasonal);

// Alternates (a) conditional sampling of the latent series given the current
// model, (b) causal structure selection over observed + latent candidates,
// (c) closed-form refit, until the coefficients settle or max_iters is hit.
// Throws on divergence (parameter change growing 3 iterations in a row).
LatentLearnResult learn_with_latent(const Trajectory& obs_traj,
                                    const LatentConfig& config,
                                    const SelectionPolicy& policy,
                                    std::uint64_t seed);

// The latent scale is not identifiable: only coupling x latent-amplitude is.
struct IdentifiabilityReport {
  std::vector<std::string> equations;   // observed equations with latent coupling
  std::vector<double> products;         // |linear coupling| * std(latent sample)
  double latent_sample_std = 0.0;       // before normalization
  ModelSpec normalized_model;           // latent rescaled to unit stationary variance
  Trajectory normalized_latent;
};

IdentifiabilityReport identifiability_report(const LatentLearnResult& result);

}  // namespace enso
