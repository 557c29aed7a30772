#pragma once

#include <map>
#include <string>
#include <vector>

#include "enso/causal.hpp"
#include "enso/library.hpp"
#include "enso/model.hpp"

namespace enso {

// Closed-form least-squares fit (the Gaussian MLE under the Euler
// discretization) of each equation on its selected candidates.
struct FitResult {
  FunctionLibrary library;
  StateVarSet equation_vars;
  // per equation: (library entry index, coefficient), masked entries only
  std::vector<std::vector<std::pair<int, double>>> coefficients;
  Vector noise_sigmas;       // per equation, from residuals
  Vector residual_rms;       // per equation
  Vector residual_lag1;      // lag-1 autocorrelation of residuals
  double sample_dt = 0.0;

  double coefficient_of(int equation, int entry) const;  // 0 when unselected
};

// Per-equation normal equations with a tiny ridge (1e-10 scale); throws
// ConditioningError naming collinear candidates on rank deficiency.
FitResult mle_fit(const StructurePattern& pattern, const DesignMatrix& design,
                  const DerivativeSeries& derivs);

// sigma = sqrt(dt * mean(residual^2)), consistent with
// u_{k+1} - u_k = Phi dt + sigma sqrt(dt) xi.
double estimate_noise(const std::vector<double>& residuals, double dt);

// Builds a runnable ModelSpec from a fit. Variables named in
// `noise_overrides` use the prescribed spec instead of the fitted additive
// sigma (multiplicative noise forms are injected, not learned).
ModelSpec assemble(const FitResult& fit,
                   const std::map<std::string, NoiseSpec>& noise_overrides = {});

// Design matrix and derivatives trimmed to a common row range, the shape
// every fit and entropy computation expects.
struct RegressionData {
  DesignMatrix design;
  DerivativeSeries derivs;
};

RegressionData make_regression_data(const Trajectory& traj, const FunctionLibrary& library);

}  // namespace enso
