#include "enso/estimation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace enso {

namespace {
constexpr double kFitRidge = 1e-10;
}

double FitResult::coefficient_of(int equation, int entry) const {
  for (const auto& [idx, c] : coefficients.at(equation))
    if (idx == entry) return c;
  return 0.0;
}

FitResult mle_fit(const StructurePattern& pattern, const DesignMatrix& design,
                  const DerivativeSeries& derivs) {
  const int n = static_cast<int>(derivs.values.cols());
  const int M = design.library.size();
  const long N = design.n_samples();
  if (derivs.n_samples() != N)
    throw DimensionError("derivative and design rows are not aligned");
  if (pattern.n_equations() != n || pattern.n_candidates() != M)
    throw DimensionError("structure pattern shape does not match data");
  if (derivs.times.size() >= 2 && N < 2)
    throw DataLengthError("too few samples to fit");

  const double dt =
      derivs.times.size() >= 2 ? derivs.times[1] - derivs.times[0] : 1.0;

  FitResult fit;
  fit.library = design.library;
  fit.equation_vars = derivs.vars;
  fit.coefficients.resize(n);
  fit.noise_sigmas = Vector::Zero(n);
  fit.residual_rms = Vector::Zero(n);
  fit.residual_lag1 = Vector::Zero(n);
  fit.sample_dt = dt;

  for (int i = 0; i < n; ++i) {
    std::vector<int> cols;
    for (int m = 0; m < M; ++m)
      if (pattern.mask(i, m)) cols.push_back(m);

    Vector residual = derivs.values.col(i);
    if (!cols.empty()) {
      Matrix A(N, cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c) A.col(c) = design.values.col(cols[c]);

      Matrix gram = A.transpose() * A;
      const double ridge = kFitRidge * std::max(gram.trace() / static_cast<double>(cols.size()), 1.0);
      gram.diagonal().array() += ridge;
      Eigen::LDLT<Matrix> ldlt(gram);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        std::ostringstream os;
        os << "rank-deficient design for equation " << derivs.vars.name(i)
           << "; candidates:";
        std::vector<std::string> names;
        for (int m : cols) {
          names.push_back(design.library.label(m));
          os << " " << names.back();
        }
        throw ConditioningError(os.str(), names);
      }
      Vector theta = ldlt.solve(A.transpose() * derivs.values.col(i));
      residual -= A * theta;
      for (std::size_t c = 0; c < cols.size(); ++c)
        fit.coefficients[i].emplace_back(cols[c], theta[c]);
    }

    std::vector<double> res(residual.data(), residual.data() + residual.size());
    fit.noise_sigmas[i] = estimate_noise(res, dt);
    fit.residual_rms[i] = std::sqrt(residual.squaredNorm() / static_cast<double>(N));
    if (N >= 3) {
      const double rm = residual.mean();
      const Vector d = residual.array() - rm;
      const double denom = d.squaredNorm();
      if (denom > 0.0)
        fit.residual_lag1[i] = d.head(N - 1).dot(d.tail(N - 1)) / denom;
    }
  }
  return fit;
}

double estimate_noise(const std::vector<double>& residuals, double dt) {
  if (residuals.empty()) throw DataLengthError("no residuals to estimate noise from");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(dt * s / static_cast<double>(residuals.size()));
}

ModelSpec assemble(const FitResult& fit,
                   const std::map<std::string, NoiseSpec>& noise_overrides) {
  for (const auto& [name, spec] : noise_overrides)
    if (fit.equation_vars.index_of(name) < 0)
      throw CatalogError("noise override names unknown variable " + name);

  ModelSpec model;
  model.vars = fit.library.vars;
  model.variant_id = Variant::Custom;
  model.equations.resize(model.vars.size());
  model.noise.resize(model.vars.size(), AdditiveNoise{0.0});

  if (!(fit.equation_vars == fit.library.vars))
    throw DimensionError("fit equations and library variables must match to assemble");

  for (int i = 0; i < model.vars.size(); ++i) {
    for (const auto& [entry_idx, coeff] : fit.coefficients[i]) {
      const auto& e = fit.library.entries.at(entry_idx);
      model.equations[i].push_back(Term{coeff, e.monomial, e.seasonal});
    }
    const auto it = noise_overrides.find(model.vars.name(i));
    model.noise[i] = it != noise_overrides.end() ? it->second
                                                 : NoiseSpec(AdditiveNoise{fit.noise_sigmas[i]});
  }
  model.validate();
  return model;
}

RegressionData make_regression_data(const Trajectory& traj, const FunctionLibrary& library) {
  RegressionData out;
  out.derivs = estimate_derivatives(traj);
  out.design = evaluate_library(library, traj);
  const long rows = out.derivs.n_samples();
  out.design.values.conservativeResize(rows, Eigen::NoChange);
  out.design.times.resize(rows);
  return out;
}

}  // namespace enso
