#include "enso/library.hpp"

#include <cmath>

namespace enso {

std::string FunctionLibrary::label(int i) const {
  const auto& e = entries.at(i);
  std::string s = e.monomial.label(vars);
  if (e.seasonal != Seasonal::Constant) s += "*" + seasonal_name(e.seasonal);
  return s;
}

int FunctionLibrary::find(const Monomial& m, Seasonal s) const {
  for (int i = 0; i < size(); ++i)
    if (entries[i].monomial == m && entries[i].seasonal == s) return i;
  return -1;
}

FunctionLibrary build_library(const StateVarSet& vars, bool seasonal) {
  const int n = vars.size();
  FunctionLibrary lib;
  lib.vars = vars;

  std::vector<Monomial> monomials;
  for (int i = 0; i < n; ++i) monomials.push_back(Monomial::linear(i));
  for (int i = 0; i < n; ++i) monomials.push_back(Monomial({{i, 2}}));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) monomials.push_back(Monomial({{i, 1}, {j, 1}}));
  for (int i = 0; i < n; ++i) monomials.push_back(Monomial({{i, 3}}));

  for (const auto& m : monomials) {
    lib.entries.push_back({m, Seasonal::Constant});
    if (seasonal) {
      lib.entries.push_back({m, Seasonal::S1});
      lib.entries.push_back({m, Seasonal::S2});
      lib.entries.push_back({m, Seasonal::S3});
    }
  }
  lib.entries.push_back({Monomial(), Seasonal::Constant});
  return lib;
}

DesignMatrix evaluate_library(const FunctionLibrary& library, const Trajectory& traj) {
  if (!traj.vars.contains_all(library.vars))
    throw CatalogError("trajectory is missing library variables");

  // Map library variable indices onto trajectory columns.
  std::vector<int> map(library.vars.size());
  for (int v = 0; v < library.vars.size(); ++v)
    map[v] = traj.vars.index_of(library.vars.name(v));

  DesignMatrix design;
  design.library = library;
  design.times = traj.times;
  const int rows = traj.n_samples();
  const int M = library.size();
  design.values.resize(rows, M);

  Vector state(library.vars.size());
  for (int k = 0; k < rows; ++k) {
    for (int v = 0; v < library.vars.size(); ++v) state[v] = traj.values(k, map[v]);
    const double t = traj.times[k];
    for (int m = 0; m < M; ++m) {
      const auto& e = library.entries[m];
      design.values(k, m) = e.monomial.evaluate(state) * seasonal_value(e.seasonal, t);
    }
  }
  return design;
}

DerivativeSeries estimate_derivatives(const Trajectory& traj) {
  const int rows = traj.n_samples();
  if (rows < 2) throw DataLengthError("need >= 2 samples for derivatives");
  const double dt = traj.times[1] - traj.times[0];
  for (int k = 1; k + 1 < rows; ++k) {
    const double step = traj.times[k + 1] - traj.times[k];
    if (std::abs(step - dt) > 1e-12 * std::max(1.0, std::abs(dt)))
      throw ConfigError("non-uniform trajectory spacing");
  }

  DerivativeSeries out;
  out.vars = traj.vars;
  out.times.assign(traj.times.begin(), traj.times.end() - 1);
  out.values = (traj.values.bottomRows(rows - 1) - traj.values.topRows(rows - 1)) / dt;
  return out;
}

}  // namespace enso
