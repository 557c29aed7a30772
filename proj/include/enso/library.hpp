#pragma once

#include <string>
#include <vector>

#include "enso/model.hpp"

namespace enso {

// One candidate function: a state monomial times a seasonal factor.
struct LibraryEntry {
  Monomial monomial;
  Seasonal seasonal = Seasonal::Constant;

  bool operator==(const LibraryEntry& other) const {
    return monomial == other.monomial && seasonal == other.seasonal;
  }
};

// Candidate-function library: all linear and quadratic monomials of the
// state variables, the pure cubes, and a constant. With `seasonal` each
// non-constant entry is additionally emitted modulated by s1, s2, s3.
struct FunctionLibrary {
  StateVarSet vars;
  std::vector<LibraryEntry> entries;

  int size() const { return static_cast<int>(entries.size()); }
  std::string label(int i) const;
  // -1 when the library does not contain the entry
  int find(const Monomial& m, Seasonal s) const;
};

FunctionLibrary build_library(const StateVarSet& vars, bool seasonal);

// Candidate functions evaluated along a trajectory.
struct DesignMatrix {
  Matrix values;  // time x M
  FunctionLibrary library;
  std::vector<double> times;

  int n_samples() const { return static_cast<int>(values.rows()); }
};

// Trajectory must carry every library variable (extra variables are fine).
DesignMatrix evaluate_library(const FunctionLibrary& library, const Trajectory& traj);

// Forward-difference time derivatives: value at row k is
// (x[k+1] - x[k]) / dt, aligned with sample k; the last sample is dropped.
// Consumers align design-matrix rows the same way.
struct DerivativeSeries {
  Matrix values;  // (time - 1) x n
  std::vector<double> times;
  StateVarSet vars;

  int n_samples() const { return static_cast<int>(values.rows()); }
};

DerivativeSeries estimate_derivatives(const Trajectory& traj);

}  // namespace enso
