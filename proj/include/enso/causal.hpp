#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "enso/library.hpp"
#include "enso/model.hpp"

namespace enso {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Boolean structure pattern over (equation, candidate) pairs.
struct StructurePattern {
  BoolArray mask;  // n x M

  int n_equations() const { return static_cast<int>(mask.rows()); }
  int n_candidates() const { return static_cast<int>(mask.cols()); }
  long count() const { return mask.count(); }
};

// N x M causation entropies (nats) under the Gaussian approximation.
// Entries are clipped at zero; `negatives_clipped` counts values that were
// meaningfully negative before clipping (round-off diagnostics).
struct CausationEntropyMatrix {
  Matrix values;  // n equations x M candidates
  FunctionLibrary library;
  std::vector<std::string> equation_names;
  std::optional<Matrix> null_thresholds;  // per-entry significance cutoffs
  int negatives_clipped = 0;
};

struct AbsolutePolicy {
  double threshold = 0.0;  // keep entries with value >= threshold
};

// Null distribution from block-shuffling each candidate column and
// recomputing its entropies; keep entries above the given null quantile.
struct BootstrapPolicy {
  int n_shuffles = 100;
  int block_len = 100;     // samples per shuffle block
  double quantile = 0.99;
  std::uint64_t seed = 0;
};

using SelectionPolicy = std::variant<AbsolutePolicy, BootstrapPolicy>;

// C_{z -> x | Y} = H(x|Y) - H(x|Y,z) for jointly Gaussian data:
//   1/2 ln det R_{xY} - 1/2 ln det R_Y - 1/2 ln det R_{xYz} + 1/2 ln det R_{Yz}
// Sample covariances are ridge-regularized (1e-8 * trace/dim) and factorized
// by Cholesky; the result is clipped at zero. Y may have zero columns.
double gaussian_causation_entropy(const Vector& x, const Matrix& Y, const Vector& z);

// Entry (i, m) = gaussian_causation_entropy(derivs col i, design minus col m,
// design col m), computed from one shared joint covariance.
CausationEntropyMatrix causation_entropy_matrix(const DerivativeSeries& derivs,
                                                const DesignMatrix& design);

// Per-entry null quantiles for the bootstrap policy (row = equation).
Matrix bootstrap_null_thresholds(const DerivativeSeries& derivs,
                                 const DesignMatrix& design,
                                 const BootstrapPolicy& policy);

// Absolute policies threshold cem.values directly; bootstrap policies require
// cem.null_thresholds (see learn_structure for the one-call version).
StructurePattern select_structure(const CausationEntropyMatrix& cem,
                                  const SelectionPolicy& policy);

struct LearnedStructure {
  CausationEntropyMatrix cem;
  StructurePattern pattern;
};

// Entropy matrix -> (bootstrap thresholds when needed) -> selection.
// `always_keep_constant` forces the constant candidate into the support of
// every equation: under centered Gaussian statistics the constant carries no
// fluctuation information (its entropy is identically zero), but intercepts
// are part of every published model equation.
LearnedStructure learn_structure(const DerivativeSeries& derivs,
                                 const DesignMatrix& design,
                                 const SelectionPolicy& policy,
                                 bool always_keep_constant = false);

}  // namespace enso
