#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "enso/errors.hpp"

namespace enso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Seasonal basis. Time is non-dimensional ([t] = 2 months), so s1 and s2
// have period 6 (one calendar year) and s3 has period 3.
// ---------------------------------------------------------------------------
enum class Seasonal { Constant, S1, S2, S3 };

double seasonal_value(Seasonal kind, double t);
std::string seasonal_name(Seasonal kind);
Seasonal seasonal_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// State variables
// ---------------------------------------------------------------------------
class StateVarSet {
 public:
  StateVarSet() = default;
  explicit StateVarSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int i) const { return names_.at(i); }
  // -1 when absent
  int index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name) >= 0; }
  bool contains_all(const StateVarSet& other) const;
  bool operator==(const StateVarSet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Monomials and terms
// ---------------------------------------------------------------------------

// Sparse exponent list: sorted (variable index, power), powers >= 1.
class Monomial {
 public:
  Monomial() = default;  // the constant monomial
  explicit Monomial(std::vector<std::pair<int, int>> exponents);

  static Monomial linear(int var) { return Monomial({{var, 1}}); }

  const std::vector<std::pair<int, int>>& exponents() const { return exps_; }
  int degree() const;
  bool is_constant() const { return exps_.empty(); }
  int max_var_index() const;
  double evaluate(const Vector& state) const;
  std::string label(const StateVarSet& vars) const;
  // Remaps variable indices through `map` (old index -> new index);
  // all referenced indices must be mapped.
  Monomial remapped(const std::vector<int>& map) const;

  bool operator==(const Monomial& other) const { return exps_ == other.exps_; }
  bool operator<(const Monomial& other) const;

 private:
  std::vector<std::pair<int, int>> exps_;
};

struct Term {
  double coefficient = 0.0;
  Monomial monomial;
  Seasonal seasonal = Seasonal::Constant;

  double evaluate(const Vector& state, double t) const {
    return coefficient * monomial.evaluate(state) * seasonal_value(seasonal, t);
  }
};

// ---------------------------------------------------------------------------
// Noise specifications (one per equation)
// ---------------------------------------------------------------------------
struct AdditiveNoise {
  double sigma = 0.0;
};

// sigma(T_C, t) = a * (tanh(b * T_C) + 1) * (1 + c * cos(2*pi*t/6))
struct WindMultiplicativeNoise {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  int driver_var = -1;  // index of T_C in the owning spec
};

// sigma(I) = sqrt(lambda * (I - lower) * (upper - I)) on (lower, upper);
// vanishes at both bounds. I is clamped into (lower, upper) for evaluation
// and reflected at the bounds during integration.
struct DecadalMultiplicativeNoise {
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int driver_var = -1;  // index of I in the owning spec
};

using NoiseSpec =
    std::variant<AdditiveNoise, WindMultiplicativeNoise, DecadalMultiplicativeNoise>;

double noise_amplitude(const NoiseSpec& spec, const Vector& state, double t);

// ---------------------------------------------------------------------------
// Model specification
// ---------------------------------------------------------------------------
enum class Variant {
  Reference,
  IaIsDMA,
  IaIsMA,
  IaIsDM,
  IaIsM,
  IaM,
  Linear6D,
  Latent4D,
  Custom,
};

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ModelSpec {
  StateVarSet vars;
  std::vector<std::vector<Term>> equations;  // one list per variable
  std::vector<NoiseSpec> noise;              // one entry per variable
  Variant variant_id = Variant::Custom;

  // Throws on malformed specs (term referencing an undeclared variable,
  // equation count mismatch, non-finite coefficients).
  void validate() const;
};

// Catalog models from the published parameter tables.
ModelSpec build_model(Variant variant);

Vector drift(const ModelSpec& model, const Vector& state, double t);
Vector diffusion(const ModelSpec& model, const Vector& state, double t);

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

// Calibrated so that the reference model's T_E seasonal variance peaks in
// December (see tools "calibrate" note in README); month index 0 = January.
inline constexpr int kDefaultCalendarOffsetMonths = 2;

// One stored sample per month at the default dt and stride.
inline constexpr double kMonthNondim = 0.5;

struct SimConfig {
  double dt = 0.01;
  double duration = 0.0;       // total integrated time, includes burn_in
  double burn_in = 0.0;
  int output_stride = 50;      // steps between stored samples
  std::uint64_t seed = 0;
  Vector initial_state;        // empty -> zeros (I-bearing vars start at mid-range)
  int calendar_offset_months = kDefaultCalendarOffsetMonths;

  void validate() const;
};

struct Trajectory {
  StateVarSet vars;
  std::vector<double> times;   // uniform, non-dimensional
  Matrix values;               // times x vars
  int calendar_offset_months = kDefaultCalendarOffsetMonths;

  int n_samples() const { return static_cast<int>(times.size()); }
  double dt() const;
  Eigen::VectorXd column(const std::string& var) const;
  // Restriction to a subset of variables (order taken from `subset`).
  Trajectory select(const StateVarSet& subset) const;
};

// Euler-Maruyama path. Variables carrying DecadalMultiplicativeNoise are
// reflected into [lower + eps, upper - eps]. Burn-in samples are discarded;
// the sample at t = burn_in is kept, then every output_stride-th step.
Trajectory integrate(const ModelSpec& model, const SimConfig& config);

// ---------------------------------------------------------------------------
// Unit conversion (non-dimensional scales)
// ---------------------------------------------------------------------------
enum class Quantity { T, h, u, tau, t };
enum class UnitDirection { ToNonDim, ToPhysical };

// Physical scale of one non-dimensional unit: T 7.5 degC, h 150 m,
// u 1.5 m/s, tau 5 m/s, t 2 months.
double unit_scale(Quantity q);
double convert_units(double value, Quantity q, UnitDirection direction);
Quantity quantity_from_name(const std::string& name);

}  // namespace enso
