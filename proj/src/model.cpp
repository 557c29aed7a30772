#include "enso/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "enso/rng.hpp"

namespace enso {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kReflectEps = 1e-6;
}  // namespace

double seasonal_value(Seasonal kind, double t) {
  switch (kind) {
    case Seasonal::Constant:
      return 1.0;
    case Seasonal::S1:
      return std::sin(kTwoPi * t / 6.0);
    case Seasonal::S2:
      return std::sin(kTwoPi * t / 6.0 + kTwoPi / 6.0);
    case Seasonal::S3:
      return std::sin(kTwoPi * t / 3.0 + kTwoPi / 6.0);
  }
  return 1.0;
}

std::string seasonal_name(Seasonal kind) {
  switch (kind) {
    case Seasonal::Constant:
      return "const";
    case Seasonal::S1:
      return "s1";
    case Seasonal::S2:
      return "s2";
    case Seasonal::S3:
      return "s3";
  }
  return "const";
}

Seasonal seasonal_from_name(const std::string& name) {
  if (name == "const" || name.empty()) return Seasonal::Constant;
  if (name == "s1") return Seasonal::S1;
  if (name == "s2") return Seasonal::S2;
  if (name == "s3") return Seasonal::S3;
  throw CatalogError("unknown seasonal basis: " + name);
}

// ---------------------------------------------------------------------------
StateVarSet::StateVarSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("StateVarSet must not be empty");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("empty variable name");
    if (!seen.insert(n).second)
      throw ConfigError("duplicate variable name: " + n);
  }
}

int StateVarSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

bool StateVarSet::contains_all(const StateVarSet& other) const {
  for (const auto& n : other.names())
    if (!contains(n)) return false;
  return true;
}

// ---------------------------------------------------------------------------
Monomial::Monomial(std::vector<std::pair<int, int>> exponents)
    : exps_(std::move(exponents)) {
  std::sort(exps_.begin(), exps_.end());
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i].first < 0) throw ConfigError("negative variable index");
    if (exps_[i].second <= 0) throw ConfigError("monomial powers must be >= 1");
    if (i > 0 && exps_[i].first == exps_[i - 1].first)
      throw ConfigError("duplicate variable in monomial");
  }
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [v, p] : exps_) d += p;
  return d;
}

int Monomial::max_var_index() const {
  int m = -1;
  for (const auto& [v, p] : exps_) m = std::max(m, v);
  return m;
}

double Monomial::evaluate(const Vector& state) const {
  double prod = 1.0;
  for (const auto& [v, p] : exps_) {
    const double x = state[v];
    for (int k = 0; k < p; ++k) prod *= x;
  }
  return prod;
}

std::string Monomial::label(const StateVarSet& vars) const {
  if (exps_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, p] : exps_) {
    if (!first) os << "*";
    os << vars.name(v);
    if (p > 1) os << "^" << p;
    first = false;
  }
  return os.str();
}

Monomial Monomial::remapped(const std::vector<int>& map) const {
  std::vector<std::pair<int, int>> out;
  out.reserve(exps_.size());
  for (const auto& [v, p] : exps_) {
    if (v >= static_cast<int>(map.size()) || map[v] < 0)
      throw DimensionError("monomial references an unmapped variable");
    out.emplace_back(map[v], p);
  }
  return Monomial(std::move(out));
}

bool Monomial::operator<(const Monomial& other) const {
  return exps_ < other.exps_;
}

// ---------------------------------------------------------------------------
double noise_amplitude(const NoiseSpec& spec, const Vector& state, double t) {
  if (const auto* a = std::get_if<AdditiveNoise>(&spec)) return a->sigma;
  if (const auto* w = std::get_if<WindMultiplicativeNoise>(&spec)) {
    const double tc = state[w->driver_var];
    return w->a * (std::tanh(w->b * tc) + 1.0) *
           (1.0 + w->c * std::cos(kTwoPi * t / 6.0));
  }
  const auto& d = std::get<DecadalMultiplicativeNoise>(spec);
  double x = state[d.driver_var];
  x = std::clamp(x, d.lower, d.upper);
  return std::sqrt(d.lambda * (x - d.lower) * (d.upper - x));
}

// ---------------------------------------------------------------------------
std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Reference: return "Reference";
    case Variant::IaIsDMA: return "IaIsDMA";
    case Variant::IaIsMA: return "IaIsMA";
    case Variant::IaIsDM: return "IaIsDM";
    case Variant::IaIsM: return "IaIsM";
    case Variant::IaM: return "IaM";
    case Variant::Linear6D: return "Linear6D";
    case Variant::Latent4D: return "Latent4D";
    case Variant::Custom: return "Custom";
  }
  return "Custom";
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::Reference, Variant::IaIsDMA, Variant::IaIsMA,
                    Variant::IaIsDM, Variant::IaIsM, Variant::IaM,
                    Variant::Linear6D, Variant::Latent4D, Variant::Custom}) {
    if (variant_name(v) == name) return v;
  }
  throw CatalogError("unknown model variant: " + name);
}

void ModelSpec::validate() const {
  const int n = vars.size();
  if (n == 0) throw ConfigError("model has no variables");
  if (static_cast<int>(equations.size()) != n)
    throw DimensionError("one equation per variable required");
  if (static_cast<int>(noise.size()) != n)
    throw DimensionError("one noise spec per variable required");
  for (const auto& eq : equations) {
    for (const auto& term : eq) {
      if (!std::isfinite(term.coefficient))
        throw ConfigError("non-finite term coefficient");
      if (term.monomial.max_var_index() >= n)
        throw DimensionError("term references an undeclared variable");
    }
  }
  for (const auto& ns : noise) {
    if (const auto* a = std::get_if<AdditiveNoise>(&ns)) {
      if (a->sigma < 0.0) throw ConfigError("additive sigma must be >= 0");
    } else if (const auto* w = std::get_if<WindMultiplicativeNoise>(&ns)) {
      if (w->driver_var < 0 || w->driver_var >= n)
        throw DimensionError("wind noise driver out of range");
    } else if (const auto* d = std::get_if<DecadalMultiplicativeNoise>(&ns)) {
      if (d->driver_var < 0 || d->driver_var >= n)
        throw DimensionError("decadal noise driver out of range");
      if (!(d->lambda > 0.0) || !(d->upper > d->lower))
        throw ConfigError("decadal noise needs lambda > 0 and upper > lower");
    }
  }
}

Vector drift(const ModelSpec& model, const Vector& state, double t) {
  if (state.size() != model.vars.size())
    throw DimensionError("state length does not match variable count");
  if (!std::isfinite(t)) throw ConfigError("time must be finite");
  Vector out = Vector::Zero(model.vars.size());
  for (int i = 0; i < model.vars.size(); ++i) {
    double sum = 0.0;
    for (const auto& term : model.equations[i]) sum += term.evaluate(state, t);
    out[i] = sum;
  }
  return out;
}

Vector diffusion(const ModelSpec& model, const Vector& state, double t) {
  if (state.size() != model.vars.size())
    throw DimensionError("state length does not match variable count");
  Vector out = Vector::Zero(model.vars.size());
  for (int i = 0; i < model.vars.size(); ++i)
    out[i] = noise_amplitude(model.noise[i], state, t);
  return out;
}

// ---------------------------------------------------------------------------
void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (output_stride < 1) throw ConfigError("output_stride must be >= 1");
  if (!(burn_in < duration)) throw ConfigError("burn_in must be < duration");
  if (burn_in < 0.0) throw ConfigError("burn_in must be >= 0");
  if (calendar_offset_months < 0 || calendar_offset_months >= 12)
    throw ConfigError("calendar_offset_months must be in [0, 12)");
}

double Trajectory::dt() const {
  if (times.size() < 2) throw DataLengthError("trajectory has < 2 samples");
  return times[1] - times[0];
}

Eigen::VectorXd Trajectory::column(const std::string& var) const {
  const int j = vars.index_of(var);
  if (j < 0) throw CatalogError("trajectory has no variable " + var);
  return values.col(j);
}

Trajectory Trajectory::select(const StateVarSet& subset) const {
  Trajectory out;
  out.vars = subset;
  out.times = times;
  out.calendar_offset_months = calendar_offset_months;
  out.values.resize(values.rows(), subset.size());
  for (int j = 0; j < subset.size(); ++j) {
    const int src = vars.index_of(subset.name(j));
    if (src < 0) throw CatalogError("trajectory has no variable " + subset.name(j));
    out.values.col(j) = values.col(src);
  }
  return out;
}

Trajectory integrate(const ModelSpec& model, const SimConfig& config) {
  model.validate();
  config.validate();
  const int n = model.vars.size();

  Vector state;
  if (config.initial_state.size() == 0) {
    state = Vector::Zero(n);
    // Bounded decadal variables start mid-range instead of at the boundary.
    for (int i = 0; i < n; ++i)
      if (const auto* d = std::get_if<DecadalMultiplicativeNoise>(&model.noise[i]))
        state[i] = 0.5 * (d->lower + d->upper);
  } else if (config.initial_state.size() == n) {
    state = config.initial_state;
  } else {
    throw DimensionError("initial_state length does not match variable count");
  }

  struct Reflection {
    int var;
    double lo, hi;
  };
  std::vector<Reflection> reflections;
  for (int i = 0; i < n; ++i)
    if (const auto* d = std::get_if<DecadalMultiplicativeNoise>(&model.noise[i]))
      reflections.push_back({i, d->lower + kReflectEps, d->upper - kReflectEps});

  const long total_steps = static_cast<long>(std::llround(config.duration / config.dt));
  const long burn_steps = static_cast<long>(std::llround(config.burn_in / config.dt));
  const long stored =
      (total_steps - burn_steps) / config.output_stride + 1;

  Trajectory traj;
  traj.vars = model.vars;
  // config offset anchors t = 0; the trajectory records the calendar month
  // of its first stored sample (exact for month-aligned burn-in)
  traj.calendar_offset_months =
      (config.calendar_offset_months +
       static_cast<int>(std::floor(config.burn_in / kMonthNondim + 1e-9))) %
      12;
  traj.times.reserve(stored);
  traj.values.resize(stored, n);

  Rng rng(config.seed);
  const double sqrt_dt = std::sqrt(config.dt);
  long out_row = 0;

  auto store = [&](long step) {
    traj.times.push_back(step * config.dt);
    traj.values.row(out_row) = state.transpose();
    ++out_row;
  };

  for (long step = 0; step <= total_steps; ++step) {
    const double t = step * config.dt;
    if (step >= burn_steps && (step - burn_steps) % config.output_stride == 0 &&
        out_row < stored) {
      store(step);
    }
    if (step == total_steps) break;

    Vector f = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& term : model.equations[i]) sum += term.evaluate(state, t);
      sum *= config.dt;
      sum += noise_amplitude(model.noise[i], state, t) * sqrt_dt * rng.normal();
      f[i] = sum;
    }
    state += f;
    for (const auto& r : reflections) {
      double x = state[r.var];
      // fold back into [lo, hi]; loop handles overshoot of both bounds
      while (x < r.lo || x > r.hi) {
        if (x < r.lo) x = 2.0 * r.lo - x;
        if (x > r.hi) x = 2.0 * r.hi - x;
      }
      state[r.var] = x;
    }
    if (!state.allFinite()) {
      std::vector<double> s(state.data(), state.data() + state.size());
      throw IntegrationBlowupError(
          "non-finite state at t = " + std::to_string(t + config.dt), t + config.dt, s);
    }
  }
  traj.values.conservativeResize(out_row, n);
  return traj;
}

// ---------------------------------------------------------------------------
double unit_scale(Quantity q) {
  switch (q) {
    case Quantity::T: return 7.5;    // degC
    case Quantity::h: return 150.0;  // m
    case Quantity::u: return 1.5;    // m/s
    case Quantity::tau: return 5.0;  // m/s
    case Quantity::t: return 2.0;    // months
  }
  throw CatalogError("unknown quantity");
}

double convert_units(double value, Quantity q, UnitDirection direction) {
  const double scale = unit_scale(q);
  return direction == UnitDirection::ToNonDim ? value / scale : value * scale;
}

Quantity quantity_from_name(const std::string& name) {
  if (name == "T" || name == "TC" || name == "TE") return Quantity::T;
  if (name == "h" || name == "hW") return Quantity::h;
  if (name == "u") return Quantity::u;
  if (name == "tau") return Quantity::tau;
  if (name == "t") return Quantity::t;
  throw CatalogError("unknown quantity: " + name);
}

}  // namespace enso
