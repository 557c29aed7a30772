#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "enso/model.hpp"
#include "enso/stats.hpp"

namespace enso {

// Contiguous monthly values anchored to a calendar month. Model output uses
// start_year 0; observational data carries real years.
struct MonthlySeries {
  std::vector<double> values;
  int start_month = 0;  // 0 = January
  int start_year = 0;
  std::string name;
  bool celsius = false;

  int n_months() const { return static_cast<int>(values.size()); }
  int month_of(int k) const { return (start_month + k) % 12; }
  int year_of(int k) const { return start_year + (start_month + k) / 12; }
  int span_years() const { return n_months() / 12; }
};

// Requires monthly cadence (dt = 0.5 non-dimensional). `to_celsius` converts
// through the temperature scale.
MonthlySeries monthly_series_from_trajectory(const Trajectory& traj,
                                             const std::string& var,
                                             bool to_celsius);

// Subtract the per-calendar-month mean over the whole series.
MonthlySeries remove_monthly_climatology(const MonthlySeries& series);

// Consecutive 70-year (or `years` long) windows; the tail remainder is
// dropped. Segments start at a January.
std::vector<MonthlySeries> segment_series(const MonthlySeries& series, int years);

// ---------------------------------------------------------------------------
// Event classification (DJF means; event assigned to the December year)
// ---------------------------------------------------------------------------
enum class EventKind { EP, CP, LaNina };

struct Event {
  int year = 0;  // December year of the DJF window
  EventKind kind = EventKind::EP;
  double djf_tc = 0.0;  // degC
  double djf_te = 0.0;
  bool extreme = false;
  std::optional<int> multiyear_id;  // group id of >= 2 consecutive same-polarity years
};

struct EventCatalog {
  std::vector<Event> events;
  int span_years = 0;  // whole years covered by the source series

  int count(EventKind k) const;
  int count_el_nino() const;
  int count_extreme() const;
  int count_multiyear_el_nino() const;  // number of groups
  int count_multiyear_la_nina() const;
};

// Strict thresholds: DJF mean of exactly 0.5 degC is not an event. EP / CP
// resolve by which SST is larger; La Nina only applies to non-El-Nino years.
// Extreme: max monthly T_E over Apr(y)..Mar(y+1) above 2.5 degC.
EventCatalog classify_events(const MonthlySeries& tc, const MonthlySeries& te);

// ---------------------------------------------------------------------------
// Occurrence frequencies over segments
// ---------------------------------------------------------------------------
inline constexpr int kEventCategories = 7;
extern const char* const kEventCategoryNames[kEventCategories];

struct SegmentStats {
  Matrix counts;  // segments x 7 categories
  Vector median, p5, p95;
};

// Counts per segment for: all El Nino, EP, CP, extreme, multi-year El Nino
// groups, all La Nina, multi-year La Nina groups. All catalogs must cover at
// least `required_years` whole years.
SegmentStats occurrence_frequencies(const std::vector<EventCatalog>& catalogs,
                                    int required_years = 70);

// ---------------------------------------------------------------------------
// Long-run statistics (criteria 2a-2c)
// ---------------------------------------------------------------------------
struct LongRunStats {
  std::array<double, 12> seasonal_variance{};  // per calendar month
  std::vector<double> pdf_grid;                // 512 points, mean +- 5 std
  std::vector<double> pdf_density;
  std::vector<double> acf;                     // lags 0..max_lag, biased normalization
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw, Gaussian = 3
};

LongRunStats long_run_stats(const MonthlySeries& series, int max_lag_months);

// ---------------------------------------------------------------------------
// Spatial reconstruction (criterion 3a)
// ---------------------------------------------------------------------------
struct RegressionProfile {
  std::vector<double> longitudes;  // degrees east
  std::vector<double> r_c;
  std::vector<double> r_e;
};

// Per-longitude least squares of SST(x, t) on (T_C(t), T_E(t)), no intercept
// (all series are anomalies). grid_anomalies is longitude x time.
RegressionProfile regression_profile(const Matrix& grid_anomalies,
                                     const std::vector<double>& longitudes,
                                     const MonthlySeries& tc, const MonthlySeries& te);

// Idealized two-lobe profile (unimodal r_C centered in the Nino-4 region,
// r_E in the Nino-3 region) for runs without gridded observations.
RegressionProfile synthetic_regression_profile();

struct BivariatePoint {
  int year = 0;
  EventKind kind = EventKind::EP;
  double peak_longitude = 0.0;  // degrees east
  double peak_amplitude = 0.0;  // degC
};

// One point per El Nino event: reconstruct SST(x) from the DJF-mean
// (T_C, T_E) through the profile and locate the zonal maximum.
std::vector<BivariatePoint> bivariate_diagram(const EventCatalog& catalog,
                                              const RegressionProfile& profile);

}  // namespace enso
