#include "enso/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace enso {

MonthlySeries monthly_series_from_trajectory(const Trajectory& traj,
                                             const std::string& var,
                                             bool to_celsius) {
  if (traj.n_samples() < 2) throw DataLengthError("trajectory too short");
  const double dt = traj.times[1] - traj.times[0];
  if (std::abs(dt - kMonthNondim) > 1e-9)
    throw ConfigError("monthly series needs dt = 0.5 non-dimensional (monthly output)");
  MonthlySeries s;
  s.name = var;
  s.start_month = traj.calendar_offset_months % 12;
  s.start_year = 0;
  const Vector col = traj.column(var);
  s.values.assign(col.data(), col.data() + col.size());
  if (to_celsius) {
    for (auto& v : s.values) v = convert_units(v, Quantity::T, UnitDirection::ToPhysical);
    s.celsius = true;
  }
  return s;
}

MonthlySeries remove_monthly_climatology(const MonthlySeries& series) {
  std::array<double, 12> sum{}, count{};
  for (int k = 0; k < series.n_months(); ++k) {
    sum[series.month_of(k)] += series.values[k];
    count[series.month_of(k)] += 1.0;
  }
  MonthlySeries out = series;
  for (int k = 0; k < series.n_months(); ++k) {
    const int m = series.month_of(k);
    if (count[m] > 0.0) out.values[k] -= sum[m] / count[m];
  }
  return out;
}

std::vector<MonthlySeries> segment_series(const MonthlySeries& series, int years) {
  if (years < 1) throw ConfigError("segment length must be >= 1 year");
  // advance to the first January so segments are year-aligned
  int k0 = 0;
  while (k0 < series.n_months() && series.month_of(k0) != 0) ++k0;
  const int seg_months = 12 * years;
  std::vector<MonthlySeries> out;
  for (int start = k0; start + seg_months <= series.n_months(); start += seg_months) {
    MonthlySeries seg;
    seg.name = series.name;
    seg.celsius = series.celsius;
    seg.start_month = 0;
    seg.start_year = series.year_of(start);
    seg.values.assign(series.values.begin() + start,
                      series.values.begin() + start + seg_months);
    out.push_back(std::move(seg));
  }
  return out;
}

// ---------------------------------------------------------------------------
int EventCatalog::count(EventKind k) const {
  int c = 0;
  for (const auto& e : events) c += e.kind == k;
  return c;
}
int EventCatalog::count_el_nino() const {
  return count(EventKind::EP) + count(EventKind::CP);
}
int EventCatalog::count_extreme() const {
  int c = 0;
  for (const auto& e : events) c += e.extreme;
  return c;
}
namespace {
int count_groups(const std::vector<Event>& events, bool la_nina) {
  std::vector<int> ids;
  for (const auto& e : events) {
    const bool is_ln = e.kind == EventKind::LaNina;
    if (is_ln == la_nina && e.multiyear_id) ids.push_back(*e.multiyear_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return static_cast<int>(ids.size());
}
}  // namespace
int EventCatalog::count_multiyear_el_nino() const { return count_groups(events, false); }
int EventCatalog::count_multiyear_la_nina() const { return count_groups(events, true); }

EventCatalog classify_events(const MonthlySeries& tc, const MonthlySeries& te) {
  if (!tc.celsius || !te.celsius)
    throw ConfigError("event classification requires series in degC");
  if (tc.n_months() != te.n_months() || tc.start_month != te.start_month ||
      tc.start_year != te.start_year)
    throw DimensionError("T_C and T_E series are not aligned");
  const int N = tc.n_months();

  EventCatalog catalog;
  catalog.span_years = tc.span_years();

  for (int k = 0; k + 2 < N; ++k) {
    if (tc.month_of(k) != 11) continue;  // December
    const double djf_tc = (tc.values[k] + tc.values[k + 1] + tc.values[k + 2]) / 3.0;
    const double djf_te = (te.values[k] + te.values[k + 1] + te.values[k + 2]) / 3.0;

    Event e;
    e.year = tc.year_of(k);
    e.djf_tc = djf_tc;
    e.djf_te = djf_te;

    // strict thresholds: exactly 0.5 is not an event
    if (djf_te > djf_tc && djf_te > 0.5) {
      e.kind = EventKind::EP;
    } else if (djf_tc > djf_te && djf_tc > 0.5) {
      e.kind = EventKind::CP;
    } else if (djf_tc < -0.5 || djf_te < -0.5) {
      e.kind = EventKind::LaNina;
    } else {
      continue;
    }

    if (e.kind != EventKind::LaNina) {
      // extreme window: April of the event year through the following March
      double te_max = -1e300;
      for (int j = std::max(0, k - 8); j < std::min(N, k + 4); ++j)
        te_max = std::max(te_max, te.values[j]);
      e.extreme = te_max > 2.5;
    }
    catalog.events.push_back(e);
  }

  // multi-year groups: maximal runs of >= 2 consecutive years, same polarity
  int next_id = 0;
  std::size_t i = 0;
  while (i < catalog.events.size()) {
    std::size_t j = i;
    const bool ln = catalog.events[i].kind == EventKind::LaNina;
    while (j + 1 < catalog.events.size() &&
           catalog.events[j + 1].year == catalog.events[j].year + 1 &&
           (catalog.events[j + 1].kind == EventKind::LaNina) == ln)
      ++j;
    if (j > i) {
      for (std::size_t q = i; q <= j; ++q) catalog.events[q].multiyear_id = next_id;
      ++next_id;
    }
    i = j + 1;
  }
  return catalog;
}

// ---------------------------------------------------------------------------
const char* const kEventCategoryNames[kEventCategories] = {
    "el_nino_all", "ep_el_nino",  "cp_el_nino",        "extreme_el_nino",
    "multi_year_el_nino", "la_nina_all", "multi_year_la_nina"};

SegmentStats occurrence_frequencies(const std::vector<EventCatalog>& catalogs,
                                    int required_years) {
  if (catalogs.empty()) throw DataLengthError("no segments");
  for (const auto& c : catalogs)
    if (c.span_years < required_years)
      throw ConfigError("segment shorter than " + std::to_string(required_years) +
                        " years");
  SegmentStats stats;
  const int S = static_cast<int>(catalogs.size());
  stats.counts.resize(S, kEventCategories);
  for (int s = 0; s < S; ++s) {
    const auto& c = catalogs[s];
    stats.counts(s, 0) = c.count_el_nino();
    stats.counts(s, 1) = c.count(EventKind::EP);
    stats.counts(s, 2) = c.count(EventKind::CP);
    stats.counts(s, 3) = c.count_extreme();
    stats.counts(s, 4) = c.count_multiyear_el_nino();
    stats.counts(s, 5) = c.count(EventKind::LaNina);
    stats.counts(s, 6) = c.count_multiyear_la_nina();
  }
  stats.median.resize(kEventCategories);
  stats.p5.resize(kEventCategories);
  stats.p95.resize(kEventCategories);
  for (int j = 0; j < kEventCategories; ++j) {
    std::vector<double> col(stats.counts.col(j).data(),
                            stats.counts.col(j).data() + S);
    stats.median[j] = percentile(col, 50.0);
    stats.p5[j] = percentile(col, 5.0);
    stats.p95[j] = percentile(col, 95.0);
  }
  return stats;
}

// ---------------------------------------------------------------------------
LongRunStats long_run_stats(const MonthlySeries& series, int max_lag_months) {
  const int N = series.n_months();
  if (N < 12 * 30) throw DataLengthError("long-run statistics need >= 30 years");
  if (max_lag_months < 0 || max_lag_months >= N)
    throw ConfigError("invalid max lag");

  LongRunStats out;

  // per-calendar-month variance
  std::array<std::vector<double>, 12> bins;
  for (int k = 0; k < N; ++k) bins[series.month_of(k)].push_back(series.values[k]);
  for (int m = 0; m < 12; ++m)
    out.seasonal_variance[m] = bins[m].empty() ? 0.0 : variance_of(bins[m]);

  const MomentSet mom = central_moments(series.values);
  if (!(mom.variance > 0.0)) throw ConfigError("zero-variance series");
  out.variance = mom.variance;
  out.skewness = mom.skewness;
  out.kurtosis = mom.kurtosis;
  const double sd = std::sqrt(mom.variance);

  // Gaussian KDE, Silverman bandwidth, on a binned approximation (4096 bins,
  // far finer than the bandwidth).
  std::vector<double> sorted = series.values;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = percentile(sorted, 75.0) - percentile(sorted, 25.0);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double bw = 0.9 * spread * std::pow(static_cast<double>(N), -0.2);

  const int n_grid = 512;
  const double lo = mom.mean - 5.0 * sd, hi = mom.mean + 5.0 * sd;
  out.pdf_grid.resize(n_grid);
  out.pdf_density.assign(n_grid, 0.0);
  for (int g = 0; g < n_grid; ++g)
    out.pdf_grid[g] = lo + (hi - lo) * g / (n_grid - 1.0);

  const int n_bins = 4096;
  const double bin_lo = std::min(lo, sorted.front()) - 1e-9;
  const double bin_hi = std::max(hi, sorted.back()) + 1e-9;
  const double bin_w = (bin_hi - bin_lo) / n_bins;
  std::vector<double> hist(n_bins, 0.0);
  for (double v : series.values) {
    int b = static_cast<int>((v - bin_lo) / bin_w);
    b = std::clamp(b, 0, n_bins - 1);
    hist[b] += 1.0;
  }
  const double norm = 1.0 / (N * bw * std::sqrt(2.0 * std::numbers::pi));
  const double cutoff = 6.0 * bw;
  for (int g = 0; g < n_grid; ++g) {
    const double x = out.pdf_grid[g];
    const int b_lo = std::max(0, static_cast<int>((x - cutoff - bin_lo) / bin_w));
    const int b_hi = std::min(n_bins - 1, static_cast<int>((x + cutoff - bin_lo) / bin_w));
    double acc = 0.0;
    for (int b = b_lo; b <= b_hi; ++b) {
      if (hist[b] == 0.0) continue;
      const double center = bin_lo + (b + 0.5) * bin_w;
      const double z = (x - center) / bw;
      acc += hist[b] * std::exp(-0.5 * z * z);
    }
    out.pdf_density[g] = acc * norm;
  }

  // biased-normalized ACF
  out.acf.resize(max_lag_months + 1);
  const double mean = mom.mean;
  const double denom = mom.variance * N;
  for (int lag = 0; lag <= max_lag_months; ++lag) {
    double acc = 0.0;
    for (int k = 0; k + lag < N; ++k)
      acc += (series.values[k] - mean) * (series.values[k + lag] - mean);
    out.acf[lag] = acc / denom;
  }
  return out;
}

// ---------------------------------------------------------------------------
RegressionProfile regression_profile(const Matrix& grid_anomalies,
                                     const std::vector<double>& longitudes,
                                     const MonthlySeries& tc, const MonthlySeries& te) {
  const int L = static_cast<int>(longitudes.size());
  const int N = tc.n_months();
  if (grid_anomalies.rows() != L || grid_anomalies.cols() != N)
    throw DimensionError("grid shape must be longitudes x months");
  if (te.n_months() != N) throw DimensionError("T_C and T_E length mismatch");
  if (N < 24) throw DataLengthError("regression needs >= 24 months");

  Eigen::Map<const Vector> c(tc.values.data(), N);
  Eigen::Map<const Vector> e(te.values.data(), N);
  const double corr = correlation_score(c, e);
  if (std::abs(corr) > 0.999)
    throw ConfigError("T_C and T_E are collinear (|corr| > 0.999)");

  Eigen::Matrix2d gram;
  gram << c.dot(c), c.dot(e), c.dot(e), e.dot(e);
  const Eigen::Matrix2d gram_inv = gram.inverse();

  RegressionProfile prof;
  prof.longitudes = longitudes;
  prof.r_c.resize(L);
  prof.r_e.resize(L);
  for (int x = 0; x < L; ++x) {
    const Vector row = grid_anomalies.row(x).transpose();
    Eigen::Vector2d rhs(c.dot(row), e.dot(row));
    Eigen::Vector2d beta = gram_inv * rhs;
    prof.r_c[x] = beta[0];
    prof.r_e[x] = beta[1];
  }
  return prof;
}

RegressionProfile synthetic_regression_profile() {
  // Unimodal lobes centered on the Nino-4 (about 185E) and Nino-3 (about
  // 240E) boxes across the equatorial Pacific.
  RegressionProfile prof;
  for (double x = 120.0; x <= 280.0 + 1e-9; x += 2.0) {
    prof.longitudes.push_back(x);
    const double zc = (x - 185.0) / 30.0;
    const double ze = (x - 240.0) / 28.0;
    prof.r_c.push_back(std::exp(-zc * zc));
    prof.r_e.push_back(std::exp(-ze * ze));
  }
  return prof;
}

std::vector<BivariatePoint> bivariate_diagram(const EventCatalog& catalog,
                                              const RegressionProfile& profile) {
  const int L = static_cast<int>(profile.longitudes.size());
  if (L == 0 || profile.r_c.size() != profile.longitudes.size() ||
      profile.r_e.size() != profile.longitudes.size())
    throw DimensionError("malformed regression profile");

  std::vector<BivariatePoint> points;
  for (const auto& e : catalog.events) {
    if (e.kind == EventKind::LaNina) continue;
    BivariatePoint p;
    p.year = e.year;
    p.kind = e.kind;
    double best = -1e300;
    for (int x = 0; x < L; ++x) {
      const double sst = profile.r_c[x] * e.djf_tc + profile.r_e[x] * e.djf_te;
      if (sst > best) {
        best = sst;
        p.peak_longitude = profile.longitudes[x];
      }
    }
    p.peak_amplitude = best;
    points.push_back(p);
  }
  return points;
}

}  // namespace enso
