#include "enso/stats.hpp"

#include <algorithm>
#include <cmath>

namespace enso {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DataLengthError("percentile of empty set");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[std::min(hi, values.size() - 1)] * frac;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw DataLengthError("mean of empty set");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

MomentSet central_moments(const std::vector<double>& v) {
  MomentSet out;
  out.mean = mean_of(v);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.variance = m2;
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
  }
  return out;
}

double correlation_score(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("correlation inputs differ in length");
  if (a.size() < 3) throw DataLengthError("correlation needs >= 3 samples");
  const double ma = a.mean(), mb = b.mean();
  const Vector da = a.array() - ma;
  const Vector db = b.array() - mb;
  const double va = da.squaredNorm(), vb = db.squaredNorm();
  if (va <= 0.0 || vb <= 0.0) throw ConfigError("correlation of a zero-variance series");
  return da.dot(db) / std::sqrt(va * vb);
}

}  // namespace enso
