#pragma once

#include <vector>

#include "enso/model.hpp"

namespace enso {

// Linear-interpolation percentile (numpy default convention); p in [0, 100].
// Copies and sorts its input.
double percentile(std::vector<double> values, double p);

double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);  // population (1/N)

struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw, Gaussian = 3
};

MomentSet central_moments(const std::vector<double>& v);

// Pearson correlation; throws on length < 3 or zero variance.
double correlation_score(const Vector& a, const Vector& b);

}  // namespace enso
