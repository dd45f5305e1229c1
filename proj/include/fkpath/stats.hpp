#pragma once

#include <span>
#include <vector>

namespace fkpath {

struct Summary {
  double mean = 0.0;
  double variance = 0.0;   // unbiased sample variance
  double std_error = 0.0;  // sqrt(variance / count)
  long count = 0;
};

Summary summarize(std::span<const double> xs);

// Two-sample z statistic (a - b) / sqrt(se_a^2 + se_b^2); 0 when both the
// difference and the combined error vanish.
double z_score(double a, double se_a, double b, double se_b);

// Sample autocorrelation at the given lag (0 when degenerate).
double lag_autocorrelation(std::span<const double> xs, int lag);

// Integrated autocorrelation time with Geyer-style truncation at the first
// nonpositive autocorrelation. At least 1.
double integrated_autocorr_time(std::span<const double> xs, int max_lag);

// Mean and standard error of a correlated sequence via batch means.
Summary batch_means(std::span<const double> xs, int n_batches);

}  // namespace fkpath
