#include "fkpath/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fkpath {

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = static_cast<long>(xs.size());
  if (s.count == 0) return s;
  double mean = 0.0;
  double m2 = 0.0;
  long k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  s.mean = mean;
  if (s.count > 1) {
    s.variance = m2 / static_cast<double>(s.count - 1);
    s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  }
  return s;
}

double z_score(double a, double se_a, double b, double se_b) {
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  if (se == 0.0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
  return (a - b) / se;
}

double lag_autocorrelation(std::span<const double> xs, int lag) {
  const long n = static_cast<long>(xs.size());
  if (lag <= 0 || lag >= n) return 0.0;
  const Summary s = summarize(xs);
  if (s.variance == 0.0) return 0.0;
  double acc = 0.0;
  for (long i = 0; i + lag < n; ++i)
    acc += (xs[static_cast<std::size_t>(i)] - s.mean) *
           (xs[static_cast<std::size_t>(i + lag)] - s.mean);
  return acc / (static_cast<double>(n - lag) * s.variance);
}

double integrated_autocorr_time(std::span<const double> xs, int max_lag) {
  double iat = 1.0;
  for (int lag = 1; lag <= max_lag; ++lag) {
    const double rho = lag_autocorrelation(xs, lag);
    if (rho <= 0.0) break;
    iat += 2.0 * rho;
  }
  return iat;
}

Summary batch_means(std::span<const double> xs, int n_batches) {
  const long n = static_cast<long>(xs.size());
  Summary out;
  if (n == 0 || n_batches < 2) return summarize(xs);
  n_batches = static_cast<int>(std::min<long>(n_batches, n));
  const long batch = n / n_batches;
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(n_batches));
  for (int b = 0; b < n_batches; ++b) {
    double acc = 0.0;
    for (long i = b * batch; i < (b + 1) * batch; ++i) acc += xs[static_cast<std::size_t>(i)];
    means.push_back(acc / static_cast<double>(batch));
  }
  const Summary bs = summarize(means);
  out.mean = bs.mean;
  out.count = n;
  out.variance = bs.variance;
  out.std_error = bs.std_error;
  return out;
}

}  // namespace fkpath
