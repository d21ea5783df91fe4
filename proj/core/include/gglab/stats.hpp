#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gglab {

// Streaming count / mean / sum of squared deviations (Welford), mergeable
// with the pairwise update of Chan et al.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& o);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double population_variance() const { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }
  double stderr_iid() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Series split into `batches` equal consecutive blocks (tail remainder dropped).
struct BatchMeansResult {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batches = 0;
  std::size_t batch_size = 0;
};

inline constexpr std::size_t kDefaultBatches = 32;
inline constexpr std::size_t kMinBatches = 16;

BatchMeansResult batch_means(std::span<const double> series, std::size_t batches = kDefaultBatches);

// Fixed-size batch accumulator for streams whose length is known up front.
class BatchAccumulator {
 public:
  BatchAccumulator(std::size_t total, std::size_t batches = kDefaultBatches);
  void add(double x);
  BatchMeansResult result() const;
  const std::vector<double>& batch_values() const { return means_; }

 private:
  std::size_t batch_size_;
  std::size_t batches_;
  std::size_t filled_ = 0;
  double current_ = 0.0;
  std::vector<double> means_;
};

struct JackknifeResult {
  double estimate = 0.0;  // statistic on the full sample
  double se = 0.0;
};

// Delete-one jackknife over groups; `stat` sees the group indices kept.
JackknifeResult jackknife(std::size_t groups, const std::function<double(std::span<const std::size_t>)>& stat);
// Plain jackknife of the mean of per-group values.
JackknifeResult jackknife_mean(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double residual_rms = 0.0;
  double slope_stderr = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Integrated autocorrelation time with Sokal's self-consistent window (c = 5).
double integrated_autocorrelation(std::span<const double> series);

// Pairwise (tree) summation, fixed order.
double pairwise_sum(std::span<const double> v);

}  // namespace gglab
