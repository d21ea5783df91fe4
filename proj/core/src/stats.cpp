#include "gglab/stats.hpp"

#include <cmath>
#include <numeric>

#include "gglab/error.hpp"

namespace gglab {

void MomentAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
}

double MomentAccumulator::stderr_iid() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

BatchMeansResult batch_means(std::span<const double> series, std::size_t batches) {
  if (batches < 2) throw Error("batch means needs at least 2 batches");
  const std::size_t size = series.size() / batches;
  if (size == 0) throw Error("series shorter than the number of batches");
  MomentAccumulator acc;
  for (std::size_t b = 0; b < batches; ++b) {
    acc.add(pairwise_sum(series.subspan(b * size, size)) / static_cast<double>(size));
  }
  return {acc.mean(), acc.stderr_iid(), batches, size};
}

BatchAccumulator::BatchAccumulator(std::size_t total, std::size_t batches) : batches_(batches) {
  if (batches < 2) throw Error("batch means needs at least 2 batches");
  batch_size_ = total / batches;
  if (batch_size_ == 0) throw Error("stream shorter than the number of batches");
  means_.reserve(batches);
}

void BatchAccumulator::add(double x) {
  if (means_.size() == batches_) return;
  current_ += x;
  if (++filled_ == batch_size_) {
    means_.push_back(current_ / static_cast<double>(batch_size_));
    current_ = 0.0;
    filled_ = 0;
  }
}

BatchMeansResult BatchAccumulator::result() const {
  MomentAccumulator acc;
  for (double m : means_) acc.add(m);
  return {acc.mean(), acc.stderr_iid(), means_.size(), batch_size_};
}

JackknifeResult jackknife(std::size_t groups, const std::function<double(std::span<const std::size_t>)>& stat) {
  if (groups < 2) throw Error("jackknife needs at least 2 groups");
  std::vector<std::size_t> all(groups);
  std::iota(all.begin(), all.end(), std::size_t{0});
  JackknifeResult r;
  r.estimate = stat(all);
  std::vector<std::size_t> keep(groups - 1);
  std::vector<double> leave(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < groups; ++i)
      if (i != g) keep[k++] = i;
    leave[g] = stat(keep);
  }
  const double mean = pairwise_sum(leave) / static_cast<double>(groups);
  double s = 0.0;
  for (double v : leave) s += (v - mean) * (v - mean);
  r.se = std::sqrt(s * static_cast<double>(groups - 1) / static_cast<double>(groups));
  return r;
}

JackknifeResult jackknife_mean(std::span<const double> values) {
  MomentAccumulator acc;
  for (double v : values) acc.add(v);
  return {acc.mean(), acc.stderr_iid()};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("line fit needs at least two matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error("line fit with degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ss / syy : 1.0;
  f.residual_rms = std::sqrt(ss / n);
  f.slope_stderr = x.size() > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  return f;
}

double integrated_autocorrelation(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 1.0;
  const double mean = pairwise_sum(series) / static_cast<double>(n);
  double c0 = 0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0) return 1.0;
  double tau = 1.0;
  for (std::size_t lag = 1; lag < n / 2; ++lag) {
    double c = 0;
    for (std::size_t i = 0; i + lag < n; ++i) c += (series[i] - mean) * (series[i + lag] - mean);
    c /= static_cast<double>(n) * c0;
    tau += 2.0 * c;
    if (static_cast<double>(lag) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

}  // namespace gglab
