#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace orthochan {

// Welford accumulator with Chan's pairwise merge.
struct Accumulator {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Accumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / total;
    count += other.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double standard_error() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// Entrywise version for vector-valued samples.
struct ArrayAccumulator {
  std::size_t count = 0;
  Eigen::ArrayXd mean;
  Eigen::ArrayXd m2;

  void add(const Eigen::ArrayXd& x) {
    if (count == 0) {
      mean = Eigen::ArrayXd::Zero(x.size());
      m2 = Eigen::ArrayXd::Zero(x.size());
    }
    ++count;
    const Eigen::ArrayXd delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const ArrayAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count + other.count);
    const Eigen::ArrayXd delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta.square() * static_cast<double>(count) * static_cast<double>(other.count) / total;
    count += other.count;
  }

  Eigen::ArrayXd standard_error() const {
    if (count < 2) return Eigen::ArrayXd::Zero(mean.size());
    return (m2 / static_cast<double>(count - 1) / static_cast<double>(count)).sqrt();
  }
};

// Samples are processed in fixed blocks of this many draws; blocks are merged
// in index order, so results do not depend on the worker count.
inline constexpr std::size_t kSampleBlock = 256;

Accumulator accumulate_samples(std::size_t samples, const std::function<double(std::size_t)>& draw);
ArrayAccumulator accumulate_array_samples(std::size_t samples,
                                          const std::function<Eigen::ArrayXd(std::size_t)>& draw);

// Linear-interpolation quantile (type 7) of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace orthochan
