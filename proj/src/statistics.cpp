#include "orthochan/statistics.hpp"

#include "orthochan/error.hpp"
#include "orthochan/parallel.hpp"

namespace orthochan {

Accumulator accumulate_samples(std::size_t samples, const std::function<double(std::size_t)>& draw) {
  const std::size_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<Accumulator> partial(blocks);
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t end = std::min(samples, (blk + 1) * kSampleBlock);
    for (std::size_t i = blk * kSampleBlock; i < end; ++i) partial[blk].add(draw(i));
  });
  Accumulator total;
  for (const auto& acc : partial) total.merge(acc);
  return total;
}

ArrayAccumulator accumulate_array_samples(std::size_t samples,
                                          const std::function<Eigen::ArrayXd(std::size_t)>& draw) {
  const std::size_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<ArrayAccumulator> partial(blocks);
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t end = std::min(samples, (blk + 1) * kSampleBlock);
    for (std::size_t i = blk * kSampleBlock; i < end; ++i) partial[blk].add(draw(i));
  });
  ArrayAccumulator total;
  for (const auto& acc : partial) total.merge(acc);
  return total;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (q < 0.0 || q > 1.0) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

}  // namespace orthochan
