#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace bbvi {

// Runs fn(i) for i in [0, count) over at most `threads` workers in disjoint
// blocks. Each unit must write only to its own slot in caller-owned storage,
// so the result is identical for any thread count.
inline void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  if (count <= 0) return;
  const int workers = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const long block = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long begin = w * block;
    const long end = std::min(count, begin + block);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (long i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Fixed-shape pairwise tree sum over values[begin, end). The reduction order
// depends only on the index range, never on threading, so sums reproduce
// bitwise across runs.
inline double pairwise_sum(const std::vector<double>& values, std::size_t begin,
                           std::size_t end) {
  const std::size_t n = end - begin;
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += values[i];
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum(values, begin, mid) + pairwise_sum(values, mid, end);
}

inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(values, 0, values.size());
}

}  // namespace bbvi
