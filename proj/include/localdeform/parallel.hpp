// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace localdeform {

// Static block partition over [begin, end). Each index is processed exactly
// once and workers write to disjoint outputs, so results are identical for
// any thread count.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, int threads, Fn&& fn) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const std::int64_t workers =
      std::min<std::int64_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + count * w / workers;
    const std::int64_t hi = begin + count * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace localdeform
