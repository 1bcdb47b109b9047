// Minimal blocked fan-out over an index range.

#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dmmv {

// Runs fn(begin, end, worker) over `workers` contiguous blocks of [0, count).
// With one worker (or a tiny range) fn runs on the calling thread.
template <class Fn>
void parallel_blocks(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    fn(std::size_t{0}, count, std::size_t{0});
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  fn(std::size_t{0}, std::min(count, chunk), std::size_t{0});
}

}  // namespace dmmv
