#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace qsrc {

/// Splits [0, count) into fixed chunks and maps `work` over them, possibly on
/// several threads. Results are returned indexed by chunk so callers can fold
/// them in chunk order; totals are then independent of the worker count.
template <class Acc, class Work>
std::vector<Acc> chunked_map(std::uint64_t count, std::uint64_t chunk_size, int jobs,
                             Work&& work) {
  if (chunk_size == 0) chunk_size = 1;
  const std::uint64_t chunks = count == 0 ? 0 : (count - 1) / chunk_size + 1;
  std::vector<Acc> results(static_cast<size_t>(chunks));
  if (chunks == 0) return results;

  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t begin = c * chunk_size;
    const std::uint64_t end = std::min(count, begin + chunk_size);
    results[static_cast<size_t>(c)] = work(c, begin, end);
  };

  if (jobs <= 1 || chunks == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    return results;
  }

  std::atomic<std::uint64_t> next{0};
  const unsigned workers =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), chunks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
        run_chunk(c);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace qsrc
