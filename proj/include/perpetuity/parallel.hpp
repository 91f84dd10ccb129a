#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace perpetuity {

inline constexpr std::uint64_t kChunkSize = 1u << 15;

inline unsigned resolve_workers(unsigned hint) {
  if (hint > 0) return hint;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `fn(begin, end)` over fixed-size index chunks of [0, n) on up to
/// `workers` threads and returns the per-chunk results in chunk order. The
/// chunking depends only on n, so merging the results left to right gives the
/// same answer for any worker count.
template <class Fn>
auto map_chunks(std::uint64_t n, unsigned workers, Fn fn) {
  using Result = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t begin = c * kChunkSize;
        results[c] = fn(begin, std::min(n, begin + kChunkSize));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const unsigned used = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), std::max<std::uint64_t>(1, chunks)));
  if (used == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(used);
    for (unsigned i = 0; i < used; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace perpetuity
