#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erasurelab {

// Splits [0, total) into fixed chunks of `chunk` items and evaluates
// fn(begin, end) for each chunk on up to `workers` threads. Chunk boundaries
// do not depend on the worker count and results come back in chunk order, so
// an ordered reduction over them is bit-identical for any `workers`.
template <class Fn>
auto run_chunked(std::size_t total, std::size_t chunk, unsigned workers, Fn&& fn) {
  using Partial = decltype(fn(std::size_t{}, std::size_t{}));
  if (chunk == 0) chunk = 1;
  const std::size_t nchunks = (total + chunk - 1) / chunk;
  std::vector<Partial> out(nchunks);
  const unsigned nthreads =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, nchunks)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        const std::size_t begin = c * chunk;
        out[c] = fn(begin, std::min(total, begin + chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(nchunks);
        return;
      }
    }
  };

  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace erasurelab
