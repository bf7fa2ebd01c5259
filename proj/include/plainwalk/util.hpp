#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace plainwalk {

// Bad input: malformed config, invalid walk data, violated preconditions.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver breakdown: singular systems, non-convergence, overflow of exact DP.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-stream generator contract: stream k of a run is make_stream(seed, k),
// so parallel and serial executions produce identical draws.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed + 0x632be59bd9b4e019ULL * (stream + 1);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return std::mt19937_64(a ^ (b << 1));
}

// Worker cap: PLAINWALK_THREADS (0 or unset = hardware concurrency).
inline int worker_count(int requested = 0) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("PLAINWALK_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return n;
}

// Runs fn(block_index) for blocks 0..n_blocks-1 on up to `threads` workers.
// Block decomposition is fixed by the caller, so results can be reduced in
// block order independently of the worker count.
inline void parallel_blocks(long n_blocks, const std::function<void(long)>& fn, int threads = 0) {
  int nw = worker_count(threads);
  if (nw <= 1 || n_blocks <= 1) {
    for (long b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        long b = next.fetch_add(1);
        if (b >= n_blocks) return;
        fn(b);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace plainwalk
