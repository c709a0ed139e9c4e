#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string_view>
#include <thread>
#include <vector>

namespace livsic {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// SplitMix64 finalizer; the mixing function behind every generator here.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for a named stage: hash of (stage name, master seed).
constexpr std::uint64_t derive_seed(std::string_view stage, std::uint64_t master) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ mix64(master));
}

/// Counter-based generator: the value for (key, counter) is a pure function,
/// so samples can be drawn in any order or in parallel with identical results.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }
  /// Uniform in [0,1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
  /// Uniform in the open interval (0,1).
  constexpr double uniform_open(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }
  constexpr CounterRng substream(std::uint64_t id) const noexcept {
    return CounterRng(mix64(key_ + 0x632be59bd9b4e019ULL * (id + 1)));
  }
  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng.
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t key) noexcept : rng_(key) {}
  double uniform() noexcept { return rng_.uniform(counter_++); }
  double uniform_open() noexcept { return rng_.uniform_open(counter_++); }
  std::uint64_t bits() noexcept { return rng_.bits(counter_++); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

inline std::size_t worker_count(std::size_t work_items) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(hw, work_items));
}

/// Runs fn(i) for i in [0, n) on contiguous chunks across threads.
/// Callers write results by index, so output is independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_chunk = 64) {
  if (n == 0) return;
  const std::size_t workers = worker_count((n + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &errors, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // lowest chunk wins, so the reported error does not depend on timing
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace livsic
