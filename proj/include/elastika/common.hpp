#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace elastika {

inline constexpr double kPositiveInfinity = std::numeric_limits<double>::infinity();

// Error hierarchy. Each error carries the process exit code used by the CLI:
// 2 usage/parse, 3 dataset gate, 4 I/O, 5 internal invariant breach.
class Error : public std::runtime_error {
public:
  Error(const std::string& msg, int exit_code) : std::runtime_error(msg), code_(exit_code) {}
  [[nodiscard]] int exit_code() const noexcept { return code_; }

private:
  int code_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& msg) : Error(msg, 2) {}
};

class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg, 2) {}
};

class EmptyDatasetError : public Error {
public:
  explicit EmptyDatasetError(const std::string& msg) : Error(msg, 2) {}
};

class VariableLengthError : public Error {
public:
  explicit VariableLengthError(const std::string& msg) : Error(msg, 3) {}
};

class SingletonClassError : public Error {
public:
  explicit SingletonClassError(const std::string& msg) : Error(msg, 3) {}
};

class LengthMismatchError : public Error {
public:
  explicit LengthMismatchError(const std::string& msg) : Error(msg, 3) {}
};

class SeriesTooShortError : public Error {
public:
  explicit SeriesTooShortError(const std::string& msg) : Error(msg, 3) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg, 4) {}
};

class InternalError : public Error {
public:
  explicit InternalError(const std::string& msg) : Error(msg, 5) {}
};

inline void internal_check(bool cond, const char* msg) {
  if (!cond) { throw InternalError(msg); }
}

// --- --- --- Seeded randomness.
//
// All stochastic components draw from this generator so that a given 64-bit
// seed plus an identical call sequence reproduces the identical stream on any
// platform. The raw stream is std::mt19937_64 (fully specified by the
// standard); the value mappings below avoid std::*_distribution, whose
// outputs are implementation-defined.

/// SplitMix64 mixer, used to derive child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, n). n must be > 0. Rejection sampling, unbiased.
  std::size_t next_index(std::size_t n) {
    const std::uint64_t bound = n;
    std::uint64_t x, r;
    do {
      x = next_u64();
      r = x % bound;
    } while (x - r > std::numeric_limits<std::uint64_t>::max() - (bound - 1));
    return static_cast<std::size_t>(r);
  }

  /// Standard normal variate via Marsaglia's polar rejection method.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  /// Independent child stream; a deterministic function of (seed, stream_id).
  [[nodiscard]] Rng spawn(std::uint64_t stream_id) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream_id + 1)));
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Worker cap: ELASTIKA_THREADS when set (>=1), else hardware concurrency.
std::size_t worker_count();

/// Runs f(i) for i in [0, n) on up to worker_count() threads.
/// Work is partitioned statically; the first exception thrown is rethrown
/// in the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

} // namespace elastika
