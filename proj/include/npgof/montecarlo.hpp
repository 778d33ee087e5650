#pragma once
// Deterministic parallel Monte Carlo engine. Replications are pure functions
// of their index; partial results live in fixed-size index blocks and the
// final reduction walks the blocks in order, so the worker count can never
// reorder the arithmetic or the randomness.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace npgof {

inline constexpr std::int64_t kMcBlockSize = 4096;

// Fold trial(rep) for rep in [0, reps) into per-block partials, then reduce
// the partials in block order. trial must return Partial and depend only on
// the replication index.
template <typename Partial, typename Trial, typename Fold>
Partial mc_accumulate(std::int64_t reps, int workers, Partial zero,
                      Trial&& trial, Fold&& fold) {
  if (reps < 1) throw std::invalid_argument("mc_accumulate: reps must be >= 1");
  if (workers < 1) {
    throw std::invalid_argument("mc_accumulate: workers must be >= 1");
  }
  const std::int64_t blocks = (reps + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<Partial> partial(static_cast<std::size_t>(blocks), zero);
  std::atomic<std::int64_t> next{0};
  // A throwing trial must surface as a normal exception, not terminate a
  // worker thread: the first error wins, the rest of the pool drains.
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};
  const auto run = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::int64_t b = next.fetch_add(1);
      if (b >= blocks) return;
      const std::int64_t lo = b * kMcBlockSize;
      const std::int64_t hi = std::min(reps, lo + kMcBlockSize);
      try {
        Partial acc = zero;
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          acc = fold(acc, trial(rep));
        }
        partial[static_cast<std::size_t>(b)] = acc;
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  const auto spawn = static_cast<int>(
      std::min<std::int64_t>(static_cast<std::int64_t>(workers), blocks));
  if (spawn <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int w = 0; w < spawn; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) std::rethrow_exception(error);
  Partial total = zero;
  for (const Partial& p : partial) total = fold(total, p);
  return total;
}

// Number of replications on which the boolean trial fires.
template <typename Trial>
std::int64_t mc_rejection_count(std::int64_t reps, int workers, Trial&& trial) {
  return mc_accumulate<std::int64_t>(
      reps, workers, 0,
      [&trial](std::int64_t rep) {
        return trial(rep) ? std::int64_t{1} : std::int64_t{0};
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
}

// Block-deterministic sample mean of a real-valued trial.
template <typename Trial>
double mc_mean(std::int64_t reps, int workers, Trial&& trial) {
  const double total = mc_accumulate<double>(
      reps, workers, 0.0, std::forward<Trial>(trial),
      [](double a, double b) { return a + b; });
  return total / static_cast<double>(reps);
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval: stable at 0 and 1 and always contains the MLE.
inline WilsonInterval wilson_interval(std::int64_t successes,
                                      std::int64_t trials, double z = 1.96) {
  if (trials < 1) {
    throw std::invalid_argument("wilson_interval: trials must be >= 1");
  }
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: successes out of range");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  WilsonInterval w;
  w.low = std::clamp(center - half, 0.0, p);
  w.high = std::clamp(center + half, p, 1.0);
  return w;
}

struct PowerEstimate {
  std::int64_t rejections = 0;
  std::int64_t reps = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
};

// Rejection probability with a Wilson 95% interval. trial(rep) must be a
// pure function of rep (seed it through the recorded seed).
template <typename Trial>
PowerEstimate estimate_power(std::int64_t reps, int workers,
                             std::uint64_t seed, Trial&& trial) {
  const auto start = std::chrono::steady_clock::now();
  PowerEstimate out;
  out.reps = reps;
  out.seed = seed;
  out.rejections = mc_rejection_count(reps, workers, std::forward<Trial>(trial));
  out.estimate = static_cast<double>(out.rejections) / static_cast<double>(reps);
  const auto ci = wilson_interval(out.rejections, reps);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  out.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

}  // namespace npgof
