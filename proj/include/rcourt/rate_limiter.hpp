#pragma once

#include <chrono>
#include <mutex>

namespace rcourt {

// Token bucket over requests per minute. acquire() blocks until a token is
// available; the bucket is shared by every concurrent caller.
class RateLimiter {
 public:
  RateLimiter(double requests_per_minute, double burst);

  void acquire();
  bool try_acquire();

  double requests_per_minute() const { return per_minute_; }

 private:
  using Clock = std::chrono::steady_clock;

  void refill(Clock::time_point now);

  double per_minute_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

}  // namespace rcourt
