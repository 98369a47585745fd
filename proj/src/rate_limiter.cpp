#include "rcourt/rate_limiter.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace rcourt {

RateLimiter::RateLimiter(double requests_per_minute, double burst)
    : per_minute_(requests_per_minute),
      capacity_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(Clock::now()) {
  if (requests_per_minute <= 0) throw std::invalid_argument("rate limit must be positive");
}

void RateLimiter::refill(Clock::time_point now) {
  std::chrono::duration<double> elapsed = now - last_;
  tokens_ = std::min(capacity_, tokens_ + elapsed.count() * per_minute_ / 60.0);
  last_ = now;
}

bool RateLimiter::try_acquire() {
  std::lock_guard lock(mutex_);
  refill(Clock::now());
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

void RateLimiter::acquire() {
  for (;;) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mutex_);
      refill(Clock::now());
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) * 60.0 / per_minute_);
    }
    std::this_thread::sleep_for(wait);
  }
}

}  // namespace rcourt
