#pragma once

#include <chrono>
#include <deque>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

namespace sitelens::llm {

/// Sliding-window rate limiter: at most `limit` dispatches within any
/// window of the given length. The decision core is driven by explicit
/// timestamps so it can be tested against a simulated clock.
class SlidingWindowLimiter {
public:
    using Clock = std::chrono::steady_clock;

    SlidingWindowLimiter(std::size_t limit, std::chrono::milliseconds window)
        : limit_(limit), window_(window) {}

    /// Records a dispatch at `now` and returns nullopt, or returns how long
    /// to wait before the next slot opens.
    std::optional<std::chrono::milliseconds> try_acquire(Clock::time_point now) {
        std::lock_guard lock(mutex_);
        while (!dispatches_.empty() && now - dispatches_.front() >= window_)
            dispatches_.pop_front();
        if (dispatches_.size() < limit_) {
            dispatches_.push_back(now);
            return std::nullopt;
        }
        auto wait = window_ - (now - dispatches_.front());
        return std::chrono::duration_cast<std::chrono::milliseconds>(wait) +
               std::chrono::milliseconds(1);
    }

    void acquire() {
        while (true) {
            auto wait = try_acquire(Clock::now());
            if (!wait) return;
            std::this_thread::sleep_for(*wait);
        }
    }

private:
    std::size_t limit_;
    std::chrono::milliseconds window_;
    std::mutex mutex_;
    std::deque<Clock::time_point> dispatches_;
};

/// Exponential backoff with a cap; jitter is additive so the pre-jitter
/// delay sequence is non-decreasing in the attempt number.
struct BackoffPolicy {
    std::chrono::milliseconds base{500};
    std::chrono::milliseconds cap{8000};
    double jitter_frac = 0.25;

    std::chrono::milliseconds delay(int attempt) const {
        auto d = base;
        for (int i = 1; i < attempt && d < cap; ++i) d *= 2;
        return std::min(d, cap);
    }

    std::chrono::milliseconds with_jitter(int attempt, std::mt19937_64& rng) const {
        auto d = delay(attempt);
        if (jitter_frac <= 0.0) return d;
        auto span = static_cast<std::uint64_t>(static_cast<double>(d.count()) * jitter_frac);
        if (span == 0) return d;
        return d + std::chrono::milliseconds(rng() % (span + 1));
    }
};

}  // namespace sitelens::llm
