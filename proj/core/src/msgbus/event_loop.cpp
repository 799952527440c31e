#include "rai/msgbus/event_loop.hpp"

#include <algorithm>
#include <stdexcept>

namespace rai::msgbus {

namespace {
// Upper bound on a realtime wait so externally set stop flags are noticed.
constexpr Millis kMaxIdleWaitMs = 20;
}  // namespace

EventLoop::EventLoop(Mode mode, Millis start_ms)
    : mode_(mode),
      start_ms_(start_ms),
      started_(std::chrono::steady_clock::now()),
      virtual_now_(start_ms) {}

Millis EventLoop::now_ms() const {
  if (mode_ == Mode::kVirtual) return virtual_now_.load();
  const auto elapsed = std::chrono::steady_clock::now() - started_;
  return start_ms_ + std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
}

void EventLoop::post(Task task) { post_at(now_ms(), std::move(task)); }

void EventLoop::post_after(Millis delay_ms, Task task) {
  post_at(now_ms() + std::max<Millis>(delay_ms, 0), std::move(task));
}

void EventLoop::post_at(Millis at_ms, Task task) {
  {
    std::lock_guard lock(mu_);
    heap_.push_back(Entry{at_ms, next_seq_++, std::move(task)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }
  cv_.notify_all();
}

std::size_t EventLoop::pending() const {
  std::lock_guard lock(mu_);
  return heap_.size();
}

void EventLoop::wake() { cv_.notify_all(); }

void EventLoop::enter_driver() {
  const auto self = std::this_thread::get_id();
  std::lock_guard lock(mu_);
  if (depth_ > 0 && driver_.load() != self) {
    throw std::logic_error("event loop is already driven by another thread");
  }
  driver_.store(self);
  ++depth_;
}

void EventLoop::leave_driver() {
  std::lock_guard lock(mu_);
  if (--depth_ == 0) driver_.store(std::thread::id{});
}

bool EventLoop::run_until(const std::function<bool()>& done, Millis deadline_ms) {
  enter_driver();
  struct Leave {
    EventLoop* loop;
    ~Leave() { loop->leave_driver(); }
  } leave{this};
  return mode_ == Mode::kVirtual ? run_virtual(done, deadline_ms) : run_realtime(done, deadline_ms);
}

void EventLoop::run_for(Millis duration_ms) {
  run_until([] { return false; }, now_ms() + duration_ms);
}

bool EventLoop::run_virtual(const std::function<bool()>& done, Millis deadline_ms) {
  while (true) {
    if (done()) return true;
    Task task;
    {
      std::lock_guard lock(mu_);
      if (heap_.empty() || heap_.front().at > deadline_ms) {
        if (deadline_ms != kForever && virtual_now_.load() < deadline_ms) {
          virtual_now_.store(deadline_ms);
        }
        break;
      }
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      Entry entry = std::move(heap_.back());
      heap_.pop_back();
      if (entry.at > virtual_now_.load()) virtual_now_.store(entry.at);
      task = std::move(entry.task);
    }
    task();
  }
  return done();
}

bool EventLoop::run_realtime(const std::function<bool()>& done, Millis deadline_ms) {
  while (true) {
    if (done()) return true;
    Task task;
    {
      std::unique_lock lock(mu_);
      const Millis now = now_ms();
      if (!heap_.empty() && heap_.front().at <= now) {
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        task = std::move(heap_.back().task);
        heap_.pop_back();
      } else {
        if (now >= deadline_ms) break;
        Millis wake_at = deadline_ms;
        if (!heap_.empty()) wake_at = std::min(wake_at, heap_.front().at);
        const Millis wait = std::clamp<Millis>(wake_at - now, 1, kMaxIdleWaitMs);
        cv_.wait_for(lock, std::chrono::milliseconds(wait));
        continue;
      }
    }
    task();
  }
  return done();
}

}  // namespace rai::msgbus
