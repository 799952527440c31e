#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace rai::msgbus {

using Millis = std::int64_t;
inline constexpr Millis kForever = std::numeric_limits<Millis>::max();

// Timed task queue shared by the bus, the world and the agents.
//
// In virtual mode the clock jumps straight to the next due task, which makes
// every interleaving a deterministic function of the posting order. In
// realtime mode the clock follows the system clock and the driver sleeps
// until work is due.
//
// post*() may be called from any thread. run_until() executes tasks on the
// calling thread and may be nested (a task may itself wait for a reply), but
// only one thread may drive the loop at a time.
class EventLoop {
 public:
  enum class Mode { kVirtual, kRealtime };
  using Task = std::function<void()>;

  explicit EventLoop(Mode mode = Mode::kVirtual, Millis start_ms = 0);
  EventLoop(const EventLoop&) = delete;
  EventLoop& operator=(const EventLoop&) = delete;

  Mode mode() const noexcept { return mode_; }
  Millis now_ms() const;

  void post(Task task);
  void post_at(Millis at_ms, Task task);
  void post_after(Millis delay_ms, Task task);

  // Runs due tasks until `done` holds or the clock passes `deadline_ms`.
  // Returns the final value of `done`. In virtual mode the clock is advanced
  // to the deadline when the queue holds nothing due before it.
  bool run_until(const std::function<bool()>& done, Millis deadline_ms = kForever);
  // Runs everything due within the next `duration_ms`.
  void run_for(Millis duration_ms);

  std::size_t pending() const;
  // Wakes a realtime driver blocked waiting for work.
  void wake();

 private:
  struct Entry {
    Millis at;
    std::uint64_t seq;
    Task task;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  bool run_virtual(const std::function<bool()>& done, Millis deadline_ms);
  bool run_realtime(const std::function<bool()>& done, Millis deadline_ms);
  void enter_driver();
  void leave_driver();

  const Mode mode_;
  const Millis start_ms_;
  const std::chrono::steady_clock::time_point started_;
  std::atomic<Millis> virtual_now_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Entry> heap_;
  std::uint64_t next_seq_ = 0;

  std::atomic<std::thread::id> driver_{};
  int depth_ = 0;
};

}  // namespace rai::msgbus
