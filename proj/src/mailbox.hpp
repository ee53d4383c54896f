// Ordered store of undelivered incoming frames, one per endpoint.
#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include "tmpc/errors.hpp"
#include "tmpc/frame.hpp"

namespace tmpc::detail {

class Mailbox {
 public:
  enum class FailReason { Shutdown, ConnectionLost };

  void push(Frame f) {
    {
      std::lock_guard lock(mutex_);
      if (failed_) return;  // world is dead; frame is dropped
      frames_.push_back(std::move(f));
    }
    cv_.notify_all();
  }

  // Removes and returns the earliest frame matching the full key. Frames that
  // do not match keep their positions. Pending frames are still handed out
  // after a failure or a source close so a receiver can drain what already
  // arrived.
  Frame take_match(FrameKind kind, std::uint32_t source, std::uint32_t context,
                   std::uint32_t tag) {
    std::unique_lock lock(mutex_);
    for (;;) {
      for (auto it = frames_.begin(); it != frames_.end(); ++it) {
        if (it->kind == kind && it->source == source &&
            it->context == context && it->tag == tag) {
          Frame f = std::move(*it);
          frames_.erase(it);
          return f;
        }
      }
      if (failed_) {
        if (*failed_ == FailReason::Shutdown) throw WorldShutdownError();
        throw ConnectionLostError("world failed while a receive was pending");
      }
      if (closed_sources_.count(source) != 0) {
        throw ConnectionLostError("rank " + std::to_string(source) +
                                  " closed its connection; nothing more can "
                                  "arrive from it");
      }
      cv_.wait(lock);
    }
  }

  void fail(FailReason reason) {
    {
      std::lock_guard lock(mutex_);
      if (!failed_) failed_ = reason;
    }
    cv_.notify_all();
  }

  // Orderly per-peer close: frames already delivered stay receivable, and
  // receives aimed at other sources are unaffected. Only a receive that
  // could now never complete fails.
  void close_source(std::uint32_t source) {
    {
      std::lock_guard lock(mutex_);
      closed_sources_.insert(source);
    }
    cv_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Frame> frames_;
  std::optional<FailReason> failed_;
  std::set<std::uint32_t> closed_sources_;
};

}  // namespace tmpc::detail
