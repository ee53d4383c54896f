// Rank endpoints: point-to-point frame delivery with tag matching and
// per-sender non-overtaking order, over interchangeable backends.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "tmpc/frame.hpp"

namespace tmpc {

namespace detail {
class Mailbox;
}

struct EndpointStats {
  std::array<std::uint64_t, frame_kind_count> frames_sent{};
  std::array<std::uint64_t, frame_kind_count> frames_received{};
  // Encoded size (header + payload) of every frame sent, by kind. The
  // in-process backend skips actual encoding but accounts identically.
  std::array<std::uint64_t, frame_kind_count> wire_bytes_sent{};

  std::uint64_t sent(FrameKind k) const {
    return frames_sent[static_cast<std::size_t>(k)];
  }
  std::uint64_t received(FrameKind k) const {
    return frames_received[static_cast<std::size_t>(k)];
  }
  std::uint64_t wire_bytes(FrameKind k) const {
    return wire_bytes_sent[static_cast<std::size_t>(k)];
  }
  std::uint64_t handshake_frames_sent() const {
    return sent(FrameKind::HandshakeDescriptor) + sent(FrameKind::HandshakeVerdict);
  }
};

// One rank's handle on a world. Operated by a single logical thread (its
// rank); may be created on one thread and moved to another before use. The
// delivery machinery below it tolerates all ranks running concurrently.
class Endpoint {
 public:
  virtual ~Endpoint() = default;

  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  std::uint32_t rank() const { return rank_; }
  std::uint32_t world_size() const { return world_size_; }

  // Enqueues the frame for reliable, per-sender-ordered delivery. Sending to
  // self delivers to the own mailbox. Requires f.source == rank().
  // Throws InvalidDestinationError, ConnectionLostError.
  void send(std::uint32_t dest, Frame f);

  // Blocks until a frame matching (kind, source, context, tag) exactly is
  // available; removes and returns the earliest such frame. Non-matching
  // frames are left untouched and in order.
  // Throws WorldShutdownError, ConnectionLostError.
  Frame recv_match(FrameKind kind, std::uint32_t source, std::uint32_t context,
                   std::uint32_t tag);

  // Tears down the whole world: every blocked or future receive on any rank
  // fails with WorldShutdownError.
  virtual void shutdown() = 0;

  const EndpointStats& stats() const { return stats_; }

  // Per-world communicator-creation sequence; every rank advances its copy on
  // each collective create, so concurrent creations cannot cross-match.
  std::uint32_t take_creation_seq() { return creation_seq_++; }

  // Context ids are handed out by rank 0 only, starting at 1 (0 is the
  // handshake-bootstrap context).
  std::uint32_t allocate_context_id() { return next_context_id_++; }

 protected:
  Endpoint(std::uint32_t rank, std::uint32_t world_size)
      : rank_(rank), world_size_(world_size) {}

  virtual void do_send(std::uint32_t dest, Frame f) = 0;

  // Set by the concrete backend before use.
  detail::Mailbox* mailbox_ = nullptr;

 private:
  std::uint32_t rank_;
  std::uint32_t world_size_;
  std::uint32_t creation_seq_ = 0;
  std::uint32_t next_context_id_ = 1;
  EndpointStats stats_;
};

// Fully connected n-rank world inside one process; rank i ends up at index i.
// Throws std::invalid_argument when n == 0.
std::vector<std::unique_ptr<Endpoint>> spawn_inproc_world(std::uint32_t n);

}  // namespace tmpc
