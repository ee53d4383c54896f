// The typed front door: a communicator permanently bound to one element type
// T. Buffer compatibility is enforced by the compiler — handing a buffer of
// some other element type to send or receive is ill-formed, not a runtime
// error — and cross-process agreement on T's shape was already proven by the
// creation handshake, so the steady-state data path re-checks nothing.
#pragma once

#include <cstdint>
#include <utility>

#include "tmpc/buffer.hpp"
#include "tmpc/communicator.hpp"
#include "tmpc/endpoint.hpp"

namespace tmpc {

template <Element T>
class TypedCommunicator {
 public:
  // Collective, like Communicator::create: every rank of the world must
  // construct its TypedCommunicator (with a T of congruent flattened shape)
  // in matching order. Throws CreationError when any rank disagrees.
  explicit TypedCommunicator(Endpoint& endpoint)
      : core_(Communicator::create(endpoint, descriptor_of<T>())) {}

  // Sends every element of `buffer` to `dest`. Accepts T itself, std::array
  // nests of T, and std::vector / std::span of those; anything else fails to
  // compile. An empty dynamically sized buffer is rejected at run time — a
  // message must carry at least one element.
  template <typename B>
    requires BufferOf<B, T>
  void send(const B& buffer, std::uint32_t dest, std::uint32_t tag) {
    const std::uint64_t count = buffer_element_count<T>(buffer);
    if (count == 0) {
      throw ShapeMismatchError(FlatSignature{}, core_.signature());
    }
    core_.send_packed(count, pack_buffer<T>(buffer), dest, tag);
  }

  // Blocks for the next matching message and unpacks it into `buffer` in
  // flatten order. A message shorter than the buffer fills a prefix and
  // leaves the rest untouched (see ReceiveStatus::count); a longer one
  // throws TruncationError.
  template <typename B>
    requires MutableBufferOf<B, T>
  ReceiveStatus receive(B& buffer, std::uint32_t source, std::uint32_t tag) {
    auto delivery =
        core_.receive_frame(buffer_element_count<T>(buffer), source, tag);
    unpack_buffer<T>(buffer, delivery.payload, delivery.status.count);
    return delivery.status;
  }

  std::uint32_t rank() const { return core_.rank(); }
  std::uint32_t world_size() const { return core_.world_size(); }
  std::uint32_t context() const { return core_.context(); }
  TypeHash type_hash() const { return core_.type_hash(); }
  const FlatSignature& signature() const { return core_.signature(); }

  // The untyped core, for callers that need the escape hatch.
  Communicator& core() { return core_; }
  const Communicator& core() const { return core_; }

 private:
  Communicator core_;
};

}  // namespace tmpc
