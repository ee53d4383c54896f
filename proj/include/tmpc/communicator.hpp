// The communicator core: one communication context bound to one element
// type. Creation is a collective handshake that proves every rank agrees on
// the element type's flattened signature before any data can flow; after
// that, every data frame carries the signature hash and is re-checked on
// delivery as a last line of defense.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tmpc/descriptor.hpp"
#include "tmpc/endpoint.hpp"
#include "tmpc/errors.hpp"
#include "tmpc/frame.hpp"
#include "tmpc/signature.hpp"

namespace tmpc {

// What a completed receive delivered.
struct ReceiveStatus {
  std::uint32_t source = 0;
  std::uint32_t tag = 0;
  std::uint64_t count = 0;  // elements delivered (may be < buffer capacity)
};

class Communicator {
 public:
  // Collective: every rank of the endpoint's world must call create the same
  // number of times, in the same order. Ranks other than 0 send their
  // flattened signature to rank 0; rank 0 checks all of them against its own
  // and answers with a shared verdict. On agreement every rank receives the
  // same fresh context id; on mismatch every rank throws a CreationError
  // naming the lowest offending rank. A failed creation leaves the endpoint
  // usable for further attempts.
  static Communicator create(Endpoint& endpoint, const TypeDescriptor& descriptor);

  Communicator(Communicator&&) noexcept = default;
  Communicator& operator=(Communicator&&) noexcept = default;
  Communicator(const Communicator&) = delete;
  Communicator& operator=(const Communicator&) = delete;

  std::uint32_t rank() const { return endpoint_->rank(); }
  std::uint32_t world_size() const { return endpoint_->world_size(); }
  std::uint32_t context() const { return context_; }
  const TypeDescriptor& descriptor() const { return descriptor_; }
  const FlatSignature& signature() const { return signature_; }
  TypeHash type_hash() const { return hash_; }
  // Bytes one element occupies on the wire.
  std::size_t element_size() const { return element_size_; }
  // True once a type-confused frame has been delivered; every further
  // operation on this communicator throws TypeConfusionError.
  bool poisoned() const { return poisoned_; }

  // Untyped escape hatch: `bytes` holds wire-encoded components described by
  // `buffer_signature`. The buffer's signature must be a whole-number
  // multiple of the element signature (ShapeMismatchError otherwise, raised
  // before any frame leaves this rank).
  void send(const FlatSignature& buffer_signature,
            std::span<const std::byte> bytes, std::uint32_t dest,
            std::uint32_t tag);
  ReceiveStatus receive(const FlatSignature& buffer_signature,
                        std::span<std::byte> bytes, std::uint32_t source,
                        std::uint32_t tag);

  // Pre-validated fast paths used by TypedCommunicator: the caller guarantees
  // `payload` holds exactly `count` wire-encoded elements.
  void send_packed(std::uint64_t count, std::vector<std::byte> payload,
                   std::uint32_t dest, std::uint32_t tag);

  struct Delivery {
    ReceiveStatus status;
    std::vector<std::byte> payload;
  };
  // Blocks for the next matching data frame. Throws TypeConfusionError (and
  // poisons the communicator) on a signature hash mismatch, TruncationError
  // if the message holds more than `capacity` elements; either way the
  // offending message is consumed.
  Delivery receive_frame(std::uint64_t capacity, std::uint32_t source,
                         std::uint32_t tag);

 private:
  Communicator(Endpoint& endpoint, TypeDescriptor descriptor,
               FlatSignature signature, std::uint32_t context);

  void ensure_usable() const;

  Endpoint* endpoint_;
  TypeDescriptor descriptor_;
  FlatSignature signature_;
  TypeHash hash_;
  std::size_t element_size_;
  std::uint32_t context_;
  bool poisoned_ = false;
  std::uint64_t poison_hash_ = 0;  // foreign hash that poisoned us
};

}  // namespace tmpc
