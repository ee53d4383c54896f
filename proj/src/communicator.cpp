#include "tmpc/communicator.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace tmpc {

namespace {

constexpr std::uint8_t verdict_ok = 0;
constexpr std::uint8_t verdict_mismatch = 1;

void append_u32_le(std::vector<std::byte>& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::byte>((value >> (8 * i)) & 0xff));
  }
}

std::uint32_t read_u32_le(std::span<const std::byte> in, std::size_t offset) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(
                 std::to_integer<std::uint8_t>(in[offset + i]))
             << (8 * i);
  }
  return value;
}

}  // namespace

Communicator::Communicator(Endpoint& endpoint, TypeDescriptor descriptor,
                           FlatSignature signature, std::uint32_t context)
    : endpoint_(&endpoint),
      descriptor_(std::move(descriptor)),
      signature_(std::move(signature)),
      hash_(signature_hash(signature_)),
      element_size_(byte_size(signature_)),
      context_(context) {}

Communicator Communicator::create(Endpoint& endpoint,
                                  const TypeDescriptor& descriptor) {
  FlatSignature mine = flatten(descriptor);
  const TypeHash my_hash = signature_hash(mine);
  const std::uint32_t seq = endpoint.take_creation_seq();
  const std::uint32_t rank = endpoint.rank();
  const std::uint32_t n = endpoint.world_size();

  if (n == 1) {
    // Nothing to agree on; no frames cross the wire.
    return Communicator(endpoint, descriptor, std::move(mine),
                        endpoint.allocate_context_id());
  }

  if (rank != 0) {
    Frame offer;
    offer.kind = FrameKind::HandshakeDescriptor;
    offer.source = rank;
    offer.context = 0;
    offer.tag = seq;
    offer.type_hash = my_hash.value;
    offer.element_count = 0;
    offer.payload = canonical_bytes(mine);
    endpoint.send(0, std::move(offer));

    const Frame verdict =
        endpoint.recv_match(FrameKind::HandshakeVerdict, 0, 0, seq);
    if (verdict.payload.empty()) {
      throw ProtocolError("empty handshake verdict");
    }
    const auto status = std::to_integer<std::uint8_t>(verdict.payload[0]);
    if (status == verdict_ok) {
      if (verdict.payload.size() != 5) {
        throw ProtocolError("malformed ok verdict");
      }
      const std::uint32_t context = read_u32_le(verdict.payload, 1);
      return Communicator(endpoint, descriptor, std::move(mine), context);
    }
    if (status != verdict_mismatch || verdict.payload.size() < 5) {
      throw ProtocolError("malformed handshake verdict");
    }
    const std::uint32_t offender = read_u32_le(verdict.payload, 1);
    const FlatSignature offender_signature = signature_from_canonical(
        std::span<const std::byte>(verdict.payload).subspan(5));
    // A non-offending rank learns the offender's signature and keeps its own
    // as the local side. The offender itself only ever sees its own
    // signature; rank 0's baseline does not travel in the verdict.
    if (offender == rank) {
      throw CreationError(offender, offender_signature, offender_signature);
    }
    throw CreationError(offender, mine, offender_signature);
  }

  // Rank 0: gather every signature, then broadcast one verdict. All
  // descriptor frames are consumed even when an early rank already
  // mismatched, so a failed creation leaves no stray frames behind.
  std::vector<FlatSignature> remote(n);
  for (std::uint32_t source = 1; source < n; ++source) {
    const Frame offer =
        endpoint.recv_match(FrameKind::HandshakeDescriptor, source, 0, seq);
    remote[source] = signature_from_canonical(offer.payload);
    if (offer.type_hash != signature_hash(remote[source]).value) {
      throw ProtocolError("descriptor frame hash disagrees with its payload");
    }
  }

  std::uint32_t offender = 0;
  for (std::uint32_t source = 1; source < n; ++source) {
    if (!congruent(remote[source], mine)) {
      offender = source;
      break;
    }
  }

  Frame verdict;
  verdict.kind = FrameKind::HandshakeVerdict;
  verdict.source = 0;
  verdict.context = 0;
  verdict.tag = seq;
  verdict.type_hash = my_hash.value;
  verdict.element_count = 0;
  std::uint32_t context = 0;
  if (offender == 0) {
    context = endpoint.allocate_context_id();
    verdict.payload.push_back(static_cast<std::byte>(verdict_ok));
    append_u32_le(verdict.payload, context);
  } else {
    verdict.payload.push_back(static_cast<std::byte>(verdict_mismatch));
    append_u32_le(verdict.payload, offender);
    const auto offender_canonical = canonical_bytes(remote[offender]);
    verdict.payload.insert(verdict.payload.end(), offender_canonical.begin(),
                           offender_canonical.end());
  }
  for (std::uint32_t dest = 1; dest < n; ++dest) {
    Frame copy = verdict;
    endpoint.send(dest, std::move(copy));
  }
  if (offender != 0) {
    throw CreationError(offender, mine, remote[offender]);
  }
  return Communicator(endpoint, descriptor, std::move(mine), context);
}

void Communicator::ensure_usable() const {
  if (poisoned_) {
    throw TypeConfusionError(hash_, TypeHash{poison_hash_});
  }
}

void Communicator::send_packed(std::uint64_t count,
                               std::vector<std::byte> payload,
                               std::uint32_t dest, std::uint32_t tag) {
  ensure_usable();
  Frame f;
  f.kind = FrameKind::Data;
  f.source = rank();
  f.context = context_;
  f.tag = tag;
  f.type_hash = hash_.value;
  f.element_count = count;
  f.payload = std::move(payload);
  endpoint_->send(dest, std::move(f));
}

Communicator::Delivery Communicator::receive_frame(std::uint64_t capacity,
                                                   std::uint32_t source,
                                                   std::uint32_t tag) {
  ensure_usable();
  Frame f = endpoint_->recv_match(FrameKind::Data, source, context_, tag);
  if (f.type_hash != hash_.value) {
    poisoned_ = true;
    poison_hash_ = f.type_hash;
    throw TypeConfusionError(hash_, TypeHash{f.type_hash});
  }
  if (f.element_count > capacity) {
    throw TruncationError(f.element_count, capacity);
  }
  const std::uint64_t expected = f.element_count * element_size_;
  if (f.payload.size() != expected) {
    throw PayloadSizeMismatchError(expected, f.payload.size());
  }
  Delivery d;
  d.status = ReceiveStatus{f.source, f.tag, f.element_count};
  d.payload = std::move(f.payload);
  return d;
}

void Communicator::send(const FlatSignature& buffer_signature,
                        std::span<const std::byte> bytes, std::uint32_t dest,
                        std::uint32_t tag) {
  const auto multiple = element_multiplicity(buffer_signature, signature_);
  if (!multiple) {
    throw ShapeMismatchError(buffer_signature, signature_);
  }
  if (bytes.size() != byte_size(buffer_signature)) {
    throw std::invalid_argument(
        "buffer byte length disagrees with its signature");
  }
  send_packed(*multiple, std::vector<std::byte>(bytes.begin(), bytes.end()),
              dest, tag);
}

ReceiveStatus Communicator::receive(const FlatSignature& buffer_signature,
                                    std::span<std::byte> bytes,
                                    std::uint32_t source, std::uint32_t tag) {
  const auto capacity = element_multiplicity(buffer_signature, signature_);
  if (!capacity) {
    throw ShapeMismatchError(buffer_signature, signature_);
  }
  if (bytes.size() != byte_size(buffer_signature)) {
    throw std::invalid_argument(
        "buffer byte length disagrees with its signature");
  }
  Delivery d = receive_frame(*capacity, source, tag);

  // The untyped path still refuses to hand out malformed bool bytes.
  bool any_bool = false;
  for (const auto kind : signature_.kinds()) {
    if (kind == FundamentalKind::Bool) {
      any_bool = true;
      break;
    }
  }
  if (any_bool) {
    std::size_t offset = 0;
    for (std::uint64_t e = 0; e < d.status.count; ++e) {
      for (const auto kind : signature_.kinds()) {
        if (kind == FundamentalKind::Bool) {
          const auto b = std::to_integer<std::uint8_t>(d.payload[offset]);
          if (b > 1) throw InvalidBoolError(b);
        }
        offset += kind_width(kind);
      }
    }
  }

  std::copy(d.payload.begin(), d.payload.end(), bytes.begin());
  return d.status;
}

}  // namespace tmpc
