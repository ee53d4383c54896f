// Flat type signatures: the unit on which congruence is defined.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmpc/fundamental.hpp"

namespace tmpc {

// 64-bit hash of a signature's canonical bytes; carried in every frame header
// as a cheap cross-check. The handshake compares full signatures, not hashes.
struct TypeHash {
  std::uint64_t value = 0;

  friend bool operator==(const TypeHash&, const TypeHash&) = default;
};

// Depth-first sequence of fundamental kinds obtained by flattening a
// structured type. Two buffers may interoperate iff their signatures are
// element-wise identical, regardless of the nesting that produced them.
class FlatSignature {
 public:
  FlatSignature() = default;
  explicit FlatSignature(std::vector<FundamentalKind> kinds)
      : kinds_(std::move(kinds)) {}

  std::span<const FundamentalKind> kinds() const { return kinds_; }
  std::size_t size() const { return kinds_.size(); }
  bool empty() const { return kinds_.empty(); }
  FundamentalKind operator[](std::size_t i) const { return kinds_[i]; }

  friend bool operator==(const FlatSignature&, const FlatSignature&) = default;

 private:
  std::vector<FundamentalKind> kinds_;
};

// Congruence relation: kind sequences are identical position by position.
bool congruent(const FlatSignature& a, const FlatSignature& b);

// Total payload bytes of one value with this signature.
std::size_t byte_size(const FlatSignature& sig);

// Version-1 serialized form: u32 little-endian component count, then one
// code byte per component. Appears verbatim in handshake frame payloads.
std::vector<std::byte> canonical_bytes(const FlatSignature& sig);

// Inverse of canonical_bytes. Throws ProtocolError on malformed input.
FlatSignature signature_from_canonical(std::span<const std::byte> bytes);

// FNV-1a 64 over canonical_bytes(sig).
TypeHash signature_hash(const FlatSignature& sig);

// Number of whole elements of `element` that make up `buffer`, or nullopt
// when the buffer is not an exact n >= 1 repetition (NotAMultiple). This is
// the one rule that admits scalars, flat arrays and nested arrays alike.
std::optional<std::uint64_t> element_multiplicity(const FlatSignature& buffer,
                                                  const FlatSignature& element);

// "[F32, F64]" style rendering, used in error messages.
std::string to_string(const FlatSignature& sig);

}  // namespace tmpc
