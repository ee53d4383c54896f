#include "tmpc/errors.hpp"

#include <sstream>

namespace tmpc {

namespace {

std::string shape_mismatch_message(const FlatSignature& buffer,
                                   const FlatSignature& element) {
  std::ostringstream out;
  out << "buffer signature " << to_string(buffer)
      << " is not a whole-number repetition of element signature "
      << to_string(element);
  return out.str();
}

}  // namespace

ShapeMismatchError::ShapeMismatchError(FlatSignature buffer_signature,
                                       FlatSignature element_signature)
    : Error(shape_mismatch_message(buffer_signature, element_signature)),
      buffer_(std::move(buffer_signature)),
      element_(std::move(element_signature)) {}

PayloadSizeMismatchError::PayloadSizeMismatchError(std::size_t expected_bytes,
                                                   std::size_t got_bytes)
    : Error("payload size mismatch: expected " + std::to_string(expected_bytes) +
            " bytes, got " + std::to_string(got_bytes)),
      expected_(expected_bytes),
      got_(got_bytes) {}

InvalidBoolError::InvalidBoolError(std::uint8_t byte_value)
    : Error("invalid BOOL byte " + std::to_string(byte_value) +
            " (must be 0 or 1)"),
      byte_(byte_value) {}

DecodeError::DecodeError(Cause cause, const std::string& field)
    : Error([&] {
        switch (cause) {
          case Cause::BadMagic: return "bad magic in field '" + field + "'";
          case Cause::UnsupportedVersion:
            return "unsupported version in field '" + field + "'";
          case Cause::TruncatedFrame:
            return "truncated frame at field '" + field + "'";
          case Cause::BadKind: return "unknown kind in field '" + field + "'";
          case Cause::TrailingBytes:
            return "trailing bytes after field '" + field + "'";
        }
        return std::string("decode error");
      }()),
      cause_(cause),
      field_(field) {}

InvalidDestinationError::InvalidDestinationError(std::uint32_t dest,
                                                 std::uint32_t world_size)
    : Error("invalid destination rank " + std::to_string(dest) +
            " in a world of size " + std::to_string(world_size)),
      dest_(dest),
      world_size_(world_size) {}

DuplicateRankError::DuplicateRankError(std::uint32_t rank)
    : Error("rank " + std::to_string(rank) + " claimed more than once"),
      rank_(rank) {}

CreationError::CreationError(std::uint32_t offending_rank,
                             FlatSignature local_signature,
                             FlatSignature remote_signature)
    : Error("communicator creation failed: rank " +
            std::to_string(offending_rank) + " signature " +
            to_string(remote_signature) + " incongruent with " +
            to_string(local_signature)),
      offending_rank_(offending_rank),
      local_(std::move(local_signature)),
      remote_(std::move(remote_signature)) {}

TruncationError::TruncationError(std::uint64_t sent_count,
                                 std::uint64_t capacity)
    : Error("message truncated: sender transmitted " +
            std::to_string(sent_count) + " elements, receive capacity is " +
            std::to_string(capacity)),
      sent_count_(sent_count),
      capacity_(capacity) {}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << "0x" << std::hex << v;
  return out.str();
}

}  // namespace

TypeConfusionError::TypeConfusionError(TypeHash expected_hash, TypeHash got_hash)
    : Error("type confusion: expected element hash " +
            hex64(expected_hash.value) + ", frame carried " +
            hex64(got_hash.value)),
      expected_(expected_hash),
      got_(got_hash) {}

}  // namespace tmpc
