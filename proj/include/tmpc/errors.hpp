// Error types. Every recoverable failure is a typed exception rooted at
// tmpc::Error so harnesses can observe it and map it to an exit code.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "tmpc/signature.hpp"

namespace tmpc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Buffer signature is not a whole-number repetition of the communicator's
// element signature.
class ShapeMismatchError : public Error {
 public:
  ShapeMismatchError(FlatSignature buffer_signature,
                     FlatSignature element_signature);

  const FlatSignature& buffer_signature() const { return buffer_; }
  const FlatSignature& element_signature() const { return element_; }

 private:
  FlatSignature buffer_;
  FlatSignature element_;
};

class PayloadSizeMismatchError : public Error {
 public:
  PayloadSizeMismatchError(std::size_t expected_bytes, std::size_t got_bytes);

  std::size_t expected_bytes() const { return expected_; }
  std::size_t got_bytes() const { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

// A BOOL component decoded to a byte other than 0 or 1.
class InvalidBoolError : public Error {
 public:
  explicit InvalidBoolError(std::uint8_t byte_value);

  std::uint8_t byte_value() const { return byte_; }

 private:
  std::uint8_t byte_;
};

class DecodeError : public Error {
 public:
  enum class Cause {
    BadMagic,
    UnsupportedVersion,
    TruncatedFrame,
    BadKind,
    TrailingBytes,
  };

  DecodeError(Cause cause, const std::string& field);

  Cause cause() const { return cause_; }
  const std::string& field() const { return field_; }

 private:
  Cause cause_;
  std::string field_;
};

class InvalidDestinationError : public Error {
 public:
  InvalidDestinationError(std::uint32_t dest, std::uint32_t world_size);

  std::uint32_t dest() const { return dest_; }
  std::uint32_t world_size() const { return world_size_; }

 private:
  std::uint32_t dest_;
  std::uint32_t world_size_;
};

class WorldShutdownError : public Error {
 public:
  WorldShutdownError() : Error("world was shut down") {}
};

class ConnectionLostError : public Error {
 public:
  explicit ConnectionLostError(const std::string& detail)
      : Error("connection lost: " + detail) {}
};

class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& detail)
      : Error("timed out: " + detail) {}
};

class DuplicateRankError : public Error {
 public:
  explicit DuplicateRankError(std::uint32_t rank);

  std::uint32_t rank() const { return rank_; }

 private:
  std::uint32_t rank_;
};

// Malformed protocol traffic (rendezvous messages, handshake payloads).
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& detail)
      : Error("protocol error: " + detail) {}
};

// Communicator creation handshake found non-congruent element types.
class CreationError : public Error {
 public:
  CreationError(std::uint32_t offending_rank, FlatSignature local_signature,
                FlatSignature remote_signature);

  std::uint32_t offending_rank() const { return offending_rank_; }
  const FlatSignature& local_signature() const { return local_; }
  const FlatSignature& remote_signature() const { return remote_; }

 private:
  std::uint32_t offending_rank_;
  FlatSignature local_;
  FlatSignature remote_;
};

// Incoming message carries more elements than the receive buffer holds.
// The message is consumed; the communicator stays usable.
class TruncationError : public Error {
 public:
  TruncationError(std::uint64_t sent_count, std::uint64_t capacity);

  std::uint64_t sent_count() const { return sent_count_; }
  std::uint64_t capacity() const { return capacity_; }

 private:
  std::uint64_t sent_count_;
  std::uint64_t capacity_;
};

// Frame header hash differs from the communicator's element hash. Fatal for
// the communicator: further operations keep failing with this error.
class TypeConfusionError : public Error {
 public:
  TypeConfusionError(TypeHash expected_hash, TypeHash got_hash);

  TypeHash expected_hash() const { return expected_; }
  TypeHash got_hash() const { return got_; }

 private:
  TypeHash expected_;
  TypeHash got_;
};

}  // namespace tmpc
