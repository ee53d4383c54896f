// Wire frames and the version-1 bit-exact encoding.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tmpc/errors.hpp"

namespace tmpc {

enum class FrameKind : std::uint8_t {
  Data = 0,
  HandshakeDescriptor = 1,
  HandshakeVerdict = 2,
};

inline constexpr std::size_t frame_kind_count = 3;

// Layout (all integers little-endian):
//   magic "TMPC" | version u16 | kind u8 | source u32 | context u32 |
//   tag u32 | type_hash u64 | element_count u64 | payload_length u64 |
//   payload bytes
inline constexpr std::size_t frame_header_size = 43;
inline constexpr std::uint16_t frame_version = 1;

struct Frame {
  FrameKind kind = FrameKind::Data;
  std::uint32_t source = 0;
  std::uint32_t context = 0;
  std::uint32_t tag = 0;
  std::uint64_t type_hash = 0;
  std::uint64_t element_count = 0;
  std::vector<std::byte> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline std::size_t encoded_size(const Frame& f) {
  return frame_header_size + f.payload.size();
}

std::vector<std::byte> encode_frame(const Frame& f);

// Strict inverse of encode_frame; the buffer must contain exactly one frame.
// Throws DecodeError naming the failing field.
Frame decode_frame(std::span<const std::byte> bytes);

}  // namespace tmpc
