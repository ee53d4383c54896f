#include "tmpc/frame.hpp"

#include <array>
#include <cstring>

namespace tmpc {

namespace {

constexpr std::array<std::byte, 4> frame_magic = {
    std::byte{'T'}, std::byte{'M'}, std::byte{'P'}, std::byte{'C'}};

template <typename U>
void write_le(std::byte* out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out[i] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
  }
}

template <typename U>
U read_le(std::span<const std::byte> bytes, std::size_t offset) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(std::to_integer<std::uint8_t>(bytes[offset + i]))
             << (8 * i);
  }
  return value;
}

}  // namespace

std::vector<std::byte> encode_frame(const Frame& f) {
  std::vector<std::byte> out(encoded_size(f));
  std::byte* p = out.data();
  std::memcpy(p, frame_magic.data(), 4);
  write_le<std::uint16_t>(p + 4, frame_version);
  p[6] = static_cast<std::byte>(f.kind);
  write_le<std::uint32_t>(p + 7, f.source);
  write_le<std::uint32_t>(p + 11, f.context);
  write_le<std::uint32_t>(p + 15, f.tag);
  write_le<std::uint64_t>(p + 19, f.type_hash);
  write_le<std::uint64_t>(p + 27, f.element_count);
  write_le<std::uint64_t>(p + 35, f.payload.size());
  if (!f.payload.empty()) {
    std::memcpy(p + frame_header_size, f.payload.data(), f.payload.size());
  }
  return out;
}

Frame decode_frame(std::span<const std::byte> bytes) {
  if (bytes.size() < frame_header_size) {
    throw DecodeError(DecodeError::Cause::TruncatedFrame, "header");
  }
  for (std::size_t i = 0; i < frame_magic.size(); ++i) {
    if (bytes[i] != frame_magic[i]) {
      throw DecodeError(DecodeError::Cause::BadMagic, "magic");
    }
  }
  if (read_le<std::uint16_t>(bytes, 4) != frame_version) {
    throw DecodeError(DecodeError::Cause::UnsupportedVersion, "version");
  }
  const auto kind_byte = std::to_integer<std::uint8_t>(bytes[6]);
  if (kind_byte >= frame_kind_count) {
    throw DecodeError(DecodeError::Cause::BadKind, "kind");
  }
  Frame f;
  f.kind = static_cast<FrameKind>(kind_byte);
  f.source = read_le<std::uint32_t>(bytes, 7);
  f.context = read_le<std::uint32_t>(bytes, 11);
  f.tag = read_le<std::uint32_t>(bytes, 15);
  f.type_hash = read_le<std::uint64_t>(bytes, 19);
  f.element_count = read_le<std::uint64_t>(bytes, 27);
  const auto payload_length = read_le<std::uint64_t>(bytes, 35);
  const auto remaining = bytes.size() - frame_header_size;
  if (remaining < payload_length) {
    throw DecodeError(DecodeError::Cause::TruncatedFrame, "payload");
  }
  if (remaining > payload_length) {
    throw DecodeError(DecodeError::Cause::TrailingBytes, "payload");
  }
  f.payload.assign(bytes.begin() + frame_header_size, bytes.end());
  return f;
}

}  // namespace tmpc
