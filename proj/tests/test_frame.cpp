// Wire-format conformance: the golden frame bytes below were assembled by
// hand from the format definition and frozen; encode/decode must reproduce
// them bit for bit.
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "tmpc/errors.hpp"
#include "tmpc/frame.hpp"

using tmpc::DecodeError;
using tmpc::Frame;
using tmpc::FrameKind;

namespace {

// DATA frame: source 0, context 1, tag 0, type_hash = hash of [F32],
// element_count 1, payload = 42.5f little-endian.
const std::vector<std::byte> golden_frame = [] {
  const unsigned raw[] = {
      0x54, 0x4d, 0x50, 0x43,                          // "TMPC"
      0x01, 0x00,                                      // version 1
      0x00,                                            // kind DATA
      0x00, 0x00, 0x00, 0x00,                          // source 0
      0x01, 0x00, 0x00, 0x00,                          // context 1
      0x00, 0x00, 0x00, 0x00,                          // tag 0
      0x37, 0x8e, 0xdc, 0xa7, 0xae, 0x75, 0x0d, 0xd8,  // type_hash
      0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // element_count 1
      0x04, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // payload_length 4
      0x00, 0x00, 0x2a, 0x42,                          // 42.5f
  };
  std::vector<std::byte> out;
  for (const unsigned b : raw) out.push_back(static_cast<std::byte>(b));
  return out;
}();

Frame random_frame(std::mt19937_64& rng) {
  Frame f;
  f.kind = static_cast<FrameKind>(rng() % tmpc::frame_kind_count);
  f.source = static_cast<std::uint32_t>(rng());
  f.context = static_cast<std::uint32_t>(rng());
  f.tag = static_cast<std::uint32_t>(rng());
  f.type_hash = rng();
  f.element_count = rng();
  f.payload.resize(rng() % 64);
  for (auto& b : f.payload) b = static_cast<std::byte>(rng() & 0xff);
  return f;
}

}  // namespace

TEST_CASE("golden frame decodes to the specified fields") {
  REQUIRE(golden_frame.size() == 47);
  const Frame f = tmpc::decode_frame(golden_frame);
  CHECK(f.kind == FrameKind::Data);
  CHECK(f.source == 0);
  CHECK(f.context == 1);
  CHECK(f.tag == 0);
  CHECK(f.type_hash == 0xd80d75aea7dc8e37ull);
  CHECK(f.element_count == 1);
  REQUIRE(f.payload.size() == 4);
  CHECK(std::to_integer<unsigned>(f.payload[0]) == 0x00);
  CHECK(std::to_integer<unsigned>(f.payload[1]) == 0x00);
  CHECK(std::to_integer<unsigned>(f.payload[2]) == 0x2a);
  CHECK(std::to_integer<unsigned>(f.payload[3]) == 0x42);
}

TEST_CASE("golden frame re-encodes bit-identically") {
  const Frame f = tmpc::decode_frame(golden_frame);
  CHECK(tmpc::encode_frame(f) == golden_frame);
  CHECK(tmpc::encoded_size(f) == 47);
  CHECK(tmpc::encoded_size(f) == tmpc::frame_header_size + f.payload.size());
}

TEST_CASE("mutated frames produce the named decode errors") {
  auto mutated = [](std::size_t index, unsigned value) {
    auto copy = golden_frame;
    copy[index] = static_cast<std::byte>(value);
    return copy;
  };

  // magic
  try {
    tmpc::decode_frame(mutated(0, 0x58));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.cause() == DecodeError::Cause::BadMagic);
  }

  // version 2
  try {
    tmpc::decode_frame(mutated(4, 0x02));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.cause() == DecodeError::Cause::UnsupportedVersion);
  }

  // declared payload length larger than the remaining bytes
  try {
    tmpc::decode_frame(mutated(35, 0x05));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.cause() == DecodeError::Cause::TruncatedFrame);
  }

  // frame cut off mid-header
  try {
    tmpc::decode_frame(
        std::span<const std::byte>(golden_frame.data(), 20));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.cause() == DecodeError::Cause::TruncatedFrame);
  }

  // unknown frame kind
  try {
    tmpc::decode_frame(mutated(6, 0x03));
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.cause() == DecodeError::Cause::BadKind);
  }

  // bytes after the declared payload
  try {
    auto longer = golden_frame;
    longer.push_back(static_cast<std::byte>(0x00));
    tmpc::decode_frame(longer);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.cause() == DecodeError::Cause::TrailingBytes);
  }
}

TEST_CASE("encode/decode round-trips random frames") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const Frame f = random_frame(rng);
    const auto bytes = tmpc::encode_frame(f);
    CHECK(bytes.size() == tmpc::frame_header_size + f.payload.size());
    CHECK(tmpc::decode_frame(bytes) == f);
  }
}
