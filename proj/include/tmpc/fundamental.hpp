// Fundamental scalar kinds: the leaves of every type signature.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace tmpc {

// Wire codes are part of the version-1 format and must never be renumbered.
enum class FundamentalKind : std::uint8_t {
  I8 = 1,
  I16 = 2,
  I32 = 3,
  I64 = 4,
  U8 = 5,
  U16 = 6,
  U32 = 7,
  U64 = 8,
  F32 = 9,
  F64 = 10,
  Bool = 11,
};

inline constexpr std::array<FundamentalKind, 11> all_fundamental_kinds = {
    FundamentalKind::I8,  FundamentalKind::I16, FundamentalKind::I32,
    FundamentalKind::I64, FundamentalKind::U8,  FundamentalKind::U16,
    FundamentalKind::U32, FundamentalKind::U64, FundamentalKind::F32,
    FundamentalKind::F64, FundamentalKind::Bool,
};

constexpr std::uint8_t kind_code(FundamentalKind k) {
  return static_cast<std::uint8_t>(k);
}

constexpr std::size_t kind_width(FundamentalKind k) {
  switch (k) {
    case FundamentalKind::I8:
    case FundamentalKind::U8:
    case FundamentalKind::Bool:
      return 1;
    case FundamentalKind::I16:
    case FundamentalKind::U16:
      return 2;
    case FundamentalKind::I32:
    case FundamentalKind::U32:
    case FundamentalKind::F32:
      return 4;
    case FundamentalKind::I64:
    case FundamentalKind::U64:
    case FundamentalKind::F64:
      return 8;
  }
  return 0;
}

constexpr std::optional<FundamentalKind> kind_from_code(std::uint8_t code) {
  if (code < 1 || code > 11) return std::nullopt;
  return static_cast<FundamentalKind>(code);
}

constexpr std::string_view kind_name(FundamentalKind k) {
  switch (k) {
    case FundamentalKind::I8: return "I8";
    case FundamentalKind::I16: return "I16";
    case FundamentalKind::I32: return "I32";
    case FundamentalKind::I64: return "I64";
    case FundamentalKind::U8: return "U8";
    case FundamentalKind::U16: return "U16";
    case FundamentalKind::U32: return "U32";
    case FundamentalKind::U64: return "U64";
    case FundamentalKind::F32: return "F32";
    case FundamentalKind::F64: return "F64";
    case FundamentalKind::Bool: return "BOOL";
  }
  return "?";
}

}  // namespace tmpc
