#include "tmpc/signature.hpp"

#include <sstream>

#include "tmpc/errors.hpp"

namespace tmpc {

bool congruent(const FlatSignature& a, const FlatSignature& b) {
  return a == b;
}

std::size_t byte_size(const FlatSignature& sig) {
  std::size_t total = 0;
  for (FundamentalKind k : sig.kinds()) total += kind_width(k);
  return total;
}

std::vector<std::byte> canonical_bytes(const FlatSignature& sig) {
  const auto count = static_cast<std::uint32_t>(sig.size());
  std::vector<std::byte> out;
  out.reserve(4 + sig.size());
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::byte>((count >> shift) & 0xff));
  }
  for (FundamentalKind k : sig.kinds()) {
    out.push_back(static_cast<std::byte>(kind_code(k)));
  }
  return out;
}

FlatSignature signature_from_canonical(std::span<const std::byte> bytes) {
  if (bytes.size() < 4) {
    throw ProtocolError("canonical signature shorter than its count prefix");
  }
  std::uint32_t count = 0;
  for (int i = 0; i < 4; ++i) {
    count |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(bytes[i]))
             << (8 * i);
  }
  if (bytes.size() != 4 + static_cast<std::size_t>(count)) {
    throw ProtocolError("canonical signature length disagrees with its count");
  }
  std::vector<FundamentalKind> kinds;
  kinds.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto code = std::to_integer<std::uint8_t>(bytes[4 + i]);
    const auto kind = kind_from_code(code);
    if (!kind) {
      throw ProtocolError("unknown fundamental kind code " +
                          std::to_string(code));
    }
    kinds.push_back(*kind);
  }
  return FlatSignature(std::move(kinds));
}

TypeHash signature_hash(const FlatSignature& sig) {
  constexpr std::uint64_t offset_basis = 0xcbf29ce484222325ull;
  constexpr std::uint64_t prime = 0x100000001b3ull;
  std::uint64_t h = offset_basis;
  for (std::byte b : canonical_bytes(sig)) {
    h ^= std::to_integer<std::uint64_t>(b);
    h *= prime;
  }
  return TypeHash{h};
}

std::optional<std::uint64_t> element_multiplicity(const FlatSignature& buffer,
                                                  const FlatSignature& element) {
  if (element.empty()) return std::nullopt;
  if (buffer.empty() || buffer.size() % element.size() != 0) return std::nullopt;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    if (buffer[i] != element[i % element.size()]) return std::nullopt;
  }
  return buffer.size() / element.size();
}

std::string to_string(const FlatSignature& sig) {
  std::ostringstream out;
  out << '[';
  bool first = true;
  for (FundamentalKind k : sig.kinds()) {
    if (!first) out << ", ";
    out << kind_name(k);
    first = false;
  }
  out << ']';
  return out.str();
}

}  // namespace tmpc
