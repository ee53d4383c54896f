// Compile-time mapping from C++ types to wire elements, and the pack/unpack
// codecs between application buffers and canonical little-endian payloads.
//
// A type T becomes sendable by specializing element_traits<T> with one of:
//   - a fundamental kind:   static constexpr FundamentalKind kind;
//   - a fixed-size array:   (provided for std::array<E, N>)
//   - a record field list:  static constexpr auto fields =
//                               std::make_tuple(field("x", &P::x), ...);
// Buffers over an element type T are: T itself, std::array nests of T, or one
// outer std::vector / std::span whose value type is a statically sized buffer
// of T. Only the outermost container may be dynamically sized.
#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "tmpc/descriptor.hpp"
#include "tmpc/errors.hpp"
#include "tmpc/fundamental.hpp"
#include "tmpc/signature.hpp"

namespace tmpc {

template <typename T>
struct element_traits;  // specialized per sendable type; no primary definition

// Names one record member for the wire: flattening and descriptors follow the
// declaration order of the field list, not the struct's memory layout.
template <typename Record, typename Member>
struct FieldSpec {
  using record_type = Record;
  using member_type = Member;
  const char* name;
  Member Record::* member;
};

template <typename Record, typename Member>
constexpr FieldSpec<Record, Member> field(const char* name,
                                          Member Record::* member) {
  return {name, member};
}

#define TMPC_FUNDAMENTAL_ELEMENT(type_, kind_)              \
  template <>                                               \
  struct element_traits<type_> {                            \
    static constexpr FundamentalKind kind = FundamentalKind::kind_; \
  };

TMPC_FUNDAMENTAL_ELEMENT(std::int8_t, I8)
TMPC_FUNDAMENTAL_ELEMENT(std::int16_t, I16)
TMPC_FUNDAMENTAL_ELEMENT(std::int32_t, I32)
TMPC_FUNDAMENTAL_ELEMENT(std::int64_t, I64)
TMPC_FUNDAMENTAL_ELEMENT(std::uint8_t, U8)
TMPC_FUNDAMENTAL_ELEMENT(std::uint16_t, U16)
TMPC_FUNDAMENTAL_ELEMENT(std::uint32_t, U32)
TMPC_FUNDAMENTAL_ELEMENT(std::uint64_t, U64)
TMPC_FUNDAMENTAL_ELEMENT(float, F32)
TMPC_FUNDAMENTAL_ELEMENT(double, F64)
TMPC_FUNDAMENTAL_ELEMENT(bool, Bool)

#undef TMPC_FUNDAMENTAL_ELEMENT

template <typename E, std::size_t N>
  requires(N > 0 && N <= 0xffffffffull)
struct element_traits<std::array<E, N>> {
  using array_element = E;
  static constexpr std::uint32_t array_length = static_cast<std::uint32_t>(N);
};

namespace detail {

template <typename T>
concept HasKind = requires { element_traits<T>::kind; };

template <typename T>
concept HasArray = requires {
  typename element_traits<T>::array_element;
  element_traits<T>::array_length;
};

template <typename T>
concept HasFields = requires { element_traits<T>::fields; };

template <typename T>
constexpr bool element_check() {
  using U = std::remove_cv_t<T>;
  if constexpr (HasKind<U>) {
    return true;
  } else if constexpr (HasArray<U>) {
    return element_check<typename element_traits<U>::array_element>();
  } else if constexpr (HasFields<U>) {
    return std::apply(
        [](const auto&... fs) {
          return (element_check<
                      typename std::remove_cvref_t<decltype(fs)>::member_type>() &&
                  ...);
        },
        element_traits<U>::fields);
  } else {
    return false;
  }
}

}  // namespace detail

// A type element_traits knows how to put on the wire.
template <typename T>
concept Element = detail::element_check<T>();

namespace detail {

template <typename T>
constexpr std::size_t wire_size() {
  using U = std::remove_cv_t<T>;
  if constexpr (HasKind<U>) {
    return kind_width(element_traits<U>::kind);
  } else if constexpr (HasArray<U>) {
    return element_traits<U>::array_length *
           wire_size<typename element_traits<U>::array_element>();
  } else {
    return std::apply(
        [](const auto&... fs) {
          return (std::size_t{0} + ... +
                  wire_size<
                      typename std::remove_cvref_t<decltype(fs)>::member_type>());
        },
        element_traits<U>::fields);
  }
}

template <typename T>
constexpr bool contains_bool() {
  using U = std::remove_cv_t<T>;
  if constexpr (HasKind<U>) {
    return element_traits<U>::kind == FundamentalKind::Bool;
  } else if constexpr (HasArray<U>) {
    return contains_bool<typename element_traits<U>::array_element>();
  } else {
    return std::apply(
        [](const auto&... fs) {
          return (contains_bool<
                      typename std::remove_cvref_t<decltype(fs)>::member_type>() ||
                  ...);
        },
        element_traits<U>::fields);
  }
}

// True when the in-memory representation of T is already the wire
// representation: little-endian host, no bool re-encoding, no padding.
// Records always take the elementwise path; their memory order is not
// guaranteed to match the declared field order.
template <typename T>
constexpr bool memcpy_safe() {
  using U = std::remove_cv_t<T>;
  if constexpr (std::endian::native != std::endian::little) {
    return false;
  } else if constexpr (HasKind<U>) {
    return element_traits<U>::kind != FundamentalKind::Bool &&
           sizeof(U) == kind_width(element_traits<U>::kind);
  } else if constexpr (HasArray<U>) {
    using E = typename element_traits<U>::array_element;
    return memcpy_safe<E>() &&
           sizeof(U) == element_traits<U>::array_length * sizeof(E);
  } else {
    return false;
  }
}

template <typename T, typename U>
using uint_for = std::conditional_t<
    sizeof(T) == 1, std::uint8_t,
    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                       std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                          std::uint64_t>>>;

template <typename T>
void store_le(T value, std::byte* out) {
  static_assert(std::is_arithmetic_v<T> && !std::is_same_v<T, bool>);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out, &value, sizeof(T));
  } else {
    const auto bits = std::bit_cast<uint_for<T, T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out[i] = static_cast<std::byte>((bits >> (8 * i)) & 0xff);
    }
  }
}

template <typename T>
T load_le(const std::byte* in) {
  static_assert(std::is_arithmetic_v<T> && !std::is_same_v<T, bool>);
  if constexpr (std::endian::native == std::endian::little) {
    T value;
    std::memcpy(&value, in, sizeof(T));
    return value;
  } else {
    uint_for<T, T> bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<uint_for<T, T>>(std::to_integer<std::uint8_t>(in[i]))
              << (8 * i);
    }
    return std::bit_cast<T>(bits);
  }
}

template <typename T>
void write_element(const T& value, std::byte*& out) {
  using U = std::remove_cv_t<T>;
  if constexpr (HasKind<U>) {
    if constexpr (element_traits<U>::kind == FundamentalKind::Bool) {
      *out++ = static_cast<std::byte>(value ? 1 : 0);
    } else {
      store_le(value, out);
      out += sizeof(U);
    }
  } else if constexpr (HasArray<U>) {
    for (const auto& item : value) write_element(item, out);
  } else {
    std::apply(
        [&](const auto&... fs) { (write_element(value.*(fs.member), out), ...); },
        element_traits<U>::fields);
  }
}

template <typename T>
void read_element(T& value, const std::byte*& in) {
  using U = std::remove_cv_t<T>;
  if constexpr (HasKind<U>) {
    if constexpr (element_traits<U>::kind == FundamentalKind::Bool) {
      const auto b = std::to_integer<std::uint8_t>(*in++);
      if (b > 1) throw InvalidBoolError(b);
      value = (b != 0);
    } else {
      value = load_le<U>(in);
      in += sizeof(U);
    }
  } else if constexpr (HasArray<U>) {
    for (auto& item : value) read_element(item, in);
  } else {
    std::apply(
        [&](const auto&... fs) { (read_element(value.*(fs.member), in), ...); },
        element_traits<U>::fields);
  }
}

// ---- buffer shapes -------------------------------------------------------

template <typename B>
struct container_probe {
  static constexpr bool is_array = false;
  static constexpr bool is_vector = false;
  static constexpr bool is_span = false;
};

template <typename E, std::size_t N>
struct container_probe<std::array<E, N>> {
  static constexpr bool is_array = true;
  static constexpr bool is_vector = false;
  static constexpr bool is_span = false;
  using value = E;
};

template <typename E>
struct container_probe<std::vector<E>> {
  static constexpr bool is_array = false;
  static constexpr bool is_vector = true;
  static constexpr bool is_span = false;
  using value = E;
};

template <typename E, std::size_t X>
struct container_probe<std::span<E, X>> {
  static constexpr bool is_array = false;
  static constexpr bool is_vector = false;
  static constexpr bool is_span = true;
  using value = E;
};

// S is T or a std::array nest bottoming out at T.
template <typename S, typename T>
constexpr bool static_buffer_check() {
  using U = std::remove_cv_t<S>;
  if constexpr (std::is_same_v<U, T>) {
    return true;
  } else if constexpr (container_probe<U>::is_array) {
    return static_buffer_check<typename container_probe<U>::value, T>();
  } else {
    return false;
  }
}

template <typename B, typename T, bool RequireMutable>
constexpr bool buffer_check() {
  using U = std::remove_cv_t<B>;
  if constexpr (static_buffer_check<U, T>()) {
    return true;
  } else if constexpr (container_probe<U>::is_vector) {
    return static_buffer_check<typename container_probe<U>::value, T>();
  } else if constexpr (container_probe<U>::is_span) {
    using V = typename container_probe<U>::value;
    if constexpr (RequireMutable && std::is_const_v<V>) return false;
    return static_buffer_check<V, T>();
  } else {
    return false;
  }
}

}  // namespace detail

// B can supply elements of type T for a send.
template <typename B, typename T>
concept BufferOf = Element<T> && detail::buffer_check<B, T, false>();

// B can absorb elements of type T from a receive.
template <typename B, typename T>
concept MutableBufferOf = Element<T> && detail::buffer_check<B, T, true>();

// Runtime structural descriptor mirroring the static shape of T.
template <Element T>
TypeDescriptor descriptor_of() {
  using U = std::remove_cv_t<T>;
  if constexpr (detail::HasKind<U>) {
    return TypeDescriptor::fundamental(element_traits<U>::kind);
  } else if constexpr (detail::HasArray<U>) {
    return TypeDescriptor::array_of(
        descriptor_of<typename element_traits<U>::array_element>(),
        element_traits<U>::array_length);
  } else {
    std::vector<std::pair<std::string, TypeDescriptor>> fields;
    std::apply(
        [&](const auto&... fs) {
          (fields.emplace_back(
               fs.name,
               descriptor_of<
                   typename std::remove_cvref_t<decltype(fs)>::member_type>()),
           ...);
        },
        element_traits<U>::fields);
    return TypeDescriptor::record(std::move(fields));
  }
}

// Bytes one element of T occupies in a payload.
template <Element T>
constexpr std::size_t element_wire_size() {
  return detail::wire_size<T>();
}

namespace detail {

template <typename T, typename B>
constexpr bool has_static_count() {
  using U = std::remove_cv_t<B>;
  return static_buffer_check<U, T>();
}

// Number of T elements a statically sized buffer holds.
template <typename T, typename S>
constexpr std::uint64_t static_count() {
  using U = std::remove_cv_t<S>;
  if constexpr (std::is_same_v<U, T>) {
    return 1;
  } else {
    return element_traits<U>::array_length *
           static_count<T, typename container_probe<U>::value>();
  }
}

template <typename T, typename S>
void partial_unpack_impl(S& buf, const std::byte*& in, std::uint64_t& left) {
  if (left == 0) return;
  using U = std::remove_cv_t<S>;
  if constexpr (std::is_same_v<U, T>) {
    read_element(buf, in);
    --left;
  } else {
    for (auto& item : buf) {
      if (left == 0) return;
      partial_unpack_impl<T>(item, in, left);
    }
  }
}

template <typename T, typename S>
void pack_static(const S& buf, std::byte*& out) {
  using U = std::remove_cv_t<S>;
  if constexpr (std::is_same_v<U, T>) {
    write_element(buf, out);
  } else {
    for (const auto& item : buf) pack_static<T>(item, out);
  }
}

template <typename T, typename S>
void unpack_static(S& buf, const std::byte*& in) {
  using U = std::remove_cv_t<S>;
  if constexpr (std::is_same_v<U, T>) {
    read_element(buf, in);
  } else {
    for (auto& item : buf) unpack_static<T>(item, in);
  }
}

template <typename B>
constexpr bool is_vector_bool() {
  return std::is_same_v<std::remove_cv_t<B>, std::vector<bool>>;
}

}  // namespace detail

// Fills the first `count` T slots of a statically sized nest.
template <typename T, typename S>
void partial_unpack(S& buf, const std::byte*& in, std::uint64_t count) {
  detail::partial_unpack_impl<T>(buf, in, count);
}

// Number of T elements `buf` currently holds (capacity, for receives).
template <Element T, typename B>
  requires BufferOf<B, T>
std::uint64_t buffer_element_count(const B& buf) {
  using U = std::remove_cv_t<B>;
  if constexpr (detail::has_static_count<T, B>()) {
    (void)buf;
    return detail::static_count<T, U>();
  } else {
    using S = typename detail::container_probe<U>::value;
    return static_cast<std::uint64_t>(buf.size()) *
           detail::static_count<T, std::remove_cv_t<S>>();
  }
}

// Serializes every element of `buf` into a canonical little-endian payload.
template <Element T, typename B>
  requires BufferOf<B, T>
std::vector<std::byte> pack_buffer(const B& buf) {
  const std::uint64_t count = buffer_element_count<T>(buf);
  std::vector<std::byte> payload(count * element_wire_size<T>());
  std::byte* out = payload.data();
  using U = std::remove_cv_t<B>;
  if constexpr (detail::is_vector_bool<U>()) {
    for (std::size_t i = 0; i < buf.size(); ++i) {
      *out++ = static_cast<std::byte>(buf[i] ? 1 : 0);
    }
  } else if constexpr (detail::has_static_count<T, B>()) {
    if constexpr (detail::memcpy_safe<U>()) {
      std::memcpy(out, &buf, sizeof(U));
    } else {
      detail::pack_static<T>(buf, out);
    }
  } else {
    using S = std::remove_cv_t<typename detail::container_probe<U>::value>;
    if constexpr (detail::memcpy_safe<S>()) {
      if (!buf.empty()) {
        std::memcpy(out, buf.data(), buf.size() * sizeof(S));
      }
    } else {
      for (const auto& item : buf) detail::pack_static<T>(item, out);
    }
  }
  return payload;
}

// Fills the first `count` element slots of `buf` from `payload`, in flatten
// order; slots past `count` keep their prior contents.
template <Element T, typename B>
  requires MutableBufferOf<B, T>
void unpack_buffer(B& buf, std::span<const std::byte> payload,
                   std::uint64_t count) {
  if (count > buffer_element_count<T>(buf)) {
    throw std::invalid_argument("unpack count exceeds buffer capacity");
  }
  const std::size_t expected = count * element_wire_size<T>();
  if (payload.size() != expected) {
    throw PayloadSizeMismatchError(expected, payload.size());
  }
  const std::byte* in = payload.data();
  using U = std::remove_cv_t<B>;
  if constexpr (detail::is_vector_bool<U>()) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto b = std::to_integer<std::uint8_t>(*in++);
      if (b > 1) throw InvalidBoolError(b);
      buf[i] = (b != 0);
    }
  } else if constexpr (detail::has_static_count<T, B>()) {
    if (count == buffer_element_count<T>(buf)) {
      if constexpr (detail::memcpy_safe<U>()) {
        std::memcpy(&buf, in, sizeof(U));
        return;
      }
      detail::unpack_static<T>(buf, in);
    } else {
      // Partial fill of a static nest: walk leaf elements one at a time.
      partial_unpack<T>(buf, in, count);
    }
  } else {
    using S = std::remove_cv_t<typename detail::container_probe<U>::value>;
    constexpr std::uint64_t per_slot = detail::static_count<T, S>();
    const std::uint64_t full_slots = count / per_slot;
    const std::uint64_t leftover = count % per_slot;
    if constexpr (detail::memcpy_safe<S>()) {
      std::memcpy(buf.data(), in, full_slots * sizeof(S));
      in += full_slots * sizeof(S);
    } else {
      for (std::uint64_t i = 0; i < full_slots; ++i) {
        detail::unpack_static<T>(buf[i], in);
      }
    }
    if (leftover > 0) partial_unpack<T>(buf[full_slots], in, leftover);
  }
}

}  // namespace tmpc
