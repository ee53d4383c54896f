// Structural type descriptors and the flattening procedure.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tmpc/signature.hpp"

namespace tmpc {

// Structural description of a communicator element type: a fundamental
// scalar, a fixed-length array, or a record of named fields. Immutable after
// construction; cheap to copy (nested nodes are shared).
class TypeDescriptor {
 public:
  struct Fundamental {
    FundamentalKind kind;
  };
  struct Array {
    std::shared_ptr<const TypeDescriptor> element;
    std::uint32_t length;  // >= 1
  };
  struct Record {
    std::vector<std::pair<std::string, TypeDescriptor>> fields;  // nonempty
  };

  static TypeDescriptor fundamental(FundamentalKind kind);
  // Throws std::invalid_argument when length == 0.
  static TypeDescriptor array_of(TypeDescriptor element, std::uint32_t length);
  // Throws std::invalid_argument when fields is empty.
  static TypeDescriptor record(
      std::vector<std::pair<std::string, TypeDescriptor>> fields);

  bool is_fundamental() const;
  bool is_array() const;
  bool is_record() const;

  const Fundamental& as_fundamental() const;
  const Array& as_array() const;
  const Record& as_record() const;

  // Structural equality (names included). Congruence is defined on flatten
  // output, not on this.
  friend bool operator==(const TypeDescriptor&, const TypeDescriptor&);

 private:
  using Node = std::variant<Fundamental, Array, Record>;
  explicit TypeDescriptor(Node node) : node_(std::move(node)) {}

  Node node_;
};

// Depth-first, left-to-right expansion into fundamental kinds. Field names
// and array nesting do not affect the result.
FlatSignature flatten(const TypeDescriptor& descriptor);

}  // namespace tmpc
