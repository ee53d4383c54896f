#include "tmpc/descriptor.hpp"

#include <stdexcept>

namespace tmpc {

TypeDescriptor TypeDescriptor::fundamental(FundamentalKind kind) {
  return TypeDescriptor(Node{Fundamental{kind}});
}

TypeDescriptor TypeDescriptor::array_of(TypeDescriptor element,
                                        std::uint32_t length) {
  if (length == 0) {
    throw std::invalid_argument("array length must be >= 1");
  }
  return TypeDescriptor(Node{
      Array{std::make_shared<const TypeDescriptor>(std::move(element)), length}});
}

TypeDescriptor TypeDescriptor::record(
    std::vector<std::pair<std::string, TypeDescriptor>> fields) {
  if (fields.empty()) {
    throw std::invalid_argument("record must have >= 1 field");
  }
  return TypeDescriptor(Node{Record{std::move(fields)}});
}

bool TypeDescriptor::is_fundamental() const {
  return std::holds_alternative<Fundamental>(node_);
}
bool TypeDescriptor::is_array() const {
  return std::holds_alternative<Array>(node_);
}
bool TypeDescriptor::is_record() const {
  return std::holds_alternative<Record>(node_);
}

const TypeDescriptor::Fundamental& TypeDescriptor::as_fundamental() const {
  return std::get<Fundamental>(node_);
}
const TypeDescriptor::Array& TypeDescriptor::as_array() const {
  return std::get<Array>(node_);
}
const TypeDescriptor::Record& TypeDescriptor::as_record() const {
  return std::get<Record>(node_);
}

bool operator==(const TypeDescriptor& a, const TypeDescriptor& b) {
  if (a.node_.index() != b.node_.index()) return false;
  if (a.is_fundamental()) {
    return a.as_fundamental().kind == b.as_fundamental().kind;
  }
  if (a.is_array()) {
    return a.as_array().length == b.as_array().length &&
           *a.as_array().element == *b.as_array().element;
  }
  const auto& fa = a.as_record().fields;
  const auto& fb = b.as_record().fields;
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i].first != fb[i].first || !(fa[i].second == fb[i].second)) {
      return false;
    }
  }
  return true;
}

namespace {

void flatten_into(const TypeDescriptor& d, std::vector<FundamentalKind>& out) {
  if (d.is_fundamental()) {
    out.push_back(d.as_fundamental().kind);
    return;
  }
  if (d.is_array()) {
    const auto& a = d.as_array();
    // Expand the element once, then repeat; linear in the output size.
    std::vector<FundamentalKind> sub;
    flatten_into(*a.element, sub);
    out.reserve(out.size() + sub.size() * a.length);
    for (std::uint32_t i = 0; i < a.length; ++i) {
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return;
  }
  for (const auto& [name, field] : d.as_record().fields) {
    flatten_into(field, out);
  }
}

}  // namespace

FlatSignature flatten(const TypeDescriptor& descriptor) {
  std::vector<FundamentalKind> kinds;
  flatten_into(descriptor, kinds);
  return FlatSignature(std::move(kinds));
}

}  // namespace tmpc
