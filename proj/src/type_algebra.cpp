#include "grainck/type_algebra.hpp"

#include <algorithm>
#include <sstream>

namespace grainck {

const char* side_name(Side side) {
  switch (side) {
    case Side::none: return "";
    case Side::lhs: return "lhs";
    case Side::rhs: return "rhs";
  }
  return "";
}

std::string FieldId::display() const {
  if (provenance == Side::none) return name;
  return std::string(side_name(provenance)) + "." + name;
}

FieldId field(std::string name) {
  std::string tag = name;
  return FieldId{std::move(name), std::move(tag), Side::none};
}

FieldId field(std::string name, std::string semantic_type) {
  return FieldId{std::move(name), std::move(semantic_type), Side::none};
}

TypeSig::TypeSig(std::initializer_list<FieldId> fields)
    : TypeSig(std::vector<FieldId>(fields)) {}

TypeSig::TypeSig(std::vector<FieldId> fields) : fields_(std::move(fields)) {
  std::sort(fields_.begin(), fields_.end());
  fields_.erase(std::unique(fields_.begin(), fields_.end()), fields_.end());
}

bool TypeSig::contains(const FieldId& f) const {
  return std::binary_search(fields_.begin(), fields_.end(), f);
}

const FieldId* TypeSig::find_by_name(const std::string& name, Side side) const {
  FieldId probe{name, "", side};
  auto it = std::lower_bound(fields_.begin(), fields_.end(), probe);
  if (it != fields_.end() && *it == probe) return &*it;
  return nullptr;
}

void TypeSig::insert(const FieldId& f) {
  auto it = std::lower_bound(fields_.begin(), fields_.end(), f);
  if (it != fields_.end() && *it == f) return;
  fields_.insert(it, f);
}

bool TypeSig::operator==(const TypeSig& other) const {
  if (fields_.size() != other.fields_.size()) return false;
  return std::equal(fields_.begin(), fields_.end(), other.fields_.begin());
}

bool TypeSig::operator<(const TypeSig& other) const {
  return std::lexicographical_compare(fields_.begin(), fields_.end(),
                                      other.fields_.begin(), other.fields_.end());
}

std::string TypeSig::display() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& f : fields_) {
    if (!first) out << ", ";
    out << f.display();
    first = false;
  }
  out << "}";
  return out.str();
}

TypeSig union_of(const TypeSig& a, const TypeSig& b) {
  std::vector<FieldId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return TypeSig(std::move(out));
}

TypeSig intersect(const TypeSig& a, const TypeSig& b) {
  std::vector<FieldId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return TypeSig(std::move(out));
}

TypeSig difference(const TypeSig& a, const TypeSig& b) {
  std::vector<FieldId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return TypeSig(std::move(out));
}

bool subset_of(const TypeSig& a, const TypeSig& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool proper_subset_of(const TypeSig& a, const TypeSig& b) {
  return subset_of(a, b) && !subset_of(b, a);
}

}  // namespace grainck
