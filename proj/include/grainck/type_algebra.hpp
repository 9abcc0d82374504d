#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grainck {

// Which join side a field was copied from when a join duplicates a common
// field. Fields of declared source relations always carry Side::none.
enum class Side : std::uint8_t { none = 0, lhs = 1, rhs = 2 };

const char* side_name(Side side);

// A named field with a semantic type tag. Identity within a TypeSig is the
// (name, provenance) pair; semantic_type is carried metadata and is checked
// for consistency at document load, not here.
struct FieldId {
  std::string name;
  std::string semantic_type;
  Side provenance = Side::none;

  bool operator==(const FieldId& other) const {
    return name == other.name && provenance == other.provenance;
  }
  bool operator<(const FieldId& other) const {
    if (name != other.name) return name < other.name;
    return provenance < other.provenance;
  }

  // "CustomerId" or "lhs.CustomerId".
  std::string display() const;

  FieldId with_side(Side side) const { return {name, semantic_type, side}; }
};

FieldId field(std::string name);
FieldId field(std::string name, std::string semantic_type);

// A finite set of fields representing a flattened product type. The empty
// set is legal and denotes the unit product.
class TypeSig {
 public:
  TypeSig() = default;
  TypeSig(std::initializer_list<FieldId> fields);
  explicit TypeSig(std::vector<FieldId> fields);

  bool contains(const FieldId& f) const;
  const FieldId* find_by_name(const std::string& name, Side side) const;

  // Set semantics: inserting an existing member is a no-op.
  void insert(const FieldId& f);

  bool empty() const { return fields_.size() == 0; }
  std::size_t size() const { return fields_.size(); }

  auto begin() const { return fields_.begin(); }
  auto end() const { return fields_.end(); }
  const std::vector<FieldId>& fields() const { return fields_; }

  bool operator==(const TypeSig& other) const;
  bool operator<(const TypeSig& other) const;

  // "{A, B, lhs.C}"; deterministic (fields kept sorted).
  std::string display() const;

 private:
  std::vector<FieldId> fields_;  // sorted by (name, provenance), unique
};

TypeSig union_of(const TypeSig& a, const TypeSig& b);
TypeSig intersect(const TypeSig& a, const TypeSig& b);
TypeSig difference(const TypeSig& a, const TypeSig& b);

// True iff every field of a is in b, i.e. a projection b -> a exists.
bool subset_of(const TypeSig& a, const TypeSig& b);
bool proper_subset_of(const TypeSig& a, const TypeSig& b);

}  // namespace grainck
