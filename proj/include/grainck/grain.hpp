#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grainck/type_algebra.hpp"

namespace grainck {

// lhs determines rhs. lhs may be empty only when rhs is empty.
struct FunctionalDependency {
  TypeSig lhs;
  TypeSig rhs;
  std::string scope = "global";  // relation name, or "global"

  bool operator==(const FunctionalDependency& other) const {
    return lhs == other.lhs && rhs == other.rhs && scope == other.scope;
  }
};

// A declared field-level bijection between two key types.
struct IsoWitness {
  std::string name;
  TypeSig left;
  TypeSig right;
  std::vector<std::pair<FieldId, FieldId>> pairing;  // covers left<->right
};

// Each pairing entry becomes a pair of dependencies l -> r and r -> l, making
// iso-based grain equality a special case of the closure engine.
std::vector<FunctionalDependency> lower_to_fds(const IsoWitness& iso);

// A declared relation with its grain and constraints.
struct RelationDecl {
  std::string name;
  TypeSig schema;
  TypeSig grain;
  std::vector<FunctionalDependency> fds;
  TypeSig nullable;            // fields drawn from schema
  std::string collection_tag;  // informational container label
};

// Attribute closure: smallest superset of attrs closed under all fds.
TypeSig fd_closure(const TypeSig& attrs, std::span<const FunctionalDependency> fds);

struct RuleStep {
  std::string rule;
  std::string detail;

  bool operator==(const RuleStep& other) const {
    return rule == other.rule && detail == other.detail;
  }
};

struct LeqResult {
  bool holds = false;
  std::vector<RuleStep> steps;
};

// r1 determines r2: true iff grain(r2) is inside the closure of grain(r1)
// under global fds, both relations' scoped fds, and the implicit
// grain -> schema dependency injected for each relation.
LeqResult grain_leq(const RelationDecl& r1, const RelationDecl& r2,
                    std::span<const FunctionalDependency> global_fds);

enum class GrainOrder { Equal, LeqLR, LeqRL, Incomparable };

const char* grain_order_name(GrainOrder order);

struct GrainRelation {
  GrainOrder kind = GrainOrder::Incomparable;
  std::vector<RuleStep> derivation;
};

// Equal iff grain_leq holds both ways; Incomparable iff neither way.
GrainRelation classify(const RelationDecl& r1, const RelationDecl& r2,
                       std::span<const FunctionalDependency> global_fds);

// Lattice operations on grains: the meet below both grains is their union
// (finest), the join above both is their intersection (coarsest).
TypeSig grain_glb(const TypeSig& g1, const TypeSig& g2);
TypeSig grain_lub(const TypeSig& g1, const TypeSig& g2);

// Subset enumeration is bounded; larger grains are rejected at load.
inline constexpr std::size_t kMaxEnumeratedGrainFields = 12;

struct IrreducibilityCheck {
  bool irreducible = false;
  std::optional<TypeSig> offending;  // first (smallest) covering proper subset
};

// True iff no proper subset of grain has an fd-closure covering grain.
// Enumerates subsets smallest-first, ties broken by field order.
IrreducibilityCheck check_irreducible(const TypeSig& grain,
                                      std::span<const FunctionalDependency> fds);

// Smallest subset of candidate whose closure under fds covers candidate;
// candidate itself when nothing smaller works. Same enumeration order as
// check_irreducible, so the result is deterministic.
TypeSig minimize_key(const TypeSig& candidate,
                     std::span<const FunctionalDependency> fds);

}  // namespace grainck
