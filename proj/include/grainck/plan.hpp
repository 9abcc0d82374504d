#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grainck/inference.hpp"
#include "grainck/grain.hpp"

namespace grainck {

enum class OpKind {
  Select,
  Project,
  Extend,
  Rename,
  Group,
  Union,
  Intersect,
  Difference,
  EquiJoin,
  NaturalJoin,
  ThetaJoin,
  SemiJoin,
  AntiJoin,
};

const char* op_kind_name(OpKind kind);
std::size_t op_arity(OpKind kind);

// A small interpreted predicate language for selections and theta joins.
// Opaque string predicates are never interpreted; grain inference does not
// depend on them, and the data-level evaluator rejects them.
struct Predicate {
  struct Comparison {
    FieldId left;
    std::string op;               // = != < <= > >=
    std::optional<FieldId> right; // field-to-field when set
    std::optional<std::int64_t> value;
  };
  std::vector<Comparison> all;      // conjunction; empty = always true
  std::optional<std::string> opaque;

  bool interpreted() const { return !opaque.has_value(); }
};

struct PlanNode {
  std::string id;
  OpKind op = OpKind::Select;
  std::vector<std::string> inputs;  // relation names or node ids

  Predicate predicate;              // select, theta_join
  TypeSig keep;                     // project
  FieldId extend_field;             // extend
  FieldId rename_from, rename_to;   // rename
  TypeSig group_cols;               // group
  std::vector<Aggregate> aggs;      // group
  TypeSig left_key, right_key;      // equi/semi/anti join
  std::optional<std::string> iso;   // witness name for mismatched keys
  JoinFlavor flavor = JoinFlavor::Inner;
};

struct TargetSpec {
  std::string node;
  TypeSig grain;
};

struct PipelineDoc {
  std::vector<RelationDecl> relations;
  std::vector<IsoWitness> isos;
  std::vector<FunctionalDependency> global_fds;
  std::vector<PlanNode> nodes;
  std::optional<TargetSpec> target;

  const RelationDecl* find_relation(const std::string& name) const;
  const PlanNode* find_node(const std::string& id) const;
  const IsoWitness* find_iso(const std::string& name) const;

  // Global dependencies with every declared witness lowered in.
  std::vector<FunctionalDependency> effective_global_fds() const;
};

}  // namespace grainck
