#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grainck/grain.hpp"
#include "grainck/type_algebra.hpp"

namespace grainck {

enum class JoinCase { CaseA, CaseB, NotAJoinCase };
enum class GroupSemantics { TrivialAgg, CoarsenedGrain, OrthogonalAgg, MixedAgg };
enum class JoinFlavor { Inner, Left, Right, Full };
enum class SetOpKind { Union, Intersection, Difference };

const char* join_case_name(JoinCase c);
const char* group_semantics_name(GroupSemantics s);
const char* join_flavor_name(JoinFlavor f);
const char* set_op_name(SetOpKind k);

// Key columns for an equi/semi/anti join. When left_key and right_key differ
// an iso witness bijecting them is required.
struct JoinKeySpec {
  TypeSig left_key;
  TypeSig right_key;
  std::optional<IsoWitness> iso;
};

struct Note {
  enum class Kind { DuplicatedCommonField, DedupHazard, PortionTieBreak };
  Kind kind;
  std::string detail;
};

const char* note_kind_name(Note::Kind kind);

// How a join result column is populated at data level.
struct ColumnSource {
  enum class From { Left, Right, KeyMerged };
  FieldId column;
  From from;
  FieldId source;  // field name in the originating input
};

struct Aggregate {
  std::string fn;  // count, sum, min, max
  std::optional<FieldId> arg;
  FieldId out;
};

struct InferenceResult {
  TypeSig result_schema;
  TypeSig result_grain;
  JoinCase case_tag = JoinCase::NotAJoinCase;
  std::optional<GroupSemantics> semantics_tag;
  std::vector<Note> notes;

  // Dependencies carried to downstream nodes and used when minimizing the
  // result grain. Does not include the implicit grain -> schema entries.
  std::vector<FunctionalDependency> result_fds;
  // Dependencies that hold on the result data but are consequences of the
  // inputs' grain definitions rather than declared constraints. Used only to
  // decide which grain subsets a data-level collision search may skip.
  std::vector<FunctionalDependency> implied_fds;
  TypeSig result_nullable;

  std::vector<std::string> trace;  // derivation, one line per step

  // Populated for binary joins; drives the data-level evaluator.
  std::vector<ColumnSource> column_sources;
  std::vector<FieldId> left_key_order;   // aligned with right_key_order
  std::vector<FieldId> right_key_order;
};

RelationDecl to_relation(const InferenceResult& result, std::string name);

InferenceResult infer_equijoin(const RelationDecl& left, const RelationDecl& right,
                               const JoinKeySpec& key,
                               std::span<const FunctionalDependency> global_fds);

InferenceResult infer_natural_join(const RelationDecl& left, const RelationDecl& right,
                                   std::span<const FunctionalDependency> global_fds);

InferenceResult infer_selection(const RelationDecl& input);

InferenceResult infer_projection(const RelationDecl& input, const TypeSig& keep,
                                 std::span<const FunctionalDependency> global_fds);

InferenceResult infer_extension(const RelationDecl& input, const FieldId& new_field);

InferenceResult infer_rename(const RelationDecl& input, const FieldId& from,
                             const FieldId& to);

InferenceResult infer_grouping(const RelationDecl& input, const TypeSig& group_cols,
                               std::span<const Aggregate> aggs,
                               std::span<const FunctionalDependency> global_fds);

InferenceResult infer_setop(SetOpKind kind, const RelationDecl& a,
                            const RelationDecl& b);

InferenceResult infer_thetajoin(const RelationDecl& a, const RelationDecl& b);

InferenceResult infer_semijoin(const RelationDecl& a, const RelationDecl& b,
                               const JoinKeySpec& key);

InferenceResult infer_antijoin(const RelationDecl& a, const RelationDecl& b,
                               const JoinKeySpec& key);

// The join-result grain bounds: the grain product below, the grain
// intersection above, both checked with grain_leq on synthesized relations.
bool equijoin_bounds_hold(const RelationDecl& left, const RelationDecl& right,
                          const InferenceResult& result,
                          std::span<const FunctionalDependency> global_fds);

}  // namespace grainck
