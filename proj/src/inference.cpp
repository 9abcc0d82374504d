#include "grainck/inference.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "grainck/error.hpp"

namespace grainck {

const char* join_case_name(JoinCase c) {
  switch (c) {
    case JoinCase::CaseA: return "A";
    case JoinCase::CaseB: return "B";
    case JoinCase::NotAJoinCase: return "-";
  }
  return "?";
}

const char* group_semantics_name(GroupSemantics s) {
  switch (s) {
    case GroupSemantics::TrivialAgg: return "trivial-aggregation";
    case GroupSemantics::CoarsenedGrain: return "coarsened-grain";
    case GroupSemantics::OrthogonalAgg: return "orthogonal-aggregation";
    case GroupSemantics::MixedAgg: return "mixed-aggregation";
  }
  return "?";
}

const char* join_flavor_name(JoinFlavor f) {
  switch (f) {
    case JoinFlavor::Inner: return "inner";
    case JoinFlavor::Left: return "left";
    case JoinFlavor::Right: return "right";
    case JoinFlavor::Full: return "full";
  }
  return "?";
}

const char* set_op_name(SetOpKind k) {
  switch (k) {
    case SetOpKind::Union: return "union";
    case SetOpKind::Intersection: return "intersection";
    case SetOpKind::Difference: return "difference";
  }
  return "?";
}

const char* note_kind_name(Note::Kind kind) {
  switch (kind) {
    case Note::Kind::DuplicatedCommonField: return "duplicated-common-field";
    case Note::Kind::DedupHazard: return "dedup-hazard";
    case Note::Kind::PortionTieBreak: return "portion-tie-break";
  }
  return "?";
}

RelationDecl to_relation(const InferenceResult& result, std::string name) {
  RelationDecl decl;
  decl.name = std::move(name);
  decl.schema = result.result_schema;
  decl.grain = result.result_grain;
  decl.fds = result.result_fds;
  decl.nullable = result.result_nullable;
  return decl;
}

namespace {

using FieldMap = std::map<FieldId, FieldId>;

TypeSig apply_map(const FieldMap& map, const TypeSig& sig) {
  std::vector<FieldId> out;
  out.reserve(sig.size());
  for (const auto& f : sig) {
    auto it = map.find(f);
    out.push_back(it == map.end() ? f : it->second);
  }
  return TypeSig(std::move(out));
}

std::vector<FunctionalDependency> apply_map(const FieldMap& map,
                                            std::span<const FunctionalDependency> fds) {
  std::vector<FunctionalDependency> out;
  out.reserve(fds.size());
  for (const auto& fd : fds) {
    out.push_back({apply_map(map, fd.lhs), apply_map(map, fd.rhs), fd.scope});
  }
  return out;
}

std::vector<FunctionalDependency> concat(std::vector<FunctionalDependency> a,
                                         std::span<const FunctionalDependency> b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

RelationDecl key_portion_decl(std::string name, const TypeSig& portion) {
  RelationDecl decl;
  decl.name = std::move(name);
  decl.schema = portion;
  decl.grain = portion;
  return decl;
}

// Dependencies kept only for projected-away chains: for each dependency whose
// determinant survives, record everything it still determines inside keep.
std::vector<FunctionalDependency> project_fds(
    std::span<const FunctionalDependency> fds,
    std::span<const FunctionalDependency> ambient, const TypeSig& keep) {
  std::vector<FunctionalDependency> out;
  for (const auto& fd : fds) {
    if (!subset_of(fd.lhs, keep)) continue;
    TypeSig determined = intersect(fd_closure(fd.lhs, ambient), keep);
    TypeSig rhs = difference(determined, fd.lhs);
    if (rhs.empty()) continue;
    FunctionalDependency projected{fd.lhs, rhs, fd.scope};
    if (std::find(out.begin(), out.end(), projected) == out.end()) {
      out.push_back(projected);
    }
  }
  return out;
}

std::string describe_fds(std::span<const FunctionalDependency> fds) {
  std::ostringstream out;
  bool first = true;
  for (const auto& fd : fds) {
    if (!first) out << ", ";
    out << fd.lhs.display() << " -> " << fd.rhs.display();
    first = false;
  }
  return out.str();
}

}  // namespace

InferenceResult infer_equijoin(const RelationDecl& left, const RelationDecl& right,
                               const JoinKeySpec& key,
                               std::span<const FunctionalDependency> global_fds) {
  if (!subset_of(key.left_key, left.schema)) {
    throw AnalysisError(ErrorCode::InvalidKey,
                        "left key " + key.left_key.display() + " is not part of schema " +
                            left.schema.display());
  }
  if (!subset_of(key.right_key, right.schema)) {
    throw AnalysisError(ErrorCode::InvalidKey,
                        "right key " + key.right_key.display() + " is not part of schema " +
                            right.schema.display());
  }

  const bool same_key = key.left_key == key.right_key;
  FieldMap right_to_left;  // key fields of the right input onto the canonical key
  if (!same_key) {
    if (!key.iso.has_value()) {
      throw AnalysisError(ErrorCode::MissingIso,
                          "join keys " + key.left_key.display() + " and " +
                              key.right_key.display() +
                              " differ; an isomorphism witness is required");
    }
    TypeSig witness_left, witness_right;
    for (const auto& [l, r] : key.iso->pairing) {
      witness_left.insert(l);
      witness_right.insert(r);
      right_to_left[r] = l;
    }
    if (!(witness_left == key.left_key) || !(witness_right == key.right_key) ||
        right_to_left.size() != key.right_key.size()) {
      throw AnalysisError(ErrorCode::MissingIso,
                          "witness '" + key.iso->name + "' does not biject " +
                              key.left_key.display() + " onto " + key.right_key.display());
    }
  } else {
    for (const auto& f : key.left_key) right_to_left[f] = f;
  }

  const TypeSig left_rest_schema = difference(left.schema, key.left_key);
  const TypeSig right_rest_schema = difference(right.schema, key.right_key);
  const TypeSig common_unjoined = intersect(left_rest_schema, right_rest_schema);

  FieldMap left_map, right_map;
  for (const auto& f : left.schema) {
    left_map[f] = common_unjoined.contains(f) ? f.with_side(Side::lhs) : f;
  }
  for (const auto& f : right.schema) {
    if (key.right_key.contains(f)) {
      right_map[f] = right_to_left.at(f);
    } else {
      right_map[f] = common_unjoined.contains(f) ? f.with_side(Side::rhs) : f;
    }
  }

  InferenceResult result;
  result.result_schema =
      union_of(apply_map(left_map, left.schema), apply_map(right_map, right.schema));
  const std::size_t expected =
      left.schema.size() + right.schema.size() - key.right_key.size();
  if (result.result_schema.size() != expected) {
    throw AnalysisError(ErrorCode::DuplicateField,
                        "join of " + left.name + " and " + right.name +
                            " produces colliding field names even after side tagging; "
                            "rename the inputs first");
  }

  for (const auto& f : common_unjoined) {
    result.notes.push_back({Note::Kind::DuplicatedCommonField,
                            f.display() + " is common to both inputs but not joined on; "
                                          "it appears as lhs." +
                                f.name + " and rhs." + f.name});
  }

  // Key portions of the two grains.
  const TypeSig portion_left = intersect(left.grain, key.left_key);
  const TypeSig portion_right = intersect(right.grain, key.right_key);
  const TypeSig portion_right_canon = apply_map(right_to_left, portion_right);

  std::ostringstream header;
  result.trace.push_back("equi-join of " + left.name + " and " + right.name);
  result.trace.push_back("  left key  = " + key.left_key.display() +
                         (same_key ? "" : "  right key = " + key.right_key.display() +
                                              "  via witness '" + key.iso->name + "'"));
  result.trace.push_back("  G[" + left.name + "] = " + left.grain.display());
  result.trace.push_back("  G[" + right.name + "] = " + right.grain.display());
  result.trace.push_back("  key portion of left grain  = " + portion_left.display());
  result.trace.push_back("  key portion of right grain = " + portion_right.display());

  // Declared dependencies available for comparing the key portions.
  std::vector<FunctionalDependency> ambient(global_fds.begin(), global_fds.end());
  ambient.insert(ambient.end(), left.fds.begin(), left.fds.end());
  ambient.insert(ambient.end(), right.fds.begin(), right.fds.end());
  if (key.iso.has_value()) {
    auto iso_fds = lower_to_fds(*key.iso);
    ambient.insert(ambient.end(), iso_fds.begin(), iso_fds.end());
  }

  TypeSig key_part;
  if (subset_of(portion_left, portion_right_canon) ||
      subset_of(portion_right_canon, portion_left)) {
    result.case_tag = JoinCase::CaseA;
    key_part = intersect(portion_left, portion_right_canon);
    result.trace.push_back("  portions comparable by subset -> case A");
    result.trace.push_back("  key part = portion intersection = " + key_part.display());
  } else {
    const bool left_determines =
        grain_leq(key_portion_decl("left-portion", portion_left),
                  key_portion_decl("right-portion", portion_right), ambient)
            .holds;
    const bool right_determines =
        grain_leq(key_portion_decl("right-portion", portion_right),
                  key_portion_decl("left-portion", portion_left), ambient)
            .holds;
    if (left_determines || right_determines) {
      result.case_tag = JoinCase::CaseA;
      if (left_determines && right_determines) {
        key_part = portion_left;
        result.notes.push_back({Note::Kind::PortionTieBreak,
                                "both key portions determine each other; the left portion " +
                                    portion_left.display() + " is used as the meet"});
        result.trace.push_back(
            "  portions equivalent via dependencies -> case A (left portion kept)");
      } else if (left_determines) {
        // The left portion is finer; the coarser right portion is the meet.
        key_part = portion_right_canon;
        result.trace.push_back("  left portion determines right -> case A");
      } else {
        key_part = portion_left;
        result.trace.push_back("  right portion determines left -> case A");
      }
      result.trace.push_back("  key part = coarser portion = " + key_part.display());
    } else {
      result.case_tag = JoinCase::CaseB;
      key_part = union_of(portion_left, portion_right_canon);
      result.trace.push_back("  portions incomparable -> case B");
      result.trace.push_back("  key part = portion union = " + key_part.display());
    }
  }

  const TypeSig rest_left = apply_map(left_map, difference(left.grain, key.left_key));
  const TypeSig rest_right = apply_map(right_map, difference(right.grain, key.right_key));
  result.trace.push_back("  grain rest of left  = " + rest_left.display());
  result.trace.push_back("  grain rest of right = " + rest_right.display());

  const TypeSig candidate = union_of(rest_left, union_of(rest_right, key_part));
  result.trace.push_back("  closed-form grain = " + candidate.display());

  // Dependencies carried onto the result, rewritten into result vocabulary.
  // The join equality itself is captured structurally: matched key fields
  // share one canonical column.
  result.result_fds = apply_map(left_map, left.fds);
  auto right_fds = apply_map(right_map, right.fds);
  result.result_fds.insert(result.result_fds.end(), right_fds.begin(), right_fds.end());
  if (!same_key) {
    result.trace.push_back("  join equality: " + key.left_key.display() + " = " +
                           key.right_key.display());
  }

  std::vector<FunctionalDependency> minimize_fds = concat(result.result_fds, global_fds);
  result.result_grain = minimize_key(candidate, minimize_fds);
  if (result.result_grain == candidate) {
    result.trace.push_back("  grain is irreducible under propagated dependencies");
  } else {
    result.trace.push_back("  grain minimized to " + result.result_grain.display() +
                           " using " + describe_fds(minimize_fds));
  }

  result.implied_fds.push_back(
      {apply_map(left_map, left.grain), apply_map(left_map, left.schema), left.name});
  result.implied_fds.push_back(
      {apply_map(right_map, right.grain), apply_map(right_map, right.schema), right.name});

  result.result_nullable =
      union_of(apply_map(left_map, left.nullable), apply_map(right_map, right.nullable));

  // Data-level column plan.
  for (const auto& f : key.left_key) {
    result.left_key_order.push_back(f);
    for (const auto& [r, l] : right_to_left) {
      if (l == f) result.right_key_order.push_back(r);
    }
  }
  for (const auto& f : left.schema) {
    if (key.left_key.contains(f)) {
      result.column_sources.push_back({f, ColumnSource::From::KeyMerged, f});
    } else {
      result.column_sources.push_back({left_map.at(f), ColumnSource::From::Left, f});
    }
  }
  for (const auto& f : right.schema) {
    if (!key.right_key.contains(f)) {
      result.column_sources.push_back({right_map.at(f), ColumnSource::From::Right, f});
    }
  }
  return result;
}

InferenceResult infer_natural_join(const RelationDecl& left, const RelationDecl& right,
                                   std::span<const FunctionalDependency> global_fds) {
  TypeSig common = intersect(left.schema, right.schema);
  if (common.empty()) {
    throw AnalysisError(ErrorCode::EmptyNaturalKey,
                        left.name + " and " + right.name + " share no fields");
  }
  JoinKeySpec key{common, common, std::nullopt};
  InferenceResult result = infer_equijoin(left, right, key, global_fds);
  result.trace.insert(result.trace.begin(),
                      "natural join on all common fields " + common.display());
  return result;
}

InferenceResult infer_selection(const RelationDecl& input) {
  InferenceResult result;
  result.result_schema = input.schema;
  result.result_grain = input.grain;
  result.result_fds = input.fds;
  result.result_nullable = input.nullable;
  result.trace.push_back("selection over " + input.name +
                         ": rows filtered, schema and grain unchanged");
  return result;
}

InferenceResult infer_projection(const RelationDecl& input, const TypeSig& keep,
                                 std::span<const FunctionalDependency> global_fds) {
  if (!subset_of(keep, input.schema)) {
    throw AnalysisError(ErrorCode::FieldNotInSchema,
                        "projection onto " + keep.display() + " names fields outside " +
                            input.schema.display());
  }
  InferenceResult result;
  result.result_schema = keep;
  result.result_nullable = intersect(input.nullable, keep);
  auto ambient = concat(std::vector<FunctionalDependency>(input.fds), global_fds);
  result.result_fds = project_fds(input.fds, ambient, keep);
  result.trace.push_back("projection of " + input.name + " onto " + keep.display());
  if (subset_of(input.grain, keep)) {
    result.result_grain = input.grain;
    result.trace.push_back("  all grain fields kept; grain unchanged");
  } else {
    result.result_grain = minimize_key(keep, ambient);
    TypeSig dropped = difference(input.grain, keep);
    result.notes.push_back({Note::Kind::DedupHazard,
                            "grain fields " + dropped.display() +
                                " are dropped; explicit duplicate elimination is required "
                                "for the result grain " +
                                result.result_grain.display() + " to hold"});
    result.trace.push_back("  grain fields " + dropped.display() +
                           " dropped; coarsened grain = " + result.result_grain.display());
  }
  return result;
}

InferenceResult infer_extension(const RelationDecl& input, const FieldId& new_field) {
  if (input.schema.empty()) {
    throw AnalysisError(ErrorCode::EmptyInput,
                        "cannot extend the empty product " + input.name);
  }
  if (input.schema.contains(new_field)) {
    throw AnalysisError(ErrorCode::DuplicateField,
                        new_field.display() + " already exists in " + input.name);
  }
  InferenceResult result;
  result.result_schema = input.schema;
  result.result_schema.insert(new_field);
  result.result_grain = input.grain;
  result.result_fds = input.fds;
  result.result_fds.push_back({input.grain, TypeSig{new_field}, input.name});
  result.result_nullable = input.nullable;
  result.trace.push_back("extension of " + input.name + " with derived field " +
                         new_field.display() + "; grain unchanged");
  return result;
}

InferenceResult infer_rename(const RelationDecl& input, const FieldId& from,
                             const FieldId& to) {
  if (!input.schema.contains(from)) {
    throw AnalysisError(ErrorCode::FieldNotInSchema,
                        from.display() + " is not a field of " + input.name);
  }
  if (input.schema.contains(to)) {
    throw AnalysisError(ErrorCode::DuplicateField,
                        to.display() + " already exists in " + input.name);
  }
  FieldMap map;
  map[from] = to;
  InferenceResult result;
  result.result_schema = apply_map(map, input.schema);
  result.result_grain = apply_map(map, input.grain);
  result.result_fds = apply_map(map, input.fds);
  result.result_nullable = apply_map(map, input.nullable);
  result.trace.push_back("rename " + from.display() + " -> " + to.display() +
                         "; structure preserved, grain equivalent");
  return result;
}

InferenceResult infer_grouping(const RelationDecl& input, const TypeSig& group_cols,
                               std::span<const Aggregate> aggs,
                               std::span<const FunctionalDependency> global_fds) {
  if (!subset_of(group_cols, input.schema)) {
    throw AnalysisError(ErrorCode::FieldNotInSchema,
                        "grouping by " + group_cols.display() + " names fields outside " +
                            input.schema.display());
  }
  InferenceResult result;
  result.result_schema = group_cols;
  TypeSig agg_outs;
  for (const auto& agg : aggs) {
    if (agg.arg.has_value() && !input.schema.contains(*agg.arg)) {
      throw AnalysisError(ErrorCode::FieldNotInSchema,
                          "aggregate argument " + agg.arg->display() + " is not a field of " +
                              input.name);
    }
    if (result.result_schema.contains(agg.out)) {
      throw AnalysisError(ErrorCode::DuplicateField,
                          "aggregate output " + agg.out.display() + " collides");
    }
    result.result_schema.insert(agg.out);
    agg_outs.insert(agg.out);
  }

  auto ambient = concat(std::vector<FunctionalDependency>(input.fds), global_fds);
  result.result_grain = minimize_key(group_cols, ambient);
  result.result_fds = project_fds(input.fds, ambient, group_cols);
  if (!agg_outs.empty()) {
    result.result_fds.push_back({group_cols, agg_outs, input.name});
  }
  result.result_nullable = intersect(input.nullable, group_cols);

  if (subset_of(input.grain, group_cols)) {
    result.semantics_tag = GroupSemantics::TrivialAgg;
  } else if (subset_of(group_cols, input.grain)) {
    result.semantics_tag = GroupSemantics::CoarsenedGrain;
  } else if (intersect(group_cols, input.grain).empty()) {
    result.semantics_tag = GroupSemantics::OrthogonalAgg;
  } else {
    result.semantics_tag = GroupSemantics::MixedAgg;
  }
  result.trace.push_back("grouping of " + input.name + " by " + group_cols.display());
  result.trace.push_back("  one row per group -> grain = " + result.result_grain.display() +
                         " (" + group_semantics_name(*result.semantics_tag) + ")");
  return result;
}

InferenceResult infer_setop(SetOpKind kind, const RelationDecl& a,
                            const RelationDecl& b) {
  if (!(a.schema == b.schema)) {
    throw AnalysisError(ErrorCode::NotUnionCompatible,
                        a.name + " and " + b.name + " have different schemas: " +
                            a.schema.display() + " vs " + b.schema.display());
  }
  if (!(a.grain == b.grain)) {
    throw AnalysisError(ErrorCode::GrainMismatch,
                        a.name + " and " + b.name + " declare different grains: " +
                            a.grain.display() + " vs " + b.grain.display());
  }
  InferenceResult result;
  result.result_schema = a.schema;
  result.result_grain = a.grain;
  switch (kind) {
    case SetOpKind::Union:
      for (const auto& fd : a.fds) {
        if (std::find(b.fds.begin(), b.fds.end(), fd) != b.fds.end()) {
          result.result_fds.push_back(fd);
        }
      }
      result.result_nullable = union_of(a.nullable, b.nullable);
      break;
    case SetOpKind::Intersection:
      result.result_fds = a.fds;
      result.result_fds.insert(result.result_fds.end(), b.fds.begin(), b.fds.end());
      result.result_nullable = intersect(a.nullable, b.nullable);
      break;
    case SetOpKind::Difference:
      result.result_fds = a.fds;
      result.result_nullable = a.nullable;
      break;
  }
  result.trace.push_back(std::string(set_op_name(kind)) + " of " + a.name + " and " +
                         b.name + ": union-compatible, schema and grain unchanged");
  return result;
}

InferenceResult infer_thetajoin(const RelationDecl& a, const RelationDecl& b) {
  if (a.schema.empty() || b.schema.empty()) {
    throw AnalysisError(ErrorCode::EmptyInput,
                        "theta join over the empty product is degenerate");
  }
  const TypeSig common = intersect(a.schema, b.schema);
  FieldMap left_map, right_map;
  for (const auto& f : a.schema) {
    left_map[f] = common.contains(f) ? f.with_side(Side::lhs) : f;
  }
  for (const auto& f : b.schema) {
    right_map[f] = common.contains(f) ? f.with_side(Side::rhs) : f;
  }

  InferenceResult result;
  result.result_schema =
      union_of(apply_map(left_map, a.schema), apply_map(right_map, b.schema));
  if (result.result_schema.size() != a.schema.size() + b.schema.size()) {
    throw AnalysisError(ErrorCode::DuplicateField,
                        "theta join of " + a.name + " and " + b.name +
                            " produces colliding field names even after side tagging");
  }
  for (const auto& f : common) {
    result.notes.push_back({Note::Kind::DuplicatedCommonField,
                            f.display() + " appears as lhs." + f.name + " and rhs." + f.name});
  }
  // No equality constraint: neither grain can determine the other side.
  result.result_grain =
      union_of(apply_map(left_map, a.grain), apply_map(right_map, b.grain));
  result.result_fds = apply_map(left_map, a.fds);
  auto bfds = apply_map(right_map, b.fds);
  result.result_fds.insert(result.result_fds.end(), bfds.begin(), bfds.end());
  result.implied_fds.push_back(
      {apply_map(left_map, a.grain), apply_map(left_map, a.schema), a.name});
  result.implied_fds.push_back(
      {apply_map(right_map, b.grain), apply_map(right_map, b.schema), b.name});
  result.result_nullable =
      union_of(apply_map(left_map, a.nullable), apply_map(right_map, b.nullable));
  for (const auto& f : a.schema) {
    result.column_sources.push_back({left_map.at(f), ColumnSource::From::Left, f});
  }
  for (const auto& f : b.schema) {
    result.column_sources.push_back({right_map.at(f), ColumnSource::From::Right, f});
  }
  result.trace.push_back("theta join of " + a.name + " and " + b.name +
                         ": product grain " + result.result_grain.display());
  return result;
}

namespace {

InferenceResult filter_join(const char* label, const RelationDecl& a,
                            const RelationDecl& b, const JoinKeySpec& key) {
  if (!subset_of(key.left_key, a.schema)) {
    throw AnalysisError(ErrorCode::InvalidKey,
                        "left key " + key.left_key.display() + " is not part of schema " +
                            a.schema.display());
  }
  if (!subset_of(key.right_key, b.schema)) {
    throw AnalysisError(ErrorCode::InvalidKey,
                        "right key " + key.right_key.display() + " is not part of schema " +
                            b.schema.display());
  }
  FieldMap right_to_left;
  if (!(key.left_key == key.right_key)) {
    if (!key.iso.has_value()) {
      throw AnalysisError(ErrorCode::MissingIso,
                          "keys differ; an isomorphism witness is required");
    }
    for (const auto& [l, r] : key.iso->pairing) right_to_left[r] = l;
  } else {
    for (const auto& f : key.left_key) right_to_left[f] = f;
  }

  InferenceResult result;
  result.result_schema = a.schema;
  result.result_grain = a.grain;
  result.result_fds = a.fds;
  result.result_nullable = a.nullable;
  for (const auto& f : key.left_key) {
    result.left_key_order.push_back(f);
    for (const auto& [r, l] : right_to_left) {
      if (l == f) result.right_key_order.push_back(r);
    }
  }
  result.trace.push_back(std::string(label) + " of " + a.name + " against " + b.name +
                         ": rows of " + a.name + " filtered, grain unchanged");
  return result;
}

}  // namespace

InferenceResult infer_semijoin(const RelationDecl& a, const RelationDecl& b,
                               const JoinKeySpec& key) {
  return filter_join("semi-join", a, b, key);
}

InferenceResult infer_antijoin(const RelationDecl& a, const RelationDecl& b,
                               const JoinKeySpec& key) {
  return filter_join("anti-join", a, b, key);
}

bool equijoin_bounds_hold(const RelationDecl& left, const RelationDecl& right,
                          const InferenceResult& result,
                          std::span<const FunctionalDependency> global_fds) {
  auto map_side = [&](const TypeSig& sig, bool from_left) {
    TypeSig mapped;
    for (const auto& f : sig) {
      bool found = false;
      for (const auto& cs : result.column_sources) {
        if (cs.from == ColumnSource::From::Right && from_left) continue;
        if (cs.from == ColumnSource::From::Left && !from_left) continue;
        FieldId wanted = f;
        if (!from_left && cs.from == ColumnSource::From::KeyMerged) {
          // Translate a right key field onto the canonical key column.
          for (std::size_t i = 0; i < result.right_key_order.size(); ++i) {
            if (result.right_key_order[i] == f) wanted = result.left_key_order[i];
          }
        }
        if (cs.source == wanted) {
          mapped.insert(cs.column);
          found = true;
          break;
        }
      }
      if (!found) return std::optional<TypeSig>();
    }
    return std::optional<TypeSig>(mapped);
  };

  auto left_grain = map_side(left.grain, true);
  auto right_grain = map_side(right.grain, false);
  if (!left_grain || !right_grain) return false;

  RelationDecl res = to_relation(result, "result");
  RelationDecl finest;
  finest.name = "grain-product";
  finest.schema = union_of(*left_grain, *right_grain);
  finest.grain = finest.schema;
  RelationDecl coarsest;
  coarsest.name = "grain-intersection";
  coarsest.schema = intersect(*left_grain, *right_grain);
  coarsest.grain = coarsest.schema;

  return grain_leq(finest, res, global_fds).holds &&
         grain_leq(res, coarsest, global_fds).holds;
}

}  // namespace grainck
