#include "grainck/verify.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "grainck/error.hpp"

namespace grainck {

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::Select: return "select";
    case OpKind::Project: return "project";
    case OpKind::Extend: return "extend";
    case OpKind::Rename: return "rename";
    case OpKind::Group: return "group";
    case OpKind::Union: return "union";
    case OpKind::Intersect: return "intersect";
    case OpKind::Difference: return "difference";
    case OpKind::EquiJoin: return "equi_join";
    case OpKind::NaturalJoin: return "natural_join";
    case OpKind::ThetaJoin: return "theta_join";
    case OpKind::SemiJoin: return "semi_join";
    case OpKind::AntiJoin: return "anti_join";
  }
  return "?";
}

std::size_t op_arity(OpKind kind) {
  switch (kind) {
    case OpKind::Select:
    case OpKind::Project:
    case OpKind::Extend:
    case OpKind::Rename:
    case OpKind::Group:
      return 1;
    default:
      return 2;
  }
}

const char* severity_name(Severity severity) {
  switch (severity) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Advice: return "advice";
  }
  return "?";
}

const char* diag_code_name(DiagCode code) {
  switch (code) {
    case DiagCode::GrainMismatch: return "GrainMismatch";
    case DiagCode::FanTrap: return "FanTrap";
    case DiagCode::ChasmTrap: return "ChasmTrap";
    case DiagCode::DedupHazard: return "DedupHazard";
    case DiagCode::JoinTypeAdvice: return "JoinTypeAdvice";
    case DiagCode::IrreducibilityFailure: return "IrreducibilityFailure";
    case DiagCode::SpecError: return "SpecError";
  }
  return "?";
}

bool Diagnostic::operator==(const Diagnostic& other) const {
  return severity == other.severity && code == other.code && node == other.node &&
         message == other.message && evidence == other.evidence;
}

bool NodeReport::operator==(const NodeReport& other) const {
  return id == other.id && op == other.op && schema == other.schema &&
         grain == other.grain && case_tag == other.case_tag &&
         semantics == other.semantics && trace == other.trace;
}

bool VerificationReport::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool VerificationReport::has_warnings() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Warning; });
}

bool VerificationReport::operator==(const VerificationReport& other) const {
  return nodes == other.nodes && diagnostics == other.diagnostics &&
         target_node == other.target_node && declared_target == other.declared_target &&
         final_grain == other.final_grain && pass == other.pass;
}

const RelationDecl* PipelineDoc::find_relation(const std::string& name) const {
  for (const auto& rel : relations) {
    if (rel.name == name) return &rel;
  }
  return nullptr;
}

const PlanNode* PipelineDoc::find_node(const std::string& id) const {
  for (const auto& node : nodes) {
    if (node.id == id) return &node;
  }
  return nullptr;
}

const IsoWitness* PipelineDoc::find_iso(const std::string& name) const {
  for (const auto& iso : isos) {
    if (iso.name == name) return &iso;
  }
  return nullptr;
}

std::vector<FunctionalDependency> PipelineDoc::effective_global_fds() const {
  std::vector<FunctionalDependency> fds = global_fds;
  for (const auto& iso : isos) {
    auto lowered = lower_to_fds(iso);
    fds.insert(fds.end(), lowered.begin(), lowered.end());
  }
  return fds;
}

namespace {

std::vector<std::string> topo_order(const PipelineDoc& doc) {
  std::map<std::string, std::size_t> pending;  // node id -> unresolved inputs
  std::map<std::string, std::vector<std::string>> consumers;
  std::deque<std::string> ready;

  for (const auto& node : doc.nodes) {
    if (node.inputs.size() != op_arity(node.op)) {
      throw AnalysisError(ErrorCode::SpecError,
                          "node '" + node.id + "' (" + op_kind_name(node.op) + ") expects " +
                              std::to_string(op_arity(node.op)) + " inputs, has " +
                              std::to_string(node.inputs.size()));
    }
    std::size_t unresolved = 0;
    for (const auto& in : node.inputs) {
      if (doc.find_relation(in) != nullptr) continue;
      if (doc.find_node(in) == nullptr) {
        throw AnalysisError(ErrorCode::UnknownReference,
                            "node '" + node.id + "' references unknown input '" + in + "'");
      }
      ++unresolved;
      consumers[in].push_back(node.id);
    }
    pending[node.id] = unresolved;
  }
  for (const auto& node : doc.nodes) {
    if (pending[node.id] == 0) ready.push_back(node.id);
  }

  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string id = ready.front();
    ready.pop_front();
    order.push_back(id);
    for (const auto& consumer : consumers[id]) {
      if (--pending[consumer] == 0) ready.push_back(consumer);
    }
  }
  if (order.size() != doc.nodes.size()) {
    throw AnalysisError(ErrorCode::CycleDetected, "the pipeline graph contains a cycle");
  }
  // Stable: re-sort each level by declaration order.
  std::map<std::string, std::size_t> decl_index;
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) decl_index[doc.nodes[i].id] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) {
                     // Only reorder when dependencies permit; Kahn order already
                     // respects edges, so sorting by declaration index within the
                     // ready sequence keeps reports deterministic.
                     return decl_index[a] < decl_index[b] &&
                            std::none_of(doc.find_node(b)->inputs.begin(),
                                         doc.find_node(b)->inputs.end(),
                                         [&](const std::string& in) { return in == a; });
                   });
  return order;
}

JoinKeySpec make_key_spec(const PipelineDoc& doc, const PlanNode& node) {
  JoinKeySpec key;
  key.left_key = node.left_key;
  key.right_key = node.right_key;
  if (node.iso.has_value()) {
    const IsoWitness* witness = doc.find_iso(*node.iso);
    if (witness == nullptr) {
      throw AnalysisError(ErrorCode::UnknownReference,
                          "node '" + node.id + "' references unknown witness '" +
                              *node.iso + "'");
    }
    key.iso = *witness;
  }
  return key;
}

InferenceResult run_inference(const PipelineDoc& doc, const PlanNode& node,
                              const std::vector<const RelationDecl*>& inputs,
                              std::span<const FunctionalDependency> global_fds) {
  switch (node.op) {
    case OpKind::Select:
      return infer_selection(*inputs[0]);
    case OpKind::Project:
      return infer_projection(*inputs[0], node.keep, global_fds);
    case OpKind::Extend:
      return infer_extension(*inputs[0], node.extend_field);
    case OpKind::Rename:
      return infer_rename(*inputs[0], node.rename_from, node.rename_to);
    case OpKind::Group:
      return infer_grouping(*inputs[0], node.group_cols, node.aggs, global_fds);
    case OpKind::Union:
      return infer_setop(SetOpKind::Union, *inputs[0], *inputs[1]);
    case OpKind::Intersect:
      return infer_setop(SetOpKind::Intersection, *inputs[0], *inputs[1]);
    case OpKind::Difference:
      return infer_setop(SetOpKind::Difference, *inputs[0], *inputs[1]);
    case OpKind::EquiJoin:
      return infer_equijoin(*inputs[0], *inputs[1], make_key_spec(doc, node), global_fds);
    case OpKind::NaturalJoin:
      return infer_natural_join(*inputs[0], *inputs[1], global_fds);
    case OpKind::ThetaJoin:
      return infer_thetajoin(*inputs[0], *inputs[1]);
    case OpKind::SemiJoin:
      return infer_semijoin(*inputs[0], *inputs[1], make_key_spec(doc, node));
    case OpKind::AntiJoin:
      return infer_antijoin(*inputs[0], *inputs[1], make_key_spec(doc, node));
  }
  throw AnalysisError(ErrorCode::Internal, "unhandled operation kind");
}

bool is_join(OpKind op) {
  return op == OpKind::EquiJoin || op == OpKind::NaturalJoin || op == OpKind::ThetaJoin;
}

}  // namespace

ResolvedPipeline resolve(const PipelineDoc& doc) {
  ResolvedPipeline rp;
  rp.order = topo_order(doc);
  for (const auto& rel : doc.relations) rp.decls.emplace(rel.name, rel);
  auto global = doc.effective_global_fds();
  for (const auto& id : rp.order) {
    const PlanNode& node = *doc.find_node(id);
    std::vector<const RelationDecl*> inputs;
    for (const auto& in : node.inputs) {
      auto it = rp.decls.find(in);
      if (it == rp.decls.end()) {
        throw AnalysisError(ErrorCode::UnknownReference,
                            "node '" + id + "' references unknown input '" + in + "'");
      }
      inputs.push_back(&it->second);
    }
    InferenceResult inf = run_inference(doc, node, inputs, global);
    rp.decls.emplace(id, to_relation(inf, id));
    rp.inference.emplace(id, std::move(inf));
  }
  return rp;
}

namespace {

// Per-field bookkeeping carried along the DAG: which join sides have
// duplicated this field's rows (fan-trap escalation), and which source
// relation fields it descends from (chasm-trap link analysis).
struct FieldInfo {
  std::set<std::string> dup_tags;  // "<join-node>:<lhs|rhs>"
  std::set<std::pair<std::string, std::string>> origins;  // (relation, field name)
};

using FieldInfoMap = std::map<FieldId, FieldInfo>;

std::set<std::string> all_tags(const FieldInfoMap& info) {
  std::set<std::string> tags;
  for (const auto& [f, fi] : info) tags.insert(fi.dup_tags.begin(), fi.dup_tags.end());
  return tags;
}

FieldInfoMap propagate_field_info(const PipelineDoc& doc, const PlanNode& node,
                                  const InferenceResult& inf,
                                  const std::vector<const FieldInfoMap*>& inputs) {
  FieldInfoMap out;
  const FieldInfoMap& in0 = *inputs[0];
  switch (node.op) {
    case OpKind::Select:
      return in0;
    case OpKind::Project:
      for (const auto& f : node.keep) {
        if (auto it = in0.find(f); it != in0.end()) out[f] = it->second;
      }
      return out;
    case OpKind::Extend: {
      out = in0;
      FieldInfo derived;
      derived.dup_tags = all_tags(in0);
      out[node.extend_field] = std::move(derived);
      return out;
    }
    case OpKind::Rename: {
      for (const auto& [f, fi] : in0) {
        out[f == node.rename_from ? node.rename_to : f] = fi;
      }
      return out;
    }
    case OpKind::Group: {
      for (const auto& f : node.group_cols) {
        if (auto it = in0.find(f); it != in0.end()) out[f] = it->second;
      }
      for (const auto& agg : node.aggs) {
        FieldInfo fi;
        if (agg.arg.has_value()) {
          if (auto it = in0.find(*agg.arg); it != in0.end()) fi.dup_tags = it->second.dup_tags;
        } else {
          fi.dup_tags = all_tags(in0);
        }
        out[agg.out] = std::move(fi);
      }
      return out;
    }
    case OpKind::Union:
    case OpKind::Intersect:
    case OpKind::Difference: {
      const FieldInfoMap& in1 = *inputs[1];
      out = in0;
      for (const auto& [f, fi] : in1) {
        out[f].dup_tags.insert(fi.dup_tags.begin(), fi.dup_tags.end());
        out[f].origins.insert(fi.origins.begin(), fi.origins.end());
      }
      return out;
    }
    case OpKind::SemiJoin:
    case OpKind::AntiJoin:
      return in0;
    case OpKind::EquiJoin:
    case OpKind::NaturalJoin:
    case OpKind::ThetaJoin: {
      const FieldInfoMap& in1 = *inputs[1];
      for (const auto& cs : inf.column_sources) {
        FieldInfo fi;
        if (cs.from == ColumnSource::From::Left) {
          if (auto it = in0.find(cs.source); it != in0.end()) fi = it->second;
          fi.dup_tags.insert(node.id + ":lhs");
        } else if (cs.from == ColumnSource::From::Right) {
          if (auto it = in1.find(cs.source); it != in1.end()) fi = it->second;
          fi.dup_tags.insert(node.id + ":rhs");
        } else {
          if (auto it = in0.find(cs.source); it != in0.end()) fi = it->second;
          for (std::size_t i = 0; i < inf.left_key_order.size(); ++i) {
            if (inf.left_key_order[i] == cs.source) {
              if (auto it = in1.find(inf.right_key_order[i]); it != in1.end()) {
                fi.dup_tags.insert(it->second.dup_tags.begin(), it->second.dup_tags.end());
                fi.origins.insert(it->second.origins.begin(), it->second.origins.end());
              }
            }
          }
          fi.dup_tags.insert(node.id + ":lhs");
          fi.dup_tags.insert(node.id + ":rhs");
        }
        out[cs.column] = std::move(fi);
      }
      return out;
    }
  }
  return out;
}

std::string side_tag(const std::string& node_id, std::size_t input_index) {
  return node_id + (input_index == 0 ? ":lhs" : ":rhs");
}

}  // namespace

std::optional<Diagnostic> detect_fan_trap(
    const PipelineDoc& doc, const PlanNode& node, const RelationDecl& result,
    const std::vector<const RelationDecl*>& inputs) {
  if (!is_join(node.op)) return std::nullopt;
  auto global = doc.effective_global_fds();
  std::vector<std::size_t> duplicated;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    LeqResult finer = grain_leq(result, *inputs[i], global);
    if (!finer.holds) continue;
    if (classify(result, *inputs[i], global).kind == GrainOrder::Equal) continue;
    duplicated.push_back(i);
  }
  if (duplicated.empty()) return std::nullopt;

  Diagnostic diag;
  diag.severity = Severity::Warning;
  diag.code = DiagCode::FanTrap;
  diag.node = node.id;
  std::ostringstream msg;
  msg << "join result grain " << result.grain.display()
      << " is strictly finer than ";
  for (std::size_t k = 0; k < duplicated.size(); ++k) {
    if (k > 0) msg << " and ";
    msg << "G[" << inputs[duplicated[k]]->name << "] = "
        << inputs[duplicated[k]]->grain.display();
  }
  msg << "; rows from the "
      << (duplicated.size() == 2 ? "duplicated sides" : "duplicated side")
      << " repeat in the result and any metric aggregated from them will be inflated";
  diag.message = msg.str();
  diag.evidence.emplace_back("result_grain", result.grain.display());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    diag.evidence.emplace_back("input_grain_" + std::to_string(i),
                               inputs[i]->name + " " + inputs[i]->grain.display());
  }
  for (std::size_t idx : duplicated) {
    diag.evidence.emplace_back("duplicated_side", side_tag(node.id, idx));
  }
  return diag;
}

std::vector<Diagnostic> detect_chasm_traps(const PipelineDoc& doc,
                                           const ResolvedPipeline& resolved) {
  std::vector<Diagnostic> out;
  auto global = doc.effective_global_fds();

  // Field origin maps are rebuilt here so the detector is usable standalone.
  std::map<std::string, FieldInfoMap> info;
  for (const auto& rel : doc.relations) {
    FieldInfoMap m;
    for (const auto& f : rel.schema) m[f].origins.insert({rel.name, f.name});
    info[rel.name] = std::move(m);
  }
  for (const auto& id : resolved.order) {
    const PlanNode& node = *doc.find_node(id);
    std::vector<const FieldInfoMap*> inputs;
    for (const auto& in : node.inputs) inputs.push_back(&info.at(in));
    info[id] = propagate_field_info(doc, node, resolved.inference.at(id), inputs);
  }

  // Walk back through row-preserving unary ops to the producing join, if any.
  auto resolve_producer = [&](std::string id) -> const PlanNode* {
    for (int hops = 0; hops < 16; ++hops) {
      const PlanNode* node = doc.find_node(id);
      if (node == nullptr) return nullptr;  // source relation
      if (node->op == OpKind::Select || node->op == OpKind::Extend) {
        id = node->inputs[0];
        continue;
      }
      return node;
    }
    return nullptr;
  };

  for (const auto& id : resolved.order) {
    const PlanNode& outer = *doc.find_node(id);
    if (outer.op != OpKind::EquiJoin && outer.op != OpKind::NaturalJoin) continue;
    for (std::size_t chain_side = 0; chain_side < 2; ++chain_side) {
      // The chain side must be unpreserved by the outer join flavor for rows
      // with undefined links to be lost.
      const bool preserved = outer.flavor == JoinFlavor::Full ||
                             (outer.flavor == JoinFlavor::Left && chain_side == 0) ||
                             (outer.flavor == JoinFlavor::Right && chain_side == 1);
      if (preserved) continue;

      const PlanNode* inner = resolve_producer(outer.inputs[chain_side]);
      if (inner == nullptr ||
          (inner->op != OpKind::EquiJoin && inner->op != OpKind::NaturalJoin)) {
        continue;
      }

      const RelationDecl& end_decl = resolved.decls.at(outer.inputs[1 - chain_side]);
      const RelationDecl& in_a = resolved.decls.at(inner->inputs[0]);
      const RelationDecl& in_b = resolved.decls.at(inner->inputs[1]);

      // Orient the inner join as fine -> mid so the chain orders upward.
      for (const auto* pair : {new std::pair(&in_a, &in_b), new std::pair(&in_b, &in_a)}) {
        const RelationDecl* fine = pair->first;
        const RelationDecl* mid = pair->second;
        delete pair;
        if (fine->name == mid->name) continue;
        if (!grain_leq(*fine, *mid, global).holds) continue;
        if (!grain_leq(*mid, end_decl, global).holds) continue;

        // The outer join key on the chain side must descend from a nullable
        // field of the mid relation: a partial dependency function.
        const TypeSig& chain_key = chain_side == 0 ? outer.left_key : outer.right_key;
        TypeSig key = outer.op == OpKind::NaturalJoin
                          ? intersect(resolved.decls.at(outer.inputs[0]).schema,
                                      resolved.decls.at(outer.inputs[1]).schema)
                          : chain_key;
        const FieldInfoMap& chain_info = info.at(outer.inputs[chain_side]);
        for (const auto& kf : key) {
          auto it = chain_info.find(kf);
          if (it == chain_info.end()) continue;
          for (const auto& [rel_name, field_name] : it->second.origins) {
            const RelationDecl* origin = doc.find_relation(rel_name);
            if (origin == nullptr) continue;
            if (doc.find_relation(mid->name) != nullptr && rel_name != mid->name) continue;
            const FieldId* f = origin->schema.find_by_name(field_name, Side::none);
            if (f == nullptr || !origin->nullable.contains(*f)) continue;

            Diagnostic diag;
            diag.severity = Severity::Error;
            diag.code = DiagCode::ChasmTrap;
            diag.node = outer.id;
            diag.message = "inner join chain " + fine->name + " -> " + mid->name +
                           " -> " + end_decl.name + " links through nullable " +
                           rel_name + "." + field_name +
                           "; rows with undefined links are silently lost";
            diag.evidence.emplace_back("chain", fine->name + " -> " + mid->name + " -> " +
                                                    end_decl.name);
            diag.evidence.emplace_back("nullable_field", rel_name + "." + field_name);
            diag.evidence.emplace_back("hops", inner->id + " -> " + outer.id);
            bool dup = std::any_of(out.begin(), out.end(), [&](const Diagnostic& d) {
              return d.node == diag.node && d.evidence == diag.evidence;
            });
            if (!dup) out.push_back(std::move(diag));
          }
        }
      }
    }
  }
  return out;
}

VerificationReport verify(const PipelineDoc& doc) {
  VerificationReport report;
  ResolvedPipeline rp = resolve(doc);
  auto global = doc.effective_global_fds();

  std::map<std::string, FieldInfoMap> info;
  for (const auto& rel : doc.relations) {
    FieldInfoMap m;
    for (const auto& f : rel.schema) m[f].origins.insert({rel.name, f.name});
    info[rel.name] = std::move(m);
  }

  std::map<std::string, std::size_t> topo_index;
  for (std::size_t i = 0; i < rp.order.size(); ++i) topo_index[rp.order[i]] = i;

  std::vector<Diagnostic> diagnostics;

  for (const auto& id : rp.order) {
    const PlanNode& node = *doc.find_node(id);
    const InferenceResult& inf = rp.inference.at(id);
    const RelationDecl& result = rp.decls.at(id);

    NodeReport nr;
    nr.id = id;
    nr.op = op_kind_name(node.op);
    nr.schema = inf.result_schema;
    nr.grain = inf.result_grain;
    nr.case_tag = inf.case_tag;
    nr.semantics = inf.semantics_tag;
    nr.trace = inf.trace;
    report.nodes.push_back(std::move(nr));

    std::vector<const FieldInfoMap*> input_infos;
    std::vector<const RelationDecl*> input_decls;
    for (const auto& in : node.inputs) {
      input_infos.push_back(&info.at(in));
      input_decls.push_back(&rp.decls.at(in));
    }
    info[id] = propagate_field_info(doc, node, inf, input_infos);

    // Step 5 runs on every node, not only the final one.
    if (auto trap = detect_fan_trap(doc, node, result, input_decls)) {
      diagnostics.push_back(std::move(*trap));
    }
    for (const auto& note : inf.notes) {
      if (note.kind == Note::Kind::DedupHazard) {
        Diagnostic diag;
        diag.severity = Severity::Warning;
        diag.code = DiagCode::DedupHazard;
        diag.node = id;
        diag.message = note.detail;
        diag.evidence.emplace_back("result_grain", inf.result_grain.display());
        diagnostics.push_back(std::move(diag));
      }
    }
    if ((node.op == OpKind::EquiJoin || node.op == OpKind::NaturalJoin) &&
        node.flavor != JoinFlavor::Full &&
        classify(*input_decls[0], *input_decls[1], global).kind == GrainOrder::Equal) {
      Diagnostic diag;
      diag.severity = Severity::Advice;
      diag.code = DiagCode::JoinTypeAdvice;
      diag.node = id;
      diag.message = std::string("inputs have equal grain but a ") +
                     join_flavor_name(node.flavor) +
                     " join drops elements present on only one side; a full outer join "
                     "preserves them";
      diag.evidence.emplace_back("flavor", join_flavor_name(node.flavor));
      diag.evidence.emplace_back("left_grain", input_decls[0]->grain.display());
      diag.evidence.emplace_back("right_grain", input_decls[1]->grain.display());
      diagnostics.push_back(std::move(diag));
    }
    auto fds = concat_check(inf);
    (void)fds;
  }

  // Irreducibility re-check per node (cheap; guards the inference contract).
  for (const auto& id : rp.order) {
    const InferenceResult& inf = rp.inference.at(id);
    std::vector<FunctionalDependency> fds = inf.result_fds;
    fds.insert(fds.end(), global.begin(), global.end());
    auto check = check_irreducible(inf.result_grain, fds);
    if (!check.irreducible) {
      Diagnostic diag;
      diag.severity = Severity::Error;
      diag.code = DiagCode::IrreducibilityFailure;
      diag.node = id;
      diag.message = "computed grain " + inf.result_grain.display() +
                     " is reducible: " + check.offending->display() +
                     " already covers it";
      diag.evidence.emplace_back("offending_subset", check.offending->display());
      diagnostics.push_back(std::move(diag));
    }
  }

  auto chasms = detect_chasm_traps(doc, rp);
  diagnostics.insert(diagnostics.end(), chasms.begin(), chasms.end());

  // Escalate fan traps whose duplicated side feeds a downstream aggregation.
  for (const auto& id : rp.order) {
    const PlanNode& node = *doc.find_node(id);
    if (node.op != OpKind::Group) continue;
    const FieldInfoMap& in_info = info.at(node.inputs[0]);
    std::set<std::string> consumed;
    for (const auto& agg : node.aggs) {
      if (agg.arg.has_value()) {
        if (auto it = in_info.find(*agg.arg); it != in_info.end()) {
          consumed.insert(it->second.dup_tags.begin(), it->second.dup_tags.end());
        }
      } else {
        auto tags = all_tags(in_info);
        consumed.insert(tags.begin(), tags.end());
      }
    }
    for (auto& diag : diagnostics) {
      if (diag.code != DiagCode::FanTrap) continue;
      for (const auto& [key, value] : diag.evidence) {
        if (key == "duplicated_side" && consumed.count(value) > 0) {
          if (diag.severity != Severity::Error) {
            diag.severity = Severity::Error;
            diag.message += "; duplicated metrics are aggregated downstream at node '" +
                            id + "'";
          }
          diag.evidence.emplace_back("aggregated_at", id);
          break;
        }
      }
    }
  }

  // Step 4: the final grain must be equivalent to the declared target.
  if (doc.target.has_value()) {
    report.target_node = doc.target->node;
    report.declared_target = doc.target->grain;
    auto it = rp.decls.find(doc.target->node);
    if (it == rp.decls.end()) {
      throw AnalysisError(ErrorCode::UnknownReference,
                          "target node '" + doc.target->node + "' does not exist");
    }
    report.final_grain = it->second.grain;
    RelationDecl target_decl;
    target_decl.name = "declared-target";
    target_decl.schema = doc.target->grain;
    target_decl.grain = doc.target->grain;
    GrainRelation rel = classify(it->second, target_decl, global);
    if (rel.kind != GrainOrder::Equal) {
      Diagnostic diag;
      diag.severity = Severity::Error;
      diag.code = DiagCode::GrainMismatch;
      diag.node = doc.target->node;
      diag.message = "final grain " + report.final_grain.display() +
                     " is not equivalent to the declared target " +
                     report.declared_target.display() + " (" + grain_order_name(rel.kind) +
                     ")";
      diag.evidence.emplace_back("final_grain", report.final_grain.display());
      diag.evidence.emplace_back("declared_target", report.declared_target.display());
      diag.evidence.emplace_back("relation", grain_order_name(rel.kind));
      diagnostics.push_back(std::move(diag));
    }
  }

  std::stable_sort(diagnostics.begin(), diagnostics.end(),
                   [&](const Diagnostic& a, const Diagnostic& b) {
                     auto ia = topo_index.count(a.node) ? topo_index[a.node]
                                                        : rp.order.size();
                     auto ib = topo_index.count(b.node) ? topo_index[b.node]
                                                        : rp.order.size();
                     if (ia != ib) return ia < ib;
                     if (a.code != b.code) return static_cast<int>(a.code) < static_cast<int>(b.code);
                     return a.message < b.message;
                   });
  report.diagnostics = std::move(diagnostics);
  report.pass = !report.has_errors();
  return report;
}

std::string explain(const PipelineDoc& doc, const std::string& node_id) {
  std::ostringstream out;
  if (const RelationDecl* rel = doc.find_relation(node_id)) {
    out << "source " << rel->name << "\n";
    out << "  schema = " << rel->schema.display() << "\n";
    out << "  declared grain = " << rel->grain.display() << "\n";
    if (!rel->fds.empty()) {
      out << "  dependencies:\n";
      for (const auto& fd : rel->fds) {
        out << "    " << fd.lhs.display() << " -> " << fd.rhs.display() << "\n";
      }
    }
    return out.str();
  }
  if (doc.find_node(node_id) == nullptr) {
    throw AnalysisError(ErrorCode::UnknownNode, "no node or relation named '" + node_id + "'");
  }
  ResolvedPipeline rp = resolve(doc);
  const InferenceResult& inf = rp.inference.at(node_id);
  out << "node " << node_id << "\n";
  for (const auto& line : inf.trace) out << "  " << line << "\n";
  out << "  result schema = " << inf.result_schema.display() << "\n";
  out << "  result grain  = " << inf.result_grain.display() << "\n";
  return out.str();
}

std::string render_text(const VerificationReport& report, bool color) {
  const char* reset = color ? "\033[0m" : "";
  const char* red = color ? "\033[31m" : "";
  const char* yellow = color ? "\033[33m" : "";
  const char* cyan = color ? "\033[36m" : "";
  const char* green = color ? "\033[32m" : "";

  std::ostringstream out;
  out << "pipeline verification\n";
  for (const auto& node : report.nodes) {
    out << "  node " << node.id << " [" << node.op << "]  grain=" << node.grain.display();
    if (node.case_tag != JoinCase::NotAJoinCase) {
      out << "  case=" << join_case_name(node.case_tag);
    }
    if (node.semantics.has_value()) {
      out << "  " << group_semantics_name(*node.semantics);
    }
    out << "\n";
  }
  if (!report.target_node.empty()) {
    out << "  target " << report.target_node << ": declared "
        << report.declared_target.display() << ", inferred " << report.final_grain.display()
        << "\n";
  }
  if (!report.diagnostics.empty()) {
    out << "diagnostics:\n";
    for (const auto& diag : report.diagnostics) {
      const char* tint = diag.severity == Severity::Error     ? red
                         : diag.severity == Severity::Warning ? yellow
                                                              : cyan;
      out << "  " << tint << "[" << severity_name(diag.severity) << "] "
          << diag_code_name(diag.code) << reset << " at " << diag.node << ": "
          << diag.message << "\n";
      for (const auto& [key, value] : diag.evidence) {
        out << "      " << key << ": " << value << "\n";
      }
    }
  }
  std::size_t errors = 0, warnings = 0, advice = 0;
  for (const auto& diag : report.diagnostics) {
    if (diag.severity == Severity::Error) ++errors;
    else if (diag.severity == Severity::Warning) ++warnings;
    else ++advice;
  }
  out << "verdict: " << (report.pass ? green : red) << (report.pass ? "PASS" : "FAIL")
      << reset << " (" << errors << " errors, " << warnings << " warnings, " << advice
      << " advice)\n";
  return out.str();
}

}  // namespace grainck
