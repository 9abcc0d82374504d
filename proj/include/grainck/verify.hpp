#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "grainck/plan.hpp"

namespace grainck {

enum class Severity { Error, Warning, Advice };
enum class DiagCode {
  GrainMismatch,
  FanTrap,
  ChasmTrap,
  DedupHazard,
  JoinTypeAdvice,
  IrreducibilityFailure,
  SpecError,
};

const char* severity_name(Severity severity);
const char* diag_code_name(DiagCode code);

struct Diagnostic {
  Severity severity = Severity::Warning;
  DiagCode code = DiagCode::SpecError;
  std::string node;
  std::string message;
  // Machine-checkable payload, e.g. the compared grains or the trap chain.
  std::vector<std::pair<std::string, std::string>> evidence;

  bool operator==(const Diagnostic& other) const;
};

struct NodeReport {
  std::string id;
  std::string op;
  TypeSig schema;
  TypeSig grain;
  JoinCase case_tag = JoinCase::NotAJoinCase;
  std::optional<GroupSemantics> semantics;
  std::vector<std::string> trace;

  bool operator==(const NodeReport& other) const;
};

struct VerificationReport {
  std::vector<NodeReport> nodes;  // topological order
  std::vector<Diagnostic> diagnostics;
  std::string target_node;
  TypeSig declared_target;
  TypeSig final_grain;
  bool pass = false;

  bool has_errors() const;
  bool has_warnings() const;

  bool operator==(const VerificationReport& other) const;
};

// Internal result of running inference over the whole DAG; exposed so the
// data-level oracle and the SQL emitter can reuse the per-node plans.
struct ResolvedPipeline {
  std::vector<std::string> order;  // topological node ids
  std::map<std::string, InferenceResult> inference;
  std::map<std::string, RelationDecl> decls;  // node outputs and sources
};

ResolvedPipeline resolve(const PipelineDoc& doc);

// The five-step check: infer every node, compare the final grain against the
// declared target, and run the violation detectors on every node.
VerificationReport verify(const PipelineDoc& doc);

// Standalone detectors, also invoked by verify.
std::optional<Diagnostic> detect_fan_trap(
    const PipelineDoc& doc, const PlanNode& node, const RelationDecl& result,
    const std::vector<const RelationDecl*>& inputs);
std::vector<Diagnostic> detect_chasm_traps(const PipelineDoc& doc,
                                           const ResolvedPipeline& resolved);

// Human-readable derivation for one node (or a source relation name).
std::string explain(const PipelineDoc& doc, const std::string& node_id);

std::string render_text(const VerificationReport& report, bool color);

}  // namespace grainck
