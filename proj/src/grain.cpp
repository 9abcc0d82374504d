#include "grainck/grain.hpp"

#include <algorithm>
#include <bit>

#include "grainck/error.hpp"

namespace grainck {

std::vector<FunctionalDependency> lower_to_fds(const IsoWitness& iso) {
  std::vector<FunctionalDependency> out;
  out.reserve(iso.pairing.size() * 2);
  for (const auto& [l, r] : iso.pairing) {
    out.push_back({TypeSig{l}, TypeSig{r}, "global"});
    out.push_back({TypeSig{r}, TypeSig{l}, "global"});
  }
  return out;
}

TypeSig fd_closure(const TypeSig& attrs, std::span<const FunctionalDependency> fds) {
  TypeSig closure = attrs;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& fd : fds) {
      if (!subset_of(fd.lhs, closure)) continue;
      if (subset_of(fd.rhs, closure)) continue;
      closure = union_of(closure, fd.rhs);
      changed = true;
    }
  }
  return closure;
}

namespace {

// The fd set used to decide orderings between two declared relations.
std::vector<FunctionalDependency> ordering_fds(
    const RelationDecl& r1, const RelationDecl& r2,
    std::span<const FunctionalDependency> global_fds) {
  std::vector<FunctionalDependency> fds(global_fds.begin(), global_fds.end());
  fds.insert(fds.end(), r1.fds.begin(), r1.fds.end());
  fds.insert(fds.end(), r2.fds.begin(), r2.fds.end());
  // Implicit: a grain determines every field of its own schema.
  fds.push_back({r1.grain, r1.schema, r1.name});
  fds.push_back({r2.grain, r2.schema, r2.name});
  return fds;
}

}  // namespace

LeqResult grain_leq(const RelationDecl& r1, const RelationDecl& r2,
                    std::span<const FunctionalDependency> global_fds) {
  LeqResult result;
  if (subset_of(r2.grain, r1.grain)) {
    result.holds = true;
    result.steps.push_back({"grain-subset",
                            r2.grain.display() + " is a subset of " + r1.grain.display()});
    return result;
  }
  auto fds = ordering_fds(r1, r2, global_fds);
  TypeSig closure = fd_closure(r1.grain, fds);
  result.holds = subset_of(r2.grain, closure);
  if (result.holds) {
    result.steps.push_back({"fd-closure",
                            "closure of " + r1.grain.display() + " = " + closure.display() +
                                " covers " + r2.grain.display()});
  } else {
    result.steps.push_back({"not-determined",
                            "closure of " + r1.grain.display() + " = " + closure.display() +
                                " misses " + difference(r2.grain, closure).display()});
  }
  return result;
}

const char* grain_order_name(GrainOrder order) {
  switch (order) {
    case GrainOrder::Equal: return "equal";
    case GrainOrder::LeqLR: return "left-determines-right";
    case GrainOrder::LeqRL: return "right-determines-left";
    case GrainOrder::Incomparable: return "incomparable";
  }
  return "?";
}

GrainRelation classify(const RelationDecl& r1, const RelationDecl& r2,
                       std::span<const FunctionalDependency> global_fds) {
  GrainRelation rel;
  LeqResult lr = grain_leq(r1, r2, global_fds);
  LeqResult rl = grain_leq(r2, r1, global_fds);
  if (lr.holds && rl.holds) {
    rel.kind = GrainOrder::Equal;
  } else if (lr.holds) {
    rel.kind = GrainOrder::LeqLR;
  } else if (rl.holds) {
    rel.kind = GrainOrder::LeqRL;
  } else {
    rel.kind = GrainOrder::Incomparable;
  }
  rel.derivation = std::move(lr.steps);
  for (auto& step : rl.steps) rel.derivation.push_back(std::move(step));
  return rel;
}

TypeSig grain_glb(const TypeSig& g1, const TypeSig& g2) { return union_of(g1, g2); }

TypeSig grain_lub(const TypeSig& g1, const TypeSig& g2) { return intersect(g1, g2); }

namespace {

// All subset masks of an n-element set ordered by (popcount, field order).
// With the base vector sorted, mask order within one popcount follows the
// lexicographic order of the subsets' field lists.
std::vector<std::uint32_t> ordered_subset_masks(std::size_t n) {
  std::vector<std::uint32_t> masks;
  masks.reserve(1u << n);
  for (std::uint32_t m = 0; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [n](std::uint32_t a, std::uint32_t b) {
    int pa = std::popcount(a);
    int pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    // Compare the subsets' sorted field index sequences.
    for (std::size_t i = 0; i < n; ++i) {
      bool ia = a & (1u << i);
      bool ib = b & (1u << i);
      if (ia != ib) return ia;  // earlier field present first
    }
    return false;
  });
  return masks;
}

TypeSig subset_from_mask(const std::vector<FieldId>& base, std::uint32_t mask) {
  std::vector<FieldId> fields;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (mask & (1u << i)) fields.push_back(base[i]);
  }
  return TypeSig(std::move(fields));
}

}  // namespace

IrreducibilityCheck check_irreducible(const TypeSig& grain,
                                      std::span<const FunctionalDependency> fds) {
  if (grain.size() > kMaxEnumeratedGrainFields) {
    throw AnalysisError(ErrorCode::SpecError,
                        "grain " + grain.display() + " exceeds " +
                            std::to_string(kMaxEnumeratedGrainFields) +
                            " fields; irreducibility check is bounded");
  }
  const auto& base = grain.fields();
  const std::uint32_t full = (1u << base.size()) - 1;
  for (std::uint32_t mask : ordered_subset_masks(base.size())) {
    if (mask == full) continue;
    TypeSig subset = subset_from_mask(base, mask);
    if (subset_of(grain, fd_closure(subset, fds))) {
      return {false, subset};
    }
  }
  return {true, std::nullopt};
}

TypeSig minimize_key(const TypeSig& candidate,
                     std::span<const FunctionalDependency> fds) {
  if (candidate.size() > kMaxEnumeratedGrainFields) {
    // Greedy elimination in field order keeps larger keys deterministic.
    TypeSig key = candidate;
    for (const auto& f : candidate) {
      TypeSig without = difference(key, TypeSig{f});
      if (subset_of(candidate, fd_closure(without, fds))) key = without;
    }
    return key;
  }
  const auto& base = candidate.fields();
  for (std::uint32_t mask : ordered_subset_masks(base.size())) {
    TypeSig subset = subset_from_mask(base, mask);
    if (subset_of(candidate, fd_closure(subset, fds))) return subset;
  }
  return candidate;
}

}  // namespace grainck
