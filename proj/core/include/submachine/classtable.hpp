#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "submachine/diag.hpp"

namespace submachine {

// ---------------------------------------------------------------------------
// Class tables.
//
// A class table is a set of single-variable generic class declarations, each
// contributing one inheritance rule
//
//     C x <: D1 D2 ... Dk x        (variable tail)
//     C x <: D1 D2 ... Dk Z        (ground tail)
//
// read as "class C<x> extends D1<? super D2<? super ... <? super x|Z>>>".
// Every class except the terminator Z has arity 1; Z has arity 0 and may only
// close a tower or a ground-tail rule.  A type is a *tower* C1 C2 ... Cm Z;
// the tower consisting of Z alone is the empty tower.
//
// Rules are keyed by (lhs, first rhs class): a class may extend several
// distinct heads, but never the same head twice (that would be inheriting one
// generic class at two instantiations, which the execution model forbids).
// ---------------------------------------------------------------------------

using ClassId = std::int32_t;

// A tower C1 ... Cm Z stored as the list of arity-1 classes; the trailing Z
// is implicit (an empty vector is the tower "Z").
using TypeTower = std::vector<ClassId>;

enum class RuleTail { Var, Ground };

struct InheritanceRule {
  ClassId lhs = -1;
  std::vector<ClassId> body;  // D1 ... Dk; may be empty only for Ground tails
  RuleTail tail = RuleTail::Var;

  bool operator==(const InheritanceRule&) const = default;
};

// A pending subtype question: subtype ⊑ supertype.
struct SubtypeQuery {
  TypeTower subtype;
  TypeTower supertype;
};

class ClassTable {
 public:
  // Registers (or finds) a class name and returns its id.  Names must match
  // [A-Za-z][A-Za-z0-9_]*; "Z" and "x" are reserved and rejected.
  ClassId intern(std::string_view name);

  std::optional<ClassId> find(std::string_view name) const;
  const std::string& name(ClassId id) const;
  std::size_t class_count() const { return names_.size(); }

  // Adds a rule.  Throws std::invalid_argument for an empty Var-tail body
  // (the trivial rule `C x <: x`) or a duplicate (lhs, head) arc; two
  // ground rules `C x <: Z` for the same C also collide.
  void add_rule(ClassId lhs, std::vector<ClassId> body, RuleTail tail);

  const std::vector<InheritanceRule>& rules() const { return rules_; }
  // Indices into rules() of the rules whose lhs is the given class.
  const std::vector<std::size_t>& rules_for(ClassId lhs) const;

  // Renders one rule in the text format, e.g. "Ql x <: L N Ql L N x".
  std::string render_rule(const InheritanceRule& r) const;

  // Structural equality at the name level (rule lists must match in order,
  // with identical class names).
  bool operator==(const ClassTable& other) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> ids_;
  std::vector<InheritanceRule> rules_;
  std::vector<std::vector<std::size_t>> rules_by_lhs_;
  static const std::vector<std::size_t> kNoRules;
};

// --- text format -----------------------------------------------------------
//
// One rule per line: `LHS x <: C1 C2 ... Ck x` or `... Ck Z`.  `#` starts a
// comment, blank lines are ignored.  Class names match [A-Za-z][A-Za-z0-9_]*;
// `Z` and `x` are reserved.

ClassTable parse_class_table(std::string_view text);          // throws ParseError
std::string serialize_class_table(const ClassTable& ct);

// Parses a tower "C1 C2 ... Cm Z" (or just "Z"), interning unseen class
// names into the table (they simply have no rules).  Throws ParseError.
TypeTower parse_tower(ClassTable& ct, std::string_view text);
std::string render_tower(const ClassTable& ct, const TypeTower& t);

// --- validation --------------------------------------------------------------

struct ValidationReport {
  bool well_formed = true;
  bool deterministic = true;
  bool acyclic = true;
  std::vector<Diagnostic> diagnostics;

  bool ok() const {
    return well_formed && deterministic && acyclic;
  }
};

// Well-formedness: every Var-tail rule body has odd length (so that the
// nested rendering closes on the variable position); Ground-tail rules are
// exempt (they instantiate no variable).
ValidationReport validate_well_formed(const ClassTable& ct);

// Determinism: the inheritance graph (one arc lhs -> body[0] per rule) is
// acyclic, and for every ordered pair of classes there is at most one walk
// between them, so a chain is pinned down by its endpoints.  The acyclic
// flag reports the first condition separately.
ValidationReport validate_deterministic(const ClassTable& ct);

// Both of the above combined into one report.
ValidationReport validate(const ClassTable& ct);

// The inheritance graph's arcs, grouped by source class: arc_targets(ct)[c]
// lists the head class of each rule of c, in rule order.  Empty-bodied
// ground rules contribute no arc.
std::vector<std::vector<ClassId>> inheritance_graph(const ClassTable& ct);

// --- chain search ------------------------------------------------------------

// One way of rewriting a tower headed by `from` until its head becomes
// `target`: a sequence of rule applications.  Applying a rule
// `H x <: B p1..pj x` to a head H with accumulated suffix τ yields head B
// with suffix p1..pj · τ; a ground rule `H x <: B p1..pj Z` discards τ (and
// the eventual tail) entirely.  The reflexive chain (no rules) is included
// when from == target.
struct ChainResult {
  ClassId consumed_head = -1;          // == target
  std::vector<ClassId> suffix;         // classes left under the head, topmost first
  RuleTail tail = RuleTail::Var;       // Var: keep old tail; Ground: cut to Z
  std::vector<std::size_t> rules_applied;  // indices into ct.rules(), in order

  bool operator==(const ChainResult&) const = default;
};

// All chains from `from` to `target`.  Exact on acyclic tables (every walk
// is enumerated); on cyclic input each class is visited at most once per
// path, so the search still terminates.
std::vector<ChainResult> chain_search(const ClassTable& ct, ClassId from,
                                      ClassId target);

// True iff some chain from `from` ends by applying an empty-bodied ground
// rule `H x <: Z`, collapsing the whole tower to the bare Z.
bool derives_bare_z(const ClassTable& ct, ClassId from);

}  // namespace submachine
