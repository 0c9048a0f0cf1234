#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "submachine/diag.hpp"

namespace submachine {

// ---------------------------------------------------------------------------
// Simper: a small imperative language for writing parsers that compile
// mechanically into Turing machines.
//
// Core statements are labels, gotos, assignments, if/else, increment,
// decrement and halt; while and switch are sugar removed by desugar().
// Values are unbounded naturals, quoted symbols, and n-dimensional arrays;
// there are no declarations — the type checker infers one global type per
// variable from its uses.  Two variables are built in and read-only:
// `input`, a 1-dimensional symbol array holding the word under test, and
// `n`, its length.  A program answers by halting (accept) or by running off
// the end of the statement list (reject).
// ---------------------------------------------------------------------------

// --- values and conditions ---------------------------------------------------

enum class ValueKind { Var, Index, NatLit, SymLit, ArrayLit };

struct SimperValueExpr {
  ValueKind kind = ValueKind::NatLit;
  std::string name;                    // Var, Index: variable name
  std::vector<SimperValueExpr> args;   // Index: indices; ArrayLit: dimensions
  std::vector<SimperValueExpr> fill;   // ArrayLit: exactly one fill element
  std::uint64_t nat = 0;               // NatLit
  std::string sym;                     // SymLit
  int line = 0, col = 0;
};

enum class CondKind { And, Or, Eq, Neq };

struct SimperCond {
  CondKind kind = CondKind::Eq;
  std::vector<SimperCond> sub;             // And/Or: exactly two, in order
  std::vector<SimperValueExpr> operands;   // Eq/Neq: exactly two
  int line = 0, col = 0;
};

// --- statements --------------------------------------------------------------

enum class StmtKind { Label, Goto, Assign, If, Inc, Dec, Halt, While, Switch };

struct SimperStatement {
  StmtKind kind = StmtKind::Halt;
  std::string label;                 // Label: name; Goto: target
  SimperValueExpr target;            // Assign/Inc/Dec left value
  SimperValueExpr value;             // Assign right value; Switch scrutinee
  SimperCond cond;                   // If/While condition
  std::vector<SimperStatement> block;       // If then / While body
  std::vector<SimperStatement> else_block;  // If: else branch
  bool has_else = false;
  // Switch arms, in source order; the first arm whose value matches runs.
  std::vector<std::pair<SimperValueExpr, std::vector<SimperStatement>>> arms;
  int line = 0, col = 0;
};

struct SimperProgram {
  std::vector<SimperStatement> statements;
};

// Parses source text: statements separated by whitespace, `//` line
// comments.  Throws ParseError on malformed syntax and on duplicate labels.
SimperProgram parse_simper(std::string_view text);

// Pretty-prints a program in the same syntax parse_simper reads; parsing the
// result reproduces the statement structure.  Throws std::invalid_argument
// on condition trees that the parenthesis-free condition grammar cannot
// express (a disjunction nested under a conjunction).
std::string render_simper(const SimperProgram& p);

// --- types -------------------------------------------------------------------

struct SimperType {
  enum Kind { Nat, Sym, Array } kind = Nat;
  int dims = 0;                   // Array: number of dimensions, >= 1
  std::vector<SimperType> elem;   // Array: exactly one element type

  bool operator==(const SimperType& o) const {
    return kind == o.kind && dims == o.dims && elem == o.elem;
  }
  std::string to_string() const;
};

inline SimperType nat_type() { return {SimperType::Nat, 0, {}}; }
inline SimperType sym_type() { return {SimperType::Sym, 0, {}}; }
inline SimperType array_type(int dims, SimperType elem) {
  return {SimperType::Array, dims, {std::move(elem)}};
}

struct TypeEnvironment {
  std::map<std::string, SimperType> types;  // every variable, on success
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Infers one global type per variable (no scopes, no shadowing) and checks
// every statement against it.  Diagnostics cover type conflicts, index
// arity and index type errors, equality on arrays, writes to the built-ins
// `input`/`n`, gotos to undefined labels, and variables that are read but
// never assigned.
TypeEnvironment typecheck(const SimperProgram& p);

// Rewrites sugar into core statements: `while c { b }` becomes
// `L: if c { b goto L }` with a fresh label, and `switch v { v1 {b1} ... }`
// becomes an if/else chain testing the arms in order.  Core statements
// pass through unchanged.
SimperProgram desugar(const SimperProgram& p);

// --- interpretation ----------------------------------------------------------

enum class ExecStatus { Halted, StuckEnd, OutOfFuel, RuntimeError };

struct ExecOutcome {
  ExecStatus status = ExecStatus::StuckEnd;
  std::uint64_t steps = 0;   // cost spent, always <= fuel
  std::string error;         // RuntimeError: positioned description
};

// A runtime value.  Arrays store their scalar entries flat in row-major
// order; `dims` gives the extent of each dimension.
struct SimperValue {
  enum Kind { NatV, SymV, ArrayV } kind = NatV;
  std::uint64_t nat = 0;
  std::string sym;
  std::vector<std::uint64_t> dims;
  std::vector<SimperValue> elems;  // row-major, dims product many entries
  bool operator==(const SimperValue&) const = default;
};

// Runs a desugared program on the given word: `input` holds the symbols,
// `n` their count.  Cost accounting: every executed core statement costs 1
// step, except that evaluating an array literal costs the number of scalar
// cells it allocates; labels cost nothing.  Execution stops early with
// OutOfFuel once the budget cannot cover the next statement.  Runtime
// errors (out-of-bounds index, reading a variable before assignment) end
// the run with ExecStatus::RuntimeError.  Throws std::invalid_argument if
// the program still contains sugar.  When `final_env` is given it receives
// every variable's value at the moment the run ended (whatever the status).
ExecOutcome interpret(const SimperProgram& p,
                      const std::vector<std::string>& input,
                      std::uint64_t fuel,
                      std::map<std::string, SimperValue>* final_env = nullptr);

}  // namespace submachine
