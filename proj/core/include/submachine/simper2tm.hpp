#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "submachine/simper.hpp"
#include "submachine/turing.hpp"

namespace submachine {

// ---------------------------------------------------------------------------
// Compiling Simper programs to extended Turing machines.
//
// The compiled machine receives the word under test as raw letters (one
// letter per symbol, nothing else on the tape) and halts exactly when the
// source program halts on that word.  A prologue first rewrites the raw
// word into the zoned tape the body works with:
//
//   zl_input ⟨⁰w₀⟩⁰ … ⟨⁰w_{n-1}⟩⁰ zr_input  zl_n <n in binary> zr_n
//   zl_v ⟩… one initially empty zone per remaining variable … zr_v
//
// Each variable lives between its private zl_x/zr_x marker pair; array
// values nest dimension markers ⟨ᵏ/⟩ᵏ (letters dl_k/dr_k); naturals are
// bit strings with the least significant bit leftmost, zero being the
// single bit "0".  Between statements the head parks on zl_input; every
// statement transformer starts and ends there.  Reaching the end of the
// statement list wires into the reject spin state, so invalid inputs and
// rejected words simply never halt.
//
// Letters outside the program's own alphabet cannot appear in any accepted
// word (the machine's transitions are only defined over its own letters),
// so foreign input letters drive the run into reject.
// ---------------------------------------------------------------------------

// The letters of one compiled machine, grouped by role.
struct TapeAlphabet {
  LetterId b0 = -1;
  LetterId b1 = -1;
  std::map<std::string, LetterId> syms;  // sym literal text -> letter
  std::vector<LetterId> dl, dr;          // dimension markers, index = level
  LetterId mark_dn = -1;                 // assignment target mark
  LetterId mark_up = -1;                 // copy/compare source mark
  LetterId mark_pos = -1;                // array walk position mark
};

// Where each variable's zone sits on the tape: input, then n, then the
// other variables in order of first assignment (never-assigned variables,
// which only occur in erroneous programs, trail in order of first read).
struct TapeLayout {
  std::vector<std::string> variables;
  std::map<std::string, LetterId> zl, zr;  // variable -> its zone markers
  std::map<std::string, SimperType> types;
};

struct Compilation {
  ExtendedTm machine;
  TapeAlphabet alphabet;
  TapeLayout layout;
  SimperProgram preprocessed;  // the program the machine actually encodes
  // States below this id belong to the input-zonification prologue; the
  // tape-structure validator does not apply to them.
  StateId prologue_state_limit = 0;
};

// --- value representation ----------------------------------------------------

// The tape spelling of a value: naturals as bits (LSB leftmost, zero is
// "0"), symbols as their single letter, arrays as each element wrapped in
// dl_k/dr_k with the level dropping from dims-1 outside to 0 around the
// scalars.  Letters are interned into `m` on demand.
std::vector<LetterId> rep(const SimperValue& v, ExtendedTm& m);

// Inverse of rep for a value of the given type; throws std::invalid_argument
// on encodings rep could not have produced.
SimperValue decode_rep(const std::vector<LetterId>& letters,
                       const SimperType& type, const ExtendedTm& m);

// Pretty form of a rep string: bits as 0/1, dimension markers as ⟨/⟩ with
// superscript level digits, symbols as their text.
std::string render_rep(const ExtendedTm& m,
                       const std::vector<LetterId>& letters);

// --- compilation --------------------------------------------------------------

// Rewrites a desugared program so that every array index, every array
// literal dimension, and every comparison operand is a plain variable,
// inserting `$k := v` assignments for compiler-owned auxiliaries just
// before the statement that needs them.  Compound if-conditions become
// chains of single-atom ifs feeding a flag auxiliary, so operand hoisting
// keeps the interpreter's short-circuit behaviour (an operand whose
// evaluation the source program skips is still skipped).  The result is a
// valid program with the same accept/reject/fault behaviour as the input.
// Throws std::invalid_argument if the program still contains sugar.
SimperProgram preprocess_array_accesses(const SimperProgram& p);

// Compiles a desugared, typechecked, array-preprocessed program.  Throws
// std::invalid_argument when the program does not typecheck or contains a
// construct preprocessing should have removed.  The returned machine has a
// total transition function (undefined pairs route to the reject spin
// state) and never writes more than two letters per step.
Compilation compile(const SimperProgram& p);

// Convenience: desugar + preprocess + compile a freshly parsed program.
Compilation compile_from_source(const SimperProgram& parsed);

// --- test support -------------------------------------------------------------

// Checks that a configuration's tape still has the shape the compiler
// maintains: every zone marker present exactly once and in layout order,
// at most one of each scratch mark, and — when no scratch mark is on the
// tape — well-nested dimension markers inside every zone.  Prologue and
// reject states are exempt (the tape is still being built, or abandoned).
bool tape_is_zoned(const Compilation& c, const TmConfig& cfg);

// The letters strictly between zl_var and zr_var, for decoding a
// variable's final value out of a halted configuration.
std::vector<LetterId> extract_zone(const Compilation& c, const TmConfig& cfg,
                                   const std::string& var);

}  // namespace submachine
