#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "submachine/diag.hpp"

namespace submachine {

// ---------------------------------------------------------------------------
// Extended Turing machines.
//
// A machine has states Q (with distinguished initial and halt states), a
// finite alphabet Σ of letters, and a total transition function
// δ : Q × Σ⊥ → Q × Σ* × {L,S,R}.  The "extended" part is the write STRING:
// a step may replace the current cell by any number of letters (including
// zero, i.e. deletion), which is what lets compiled programs insert or erase
// tape in place.  dir=S must write exactly one letter.  Blank (⊥) is read
// when the head moves outside the written tape; it is not a letter and can
// never be written.
//
// A configuration is (state, left, current, right): the tape left of the
// head, the current cell (possibly Blank), and the tape to its right.
// ---------------------------------------------------------------------------

using StateId = std::int32_t;
using LetterId = std::int32_t;

// The pseudo-letter read outside the written tape.
inline constexpr LetterId kBlank = -1;

enum class TmDir { L, S, R };

struct TmTransition {
  StateId to = -1;
  std::vector<LetterId> write;  // dir=S: exactly one; dir=L/R: any length
  TmDir dir = TmDir::S;
  bool operator==(const TmTransition&) const = default;
};

class ExtendedTm {
 public:
  StateId intern_state(std::string_view name);
  LetterId intern_letter(std::string_view name);
  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<LetterId> find_letter(std::string_view name) const;
  const std::string& state_name(StateId s) const;
  const std::string& letter_name(LetterId a) const;  // kBlank renders "_"
  std::size_t state_count() const { return state_names_.size(); }
  std::size_t letter_count() const { return letter_names_.size(); }

  StateId initial = -1;
  StateId halt = -1;

  // `read` may be kBlank.  Overwrites any previous entry.
  void set_transition(StateId from, LetterId read, TmTransition t);
  bool has_transition(StateId from, LetterId read) const;
  const TmTransition& transition(StateId from, LetterId read) const;

  // Number of (state, read) pairs with a transition installed.
  std::size_t transition_count() const;

 private:
  std::vector<std::string> state_names_;
  std::unordered_map<std::string, StateId> state_ids_;
  std::vector<std::string> letter_names_;
  std::unordered_map<std::string, LetterId> letter_ids_;
  // delta_[state][read+1]; entry engaged iff the transition is defined.
  std::vector<std::vector<std::optional<TmTransition>>> delta_;
};

struct TmConfig {
  StateId state = -1;
  std::vector<LetterId> left;   // left[0] is the leftmost written cell
  LetterId current = kBlank;
  std::vector<LetterId> right;  // right[0] is adjacent to the head
  bool operator==(const TmConfig&) const = default;
};

// Diagnostics are empty iff: δ is total over (states × Σ⊥); every dir=S
// transition writes exactly one letter; and the halt state self-loops in the
// mandated shape (δ(halt,a) = (halt,[a],S) for every letter, δ(halt,⊥) =
// (halt,[b],S) for some letter b).
std::vector<Diagnostic> validate_etm(const ExtendedTm& m);

// One execution step.  dir=L consumes the last left letter (Blank at the
// edge) and prepends the written string to the right side; dir=S overwrites
// the current cell; dir=R appends the written string to the left side and
// consumes the first right letter (Blank at the edge).
TmConfig tm_step(const ExtendedTm& m, const TmConfig& c);

struct TmRunResult {
  bool halted = false;  // false: out of fuel
  std::uint64_t steps = 0;
  TmConfig final_config;
};

using TmConfigCallback = std::function<void(std::uint64_t, const TmConfig&)>;

// Runs from (initial, ε, ⊥, input) until the halt state is entered or fuel
// is exhausted; the run stops immediately upon entering halt (the mandated
// self-loops are never executed).  The callback, when installed, sees the
// initial configuration (index 0) and every successor.
TmRunResult tm_run(const ExtendedTm& m, const std::vector<LetterId>& input,
                   std::uint64_t fuel, const TmConfigCallback& on_config = {});

// --- text format -------------------------------------------------------------
//
//   states: q0 q1 qH
//   initial: q0
//   halt: qH
//   alphabet: a b
//   q0,a -> q1,b b,R        (write field: letters space-separated, may be empty)
//   q0,_ -> qH,a,S          (`_` reads Blank)
//
// `reject` may be named as a target without being declared: it becomes a
// spin state that never halts (self-loops on every letter, drifts left on
// Blank).  Any (state, read) pair without a transition line is routed to
// that same spin state, keeping δ total while letting machines express
// rejection by never halting.  Missing halt-state entries are filled with
// the mandated self-loops.

ExtendedTm parse_etm(std::string_view text);  // throws ParseError
std::string serialize_etm(const ExtendedTm& m);

// The canonical name of the reject spin state, when one exists.
inline constexpr const char* kRejectStateName = "reject";

// Installs `reject` (creating it if needed) and routes every undefined
// (state, read) pair to it; fills missing halt self-loops.  Exposed for
// machine builders; parse_etm applies it automatically.
void complete_delta(ExtendedTm& m);

}  // namespace submachine
