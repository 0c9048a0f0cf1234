#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "submachine/classtable.hpp"

namespace submachine {

// ---------------------------------------------------------------------------
// The subtyping machine.
//
// A configuration is a pending proof obligation `lhs ⊑ rhs`.  A step looks
// up every chain rewriting the lhs head into the rhs head (reflexive chains
// included), consumes that head, and swaps the two sides: the classes the
// chain left under the consumed head become obligations on the other side
// (contravariance).  A run halts — the query is proved — when the supertype
// side is the bare Z and the subtype side collapses to Z as well; it gets
// stuck — the query is refuted — when no chain applies.  On tables that pass
// determinism validation at most one distinct successor ever exists;
// Ambiguous is reported otherwise instead of searching.
// ---------------------------------------------------------------------------

struct MachineConfig {
  TypeTower lhs;
  TypeTower rhs;
  bool operator==(const MachineConfig&) const = default;
};

enum class StepKind { Halted, Stuck, Continue, Ambiguous };

struct StepResult {
  StepKind kind = StepKind::Stuck;
  MachineConfig next;                     // Continue
  ChainResult chain;                      // Continue: the chain consumed
  std::vector<MachineConfig> branches;    // Ambiguous: distinct successors
  std::vector<ChainResult> branch_chains; // Ambiguous: all chains found
  std::string reason;                     // Stuck / Ambiguous detail
};

StepResult step(const ClassTable& ct, const MachineConfig& cfg);

enum class RunOutcome { HaltedAccept, Stuck, OutOfFuel, AmbiguousError };

struct RunResult {
  RunOutcome outcome = RunOutcome::Stuck;
  std::uint64_t steps_taken = 0;
  MachineConfig final_config;
  std::vector<MachineConfig> trace;  // when requested: steps_taken+1 entries
  std::string diagnostic;
};

// Invoked with (steps_so_far, config); once for the initial config (index 0)
// and then after every step.  Materializing configs costs O(config length)
// per call, so hot runs should leave this empty.
using ConfigCallback = std::function<void(std::uint64_t, const MachineConfig&)>;

// Iterates steps from (q.subtype, q.supertype) until halt, stuck, ambiguity
// or fuel exhaustion.  Detecting a terminal configuration consumes no fuel:
// `Z ⊑ Z` halts even with fuel 0.
RunResult run(const ClassTable& ct, const SubtypeQuery& q, std::uint64_t fuel,
              bool want_trace = false, const ConfigCallback& on_config = {});

enum class SubtypeVerdict { Subtype, NotSubtype, Unknown };

// Raised when a step has several distinct successors, i.e. the table fails
// determinism validation.
class AmbiguousTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Subtype iff the run halts, NotSubtype iff it gets stuck, Unknown iff fuel
// runs out first.
SubtypeVerdict decide_subtype(const ClassTable& ct, const TypeTower& subtype,
                              const TypeTower& supertype, std::uint64_t fuel);

// Trace line: `C1 C2 ... Z  <:  D1 ... Z`.
std::string render_config_plain(const ClassTable& ct, const MachineConfig& c);

// Head-oriented rendering of the same pair: at even step indices the pending
// side reads `Z <lhs reversed> <| <rhs>`, at odd ones `Z <rhs reversed> |> <lhs>`,
// which reproduces the conventional display where a single head shuttles
// over one tape-like sequence of classes.
std::string render_config_arrow(const ClassTable& ct, const MachineConfig& c,
                                std::uint64_t step_index);

}  // namespace submachine
