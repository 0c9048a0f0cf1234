#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "submachine/classtable.hpp"
#include "submachine/subtyper.hpp"
#include "submachine/turing.hpp"

namespace submachine {

// Compiles an extended Turing machine into a class table whose subtyping
// machine simulates it, builds the matching initial query, and recognizes
// the simulated machine configuration inside subtyping configurations.

// Every machine state contributes six classes, one per role: the two waiting
// roles carry the state across the tape, the two head roles apply a
// transition, and the two turn roles exist only briefly while the sweep
// direction reverses at a tape end.
enum class Role : int { wL = 0, wR = 1, L = 2, R = 3, LR = 4, RL = 5 };

inline constexpr std::array<Role, 6> kAllRoles = {
    Role::wL, Role::wR, Role::L, Role::R, Role::LR, Role::RL};

std::string role_name(Role r);

// Escapes a state or letter token into an identifier-safe fragment.
// Alphanumerics pass through; every other byte (underscore included) becomes
// `_xx` with two lowercase hex digits, so the mapping is injective.
std::string mangle_token(std::string_view token);

// What a generated class stands for. `None` marks classes the generator did
// not create (possible when classifying configurations of foreign tables).
struct ClassKind {
  enum Tag { None, N, E, ML, MR, Hash, Letter, State } tag = None;
  LetterId letter = -1;  // valid for Letter
  StateId state = -1;    // valid for State
  Role role = Role::wL;  // valid for State
};

class ReductionNaming {
 public:
  ClassId n = -1;
  ClassId e = -1;
  ClassId ml = -1;
  ClassId mr = -1;
  ClassId hash = -1;

  ClassId state_class(StateId s, Role r) const {
    return state_cls_[static_cast<std::size_t>(s)]
                     [static_cast<std::size_t>(r)];
  }
  ClassId letter_class(LetterId a) const {
    return letter_cls_[static_cast<std::size_t>(a)];
  }
  const ClassKind& kind(ClassId c) const;

 private:
  friend struct ReductionBuilder;
  std::vector<std::array<ClassId, 6>> state_cls_;
  std::vector<ClassId> letter_cls_;
  std::vector<ClassKind> kinds_;  // indexed by ClassId
};

struct Reduction {
  ClassTable table;
  ReductionNaming naming;
};

// Emits the full simulation table for the machine: for each state and sweep
// orientation the waiting rules (enter the head role at the matching marker,
// pass the opposite marker, pass letters, turn at the tape end, halt), the
// turn-completion rules on E, and one head rule per transition-function
// entry. Requires validate_etm(m) to be clean.
Reduction etm_to_classtable(const ExtendedTm& m);

// The query whose resolution simulates running the machine on `input`:
//   Q_I^{wR} L_# N L_{a_m} N ... L_{a_1} N M^L N L_# N E E Z  <:  E E Z
SubtypeQuery initial_query(const ExtendedTm& m, const ReductionNaming& naming,
                           const std::vector<LetterId>& input);

enum class ViewKind { Transient, Simulated, Unrecognized };

// The simulated machine configuration recovered from a subtyping
// configuration. `head_gap` counts tape letters physically left of the
// subtyping machine's own head; `head_left_of_gap` tells which side the
// simulated head is on; `waiting` distinguishes the marker-tracked waiting
// roles from the head roles.
struct SimulatedView {
  ViewKind kind = ViewKind::Unrecognized;
  TmConfig tm{};
  int head_gap = 0;
  bool head_left_of_gap = false;
  bool waiting = false;
  std::string note;  // diagnostic detail for Unrecognized
};

// Pattern-matches a subtyping configuration against the simulated-tape
// layout. Configurations holding a turn-role class, mid-step configurations
// (both heads N), and the final unwinding after the halting rule classify as
// Transient; a stable configuration led by a state class yields the decoded
// machine configuration; everything else is Unrecognized.
SimulatedView classify_config(const ReductionNaming& naming,
                              const MachineConfig& cfg);

}  // namespace submachine
