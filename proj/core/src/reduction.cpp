#include "submachine/reduction.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace submachine {

std::string role_name(Role r) {
  switch (r) {
    case Role::wL: return "wL";
    case Role::wR: return "wR";
    case Role::L: return "L";
    case Role::R: return "R";
    case Role::LR: return "LR";
    case Role::RL: return "RL";
  }
  return "?";
}

std::string mangle_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (unsigned char c : token) {
    if (std::isalnum(c)) {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "_%02x", c);
      out += buf;
    }
  }
  return out;
}

const ClassKind& ReductionNaming::kind(ClassId c) const {
  static const ClassKind none{};
  if (c < 0 || static_cast<std::size_t>(c) >= kinds_.size()) return none;
  return kinds_[static_cast<std::size_t>(c)];
}

namespace {

// Marries a sweep direction with the classes it involves: the marker whose
// discovery starts a transition, the marker that is merely carried over, and
// the roles a state plays while sweeping this way.
struct Orientation {
  Role wait, head, turn, opp_wait;
  TmDir toward;  // the machine direction this sweep aligns with
};

constexpr Orientation kLeftward{Role::wL, Role::L, Role::LR, Role::wR,
                                TmDir::L};
constexpr Orientation kRightward{Role::wR, Role::R, Role::RL, Role::wL,
                                 TmDir::R};

}  // namespace

// Grants etm_to_classtable access to ReductionNaming's storage.
struct ReductionBuilder {
  ReductionNaming nm;

  void set_kind(ClassId c, ClassKind k) {
    if (static_cast<std::size_t>(c) >= nm.kinds_.size())
      nm.kinds_.resize(static_cast<std::size_t>(c) + 1);
    nm.kinds_[static_cast<std::size_t>(c)] = k;
  }

  std::vector<std::array<ClassId, 6>>& state_cls() { return nm.state_cls_; }
  std::vector<ClassId>& letter_cls() { return nm.letter_cls_; }
};

Reduction etm_to_classtable(const ExtendedTm& m) {
  {
    auto diags = validate_etm(m);
    if (!diags.empty())
      throw std::invalid_argument("machine is not valid: " +
                                  diags.front().subject + ": " +
                                  diags.front().message);
  }

  Reduction out;
  ClassTable& ct = out.table;
  ReductionBuilder b;

  b.nm.n = ct.intern("N");
  b.set_kind(b.nm.n, {ClassKind::N, -1, -1, Role::wL});
  b.nm.e = ct.intern("E");
  b.set_kind(b.nm.e, {ClassKind::E, -1, -1, Role::wL});
  b.nm.ml = ct.intern("ML");
  b.set_kind(b.nm.ml, {ClassKind::ML, -1, -1, Role::wL});
  b.nm.mr = ct.intern("MR");
  b.set_kind(b.nm.mr, {ClassKind::MR, -1, -1, Role::wL});

  const std::size_t letters = m.letter_count();
  b.letter_cls().resize(letters);
  for (std::size_t a = 0; a < letters; ++a) {
    ClassId c = ct.intern("L_" + mangle_token(m.letter_name(
                                     static_cast<LetterId>(a))));
    b.letter_cls()[a] = c;
    b.set_kind(c, {ClassKind::Letter, static_cast<LetterId>(a), -1, Role::wL});
  }

  // The endpoint-sentinel class must not collide with any alphabet letter's
  // class (a letter could legitimately be named "hash").
  {
    std::string hash_name = "L_hash";
    while (ct.find(hash_name).has_value()) hash_name += "_";
    b.nm.hash = ct.intern(hash_name);
    b.set_kind(b.nm.hash, {ClassKind::Hash, -1, -1, Role::wL});
  }

  const std::size_t states = m.state_count();
  b.state_cls().resize(states);
  for (std::size_t s = 0; s < states; ++s) {
    std::string base = mangle_token(m.state_name(static_cast<StateId>(s)));
    for (Role r : kAllRoles) {
      ClassId c = ct.intern("Q" + role_name(r) + "_" + base);
      b.state_cls()[s][static_cast<std::size_t>(r)] = c;
      b.set_kind(c, {ClassKind::State, -1, static_cast<StateId>(s), r});
    }
  }

  const ReductionNaming& nm = b.nm;
  auto Q = [&](StateId s, Role r) { return nm.state_class(s, r); };
  auto La = [&](LetterId a) { return nm.letter_class(a); };

  for (const Orientation& o : {kLeftward, kRightward}) {
    const ClassId toward_marker = (o.toward == TmDir::L) ? nm.ml : nm.mr;
    const ClassId away_marker = (o.toward == TmDir::L) ? nm.mr : nm.ml;

    // Waiting-role rules: enter the head role at this sweep's marker, carry
    // the other marker and every letter across, and turn (or halt) at E.
    for (std::size_t si = 0; si < states; ++si) {
      StateId s = static_cast<StateId>(si);
      ClassId w = Q(s, o.wait);
      ct.add_rule(w, {toward_marker, nm.n, Q(s, o.head)}, RuleTail::Var);
      ct.add_rule(w, {away_marker, nm.n, w, away_marker, nm.n},
                  RuleTail::Var);
      for (std::size_t a = 0; a < letters; ++a) {
        ClassId l = La(static_cast<LetterId>(a));
        ct.add_rule(w, {l, nm.n, w, l, nm.n}, RuleTail::Var);
      }
      ct.add_rule(w, {nm.hash, nm.n, w, nm.hash, nm.n}, RuleTail::Var);
      if (s != m.halt) {
        ct.add_rule(w, {nm.e, Q(s, o.turn), nm.n}, RuleTail::Var);
      } else {
        ct.add_rule(w, {nm.e, nm.e}, RuleTail::Ground);
      }
      ct.add_rule(nm.e, {Q(s, o.turn), nm.n, Q(s, o.opp_wait), nm.e, nm.e},
                  RuleTail::Var);
    }

    // Head-role rules, one per transition-function entry. The written string
    // is laid out away from the sweep, so it reads ascending on the right of
    // the head gap and descending on the left; the marker placement encodes
    // where the simulated head lands.
    auto oriented = [&](const std::vector<LetterId>& beta,
                        std::vector<ClassId>& body) {
      if (o.toward == TmDir::L) {
        for (LetterId w : beta) body.insert(body.end(), {La(w), nm.n});
      } else {
        for (auto it = beta.rbegin(); it != beta.rend(); ++it)
          body.insert(body.end(), {La(*it), nm.n});
      }
    };
    for (std::size_t si = 0; si < states; ++si) {
      StateId s = static_cast<StateId>(si);
      for (std::size_t ri = 0; ri <= letters; ++ri) {
        LetterId r = (ri < letters) ? static_cast<LetterId>(ri) : kBlank;
        const TmTransition& t = m.transition(s, r);
        std::vector<ClassId> body;
        body.insert(body.end(),
                    {r == kBlank ? nm.hash : La(r), nm.n, Q(t.to, o.wait)});
        if (r == kBlank) body.insert(body.end(), {nm.hash, nm.n});
        if (t.dir == o.toward) {
          body.insert(body.end(), {toward_marker, nm.n});
          oriented(t.write, body);
        } else if (t.dir == TmDir::S) {
          assert(t.write.size() == 1);
          body.insert(body.end(),
                      {away_marker, nm.n, La(t.write[0]), nm.n});
        } else {
          oriented(t.write, body);
          body.insert(body.end(), {away_marker, nm.n});
        }
        assert(body.size() % 2 == 1);
        ct.add_rule(Q(s, o.head), std::move(body), RuleTail::Var);
      }
    }
  }

  out.naming = std::move(b.nm);
  return out;
}

SubtypeQuery initial_query(const ExtendedTm& m, const ReductionNaming& nm,
                           const std::vector<LetterId>& input) {
  SubtypeQuery q;
  // The sentinel nearest the state class is the *right* end of the tape:
  // this side of the tower stores the tape right-to-left.
  q.subtype.push_back(nm.state_class(m.initial, Role::wR));
  q.subtype.insert(q.subtype.end(), {nm.hash, nm.n});
  for (auto it = input.rbegin(); it != input.rend(); ++it)
    q.subtype.insert(q.subtype.end(), {nm.letter_class(*it), nm.n});
  q.subtype.insert(q.subtype.end(), {nm.ml, nm.n, nm.hash, nm.n, nm.e, nm.e});
  q.supertype = {nm.e, nm.e};
  return q;
}

namespace {

SimulatedView unrecognized(std::string note) {
  SimulatedView v;
  v.kind = ViewKind::Unrecognized;
  v.note = std::move(note);
  return v;
}

// Parses the tower elements after the leading state class: alternating
// (symbol, N) pairs closed by E E.  Symbols are letters, sentinels or
// markers; anything else fails.
bool parse_side(const ReductionNaming& nm, const TypeTower& tower,
                std::size_t start, std::vector<ClassKind>& symbols) {
  std::size_t i = start;
  while (i + 1 < tower.size()) {
    const ClassKind& k = nm.kind(tower[i]);
    if (k.tag == ClassKind::E) break;
    bool symbol = k.tag == ClassKind::Letter || k.tag == ClassKind::Hash ||
                  k.tag == ClassKind::ML || k.tag == ClassKind::MR;
    if (!symbol) return false;
    if (nm.kind(tower[i + 1]).tag != ClassKind::N) return false;
    symbols.push_back(k);
    i += 2;
  }
  return i + 2 == tower.size() && nm.kind(tower[i]).tag == ClassKind::E &&
         nm.kind(tower[i + 1]).tag == ClassKind::E;
}

}  // namespace

SimulatedView classify_config(const ReductionNaming& nm,
                              const MachineConfig& cfg) {
  // Turn-role classes appear only while the sweep reverses at a tape end.
  for (const TypeTower* t : {&cfg.lhs, &cfg.rhs})
    for (ClassId c : *t) {
      const ClassKind& k = nm.kind(c);
      if (k.tag == ClassKind::State &&
          (k.role == Role::LR || k.role == Role::RL)) {
        SimulatedView v;
        v.kind = ViewKind::Transient;
        return v;
      }
    }

  // Mid-step configurations: every rule application leaves both heads at N
  // until the following no-op chain swaps the towers back.
  if (!cfg.lhs.empty() && !cfg.rhs.empty() &&
      nm.kind(cfg.lhs[0]).tag == ClassKind::N &&
      nm.kind(cfg.rhs[0]).tag == ClassKind::N) {
    SimulatedView v;
    v.kind = ViewKind::Transient;
    return v;
  }

  // The unwinding after the halting rule: (E Z, E Z) then (Z, Z).
  bool lhs_e = cfg.lhs.size() == 1 && nm.kind(cfg.lhs[0]).tag == ClassKind::E;
  bool rhs_e = cfg.rhs.size() == 1 && nm.kind(cfg.rhs[0]).tag == ClassKind::E;
  if ((lhs_e && rhs_e) || (cfg.lhs.empty() && cfg.rhs.empty())) {
    SimulatedView v;
    v.kind = ViewKind::Transient;
    return v;
  }

  if (cfg.lhs.empty()) return unrecognized("left tower is bare Z");
  const ClassKind& qk = nm.kind(cfg.lhs[0]);
  if (qk.tag != ClassKind::State)
    return unrecognized("left tower head is not a state class");

  std::vector<ClassKind> lhs_syms, rhs_syms;
  if (!parse_side(nm, cfg.lhs, 1, lhs_syms))
    return unrecognized("left tower does not match the tape layout");
  if (!parse_side(nm, cfg.rhs, 0, rhs_syms))
    return unrecognized("right tower does not match the tape layout");

  // Assemble the physical tape, left to right. Rightward roles keep the
  // already-visited prefix on the left tower (stored right-to-left);
  // leftward roles mirror this.
  const bool rightward = qk.role == Role::wR || qk.role == Role::R;
  std::vector<ClassKind> phys;
  const std::vector<ClassKind>& left_src = rightward ? lhs_syms : rhs_syms;
  const std::vector<ClassKind>& right_src = rightward ? rhs_syms : lhs_syms;
  phys.insert(phys.end(), left_src.rbegin(), left_src.rend());
  const std::size_t gap = phys.size();  // symbols left of the machine's head
  phys.insert(phys.end(), right_src.begin(), right_src.end());

  // Separate tape letters from head markers.
  std::vector<ClassKind> tape;
  std::ptrdiff_t marker_at = -1;  // letters strictly left of the marker
  bool marker_is_ml = false;
  int markers = 0;
  std::size_t letters_left_of_gap = 0;
  for (std::size_t i = 0; i < phys.size(); ++i) {
    const ClassKind& k = phys[i];
    if (k.tag == ClassKind::ML || k.tag == ClassKind::MR) {
      ++markers;
      marker_at = static_cast<std::ptrdiff_t>(tape.size());
      marker_is_ml = k.tag == ClassKind::ML;
    } else {
      if (i < gap) ++letters_left_of_gap;
      tape.push_back(k);
    }
  }

  const bool waiting = qk.role == Role::wL || qk.role == Role::wR;
  if (markers != (waiting ? 1 : 0))
    return unrecognized(waiting ? "waiting state without exactly one marker"
                                : "head state with a marker on the tape");

  const std::size_t K = tape.size();
  if (K < 2 || tape.front().tag != ClassKind::Hash ||
      tape.back().tag != ClassKind::Hash)
    return unrecognized("tape is not delimited by endpoint sentinels");
  for (std::size_t i = 1; i + 1 < K; ++i)
    if (tape[i].tag != ClassKind::Letter)
      return unrecognized("sentinel inside the tape");

  // Locate the simulated head.
  std::ptrdiff_t j;
  if (waiting) {
    if (marker_at < 1 || marker_at > static_cast<std::ptrdiff_t>(K) - 1)
      return unrecognized("marker outside the tape");
    j = marker_is_ml ? marker_at - 1 : marker_at;
  } else if (qk.role == Role::R) {
    if (letters_left_of_gap == K)
      return unrecognized("rightward head state with nothing ahead");
    j = static_cast<std::ptrdiff_t>(letters_left_of_gap);
  } else {
    if (letters_left_of_gap == 0)
      return unrecognized("leftward head state with nothing ahead");
    j = static_cast<std::ptrdiff_t>(letters_left_of_gap) - 1;
  }

  SimulatedView v;
  v.kind = ViewKind::Simulated;
  v.waiting = waiting;
  v.head_gap = static_cast<int>(letters_left_of_gap);
  v.head_left_of_gap = j < static_cast<std::ptrdiff_t>(letters_left_of_gap);
  v.tm.state = qk.state;
  v.tm.current = (j == 0 || j == static_cast<std::ptrdiff_t>(K) - 1)
                     ? kBlank
                     : tape[static_cast<std::size_t>(j)].letter;
  for (std::ptrdiff_t i = 1; i < j; ++i)
    v.tm.left.push_back(tape[static_cast<std::size_t>(i)].letter);
  for (std::ptrdiff_t i = j + 1; i < static_cast<std::ptrdiff_t>(K) - 1; ++i)
    v.tm.right.push_back(tape[static_cast<std::size_t>(i)].letter);
  return v;
}

}  // namespace submachine
