#include "submachine/turing.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace submachine {

namespace {

// State and letter names may be any alnum/underscore token except the bare
// `_`, which the text format reserves for Blank. Digits-only tokens are fine:
// downstream class names always attach a prefix (L_..., Q..._...), so the
// class-table identifier rule is preserved regardless.
bool valid_token(std::string_view s) {
  if (s.empty() || s == "_") return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

StateId ExtendedTm::intern_state(std::string_view name) {
  if (!valid_token(name))
    throw std::invalid_argument("invalid state name: " + std::string(name));
  auto key = std::string(name);
  auto it = state_ids_.find(key);
  if (it != state_ids_.end()) return it->second;
  StateId id = static_cast<StateId>(state_names_.size());
  state_names_.push_back(key);
  state_ids_.emplace(std::move(key), id);
  delta_.emplace_back(letter_names_.size() + 1);
  return id;
}

LetterId ExtendedTm::intern_letter(std::string_view name) {
  if (!valid_token(name))
    throw std::invalid_argument("invalid letter name: " + std::string(name));
  auto key = std::string(name);
  auto it = letter_ids_.find(key);
  if (it != letter_ids_.end()) return it->second;
  LetterId id = static_cast<LetterId>(letter_names_.size());
  letter_names_.push_back(key);
  letter_ids_.emplace(std::move(key), id);
  for (auto& row : delta_) row.resize(letter_names_.size() + 1);
  return id;
}

std::optional<StateId> ExtendedTm::find_state(std::string_view name) const {
  auto it = state_ids_.find(std::string(name));
  if (it == state_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<LetterId> ExtendedTm::find_letter(std::string_view name) const {
  auto it = letter_ids_.find(std::string(name));
  if (it == letter_ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& ExtendedTm::state_name(StateId s) const {
  return state_names_.at(static_cast<std::size_t>(s));
}

const std::string& ExtendedTm::letter_name(LetterId a) const {
  static const std::string blank = "_";
  if (a == kBlank) return blank;
  return letter_names_.at(static_cast<std::size_t>(a));
}

void ExtendedTm::set_transition(StateId from, LetterId read, TmTransition t) {
  delta_.at(static_cast<std::size_t>(from))
      .at(static_cast<std::size_t>(read + 1)) = std::move(t);
}

bool ExtendedTm::has_transition(StateId from, LetterId read) const {
  return delta_.at(static_cast<std::size_t>(from))
      .at(static_cast<std::size_t>(read + 1))
      .has_value();
}

const TmTransition& ExtendedTm::transition(StateId from, LetterId read) const {
  const auto& slot = delta_.at(static_cast<std::size_t>(from))
                         .at(static_cast<std::size_t>(read + 1));
  if (!slot)
    throw std::logic_error("transition undefined for (" + state_name(from) +
                           ", " + letter_name(read) + ")");
  return *slot;
}

std::size_t ExtendedTm::transition_count() const {
  std::size_t n = 0;
  for (const auto& row : delta_)
    for (const auto& slot : row)
      if (slot) ++n;
  return n;
}

std::vector<Diagnostic> validate_etm(const ExtendedTm& m) {
  std::vector<Diagnostic> out;
  if (m.initial < 0) out.push_back({"initial", "initial state not set"});
  if (m.halt < 0) out.push_back({"halt", "halt state not set"});
  const auto letters = static_cast<LetterId>(m.letter_count());
  for (StateId s = 0; s < static_cast<StateId>(m.state_count()); ++s) {
    for (LetterId a = kBlank; a < letters; ++a) {
      std::string subject =
          "(" + m.state_name(s) + ", " + m.letter_name(a) + ")";
      if (!m.has_transition(s, a)) {
        out.push_back({subject, "transition undefined (delta must be total)"});
        continue;
      }
      const TmTransition& t = m.transition(s, a);
      if (t.dir == TmDir::S && t.write.size() != 1)
        out.push_back({subject, "dir=S transition must write exactly one "
                                "letter, writes " +
                                    std::to_string(t.write.size())});
      if (s == m.halt) {
        bool ok = t.to == m.halt && t.dir == TmDir::S && t.write.size() == 1 &&
                  (a == kBlank || t.write[0] == a);
        if (!ok)
          out.push_back(
              {subject,
               "halt state must self-loop in place, rewriting what it reads"});
      }
    }
  }
  return out;
}

TmConfig tm_step(const ExtendedTm& m, const TmConfig& c) {
  const TmTransition& t = m.transition(c.state, c.current);
  TmConfig n;
  n.state = t.to;
  switch (t.dir) {
    case TmDir::S:
      if (t.write.size() != 1)
        throw std::runtime_error("dir=S transition with write length != 1");
      n.left = c.left;
      n.current = t.write[0];
      n.right = c.right;
      break;
    case TmDir::L:
      n.left = c.left;
      if (n.left.empty()) {
        n.current = kBlank;
      } else {
        n.current = n.left.back();
        n.left.pop_back();
      }
      n.right.reserve(t.write.size() + c.right.size());
      n.right = t.write;
      n.right.insert(n.right.end(), c.right.begin(), c.right.end());
      break;
    case TmDir::R:
      n.left = c.left;
      n.left.insert(n.left.end(), t.write.begin(), t.write.end());
      if (c.right.empty()) {
        n.current = kBlank;
      } else {
        n.current = c.right.front();
        n.right.assign(c.right.begin() + 1, c.right.end());
      }
      break;
  }
  return n;
}

TmRunResult tm_run(const ExtendedTm& m, const std::vector<LetterId>& input,
                   std::uint64_t fuel, const TmConfigCallback& on_config) {
  // Hot representation: the right side is stored reversed so both sides
  // push/pop at vector ends.
  StateId state = m.initial;
  std::vector<LetterId> left;
  LetterId current = kBlank;
  std::vector<LetterId> right_rev(input.rbegin(), input.rend());

  auto materialize = [&]() {
    TmConfig c;
    c.state = state;
    c.left = left;
    c.current = current;
    c.right.assign(right_rev.rbegin(), right_rev.rend());
    return c;
  };

  TmRunResult r;
  if (on_config) on_config(0, materialize());
  while (state != m.halt) {
    if (r.steps >= fuel) {
      r.halted = false;
      r.final_config = materialize();
      return r;
    }
    const TmTransition& t = m.transition(state, current);
    state = t.to;
    switch (t.dir) {
      case TmDir::S:
        current = t.write[0];
        break;
      case TmDir::L:
        for (auto it = t.write.rbegin(); it != t.write.rend(); ++it)
          right_rev.push_back(*it);
        if (left.empty()) {
          current = kBlank;
        } else {
          current = left.back();
          left.pop_back();
        }
        break;
      case TmDir::R:
        left.insert(left.end(), t.write.begin(), t.write.end());
        if (right_rev.empty()) {
          current = kBlank;
        } else {
          current = right_rev.back();
          right_rev.pop_back();
        }
        break;
    }
    ++r.steps;
    if (on_config) on_config(r.steps, materialize());
  }
  r.halted = true;
  r.final_config = materialize();
  return r;
}

// --- text format -------------------------------------------------------------

ExtendedTm parse_etm(std::string_view text) {
  ExtendedTm m;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool saw_states = false, saw_alphabet = false;

  auto parse_letter = [&](const std::string& tok, int ln) -> LetterId {
    auto id = m.find_letter(tok);
    if (!id)
      throw ParseError("letter `" + tok + "` not in alphabet", ln, 1);
    return *id;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::string body = trim(line);
    if (body.empty()) continue;
    auto starts = [&](const char* prefix) {
      return body.rfind(prefix, 0) == 0;
    };
    try {
      if (starts("states:")) {
        for (const auto& t : split_ws(body.substr(7))) m.intern_state(t);
        saw_states = true;
      } else if (starts("initial:")) {
        auto toks = split_ws(body.substr(8));
        if (toks.size() != 1)
          throw ParseError("initial: wants exactly one state", lineno, 1);
        m.initial = m.intern_state(toks[0]);
      } else if (starts("halt:")) {
        auto toks = split_ws(body.substr(5));
        if (toks.size() != 1)
          throw ParseError("halt: wants exactly one state", lineno, 1);
        m.halt = m.intern_state(toks[0]);
      } else if (starts("alphabet:")) {
        for (const auto& t : split_ws(body.substr(9))) {
          if (t == "_")
            throw ParseError("`_` (Blank) is not an alphabet letter", lineno, 1);
          m.intern_letter(t);
        }
        saw_alphabet = true;
      } else {
        // Transition: `q,a -> q',b1 b2,R`
        auto arrow = body.find("->");
        if (arrow == std::string::npos)
          throw ParseError("expected a header line or `from -> to` transition",
                           lineno, 1);
        std::string lhs = trim(body.substr(0, arrow));
        std::string rhs = trim(body.substr(arrow + 2));
        auto comma = lhs.find(',');
        if (comma == std::string::npos)
          throw ParseError("transition lhs must be `state,letter`", lineno, 1);
        std::string from_tok = trim(lhs.substr(0, comma));
        std::string read_tok = trim(lhs.substr(comma + 1));
        std::size_t c1 = rhs.find(',');
        std::size_t c2 = rhs.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
          throw ParseError("transition rhs must be `state,writes,dir`", lineno,
                           1);
        std::string to_tok = trim(rhs.substr(0, c1));
        std::string write_tok = rhs.substr(c1 + 1, c2 - c1 - 1);
        std::string dir_tok = trim(rhs.substr(c2 + 1));

        StateId from = m.intern_state(from_tok);
        LetterId read =
            (read_tok == "_") ? kBlank : parse_letter(read_tok, lineno);
        TmTransition t;
        t.to = m.intern_state(to_tok);
        for (const auto& w : split_ws(write_tok)) {
          if (w == "_")
            throw ParseError("Blank cannot be written", lineno, 1);
          t.write.push_back(parse_letter(w, lineno));
        }
        if (dir_tok == "L")
          t.dir = TmDir::L;
        else if (dir_tok == "S")
          t.dir = TmDir::S;
        else if (dir_tok == "R")
          t.dir = TmDir::R;
        else
          throw ParseError("direction must be L, S or R", lineno, 1);
        if (t.dir == TmDir::S && t.write.size() != 1)
          throw ParseError("dir=S transition must write exactly one letter",
                           lineno, 1);
        if (m.has_transition(from, read))
          throw ParseError("duplicate transition for (" + from_tok + ", " +
                               read_tok + ")",
                           lineno, 1);
        m.set_transition(from, read, std::move(t));
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno, 1);
    }
  }
  if (!saw_states && m.state_count() == 0)
    throw ParseError("no states declared", lineno, 1);
  if (!saw_alphabet) {
    // An alphabet-less machine is representable (blank-only transitions).
  }
  if (m.initial < 0) throw ParseError("missing `initial:` header", lineno, 1);
  if (m.halt < 0) throw ParseError("missing `halt:` header", lineno, 1);
  complete_delta(m);
  return m;
}

void complete_delta(ExtendedTm& m) {
  const auto letters = static_cast<LetterId>(m.letter_count());
  // Halt self-loops first.
  if (m.halt >= 0) {
    for (LetterId a = 0; a < letters; ++a)
      if (!m.has_transition(m.halt, a))
        m.set_transition(m.halt, a, {m.halt, {a}, TmDir::S});
    if (!m.has_transition(m.halt, kBlank) && letters > 0)
      m.set_transition(m.halt, kBlank, {m.halt, {0}, TmDir::S});
  }
  // Any remaining hole routes to the reject spin state.
  bool holes = false;
  for (StateId s = 0; s < static_cast<StateId>(m.state_count()) && !holes; ++s)
    for (LetterId a = kBlank; a < letters && !holes; ++a)
      if (!m.has_transition(s, a)) holes = true;
  bool have_reject = m.find_state(kRejectStateName).has_value();
  if (!holes && !have_reject) return;

  StateId rej = m.intern_state(kRejectStateName);
  for (StateId s = 0; s < static_cast<StateId>(m.state_count()); ++s) {
    for (LetterId a = kBlank; a < letters; ++a) {
      if (m.has_transition(s, a)) continue;
      if (a == kBlank)
        m.set_transition(s, a, {rej, {}, TmDir::L});
      else
        m.set_transition(s, a, {rej, {a}, TmDir::S});
    }
  }
}

std::string serialize_etm(const ExtendedTm& m) {
  std::string out = "states:";
  for (StateId s = 0; s < static_cast<StateId>(m.state_count()); ++s)
    out += " " + m.state_name(s);
  out += "\ninitial: " + m.state_name(m.initial);
  out += "\nhalt: " + m.state_name(m.halt);
  out += "\nalphabet:";
  for (LetterId a = 0; a < static_cast<LetterId>(m.letter_count()); ++a)
    out += " " + m.letter_name(a);
  out += "\n";
  for (StateId s = 0; s < static_cast<StateId>(m.state_count()); ++s) {
    for (LetterId a = 0; a <= static_cast<LetterId>(m.letter_count()); ++a) {
      // Letter order 0..n-1, then Blank last.
      LetterId read = (a == static_cast<LetterId>(m.letter_count())) ? kBlank : a;
      if (!m.has_transition(s, read)) continue;
      const TmTransition& t = m.transition(s, read);
      out += m.state_name(s) + "," + m.letter_name(read) + " -> " +
             m.state_name(t.to) + ",";
      for (std::size_t i = 0; i < t.write.size(); ++i) {
        if (i) out += " ";
        out += m.letter_name(t.write[i]);
      }
      out += ",";
      out += (t.dir == TmDir::L) ? "L" : (t.dir == TmDir::S) ? "S" : "R";
      out += "\n";
    }
  }
  return out;
}

}  // namespace submachine
