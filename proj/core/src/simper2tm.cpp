#include "submachine/simper2tm.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "submachine/reduction.hpp"

namespace submachine {

namespace {

// =============================================================================
// Letters
// =============================================================================

LetterId bit_letter(ExtendedTm& m, bool one) {
  return m.intern_letter(one ? "b1" : "b0");
}

LetterId sym_letter(ExtendedTm& m, const std::string& text) {
  return m.intern_letter(mangle_token(text));
}

LetterId dim_letter(ExtendedTm& m, bool close, int level) {
  return m.intern_letter((close ? "dr_" : "dl_") + std::to_string(level));
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Inverse of mangle_token on its image: every non-alphanumeric byte was
// escaped as _XX, so unescaping is unambiguous.
std::string unmangle_token(const std::string& name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (name[i] == '_' && i + 2 < name.size() && hex_value(name[i + 1]) >= 0 &&
        hex_value(name[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(name[i + 1]) * 16 +
                               hex_value(name[i + 2]));
      i += 2;
    } else {
      out += name[i];
    }
  }
  return out;
}

std::string superscript(int k) {
  static const char* kDigits[10] = {"⁰", "¹", "²", "³",
                                    "⁴", "⁵", "⁶", "⁷",
                                    "⁸", "⁹"};
  std::string out;
  for (char c : std::to_string(k)) out += kDigits[c - '0'];
  return out;
}

void rep_value(const SimperValue& v, ExtendedTm& m,
               std::vector<LetterId>& out) {
  switch (v.kind) {
    case SimperValue::NatV: {
      std::uint64_t x = v.nat;
      do {
        out.push_back(bit_letter(m, (x & 1) != 0));
        x >>= 1;
      } while (x != 0);
      break;
    }
    case SimperValue::SymV:
      out.push_back(sym_letter(m, v.sym));
      break;
    case SimperValue::ArrayV: {
      if (v.dims.empty()) {
        // A zero-dimensional array is its single scalar.
        if (!v.elems.empty()) rep_value(v.elems[0], m, out);
        break;
      }
      int level = static_cast<int>(v.dims.size()) - 1;
      LetterId dl = dim_letter(m, false, level);
      LetterId dr = dim_letter(m, true, level);
      std::uint64_t chunk = 1;
      for (std::size_t k = 1; k < v.dims.size(); ++k) chunk *= v.dims[k];
      for (std::uint64_t i = 0; i < v.dims[0]; ++i) {
        out.push_back(dl);
        if (v.dims.size() == 1) {
          rep_value(v.elems[i], m, out);
        } else {
          SimperValue sub;
          sub.kind = SimperValue::ArrayV;
          sub.dims.assign(v.dims.begin() + 1, v.dims.end());
          sub.elems.assign(v.elems.begin() + static_cast<std::ptrdiff_t>(i * chunk),
                           v.elems.begin() + static_cast<std::ptrdiff_t>((i + 1) * chunk));
          rep_value(sub, m, out);
        }
        out.push_back(dr);
      }
      break;
    }
  }
}

[[noreturn]] void bad_encoding(const std::string& what) {
  throw std::invalid_argument("decode_rep: " + what);
}

SimperValue decode_range(const std::vector<LetterId>& ls, std::size_t lo,
                         std::size_t hi, const SimperType& t,
                         const ExtendedTm& m) {
  if (t.kind == SimperType::Nat) {
    if (lo == hi) bad_encoding("empty natural");
    if (hi - lo > 64) bad_encoding("natural too wide");
    auto b0 = m.find_letter("b0");
    auto b1 = m.find_letter("b1");
    std::uint64_t value = 0;
    for (std::size_t i = hi; i-- > lo;) {
      if (b1 && ls[i] == *b1)
        value = value * 2 + 1;
      else if (b0 && ls[i] == *b0)
        value = value * 2;
      else
        bad_encoding("non-bit letter in a natural");
    }
    SimperValue v;
    v.kind = SimperValue::NatV;
    v.nat = value;
    return v;
  }
  if (t.kind == SimperType::Sym) {
    if (hi - lo != 1) bad_encoding("a symbol is a single letter");
    SimperValue v;
    v.kind = SimperValue::SymV;
    v.sym = unmangle_token(m.letter_name(ls[lo]));
    return v;
  }
  // Array: a run of dl/dr groups at the outermost level.
  int level = t.dims - 1;
  auto dl = m.find_letter("dl_" + std::to_string(level));
  auto dr = m.find_letter("dr_" + std::to_string(level));
  SimperType sub_type = t.dims == 1 ? t.elem[0] : array_type(t.dims - 1, t.elem[0]);
  SimperValue v;
  v.kind = SimperValue::ArrayV;
  std::vector<std::uint64_t> sub_dims;
  bool first = true;
  std::uint64_t count = 0;
  std::size_t i = lo;
  while (i < hi) {
    if (!dl || ls[i] != *dl) bad_encoding("expected a group opener");
    std::size_t j = i + 1;
    while (j < hi && (!dr || ls[j] != *dr)) ++j;
    if (j == hi) bad_encoding("unterminated group");
    SimperValue sub = decode_range(ls, i + 1, j, sub_type, m);
    if (sub.kind == SimperValue::ArrayV) {
      if (first)
        sub_dims = sub.dims;
      else if (sub_dims != sub.dims)
        bad_encoding("ragged array");
      for (SimperValue& e : sub.elems) v.elems.push_back(std::move(e));
    } else {
      v.elems.push_back(std::move(sub));
    }
    first = false;
    ++count;
    i = j + 1;
  }
  v.dims.push_back(count);
  if (t.dims > 1) {
    if (count == 0) sub_dims.assign(static_cast<std::size_t>(t.dims - 1), 0);
    v.dims.insert(v.dims.end(), sub_dims.begin(), sub_dims.end());
  }
  return v;
}

// =============================================================================
// Preprocessing: reduce every tape-locating expression to a plain variable.
// =============================================================================

SimperValueExpr var_ref(const std::string& name, int line, int col) {
  SimperValueExpr v;
  v.kind = ValueKind::Var;
  v.name = name;
  v.line = line;
  v.col = col;
  return v;
}

SimperValueExpr nat_ref(std::uint64_t value, int line, int col) {
  SimperValueExpr v;
  v.kind = ValueKind::NatLit;
  v.nat = value;
  v.line = line;
  v.col = col;
  return v;
}

class Preprocessor {
 public:
  SimperProgram run(const SimperProgram& p) {
    SimperProgram out;
    out.statements = block(p.statements);
    return out;
  }

 private:
  int next_aux_ = 0;

  std::string fresh_aux() { return "$" + std::to_string(next_aux_++); }

  static SimperStatement assign_stmt(SimperValueExpr target,
                                     SimperValueExpr value) {
    SimperStatement s;
    s.kind = StmtKind::Assign;
    s.line = value.line;
    s.col = value.col;
    s.target = std::move(target);
    s.value = std::move(value);
    return s;
  }

  // Hoists `e` into a fresh auxiliary and returns a read of that auxiliary.
  SimperValueExpr to_var(const SimperValueExpr& e,
                         std::vector<SimperStatement>& out) {
    if (e.kind == ValueKind::Var) return e;
    SimperValueExpr fixed = normalize(e, out);
    std::string aux = fresh_aux();
    out.push_back(assign_stmt(var_ref(aux, e.line, e.col), std::move(fixed)));
    return var_ref(aux, e.line, e.col);
  }

  // Rewrites the innards of `e` (index arguments, array-literal dimensions,
  // non-scalar fills) to plain variables without hoisting `e` itself.
  SimperValueExpr normalize(const SimperValueExpr& e,
                            std::vector<SimperStatement>& out) {
    SimperValueExpr c = e;
    switch (e.kind) {
      case ValueKind::Var:
      case ValueKind::NatLit:
      case ValueKind::SymLit:
        break;
      case ValueKind::Index:
        for (SimperValueExpr& a : c.args)
          if (a.kind != ValueKind::Var) a = to_var(a, out);
        break;
      case ValueKind::ArrayLit:
        for (SimperValueExpr& d : c.args)
          if (d.kind != ValueKind::Var) d = to_var(d, out);
        for (SimperValueExpr& f : c.fill)
          if (f.kind == ValueKind::Index || f.kind == ValueKind::ArrayLit)
            f = to_var(f, out);
        break;
    }
    return c;
  }

  // Appends statements that set `flag := 1` exactly when `cond` holds,
  // evaluating operands as lazily as the interpreter does: an operand whose
  // atom is short-circuited away is never hoisted into an executed
  // assignment.
  void emit_cond(const SimperCond& cond, const std::string& flag,
                 const std::string& one, std::vector<SimperStatement>& out) {
    if (cond.kind == CondKind::Eq || cond.kind == CondKind::Neq) {
      SimperCond atom = cond;
      atom.operands[0] = to_var(cond.operands[0], out);
      atom.operands[1] = to_var(cond.operands[1], out);
      SimperStatement test;
      test.kind = StmtKind::If;
      test.line = cond.line;
      test.col = cond.col;
      test.cond = std::move(atom);
      test.block.push_back(assign_stmt(var_ref(flag, cond.line, cond.col),
                                       nat_ref(1, cond.line, cond.col)));
      out.push_back(std::move(test));
      return;
    }
    if (cond.kind == CondKind::And) {
      std::string tmp = fresh_aux();
      out.push_back(assign_stmt(var_ref(tmp, cond.line, cond.col),
                                nat_ref(0, cond.line, cond.col)));
      emit_cond(cond.sub[0], tmp, one, out);
      SimperStatement gate;
      gate.kind = StmtKind::If;
      gate.line = cond.line;
      gate.col = cond.col;
      gate.cond.kind = CondKind::Eq;
      gate.cond.line = cond.line;
      gate.cond.col = cond.col;
      gate.cond.operands = {var_ref(tmp, cond.line, cond.col),
                            var_ref(one, cond.line, cond.col)};
      emit_cond(cond.sub[1], flag, one, gate.block);
      out.push_back(std::move(gate));
      return;
    }
    // Or: try the second disjunct only if the first left the flag clear.
    emit_cond(cond.sub[0], flag, one, out);
    SimperStatement gate;
    gate.kind = StmtKind::If;
    gate.line = cond.line;
    gate.col = cond.col;
    gate.cond.kind = CondKind::Neq;
    gate.cond.line = cond.line;
    gate.cond.col = cond.col;
    gate.cond.operands = {var_ref(flag, cond.line, cond.col),
                          var_ref(one, cond.line, cond.col)};
    emit_cond(cond.sub[1], flag, one, gate.block);
    out.push_back(std::move(gate));
  }

  std::vector<SimperStatement> block(const std::vector<SimperStatement>& in) {
    std::vector<SimperStatement> out;
    for (const SimperStatement& s : in) statement(s, out);
    return out;
  }

  void statement(const SimperStatement& s, std::vector<SimperStatement>& out) {
    switch (s.kind) {
      case StmtKind::While:
      case StmtKind::Switch:
        throw std::invalid_argument(
            "preprocess_array_accesses: program still contains while/switch "
            "sugar");
      case StmtKind::Label:
      case StmtKind::Goto:
      case StmtKind::Halt:
        out.push_back(s);
        break;
      case StmtKind::Inc:
      case StmtKind::Dec: {
        SimperStatement c = s;
        c.target = normalize(s.target, out);
        out.push_back(std::move(c));
        break;
      }
      case StmtKind::Assign: {
        SimperStatement c = s;
        c.target = normalize(s.target, out);
        c.value = normalize(s.value, out);
        // Element-to-element copies stage through an auxiliary so that the
        // target's erase phase can never overlap the source zone, and a
        // direct self-copy keeps its read-then-write meaning.
        bool elem_to_elem = c.target.kind == ValueKind::Index &&
                            c.value.kind == ValueKind::Index;
        bool self_copy = c.target.kind == ValueKind::Var &&
                         c.value.kind == ValueKind::Var &&
                         c.target.name == c.value.name;
        if (elem_to_elem || self_copy) c.value = to_var(c.value, out);
        out.push_back(std::move(c));
        break;
      }
      case StmtKind::If: {
        bool atom = (s.cond.kind == CondKind::Eq || s.cond.kind == CondKind::Neq);
        if (atom) {
          SimperStatement c = s;
          c.cond.operands[0] = to_var(s.cond.operands[0], out);
          c.cond.operands[1] = to_var(s.cond.operands[1], out);
          c.block = block(s.block);
          c.else_block = block(s.else_block);
          out.push_back(std::move(c));
          break;
        }
        // Compound condition: evaluate it lazily into a flag, then branch
        // on the flag.  This keeps every operand hoist inside the position
        // where the interpreter would have evaluated it.
        std::string one = fresh_aux();
        std::string flag = fresh_aux();
        out.push_back(assign_stmt(var_ref(one, s.line, s.col),
                                  nat_ref(1, s.line, s.col)));
        out.push_back(assign_stmt(var_ref(flag, s.line, s.col),
                                  nat_ref(0, s.line, s.col)));
        emit_cond(s.cond, flag, one, out);
        SimperStatement test;
        test.kind = StmtKind::If;
        test.line = s.line;
        test.col = s.col;
        test.cond.kind = CondKind::Eq;
        test.cond.line = s.cond.line;
        test.cond.col = s.cond.col;
        test.cond.operands = {var_ref(flag, s.line, s.col),
                              var_ref(one, s.line, s.col)};
        test.block = block(s.block);
        test.else_block = block(s.else_block);
        test.has_else = s.has_else;
        out.push_back(std::move(test));
        break;
      }
    }
  }
};

// =============================================================================
// The compiler
// =============================================================================

struct State2 {
  StateId yes = -1;
  StateId no = -1;
};

class Compiler {
 public:
  explicit Compiler(const SimperProgram& p) : prog_(p) {
    env_ = typecheck(p);
    if (!env_.ok())
      throw std::invalid_argument("compile: program does not typecheck: " +
                                  env_.diagnostics.front().message);
  }

  Compilation run() {
    build_layout();
    build_alphabet();
    out_.machine.initial = out_.machine.intern_state("start");
    out_.machine.halt = out_.machine.intern_state("halt");
    out_.machine.intern_state(kRejectStateName);

    StateId q = prologue();
    out_.prologue_state_limit =
        static_cast<StateId>(out_.machine.state_count());
    collect_labels(prog_.statements);
    q = convert_body(prog_.statements)(q);
    // Running off the end of the program rejects: spin, never halt.
    wire_home(q, *out_.machine.find_state(kRejectStateName));

    complete_delta(out_.machine);
    check_invariants();
    out_.preprocessed = prog_;
    return std::move(out_);
  }

 private:
  using Transformer = std::function<StateId(StateId)>;
  using Branch = std::function<State2(StateId)>;
  using Transformer2 = std::function<State2(State2)>;

  const SimperProgram& prog_;
  TypeEnvironment env_;
  Compilation out_;
  std::set<std::string> letter_names_;
  std::map<std::string, StateId> labels_;
  int max_index_arity_ = 0;
  int max_build_arity_ = 0;
  int fresh_states_ = 0;

  ExtendedTm& m() { return out_.machine; }
  TapeAlphabet& alpha() { return out_.alphabet; }
  TapeLayout& layout() { return out_.layout; }

  // --- inventory -------------------------------------------------------------

  void note_variable(const std::string& name, std::vector<std::string>& order,
                     std::set<std::string>& seen) {
    if (seen.insert(name).second) order.push_back(name);
  }

  void scan_arity(const SimperValueExpr& e) {
    if (e.kind == ValueKind::Index)
      max_index_arity_ =
          std::max(max_index_arity_, static_cast<int>(e.args.size()));
    if (e.kind == ValueKind::ArrayLit)
      max_build_arity_ =
          std::max(max_build_arity_, static_cast<int>(e.args.size()));
    for (const SimperValueExpr& a : e.args) scan_arity(a);
    for (const SimperValueExpr& f : e.fill) scan_arity(f);
  }

  void scan_statements(const std::vector<SimperStatement>& body,
                       std::vector<std::string>& order,
                       std::set<std::string>& seen) {
    for (const SimperStatement& s : body) {
      if (s.kind == StmtKind::Assign || s.kind == StmtKind::Inc ||
          s.kind == StmtKind::Dec)
        note_variable(s.target.name, order, seen);
      scan_arity(s.target);
      scan_arity(s.value);
      for (const SimperValueExpr& o : s.cond.operands) scan_arity(o);
      scan_statements(s.block, order, seen);
      scan_statements(s.else_block, order, seen);
    }
  }

  // The name of the scratch counter a walk uses at dimension level `k`, and
  // the one an array build uses for its j-th dimension.  Walks never nest
  // (preprocessing staged nested accesses through auxiliaries) and builds
  // never nest, so one counter per level suffices machine-wide.
  static std::string walk_counter(int level) {
    return "$w" + std::to_string(level);
  }
  static std::string build_counter(std::size_t j) {
    return "$y" + std::to_string(j);
  }

  void build_layout() {
    std::vector<std::string> order = {"input", "n"};
    std::set<std::string> seen = {"input", "n"};
    scan_statements(prog_.statements, order, seen);
    layout().variables = order;
    layout().types = env_.types;
    for (int k = 0; k < max_index_arity_; ++k) {
      layout().variables.push_back(walk_counter(k));
      layout().types[walk_counter(k)] = nat_type();
    }
    for (int j = 0; j < max_build_arity_; ++j) {
      layout().variables.push_back(build_counter(static_cast<std::size_t>(j)));
      layout().types[build_counter(static_cast<std::size_t>(j))] = nat_type();
    }
  }

  LetterId claim(const std::string& name) {
    if (!letter_names_.insert(name).second)
      throw std::invalid_argument("compile: tape letter name collision: '" +
                                  name + "'");
    return m().intern_letter(name);
  }

  void scan_syms(const SimperValueExpr& e, std::vector<std::string>& order,
                 std::set<std::string>& seen) {
    if (e.kind == ValueKind::SymLit && seen.insert(e.sym).second)
      order.push_back(e.sym);
    for (const SimperValueExpr& a : e.args) scan_syms(a, order, seen);
    for (const SimperValueExpr& f : e.fill) scan_syms(f, order, seen);
  }

  void scan_syms_cond(const SimperCond& c, std::vector<std::string>& order,
                      std::set<std::string>& seen) {
    for (const SimperCond& s : c.sub) scan_syms_cond(s, order, seen);
    for (const SimperValueExpr& o : c.operands) scan_syms(o, order, seen);
  }

  void scan_syms_body(const std::vector<SimperStatement>& body,
                      std::vector<std::string>& order,
                      std::set<std::string>& seen) {
    for (const SimperStatement& s : body) {
      scan_syms(s.target, order, seen);
      scan_syms(s.value, order, seen);
      scan_syms_cond(s.cond, order, seen);
      scan_syms_body(s.block, order, seen);
      scan_syms_body(s.else_block, order, seen);
      for (const auto& arm : s.arms) {
        scan_syms(arm.first, order, seen);
        scan_syms_body(arm.second, order, seen);
      }
    }
  }

  void build_alphabet() {
    alpha_all_.clear();
    alpha().b0 = claim("b0");
    alpha().b1 = claim("b1");
    std::vector<std::string> sym_order;
    std::set<std::string> sym_seen;
    scan_syms_body(prog_.statements, sym_order, sym_seen);
    for (const std::string& text : sym_order)
      alpha().syms[text] = claim(mangle_token(text));
    int max_dims = 0;
    for (const auto& [name, type] : layout().types)
      if (type.kind == SimperType::Array) max_dims = std::max(max_dims, type.dims);
    for (int k = 0; k < max_dims; ++k) {
      alpha().dl.push_back(claim("dl_" + std::to_string(k)));
      alpha().dr.push_back(claim("dr_" + std::to_string(k)));
    }
    for (const std::string& v : layout().variables) {
      layout().zl[v] = claim("zl_" + mangle_token(v));
      layout().zr[v] = claim("zr_" + mangle_token(v));
    }
    alpha().mark_dn = claim("mark_dn");
    alpha().mark_up = claim("mark_up");
    alpha().mark_pos = claim("mark_pos");
    for (LetterId a = 0; a < static_cast<LetterId>(m().letter_count()); ++a)
      alpha_all_.push_back(a);
  }

  std::vector<LetterId> alpha_all_;

  // The letters that can appear inside a zone holding a value of this type.
  std::vector<LetterId> content_letters(const SimperType& t) {
    std::vector<LetterId> out;
    const SimperType& scalar = t.kind == SimperType::Array ? t.elem[0] : t;
    if (scalar.kind == SimperType::Nat) {
      out.push_back(alpha().b0);
      out.push_back(alpha().b1);
    } else {
      for (const auto& [text, letter] : alpha().syms) out.push_back(letter);
    }
    if (t.kind == SimperType::Array)
      for (int k = 0; k < t.dims; ++k) {
        out.push_back(alpha().dl[static_cast<std::size_t>(k)]);
        out.push_back(alpha().dr[static_cast<std::size_t>(k)]);
      }
    return out;
  }

  // --- low-level state plumbing ----------------------------------------------

  StateId fresh(const std::string& hint) {
    return m().intern_state("q" + std::to_string(fresh_states_++) + "_" + hint);
  }

  void set(StateId from, LetterId read, StateId to,
           std::vector<LetterId> write, TmDir dir) {
    m().set_transition(from, read, {to, std::move(write), dir});
  }

  // Statement-boundary glue: fires only with the head parked on zl_input,
  // so a misplaced head rejects instead of silently continuing.
  void wire_home(StateId from, StateId to) {
    LetterId zl = layout().zl.at("input");
    set(from, zl, to, {zl}, TmDir::S);
  }

  void wire_any(StateId from, StateId to) {
    for (LetterId a : alpha_all_) set(from, a, to, {a}, TmDir::S);
  }

  // Moves `dir` until the target letter is under the head.
  StateId scan(StateId from, LetterId target, TmDir dir,
               const std::string& hint) {
    StateId next = fresh(hint);
    for (LetterId a : alpha_all_) {
      if (a == target)
        set(from, a, next, {a}, TmDir::S);
      else
        set(from, a, from, {a}, dir);
    }
    return next;
  }

  StateId step(StateId from, TmDir dir, const std::string& hint) {
    StateId next = fresh(hint);
    for (LetterId a : alpha_all_) set(from, a, next, {a}, dir);
    return next;
  }

  StateId home(StateId from) {
    return scan(from, layout().zl.at("input"), TmDir::L, "home");
  }

  // Parks the head on the zone opener of `var` (home first, then right).
  StateId locate_var(StateId from, const std::string& var) {
    return scan(home(from), layout().zl.at(var), TmDir::R, "at_" + short_name(var));
  }

  static std::string short_name(const std::string& var) {
    return mangle_token(var);
  }

  // Head on `opener`: inserts `mark` just right of it; head ends on the
  // first cell after the mark.
  StateId insert_after(StateId from, LetterId opener, LetterId mark,
                       const std::string& hint) {
    StateId next = fresh(hint);
    set(from, opener, next, {opener, mark}, TmDir::R);
    return next;
  }

  // Head somewhere left of the unique `mark`: removes it; head ends on the
  // cell that was right of the mark.
  StateId remove_mark(StateId from, LetterId mark) {
    StateId q = scan(home(from), mark, TmDir::R, "rm");
    StateId next = fresh("rmd");
    set(q, mark, next, {}, TmDir::R);
    return next;
  }

  // Head on the first content cell: deletes everything up to (not
  // including) `closer`; head ends on the closer.
  StateId erase_until(StateId from, LetterId closer) {
    StateId next = fresh("erased");
    for (LetterId a : alpha_all_) {
      if (a == closer)
        set(from, a, next, {a}, TmDir::S);
      else
        set(from, a, from, {}, TmDir::R);
    }
    return next;
  }

  // Inserts `letter` immediately left of the unique `target` letter
  // (a parked mark or a zone closer), from anywhere.
  StateId deliver(StateId from, LetterId target, LetterId letter) {
    StateId q = scan(home(from), target, TmDir::R, "dlv");
    StateId next = fresh("dlvd");
    set(q, target, next, {letter, target}, TmDir::L);
    return next;
  }

  // Head on the insertion mark: inserts `letter` left of it and returns
  // with the head back on the mark (two steps, no homing).
  StateId emit_local(StateId from, LetterId mark, LetterId letter) {
    StateId q1 = fresh("eml");
    set(from, mark, q1, {letter, mark}, TmDir::L);
    StateId q2 = step(q1, TmDir::R, "emr");
    return step(q2, TmDir::R, "emq");
  }

  // --- zone arithmetic ---------------------------------------------------------

  // Increment the zone between `opener` and `closer`; entered with the head
  // on the opener, leaves homed.  A prefix of ones flips to zeros and the
  // first zero flips to one; all-ones grows the zone by an inserted one.
  StateId inc_at(StateId from, LetterId opener, LetterId closer) {
    StateId r = step_onto_content(from, opener);
    StateId done = fresh("incd");
    set(r, alpha().b1, r, {alpha().b0}, TmDir::R);
    set(r, alpha().b0, done, {alpha().b1}, TmDir::S);
    StateId grown = fresh("incg");
    set(r, closer, grown, {alpha().b1, closer}, TmDir::L);
    wire_any(grown, done);
    return home(done);
  }

  StateId step_onto_content(StateId from, LetterId opener) {
    StateId r = fresh("zin");
    set(from, opener, r, {opener}, TmDir::R);
    return r;
  }

  // Decrement (saturating at zero) and keep the representation canonical:
  // a zero prefix flips to ones and the first one flips to zero; if the
  // flipped one was the most significant bit, trailing zeros are trimmed
  // back to a single cell; an all-zero zone is restored unchanged.
  StateId dec_at(StateId from, LetterId opener, LetterId closer) {
    StateId r = step_onto_content(from, opener);
    StateId flipped = fresh("decf");
    set(r, alpha().b0, r, {alpha().b1}, TmDir::R);
    set(r, alpha().b1, flipped, {alpha().b0}, TmDir::S);
    // Value was zero: undo the borrow ripple.
    StateId undo = fresh("decz");
    set(r, closer, undo, {closer}, TmDir::L);
    set(undo, alpha().b1, undo, {alpha().b0}, TmDir::L);
    StateId done = fresh("decd");
    set(undo, opener, done, {opener}, TmDir::S);
    // Canonicalize: walk to the closer, then trim trailing zeros without
    // ever deleting the only remaining bit.
    StateId at_end = scan(flipped, closer, TmDir::R, "decc");
    StateId look = fresh("dect");
    set(at_end, closer, look, {closer}, TmDir::L);
    StateId prev = fresh("decp");
    set(look, alpha().b1, done, {alpha().b1}, TmDir::S);
    set(look, alpha().b0, prev, {alpha().b0}, TmDir::L);
    set(prev, opener, done, {opener}, TmDir::S);  // single "0": canonical
    StateId back = fresh("decb");
    set(prev, alpha().b0, back, {alpha().b0}, TmDir::R);
    set(prev, alpha().b1, back, {alpha().b1}, TmDir::R);
    // Delete the trailing zero; the head lands on the closer, from where
    // the trimming loop steps left again.
    set(back, alpha().b0, at_end, {}, TmDir::R);
    return home(done);
  }

  StateId inc_var(StateId from, const std::string& var) {
    return inc_at(locate_var(from, var), layout().zl.at(var),
                  layout().zr.at(var));
  }

  StateId dec_var(StateId from, const std::string& var) {
    return dec_at(locate_var(from, var), layout().zl.at(var),
                  layout().zr.at(var));
  }

  // Branches on whether `var` holds zero (canonical single "0").  Both
  // frontiers are homed.
  State2 zero_branch(StateId from, const std::string& var) {
    StateId q = locate_var(from, var);
    StateId r = step_onto_content(q, layout().zl.at(var));
    StateId maybe = fresh("z0m");
    StateId yes = fresh("z0y");
    StateId no = fresh("z0n");
    set(r, alpha().b0, maybe, {alpha().b0}, TmDir::R);
    set(r, alpha().b1, no, {alpha().b1}, TmDir::S);
    set(maybe, layout().zr.at(var), yes, {layout().zr.at(var)}, TmDir::S);
    set(maybe, alpha().b0, no, {alpha().b0}, TmDir::S);
    set(maybe, alpha().b1, no, {alpha().b1}, TmDir::S);
    return {home(yes), home(no)};
  }

  // Copies the letters right of a parked source mark (mark_up) until
  // `src_closer`, inserting each just left of the unique `dst_letter`;
  // removes the source mark when done.  Leaves homed.
  StateId copy_from_mark(StateId from, LetterId src_closer, LetterId dst_letter,
                         const std::vector<LetterId>& contents) {
    StateId loop = fresh("cploop");
    wire_any(from, loop);
    StateId at_src = scan(home(loop), alpha().mark_up, TmDir::R, "cpsrc");
    StateId read = fresh("cpread");
    set(at_src, alpha().mark_up, read, {alpha().mark_up}, TmDir::R);
    StateId src_done = fresh("cpdone");
    set(read, src_closer, src_done, {src_closer}, TmDir::S);
    for (LetterId c : contents) {
      StateId took = fresh("cptake");
      set(read, c, took, {}, TmDir::L);  // deletes c; head on the mark
      StateId moved = fresh("cpmove");
      set(took, alpha().mark_up, moved, {c, alpha().mark_up}, TmDir::L);
      StateId dropped = deliver(moved, dst_letter, c);
      wire_any(dropped, loop);
    }
    return home(remove_mark(src_done, alpha().mark_up));
  }

  // dst := src for two flat natural zones, using only the source mark; the
  // target's insertion point is its own closer, which is unique on the tape.
  StateId nat_copy(StateId from, const std::string& src, const std::string& dst) {
    StateId q = locate_var(from, dst);
    q = step_onto_content(q, layout().zl.at(dst));
    q = erase_until(q, layout().zr.at(dst));
    q = locate_var(q, src);
    q = insert_after(q, layout().zl.at(src), alpha().mark_up, "cmark");
    return copy_from_mark(q, layout().zr.at(src), layout().zr.at(dst),
                          {alpha().b0, alpha().b1});
  }

  // --- array element location --------------------------------------------------

  // Walks to the element a[x_0, ..., x_{k-1}]: at each dimension level the
  // index variable is copied into a scratch counter, and the walk
  // alternates between skipping one sibling group and decrementing the
  // counter until it reaches zero.  The index variables themselves are
  // preserved.  Entered from anywhere; ends with the head on the element's
  // dl_0 opener.  Out-of-range indices run into an undefined read and
  // reject.
  StateId locate_elem(StateId from, const std::string& array,
                      const std::vector<std::string>& index_vars) {
    const SimperType& t = layout().types.at(array);
    StateId q = locate_var(from, array);
    q = step_onto_content(q, layout().zl.at(array));
    for (std::size_t k = 0; k < index_vars.size(); ++k) {
      int level = t.dims - 1 - static_cast<int>(k);
      LetterId dl = alpha().dl[static_cast<std::size_t>(level)];
      LetterId dr = alpha().dr[static_cast<std::size_t>(level)];
      const std::string& ctr = walk_counter(level);
      // q: head on the first group opener at this level.  Remember it with
      // the position mark, then load the counter.
      StateId marked = fresh("wkm");
      set(q, dl, marked, {alpha().mark_pos}, TmDir::S);
      StateId loop = fresh("wk");
      wire_home(nat_copy(marked, index_vars[k], ctr), loop);
      State2 z = zero_branch(loop, ctr);
      // Counter exhausted: restore the opener and descend into the group.
      StateId back = scan(home(z.yes), alpha().mark_pos, TmDir::R, "wkr");
      StateId restored = fresh("wkd");
      set(back, alpha().mark_pos, restored, {dl}, TmDir::S);
      if (level > 0) {
        q = step(restored, TmDir::R, "wkin");
      } else {
        q = restored;
      }
      // Not yet zero: decrement the counter, restore the opener, skip this
      // group (its closer is the first same-level closer to the right),
      // mark the next sibling and test again.
      StateId after_dec = dec_var(z.no, ctr);
      StateId back2 = scan(home(after_dec), alpha().mark_pos, TmDir::R, "wks");
      StateId restored2 = fresh("wkt");
      set(back2, alpha().mark_pos, restored2, {dl}, TmDir::S);
      StateId at_close = scan(restored2, dr, TmDir::R, "wkc");
      StateId next_group = fresh("wkn");
      set(at_close, dr, next_group, {dr}, TmDir::R);
      StateId marked2 = fresh("wkm2");
      set(next_group, dl, marked2, {alpha().mark_pos}, TmDir::S);
      wire_any(marked2, loop);
    }
    return q;
  }

  std::vector<std::string> index_vars_of(const SimperValueExpr& e) {
    std::vector<std::string> names;
    for (const SimperValueExpr& a : e.args) {
      if (a.kind != ValueKind::Var)
        throw std::invalid_argument(
            "compile: array index is not a plain variable (run "
            "preprocess_array_accesses first)");
      names.push_back(a.name);
    }
    return names;
  }

  // --- conditions ----------------------------------------------------------------

  // Compares two variables letter by letter, yes on equal.  Both operands
  // must be plain variables of the same scalar type.
  State2 eq_branch(StateId from, const std::string& x, const std::string& y) {
    if (x == y) {
      State2 out;
      out.yes = fresh("eqy");
      wire_home(from, out.yes);
      out.no = fresh("eqdead");  // unreachable by construction
      return out;
    }
    std::vector<LetterId> contents = content_letters(layout().types.at(x));
    LetterId zrx = layout().zr.at(x);
    LetterId zry = layout().zr.at(y);

    StateId q = locate_var(from, x);
    q = insert_after(q, layout().zl.at(x), alpha().mark_dn, "eqmx");
    q = locate_var(q, y);
    q = insert_after(q, layout().zl.at(y), alpha().mark_up, "eqmy");

    StateId loop = fresh("eqloop");
    wire_any(q, loop);
    StateId at_src = scan(home(loop), alpha().mark_up, TmDir::R, "eqsrc");
    StateId read = fresh("eqread");
    set(at_src, alpha().mark_up, read, {alpha().mark_up}, TmDir::R);

    StateId equal = fresh("eqeq");
    StateId unequal = fresh("eqne");

    // Source exhausted: equal exactly when the target is exhausted too.
    {
      StateId chk = fresh("eqchk");
      set(read, zry, chk, {zry}, TmDir::S);
      StateId at_dst = scan(home(chk), alpha().mark_dn, TmDir::R, "eqdst");
      StateId read2 = fresh("eqrd2");
      set(at_dst, alpha().mark_dn, read2, {alpha().mark_dn}, TmDir::R);
      set(read2, zrx, equal, {zrx}, TmDir::S);
      for (LetterId d : contents) set(read2, d, unequal, {d}, TmDir::S);
    }
    for (LetterId c : contents) {
      StateId took = fresh("eqtake");
      set(read, c, took, {}, TmDir::L);
      StateId moved = fresh("eqmove");
      set(took, alpha().mark_up, moved, {c, alpha().mark_up}, TmDir::L);
      StateId at_dst = scan(home(moved), alpha().mark_dn, TmDir::R, "eqfnd");
      StateId read2 = fresh("eqcmp");
      set(at_dst, alpha().mark_dn, read2, {alpha().mark_dn}, TmDir::R);
      set(read2, zrx, unequal, {zrx}, TmDir::S);
      for (LetterId d : contents)
        if (d != c) set(read2, d, unequal, {d}, TmDir::S);
      StateId took2 = fresh("eqtk2");
      set(read2, c, took2, {}, TmDir::L);
      StateId moved2 = fresh("eqmv2");
      set(took2, alpha().mark_dn, moved2, {c, alpha().mark_dn}, TmDir::L);
      wire_any(moved2, loop);
    }
    auto cleanup = [&](StateId entry) {
      StateId q1 = remove_mark(entry, alpha().mark_dn);
      StateId q2 = remove_mark(q1, alpha().mark_up);
      return home(q2);
    };
    return {cleanup(equal), cleanup(unequal)};
  }

  Branch branch_on(const SimperCond& cond) {
    if (cond.kind == CondKind::Eq || cond.kind == CondKind::Neq) {
      for (const SimperValueExpr& o : cond.operands)
        if (o.kind != ValueKind::Var)
          throw std::invalid_argument(
              "compile: comparison operand is not a plain variable (run "
              "preprocess_array_accesses first)");
      bool negate = cond.kind == CondKind::Neq;
      std::string x = cond.operands[0].name, y = cond.operands[1].name;
      return [this, x, y, negate](StateId from) {
        State2 s = eq_branch(from, x, y);
        return negate ? State2{s.no, s.yes} : s;
      };
    }
    Branch first = branch_on(cond.sub[0]);
    Branch second = branch_on(cond.sub[1]);
    bool conjunction = cond.kind == CondKind::And;
    return [this, first, second, conjunction](StateId from) {
      State2 a = first(from);
      if (conjunction) {
        State2 b = second(a.yes);
        StateId no = fresh("andno");
        wire_home(a.no, no);
        wire_home(b.no, no);
        return State2{b.yes, no};
      }
      State2 b = second(a.no);
      StateId yes = fresh("oryes");
      wire_home(a.yes, yes);
      wire_home(b.yes, yes);
      return State2{yes, b.no};
    };
  }

  // --- transformer combinators -----------------------------------------------

  Transformer seqs(std::vector<Transformer> ts) {
    return [ts = std::move(ts)](StateId q) {
      for (const Transformer& t : ts) q = t(q);
      return q;
    };
  }

  Transformer2 yes_branch(Transformer t) {
    return [t = std::move(t)](State2 s) { return State2{t(s.yes), s.no}; };
  }

  Transformer2 no_branch(Transformer t) {
    return [t = std::move(t)](State2 s) { return State2{s.yes, t(s.no)}; };
  }

  StateId join(State2 s) {
    StateId j = fresh("join");
    wire_home(s.yes, j);
    wire_home(s.no, j);
    return j;
  }

  // --- assignments ---------------------------------------------------------------

  struct Lvalue {
    LetterId opener;  // zl_x for variables, dl_0 for array elements
    LetterId closer;  // zr_x or dr_0
    SimperType type;  // type of the designated zone's content
  };

  // Parks mark_dn just right of the zone opener designated by the target
  // expression; the head ends on the first content cell.
  std::pair<StateId, Lvalue> mark_lvalue(StateId from,
                                         const SimperValueExpr& target) {
    Lvalue lv;
    StateId q;
    if (target.kind == ValueKind::Var) {
      lv.opener = layout().zl.at(target.name);
      lv.closer = layout().zr.at(target.name);
      lv.type = layout().types.at(target.name);
      q = locate_var(from, target.name);
    } else {
      const SimperType& at = layout().types.at(target.name);
      lv.opener = alpha().dl[0];
      lv.closer = alpha().dr[0];
      lv.type = at.elem[0];
      q = locate_elem(from, target.name, index_vars_of(target));
    }
    q = insert_after(q, lv.opener, alpha().mark_dn, "asgm");
    return {q, lv};
  }

  // Writes the canonical spelling of a scalar literal at the parked
  // mark_dn; entered with the head on the mark.
  StateId emit_literal(StateId from, const SimperValueExpr& lit) {
    std::vector<LetterId> letters;
    if (lit.kind == ValueKind::NatLit) {
      std::uint64_t x = lit.nat;
      do {
        letters.push_back((x & 1) != 0 ? alpha().b1 : alpha().b0);
        x >>= 1;
      } while (x != 0);
    } else {
      letters.push_back(alpha().syms.at(lit.sym));
    }
    StateId q = from;
    for (LetterId c : letters) q = emit_local(q, alpha().mark_dn, c);
    return q;
  }

  // The statically unrolled builder for array literals: one counting loop
  // per dimension, each with a scratch counter zone reloaded from the
  // (variable) dimension on every entry.
  StateId build_array(StateId from, const SimperValueExpr& lit) {
    const SimperValueExpr& fill = lit.fill[0];
    int nd = static_cast<int>(lit.args.size());
    std::function<StateId(StateId, int)> emit_level =
        [&](StateId q, int level) -> StateId {
      std::size_t j = static_cast<std::size_t>(nd - 1 - level);
      if (lit.args[j].kind != ValueKind::Var)
        throw std::invalid_argument(
            "compile: array dimension is not a plain variable (run "
            "preprocess_array_accesses first)");
      q = nat_copy(q, lit.args[j].name, build_counter(j));
      StateId loop = fresh("bld");
      wire_home(q, loop);
      State2 z = zero_branch(loop, build_counter(j));
      StateId body = deliver(z.no, alpha().mark_dn,
                             alpha().dl[static_cast<std::size_t>(level)]);
      if (level == 0) {
        if (fill.kind == ValueKind::Var) {
          StateId q2 = locate_var(body, fill.name);
          q2 = insert_after(q2, layout().zl.at(fill.name), alpha().mark_up,
                            "bfm");
          body = copy_from_mark(q2, layout().zr.at(fill.name),
                                alpha().mark_dn,
                                content_letters(layout().types.at(fill.name)));
        } else {
          // Scalar literal fill: spell it directly at the mark.
          StateId at_mark = scan(home(body), alpha().mark_dn, TmDir::R, "bfl");
          body = emit_literal(at_mark, fill);
        }
      } else {
        body = emit_level(body, level - 1);
      }
      body = deliver(body, alpha().mark_dn,
                     alpha().dr[static_cast<std::size_t>(level)]);
      body = dec_var(body, build_counter(j));
      wire_home(body, loop);
      return z.yes;
    };
    return emit_level(from, nd - 1);
  }

  Transformer convert_assign(const SimperStatement& s) {
    return [this, &s](StateId from) {
      auto [q, lv] = mark_lvalue(from, s.target);
      q = erase_until(q, lv.closer);

      switch (s.value.kind) {
        case ValueKind::NatLit:
        case ValueKind::SymLit: {
          // The erase left the head on the closer, one right of the mark.
          StateId back = step(q, TmDir::L, "asgb");
          q = emit_literal(back, s.value);
          break;
        }
        case ValueKind::Var: {
          const std::string& y = s.value.name;
          StateId q2 = locate_var(q, y);
          q2 = insert_after(q2, layout().zl.at(y), alpha().mark_up, "asgs");
          q = copy_from_mark(q2, layout().zr.at(y), alpha().mark_dn,
                             content_letters(layout().types.at(y)));
          break;
        }
        case ValueKind::Index: {
          const SimperType& at = layout().types.at(s.value.name);
          StateId q2 = locate_elem(q, s.value.name, index_vars_of(s.value));
          q2 = insert_after(q2, alpha().dl[0], alpha().mark_up, "asge");
          q = copy_from_mark(q2, alpha().dr[0], alpha().mark_dn,
                             content_letters(at.elem[0]));
          break;
        }
        case ValueKind::ArrayLit:
          q = build_array(q, s.value);
          break;
      }
      return home(remove_mark(q, alpha().mark_dn));
    };
  }

  // --- statements ----------------------------------------------------------------

  void collect_labels(const std::vector<SimperStatement>& body) {
    for (const SimperStatement& s : body) {
      if (s.kind == StmtKind::Label) labels_[s.label] = fresh("lbl");
      collect_labels(s.block);
      collect_labels(s.else_block);
    }
  }

  Transformer convert_statement(const SimperStatement& s) {
    switch (s.kind) {
      case StmtKind::While:
      case StmtKind::Switch:
        throw std::invalid_argument("compile: program still contains sugar");
      case StmtKind::Label:
        return [this, &s](StateId from) {
          StateId at = labels_.at(s.label);
          wire_home(from, at);
          return at;
        };
      case StmtKind::Goto:
        return [this, &s](StateId from) {
          wire_home(from, labels_.at(s.label));
          return fresh("after_goto");  // unreachable continuation
        };
      case StmtKind::Halt:
        return [this](StateId from) {
          wire_home(from, m().halt);
          return fresh("after_halt");
        };
      case StmtKind::Inc:
      case StmtKind::Dec: {
        bool inc = s.kind == StmtKind::Inc;
        return [this, &s, inc](StateId from) {
          if (s.target.kind == ValueKind::Var) {
            return inc ? inc_var(from, s.target.name)
                       : dec_var(from, s.target.name);
          }
          StateId q =
              locate_elem(from, s.target.name, index_vars_of(s.target));
          return inc ? inc_at(q, alpha().dl[0], alpha().dr[0])
                     : dec_at(q, alpha().dl[0], alpha().dr[0]);
        };
      }
      case StmtKind::Assign:
        return convert_assign(s);
      case StmtKind::If:
        return [this, &s](StateId from) {
          State2 s2 = branch_on(s.cond)(from);
          s2 = yes_branch(convert_body(s.block))(s2);
          s2 = no_branch(convert_body(s.else_block))(s2);
          return join(s2);
        };
    }
    throw std::invalid_argument("compile: unsupported statement");
  }

  Transformer convert_body(const std::vector<SimperStatement>& body) {
    std::vector<Transformer> ts;
    for (const SimperStatement& s : body) ts.push_back(convert_statement(s));
    return seqs(std::move(ts));
  }

  // --- prologue ------------------------------------------------------------------

  // Turns the raw input word into the zoned tape: wrap every letter in its
  // element markers, close the input zone, count the elements into n's
  // zone, then append one empty zone per remaining variable and park the
  // head on zl_input.
  StateId prologue() {
    LetterId zl_in = layout().zl.at("input");
    LetterId zr_in = layout().zr.at("input");
    LetterId dl0 = alpha().dl[0];
    LetterId dr0 = alpha().dr[0];

    std::vector<LetterId> raw;
    for (const auto& [text, letter] : alpha().syms) raw.push_back(letter);

    // The head starts on the blank just left of the word; that cell
    // becomes the input zone's opener.
    StateId open = fresh("pro");
    set(m().initial, kBlank, open, {zl_in}, TmDir::R);

    // Wrap letters one at a time: on a raw letter, prepend its element
    // opener; on the following cell, squeeze in the closer (stepping back
    // and forth because only the current cell can be rewritten).
    StateId after = fresh("prc");
    StateId backup = fresh("prb");
    StateId onclose = fresh("prd");
    for (LetterId a : raw) {
      set(open, a, after, {dl0, a}, TmDir::R);
      set(after, a, backup, {dr0, a}, TmDir::L);
      set(backup, a, onclose, {a}, TmDir::R);
    }
    set(onclose, dr0, open, {dr0}, TmDir::R);

    // End of the word: close the last element, then lay down the skeleton
    // zl_n "0" zr_n.  The last skeleton write walks left so the head stays
    // on written tape.
    StateId t1 = fresh("pre");
    set(after, kBlank, t1, {dr0}, TmDir::R);
    StateId t2 = fresh("prf");
    set(t1, kBlank, t2, {zr_in}, TmDir::R);
    set(open, kBlank, t2, {zr_in}, TmDir::R);  // empty word: no elements
    StateId t3 = fresh("prg");
    set(t2, kBlank, t3, {layout().zl.at("n")}, TmDir::R);
    StateId t4 = fresh("prh");
    set(t3, kBlank, t4, {alpha().b0}, TmDir::R);
    StateId t5 = fresh("pri");
    set(t4, kBlank, t5, {layout().zr.at("n")}, TmDir::L);

    // Count the input elements into n, marking each element opener as it
    // is counted and restoring the marks afterwards.
    StateId counting = fresh("prj");
    wire_any(home(t5), counting);
    StateId found = fresh("prk");
    StateId all_counted = fresh("prl");
    for (LetterId a : alpha_all_) {
      if (a == dl0)
        set(counting, a, found, {alpha().mark_pos}, TmDir::S);
      else if (a == zr_in)
        set(counting, a, all_counted, {a}, TmDir::S);
      else
        set(counting, a, counting, {a}, TmDir::R);
    }
    wire_home(inc_var(found, "n"), counting);
    StateId restore = fresh("prm");
    wire_any(home(all_counted), restore);
    StateId restored = fresh("prn");
    for (LetterId a : alpha_all_) {
      if (a == alpha().mark_pos)
        set(restore, a, restore, {dl0}, TmDir::R);
      else if (a == zr_in)
        set(restore, a, restored, {a}, TmDir::S);
      else
        set(restore, a, restore, {a}, TmDir::R);
    }

    // Append one empty zone per remaining variable.
    StateId q = restored;
    std::vector<LetterId> tail;
    for (const std::string& v : layout().variables) {
      if (v == "input" || v == "n") continue;
      tail.push_back(layout().zl.at(v));
      tail.push_back(layout().zr.at(v));
    }
    if (!tail.empty()) {
      q = scan(q, layout().zr.at("n"), TmDir::R, "prt");
      q = step(q, TmDir::R, "pru");  // onto the blank past the skeleton
      for (std::size_t i = 0; i < tail.size(); ++i) {
        StateId next = fresh("prv");
        bool last = i + 1 == tail.size();
        set(q, kBlank, next, {tail[i]}, last ? TmDir::L : TmDir::R);
        q = next;
      }
    }
    return home(q);
  }

  // --- final checks ---------------------------------------------------------------

  void check_invariants() {
    std::vector<Diagnostic> problems = validate_etm(m());
    if (!problems.empty())
      throw std::logic_error("compile: generated machine is invalid: " +
                             problems.front().message);
    for (StateId s = 0; s < static_cast<StateId>(m().state_count()); ++s)
      for (LetterId a = kBlank; a < static_cast<LetterId>(m().letter_count());
           ++a)
        if (m().has_transition(s, a) && m().transition(s, a).write.size() > 2)
          throw std::logic_error("compile: transition writes more than two letters");
  }
};

}  // namespace

// =============================================================================
// Public interface
// =============================================================================

std::vector<LetterId> rep(const SimperValue& v, ExtendedTm& m) {
  std::vector<LetterId> out;
  rep_value(v, m, out);
  return out;
}

SimperValue decode_rep(const std::vector<LetterId>& letters,
                       const SimperType& type, const ExtendedTm& m) {
  return decode_range(letters, 0, letters.size(), type, m);
}

std::string render_rep(const ExtendedTm& m,
                       const std::vector<LetterId>& letters) {
  std::string out;
  for (LetterId a : letters) {
    const std::string& name = m.letter_name(a);
    if (name == "b0") {
      out += "0";
    } else if (name == "b1") {
      out += "1";
    } else if (name.rfind("dl_", 0) == 0) {
      out += "⟨" + superscript(std::stoi(name.substr(3)));
    } else if (name.rfind("dr_", 0) == 0) {
      out += "⟩" + superscript(std::stoi(name.substr(3)));
    } else if (name.rfind("zl_", 0) == 0) {
      out += "⟨_" + unmangle_token(name.substr(3));
    } else if (name.rfind("zr_", 0) == 0) {
      out += "⟩_" + unmangle_token(name.substr(3));
    } else if (name == "mark_dn") {
      out += "↓";
    } else if (name == "mark_up") {
      out += "↑";
    } else if (name == "mark_pos") {
      out += "◆";
    } else {
      out += unmangle_token(name);
    }
  }
  return out;
}

SimperProgram preprocess_array_accesses(const SimperProgram& p) {
  return Preprocessor().run(p);
}

Compilation compile(const SimperProgram& p) { return Compiler(p).run(); }

Compilation compile_from_source(const SimperProgram& parsed) {
  return compile(preprocess_array_accesses(desugar(parsed)));
}

// =============================================================================
// Test support
// =============================================================================

namespace {

std::vector<LetterId> whole_tape(const TmConfig& cfg) {
  std::vector<LetterId> tape = cfg.left;
  if (cfg.current != kBlank) tape.push_back(cfg.current);
  tape.insert(tape.end(), cfg.right.begin(), cfg.right.end());
  return tape;
}

// Structural check of one zone's content: balanced dimension markers with
// levels stepping down by one inward, scalars only at the innermost level.
bool zone_content_ok(const Compilation& c, const std::vector<LetterId>& tape,
                     std::size_t lo, std::size_t hi, const SimperType& t) {
  const TapeAlphabet& a = c.alphabet;
  auto is_bit = [&](LetterId x) { return x == a.b0 || x == a.b1; };
  auto is_sym = [&](LetterId x) {
    for (const auto& [text, letter] : a.syms)
      if (letter == x) return true;
    return false;
  };
  auto scalar_ok = [&](LetterId x, const SimperType& s) {
    return s.kind == SimperType::Nat ? is_bit(x) : is_sym(x);
  };
  if (t.kind != SimperType::Array) {
    for (std::size_t i = lo; i < hi; ++i)
      if (!scalar_ok(tape[i], t)) return false;
    return true;
  }
  const SimperType& elem = t.elem[0];
  std::vector<int> stack;
  for (std::size_t i = lo; i < hi; ++i) {
    LetterId x = tape[i];
    bool matched = false;
    for (int k = 0; k < t.dims; ++k) {
      std::size_t ku = static_cast<std::size_t>(k);
      if (ku < a.dl.size() && x == a.dl[ku]) {
        int expected = stack.empty() ? t.dims - 1 : stack.back() - 1;
        if (k != expected) return false;
        stack.push_back(k);
        matched = true;
        break;
      }
      if (ku < a.dr.size() && x == a.dr[ku]) {
        if (stack.empty() || stack.back() != k) return false;
        stack.pop_back();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (!(!stack.empty() && stack.back() == 0 && scalar_ok(x, elem)))
      return false;
  }
  return stack.empty();
}

}  // namespace

bool tape_is_zoned(const Compilation& c, const TmConfig& cfg) {
  // The prologue is still building the zones; reject has abandoned them;
  // both are exempt.  The halt state is interned before the prologue but is
  // only ever entered once the tape is fully zoned, so it is checked.
  if (cfg.state < c.prologue_state_limit && cfg.state != c.machine.halt)
    return true;
  auto rej = c.machine.find_state(kRejectStateName);
  if (rej && cfg.state == *rej) return true;

  std::vector<LetterId> tape = whole_tape(cfg);
  const TapeAlphabet& a = c.alphabet;

  int dn = 0, up = 0, pos = 0;
  for (LetterId x : tape) {
    dn += x == a.mark_dn;
    up += x == a.mark_up;
    pos += x == a.mark_pos;
  }
  if (dn > 1 || up > 1 || pos > 1) return false;

  // Zone skeleton: every marker pair present once, in layout order.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t cursor = 0;
  for (const std::string& v : c.layout.variables) {
    LetterId zl = c.layout.zl.at(v), zr = c.layout.zr.at(v);
    std::size_t i = cursor;
    while (i < tape.size() && tape[i] != zl) ++i;
    if (i == tape.size()) return false;
    std::size_t j = i + 1;
    while (j < tape.size() && tape[j] != zr) ++j;
    if (j == tape.size()) return false;
    spans.emplace_back(i, j);
    cursor = j + 1;
  }
  // Nothing outside the zones, and no duplicated zone markers.
  std::size_t covered = 0;
  for (auto [i, j] : spans) covered += j - i + 1;
  std::size_t zone_letters = 0;
  for (LetterId x : tape)
    for (const std::string& v : c.layout.variables)
      zone_letters += (x == c.layout.zl.at(v)) + (x == c.layout.zr.at(v));
  if (zone_letters != 2 * c.layout.variables.size()) return false;
  if (spans.front().first != 0 || spans.back().second != tape.size() - 1)
    return false;
  for (std::size_t k = 1; k < spans.size(); ++k)
    if (spans[k].first != spans[k - 1].second + 1) return false;

  // Deep content check only between operations, when no scratch mark is
  // parked anywhere.
  if (dn + up + pos == 0) {
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const std::string& v = c.layout.variables[k];
      auto it = c.layout.types.find(v);
      if (it == c.layout.types.end()) continue;
      if (!zone_content_ok(c, tape, spans[k].first + 1, spans[k].second,
                           it->second))
        return false;
    }
  }
  return true;
}

std::vector<LetterId> extract_zone(const Compilation& c, const TmConfig& cfg,
                                   const std::string& var) {
  auto zlit = c.layout.zl.find(var);
  auto zrit = c.layout.zr.find(var);
  if (zlit == c.layout.zl.end() || zrit == c.layout.zr.end())
    throw std::invalid_argument("extract_zone: unknown variable '" + var + "'");
  std::vector<LetterId> tape = whole_tape(cfg);
  auto lo = std::find(tape.begin(), tape.end(), zlit->second);
  auto hi = std::find(tape.begin(), tape.end(), zrit->second);
  if (lo == tape.end() || hi == tape.end() || hi < lo)
    throw std::invalid_argument("extract_zone: zone for '" + var +
                                "' not on the tape");
  return std::vector<LetterId>(lo + 1, hi);
}

}  // namespace submachine
