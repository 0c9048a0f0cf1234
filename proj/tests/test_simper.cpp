#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "submachine/diag.hpp"
#include "submachine/simper.hpp"
#include "test_util.hpp"

namespace {

using namespace submachine;

SimperProgram parse_fixture(const std::string& name) {
  return parse_simper(testutil::read_fixture(name));
}

std::vector<std::string> word(const std::string& letters) {
  std::vector<std::string> w;
  for (char c : letters) w.emplace_back(1, c);
  return w;
}

std::vector<StmtKind> kinds(const std::vector<SimperStatement>& body) {
  std::vector<StmtKind> out;
  for (const SimperStatement& s : body) out.push_back(s.kind);
  return out;
}

bool has_sugar(const std::vector<SimperStatement>& body) {
  for (const SimperStatement& s : body) {
    if (s.kind == StmtKind::While || s.kind == StmtKind::Switch) return true;
    if (has_sugar(s.block) || has_sugar(s.else_block)) return true;
    for (const auto& arm : s.arms)
      if (has_sugar(arm.second)) return true;
  }
  return false;
}

void collect_label_names(const std::vector<SimperStatement>& body,
                         std::vector<std::string>& out) {
  for (const SimperStatement& s : body) {
    if (s.kind == StmtKind::Label) out.push_back(s.label);
    collect_label_names(s.block, out);
    collect_label_names(s.else_block, out);
    for (const auto& arm : s.arms) collect_label_names(arm.second, out);
  }
}

// ---------------------------------------------------------------------------
// An independent status oracle: a direct tree-walking interpreter that runs
// while and switch natively, without desugaring or flattening.  It only
// tracks enough structure for the fixture programs (scalar variables plus
// the read-only input word), and it reports the final status, not a step
// count, so it can serve as a cross-check for the library interpreter.
// ---------------------------------------------------------------------------

struct TreeValue {
  enum Kind { NatV, SymV } kind = NatV;
  std::uint64_t nat = 0;
  std::string sym;
};

struct TreeFault {
  std::string what;
};

class TreeInterp {
 public:
  TreeInterp(const SimperProgram& p, std::vector<std::string> input)
      : program_(p), input_(std::move(input)) {}

  ExecStatus run() {
    try {
      Flow flow = exec_block(program_.statements);
      if (flow == Flow::Halted) return ExecStatus::Halted;
      if (flow == Flow::Fuel) return ExecStatus::OutOfFuel;
      return ExecStatus::StuckEnd;
    } catch (const TreeFault&) {
      return ExecStatus::RuntimeError;
    }
  }

 private:
  enum class Flow { Next, Halted, Fuel, Jumped };

  TreeValue eval(const SimperValueExpr& v) {
    switch (v.kind) {
      case ValueKind::NatLit:
        return {TreeValue::NatV, v.nat, ""};
      case ValueKind::SymLit:
        return {TreeValue::SymV, 0, v.sym};
      case ValueKind::Var: {
        if (v.name == "n") return {TreeValue::NatV, input_.size(), ""};
        auto it = env_.find(v.name);
        if (it == env_.end()) throw TreeFault{"unassigned " + v.name};
        return it->second;
      }
      case ValueKind::Index: {
        if (v.name != "input" || v.args.size() != 1)
          throw TreeFault{"oracle only indexes input"};
        TreeValue idx = eval(v.args[0]);
        if (idx.kind != TreeValue::NatV || idx.nat >= input_.size())
          throw TreeFault{"index out of bounds"};
        return {TreeValue::SymV, 0, input_[idx.nat]};
      }
      case ValueKind::ArrayLit:
        throw TreeFault{"oracle has no arrays"};
    }
    throw TreeFault{"bad value"};
  }

  bool truth(const SimperCond& c) {
    switch (c.kind) {
      case CondKind::And:
        return truth(c.sub[0]) && truth(c.sub[1]);
      case CondKind::Or:
        return truth(c.sub[0]) || truth(c.sub[1]);
      case CondKind::Eq:
      case CondKind::Neq: {
        TreeValue l = eval(c.operands[0]);
        TreeValue r = eval(c.operands[1]);
        if (l.kind != r.kind) throw TreeFault{"mixed comparison"};
        bool eq = l.kind == TreeValue::NatV ? l.nat == r.nat : l.sym == r.sym;
        return c.kind == CondKind::Eq ? eq : !eq;
      }
    }
    return false;
  }

  bool spend() { return ++spent_ <= 100000; }

  // Runs one block; a goto unwinds to the top level, where the whole program
  // is re-scanned for the label.  That is quadratic but irrelevant for an
  // oracle on short fixture runs.
  Flow exec_block(const std::vector<SimperStatement>& body) {
    for (std::size_t at = 0; at < body.size(); ++at) {
      Flow flow = exec(body[at]);
      if (flow == Flow::Jumped) {
        if (&body != &program_.statements) return Flow::Jumped;
        // Restart from the statement after the top-level label, if the label
        // sits at top level; labels inside blocks are not needed by the
        // fixtures this oracle runs.
        bool found = false;
        for (std::size_t i = 0; i < body.size(); ++i) {
          if (body[i].kind == StmtKind::Label && body[i].label == jump_to_) {
            at = i;
            found = true;
            break;
          }
        }
        if (!found) throw TreeFault{"label not at top level"};
        continue;
      }
      if (flow != Flow::Next) return flow;
    }
    return Flow::Next;
  }

  Flow exec(const SimperStatement& s) {
    switch (s.kind) {
      case StmtKind::Label:
        return Flow::Next;
      case StmtKind::Halt:
        return spend() ? Flow::Halted : Flow::Fuel;
      case StmtKind::Goto:
        if (!spend()) return Flow::Fuel;
        jump_to_ = s.label;
        return Flow::Jumped;
      case StmtKind::Assign: {
        if (s.target.kind != ValueKind::Var)
          throw TreeFault{"oracle only assigns variables"};
        TreeValue v = eval(s.value);
        if (!spend()) return Flow::Fuel;
        env_[s.target.name] = v;
        return Flow::Next;
      }
      case StmtKind::Inc:
      case StmtKind::Dec: {
        TreeValue v = eval(s.target);
        if (v.kind != TreeValue::NatV) throw TreeFault{"++ on sym"};
        if (!spend()) return Flow::Fuel;
        if (s.kind == StmtKind::Inc)
          ++v.nat;
        else if (v.nat > 0)
          --v.nat;
        env_[s.target.name] = v;
        return Flow::Next;
      }
      case StmtKind::If: {
        bool taken = truth(s.cond);
        if (!spend()) return Flow::Fuel;
        return exec_block(taken ? s.block : s.else_block);
      }
      case StmtKind::While:
        for (;;) {
          bool taken = truth(s.cond);
          if (!spend()) return Flow::Fuel;
          if (!taken) return Flow::Next;
          Flow flow = exec_block(s.block);
          if (flow != Flow::Next) return flow;
        }
      case StmtKind::Switch: {
        TreeValue scrutinee = eval(s.value);
        if (!spend()) return Flow::Fuel;
        for (const auto& arm : s.arms) {
          TreeValue v = eval(arm.first);
          bool eq = scrutinee.kind == v.kind &&
                    (v.kind == TreeValue::NatV ? scrutinee.nat == v.nat
                                               : scrutinee.sym == v.sym);
          if (eq) return exec_block(arm.second);
        }
        return Flow::Next;
      }
    }
    return Flow::Next;
  }

  const SimperProgram& program_;
  std::vector<std::string> input_;
  std::map<std::string, TreeValue> env_;
  std::uint64_t spent_ = 0;
  std::string jump_to_;
};

// [DERIVED] Membership in { a^m b^m c^n d^n } union { a^m b^n c^n d^m },
// computed directly from the run-length definition.
bool in_balanced_language(const std::string& w) {
  std::size_t i = 0;
  std::uint64_t count[4] = {0, 0, 0, 0};
  const std::string order = "abcd";
  for (int letter = 0; letter < 4; ++letter)
    while (i < w.size() && w[i] == order[letter]) {
      ++count[letter];
      ++i;
    }
  if (i != w.size()) return false;  // letters out of order or foreign
  return (count[0] == count[1] && count[2] == count[3]) ||
         (count[0] == count[3] && count[1] == count[2]);
}

}  // namespace

// =============================================================================
// Parsing
// =============================================================================

TEST_CASE("parse: the specialized balanced-word parser has ten statements") {
  SimperProgram p = parse_fixture("lambig_specialized.sim");
  REQUIRE(p.statements.size() == 10);
  CHECK(kinds(p.statements) ==
        std::vector<StmtKind>{StmtKind::Assign, StmtKind::Assign,
                              StmtKind::While, StmtKind::Assign,
                              StmtKind::While, StmtKind::Assign,
                              StmtKind::While, StmtKind::Assign,
                              StmtKind::While, StmtKind::If});

  // The first loop guards with i != n && input[i] == "a": a conjunction whose
  // left operand compares variables and whose right compares an indexed read
  // against a symbol literal.
  const SimperStatement& loop = p.statements[2];
  REQUIRE(loop.cond.kind == CondKind::And);
  REQUIRE(loop.cond.sub.size() == 2);
  CHECK(loop.cond.sub[0].kind == CondKind::Neq);
  CHECK(loop.cond.sub[0].operands[0].name == "i");
  CHECK(loop.cond.sub[0].operands[1].name == "n");
  CHECK(loop.cond.sub[1].kind == CondKind::Eq);
  CHECK(loop.cond.sub[1].operands[0].kind == ValueKind::Index);
  CHECK(loop.cond.sub[1].operands[0].name == "input");
  CHECK(loop.cond.sub[1].operands[1].kind == ValueKind::SymLit);
  CHECK(loop.cond.sub[1].operands[1].sym == "a");
  CHECK(kinds(loop.block) ==
        std::vector<StmtKind>{StmtKind::Inc, StmtKind::Inc});

  // The final if nests two further ifs and has no else branch.
  const SimperStatement& gate = p.statements[9];
  CHECK_FALSE(gate.has_else);
  REQUIRE(gate.block.size() == 2);
  CHECK(gate.block[0].kind == StmtKind::If);
  CHECK(gate.block[0].block.size() == 1);
  CHECK(gate.block[0].block[0].kind == StmtKind::Halt);
}

TEST_CASE("parse: array literals carry dimensions and a fill value") {
  SimperProgram p = parse_simper("T := array[sn,sn,15](0)");
  REQUIRE(p.statements.size() == 1);
  const SimperValueExpr& lit = p.statements[0].value;
  REQUIRE(lit.kind == ValueKind::ArrayLit);
  REQUIRE(lit.args.size() == 3);
  CHECK(lit.args[0].kind == ValueKind::Var);
  CHECK(lit.args[2].kind == ValueKind::NatLit);
  CHECK(lit.args[2].nat == 15);
  REQUIRE(lit.fill.size() == 1);
  CHECK(lit.fill[0].kind == ValueKind::NatLit);
  CHECK(lit.fill[0].nat == 0);
}

TEST_CASE("parse: condition precedence and associativity") {
  // && binds tighter than ||, and both chain to the left.
  SimperProgram p =
      parse_simper("if a == 0 || b == 0 && c == 0 { halt }\n"
                   "if a == 0 && b == 0 && c == 0 { halt }");
  const SimperCond& mixed = p.statements[0].cond;
  REQUIRE(mixed.kind == CondKind::Or);
  CHECK(mixed.sub[0].kind == CondKind::Eq);
  CHECK(mixed.sub[1].kind == CondKind::And);

  const SimperCond& chain = p.statements[1].cond;
  REQUIRE(chain.kind == CondKind::And);
  CHECK(chain.sub[0].kind == CondKind::And);
  CHECK(chain.sub[1].kind == CondKind::Eq);
}

TEST_CASE("parse: labels and gotos anywhere, duplicates rejected") {
  SimperProgram p = parse_simper("top: if x == 0 { inner: goto top } goto inner");
  CHECK(p.statements[0].kind == StmtKind::Label);
  CHECK(p.statements[0].label == "top");

  CHECK_THROWS_AS(parse_simper("a: a: halt"), ParseError);
  try {
    parse_simper("a: halt\na: halt");
    FAIL_CHECK("expected a duplicate-label error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()) == "line 2:1: duplicate label 'a'");
  }
}

TEST_CASE("parse: malformed programs report positions") {
  // Each entry is a bad program and the expected start of the message.
  const std::pair<const char*, const char*> cases[] = {
      {"goto", "line 1:5: expected an identifier"},
      {"x :=", "line 1:5: expected a value"},
      {"if x { halt }", "line 1:6: expected '==' or '!='"},
      {"x == y", "line 1:3: expected '"},
      {"x := \"abc", "line 1:6: unterminated string literal"},
      {"x := 12345678901234567890", "line 1:6: number too large"},
      {"if x == 0 { halt", "line 1:17: unterminated block"},
      {"halt ?", "line 1:6: unexpected character '?'"},
      {"while := 0 { }", "line 1:7: expected a value, found ':='"},
      {"goto halt", "line 1:6: 'halt' is a keyword"},
  };
  for (const auto& [source, prefix] : cases) {
    CAPTURE(source);
    try {
      parse_simper(source);
      FAIL_CHECK("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).rfind(prefix, 0) == 0);
    }
  }
}

TEST_CASE("parse: comments and whitespace are insignificant") {
  SimperProgram p = parse_simper(
      "// a standalone comment\n"
      "x := 0 // trailing\n"
      "halt");
  CHECK(kinds(p.statements) ==
        std::vector<StmtKind>{StmtKind::Assign, StmtKind::Halt});
}

// =============================================================================
// Type inference
// =============================================================================

TEST_CASE("typecheck: the specialized parser is all-nat over a sym word") {
  TypeEnvironment env = typecheck(parse_fixture("lambig_specialized.sim"));
  REQUIRE(env.ok());
  for (const char* v : {"i", "a", "b", "c", "d", "n"}) {
    CAPTURE(v);
    CHECK(env.types.at(v) == nat_type());
  }
  CHECK(env.types.at("input") == array_type(1, sym_type()));
}

TEST_CASE("typecheck: the table parser's table is a 3-dimensional nat array") {
  TypeEnvironment env = typecheck(parse_fixture("cyk_shape.sim"));
  REQUIRE(env.ok());
  CHECK(env.types.at("T") == array_type(3, nat_type()));
  CHECK(env.types.at("T").to_string() == "array 3 nat");
  for (const char* v : {"sn", "si", "i", "j", "k", "ik"}) {
    CAPTURE(v);
    CHECK(env.types.at(v) == nat_type());
  }
}

TEST_CASE("typecheck: conflicting uses of one variable are reported") {
  SUBCASE("assigned nat then sym") {
    TypeEnvironment env = typecheck(parse_simper("x := 0 x := \"a\""));
    REQUIRE_FALSE(env.ok());
    CHECK(env.diagnostics[0].subject == "x");
  }
  SUBCASE("assigned sym then incremented") {
    TypeEnvironment env = typecheck(parse_simper("x := \"a\" ++x"));
    REQUIRE_FALSE(env.ok());
    CHECK(env.diagnostics[0].subject == "x");
    CHECK(env.diagnostics[0].message.find("nat") != std::string::npos);
  }
  SUBCASE("compared against both kinds") {
    TypeEnvironment env =
        typecheck(parse_simper("x := 0 if x == \"a\" { halt }"));
    REQUIRE_FALSE(env.ok());
  }
}

TEST_CASE("typecheck: types propagate through assignment in both directions") {
  TypeEnvironment env = typecheck(parse_simper("x := y  y := 0  z := x"));
  // y's later nat binding flows forward into x and then z on a second pass,
  // but y is still flagged: its first read happens before any assignment.
  CHECK(env.types.at("x") == nat_type());
  CHECK(env.types.at("y") == nat_type());
  CHECK(env.types.at("z") == nat_type());
}

TEST_CASE("typecheck: element writes shape the array type") {
  TypeEnvironment env =
      typecheck(parse_simper("T := array[1](\"\")  T[0] := \"s\""));
  REQUIRE(env.ok());
  CHECK(env.types.at("T") == array_type(1, sym_type()));
}

TEST_CASE("typecheck: the built-in word is read-only") {
  for (const char* bad : {"n := 5", "++n", "--n", "input[0] := \"q\"",
                          "input := array[1](\"\")"}) {
    CAPTURE(bad);
    TypeEnvironment env = typecheck(parse_simper(bad));
    REQUIRE_FALSE(env.ok());
    CHECK(env.diagnostics[0].message.find("read-only") != std::string::npos);
  }
}

TEST_CASE("typecheck: reads without any assignment are reported") {
  TypeEnvironment env = typecheck(parse_simper("y := x"));
  REQUIRE_FALSE(env.ok());
  bool flagged_x = false;
  for (const Diagnostic& d : env.diagnostics)
    if (d.subject == "x" && d.message.find("never assigned") != std::string::npos)
      flagged_x = true;
  CHECK(flagged_x);
}

TEST_CASE("typecheck: arrays cannot be compared") {
  TypeEnvironment env =
      typecheck(parse_simper("x := array[2](0) if x == x { halt }"));
  REQUIRE_FALSE(env.ok());
  bool found = false;
  for (const Diagnostic& d : env.diagnostics)
    if (d.message.find("array") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("typecheck: goto targets must exist") {
  TypeEnvironment env = typecheck(parse_simper("goto nowhere"));
  REQUIRE_FALSE(env.ok());
  CHECK(env.diagnostics[0].subject == "nowhere");
  CHECK(env.diagnostics[0].message.find("undefined label") !=
        std::string::npos);
}

TEST_CASE("typecheck: index arity must match the inferred rank") {
  TypeEnvironment env =
      typecheck(parse_simper("x := array[2,2](0)  y := x[1]"));
  REQUIRE_FALSE(env.ok());
  CHECK(env.diagnostics[0].subject == "x");
}

TEST_CASE("typecheck: indices must be nat") {
  TypeEnvironment env = typecheck(parse_simper("i := input[\"a\"]"));
  REQUIRE_FALSE(env.ok());
}

TEST_CASE("typecheck: diagnostics do not repeat across inference passes") {
  // The fixpoint needs two passes here (z's type arrives late); the conflict
  // on x must still be reported exactly once.
  TypeEnvironment env =
      typecheck(parse_simper("x := 0  x := \"a\"  y := z  z := 0"));
  int conflicts = 0;
  for (const Diagnostic& d : env.diagnostics)
    if (d.subject == "x") ++conflicts;
  CHECK(conflicts == 1);
}

// =============================================================================
// Desugaring
// =============================================================================

TEST_CASE("desugar: while becomes a labeled conditional with a back edge") {
  SimperProgram p = desugar(parse_simper("a := 0 while a == 0 { ++a }"));
  REQUIRE(p.statements.size() == 3);
  CHECK(p.statements[0].kind == StmtKind::Assign);
  REQUIRE(p.statements[1].kind == StmtKind::Label);
  const std::string head = p.statements[1].label;
  const SimperStatement& branch = p.statements[2];
  REQUIRE(branch.kind == StmtKind::If);
  CHECK_FALSE(branch.has_else);
  REQUIRE(branch.block.size() == 2);
  CHECK(branch.block[0].kind == StmtKind::Inc);
  CHECK(branch.block[1].kind == StmtKind::Goto);
  CHECK(branch.block[1].label == head);
}

TEST_CASE("desugar: switch becomes a first-match if/else chain") {
  SimperProgram p = desugar(
      parse_simper("x := 0 switch x { 0 { halt } 1 { ++x } 2 { --x } }"));
  REQUIRE(p.statements.size() == 2);
  const SimperStatement& outer = p.statements[1];
  REQUIRE(outer.kind == StmtKind::If);
  CHECK(outer.cond.kind == CondKind::Eq);
  CHECK(outer.cond.operands[0].name == "x");
  CHECK(outer.cond.operands[1].nat == 0);
  CHECK(outer.block[0].kind == StmtKind::Halt);
  REQUIRE(outer.has_else);
  REQUIRE(outer.else_block.size() == 1);

  const SimperStatement& middle = outer.else_block[0];
  REQUIRE(middle.kind == StmtKind::If);
  CHECK(middle.cond.operands[1].nat == 1);
  REQUIRE(middle.has_else);
  const SimperStatement& last = middle.else_block[0];
  CHECK(last.cond.operands[1].nat == 2);
  CHECK_FALSE(last.has_else);
  CHECK(last.else_block.empty());
}

TEST_CASE("desugar: generated labels avoid user labels and each other") {
  SimperProgram p = desugar(parse_simper(
      "loop_1: a := 0 while a == 0 { b := 0 while b == 1 { ++b } ++a } "
      "goto loop_1"));
  std::vector<std::string> labels;
  collect_label_names(p.statements, labels);
  std::set<std::string> unique(labels.begin(), labels.end());
  CHECK(labels.size() == unique.size());
  CHECK(unique.count("loop_1") == 1);
  CHECK(unique.size() == 3);  // user label plus one per while
  CHECK_FALSE(has_sugar(p.statements));
}

TEST_CASE("desugar: core statements pass through and the result is stable") {
  SimperProgram p =
      parse_fixture("cyk_shape.sim");
  SimperProgram once = desugar(p);
  CHECK_FALSE(has_sugar(once.statements));
  SimperProgram twice = desugar(once);
  CHECK(kinds(twice.statements) == kinds(once.statements));
  // A desugared program still typechecks the same way.
  TypeEnvironment env = typecheck(once);
  REQUIRE(env.ok());
  CHECK(env.types.at("T") == array_type(3, nat_type()));
}

// =============================================================================
// Interpretation
// =============================================================================

namespace {

ExecOutcome run_file(const std::string& name, const std::string& letters,
                     std::uint64_t fuel = 1u << 20) {
  return interpret(desugar(parse_fixture(name)), word(letters), fuel);
}

ExecOutcome run_text(const std::string& source, const std::string& letters,
                     std::uint64_t fuel = 1u << 20) {
  return interpret(desugar(parse_simper(source)), word(letters), fuel);
}

}  // namespace

TEST_CASE("interpret: the specialized parser accepts balanced words") {
  CHECK(run_file("lambig_specialized.sim", "").status == ExecStatus::Halted);
  CHECK(run_file("lambig_specialized.sim", "aabbcd").status ==
        ExecStatus::Halted);
  CHECK(run_file("lambig_specialized.sim", "abcd").status ==
        ExecStatus::Halted);
  CHECK(run_file("lambig_specialized.sim", "ad").status == ExecStatus::Halted);
  CHECK(run_file("lambig_specialized.sim", "abbccd").status ==
        ExecStatus::Halted);
}

TEST_CASE("interpret: the specialized parser jams on unbalanced words") {
  CHECK(run_file("lambig_specialized.sim", "abc").status ==
        ExecStatus::StuckEnd);
  CHECK(run_file("lambig_specialized.sim", "ba").status ==
        ExecStatus::StuckEnd);
  CHECK(run_file("lambig_specialized.sim", "aab").status ==
        ExecStatus::StuckEnd);
  // A letter outside the alphabet stops the scan early; the final length
  // check then fails.  Short-circuit evaluation keeps the indexed read in
  // bounds, so this is a jam, not a runtime error.
  CHECK(run_file("lambig_specialized.sim", "q").status ==
        ExecStatus::StuckEnd);
}

TEST_CASE("interpret: decrementing zero stays at zero") {
  ExecOutcome out = run_text("x := 0 --x --x ++x if x == 1 { halt }", "");
  CHECK(out.status == ExecStatus::Halted);
}

TEST_CASE("interpret: runtime errors carry positions") {
  SUBCASE("index out of bounds") {
    ExecOutcome out = run_text("x := input[5]", "a");
    REQUIRE(out.status == ExecStatus::RuntimeError);
    CHECK(out.error.find("out of bounds") != std::string::npos);
    CHECK(out.error.rfind("line 1:12:", 0) == 0);
  }
  SUBCASE("read before assignment") {
    ExecOutcome out = run_text("x := y", "");
    REQUIRE(out.status == ExecStatus::RuntimeError);
    CHECK(out.error.find("before it is assigned") != std::string::npos);
  }
  SUBCASE("element write into an unassigned array") {
    ExecOutcome out = run_text("T[0] := 1", "");
    CHECK(out.status == ExecStatus::RuntimeError);
  }
  SUBCASE("comparing a nat with a sym") {
    ExecOutcome out = run_text("if n == \"a\" { halt }", "");
    CHECK(out.status == ExecStatus::RuntimeError);
  }
}

TEST_CASE("interpret: fuel is consumed one step per core statement") {
  SUBCASE("assignment then halt costs two") {
    ExecOutcome out = run_text("x := 0 halt", "");
    CHECK(out.status == ExecStatus::Halted);
    CHECK(out.steps == 2);
  }
  SUBCASE("a goto loop burns exactly the budget") {
    ExecOutcome out = run_text("a: goto a", "", 10);
    CHECK(out.status == ExecStatus::OutOfFuel);
    CHECK(out.steps == 10);
  }
  SUBCASE("both branch arms cost the same") {
    // Taken branch: if(1) + assign(1) + skip-jump(0) + halt(1).
    ExecOutcome then_arm =
        run_text("if n == 1 { x := 0 } else { x := 1 } halt", "a");
    CHECK(then_arm.status == ExecStatus::Halted);
    CHECK(then_arm.steps == 3);
    // Fallthrough branch: if(1) + assign(1) + halt(1).
    ExecOutcome else_arm =
        run_text("if n == 1 { x := 0 } else { x := 1 } halt", "");
    CHECK(else_arm.status == ExecStatus::Halted);
    CHECK(else_arm.steps == 3);
  }
  SUBCASE("labels are free") {
    ExecOutcome out = run_text("a: b: c: halt", "");
    CHECK(out.status == ExecStatus::Halted);
    CHECK(out.steps == 1);
  }
}

TEST_CASE("interpret: array literals cost the space they occupy") {
  SUBCASE("a 3x4 table costs twelve") {
    ExecOutcome out = run_text("T := array[3,4](0) halt", "");
    CHECK(out.status == ExecStatus::Halted);
    CHECK(out.steps == 13);
  }
  SUBCASE("nested fills multiply") {
    ExecOutcome out = run_text("T := array[2](array[3](0)) halt", "");
    CHECK(out.status == ExecStatus::Halted);
    CHECK(out.steps == 7);
  }
  SUBCASE("an unaffordable allocation is not half-executed") {
    ExecOutcome out = run_text("x := array[10](0)", "", 9);
    CHECK(out.status == ExecStatus::OutOfFuel);
    CHECK(out.steps == 0);
  }
  SUBCASE("an exactly affordable allocation runs") {
    ExecOutcome out = run_text("x := array[10](0)", "", 10);
    CHECK(out.status == ExecStatus::StuckEnd);
    CHECK(out.steps == 10);
  }
}

TEST_CASE("interpret: sugar and unresolved gotos are caller errors") {
  SimperProgram sugared = parse_simper("while x == 0 { halt }");
  CHECK_THROWS_AS(interpret(sugared, {}, 100), std::invalid_argument);
  SimperProgram dangling = parse_simper("goto nowhere");
  CHECK_THROWS_AS(interpret(dangling, {}, 100), std::invalid_argument);
}

TEST_CASE("interpret: the table-driven skeleton terminates on every word") {
  // Only two productions are wired in, so nothing nonempty is accepted, but
  // the triple loop must still run to completion within polynomial fuel.
  CHECK(run_file("cyk_shape.sim", "").status == ExecStatus::Halted);
  for (const char* w : {"a", "abcd", "dddd", "abab"}) {
    CAPTURE(w);
    ExecOutcome out = run_file("cyk_shape.sim", w);
    CHECK(out.status == ExecStatus::StuckEnd);
  }
}

TEST_CASE("interpret: runs are deterministic") {
  ExecOutcome first = run_file("lambig_specialized.sim", "aabbccdd");
  ExecOutcome second = run_file("lambig_specialized.sim", "aabbccdd");
  CHECK(first.status == second.status);
  CHECK(first.steps == second.steps);
}

// =============================================================================
// Cross-checks: tree oracle vs. desugar+flatten, and both vs. the language
// =============================================================================

TEST_CASE("interpret: desugared execution matches the tree-walking oracle") {
  SimperProgram p = parse_fixture("lambig_specialized.sim");
  SimperProgram core = desugar(p);

  std::vector<std::string> words = {""};
  std::vector<std::string> frontier = {""};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::string> next;
    for (const std::string& w : frontier)
      for (char c : {'a', 'b', 'c', 'd'}) next.push_back(w + c);
    words.insert(words.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  REQUIRE(words.size() == 341);

  for (const std::string& w : words) {
    CAPTURE(w);
    ExecStatus oracle = TreeInterp(p, word(w)).run();
    ExecOutcome machine = interpret(core, word(w), 1u << 20);
    CHECK(machine.status == oracle);
    bool accepted = machine.status == ExecStatus::Halted;
    CHECK(accepted == in_balanced_language(w));
  }
}
