#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "submachine/grammar.hpp"

namespace submachine {

namespace {

// Small builders for the emitted statement tree.  The generated program uses
// a fixed cast of variables: the table T, the word length n (built in), the
// padded bound sn = n+1, the span start i, its +1 shadow si, the span width
// k, the split point j, and the span end ik = i+k — shadows standing in for
// the arithmetic the language does not have.

SimperValueExpr var(const std::string& name) {
  SimperValueExpr v;
  v.kind = ValueKind::Var;
  v.name = name;
  return v;
}

SimperValueExpr nat(std::uint64_t value) {
  SimperValueExpr v;
  v.kind = ValueKind::NatLit;
  v.nat = value;
  return v;
}

SimperValueExpr sym(const std::string& text) {
  SimperValueExpr v;
  v.kind = ValueKind::SymLit;
  v.sym = text;
  return v;
}

SimperValueExpr indexed(const std::string& name,
                      std::vector<SimperValueExpr> args) {
  SimperValueExpr v;
  v.kind = ValueKind::Index;
  v.name = name;
  v.args = std::move(args);
  return v;
}

SimperValueExpr table_cell(const SimperValueExpr& row,
                           const SimperValueExpr& col, int symbol) {
  return indexed("T", {row, col, nat(static_cast<std::uint64_t>(symbol))});
}

SimperStatement assign(SimperValueExpr target, SimperValueExpr value) {
  SimperStatement s;
  s.kind = StmtKind::Assign;
  s.target = std::move(target);
  s.value = std::move(value);
  return s;
}

SimperStatement inc(const std::string& name) {
  SimperStatement s;
  s.kind = StmtKind::Inc;
  s.target = var(name);
  return s;
}

SimperStatement halt() {
  SimperStatement s;
  s.kind = StmtKind::Halt;
  return s;
}

SimperCond eq(SimperValueExpr a, SimperValueExpr b) {
  SimperCond c;
  c.kind = CondKind::Eq;
  c.operands = {std::move(a), std::move(b)};
  return c;
}

SimperCond neq(SimperValueExpr a, SimperValueExpr b) {
  SimperCond c;
  c.kind = CondKind::Neq;
  c.operands = {std::move(a), std::move(b)};
  return c;
}

SimperCond both(SimperCond a, SimperCond b) {
  SimperCond c;
  c.kind = CondKind::And;
  c.sub = {std::move(a), std::move(b)};
  return c;
}

SimperStatement if_then(SimperCond cond, std::vector<SimperStatement> body) {
  SimperStatement s;
  s.kind = StmtKind::If;
  s.cond = std::move(cond);
  s.block = std::move(body);
  return s;
}

SimperStatement while_loop(SimperCond cond,
                           std::vector<SimperStatement> body) {
  SimperStatement s;
  s.kind = StmtKind::While;
  s.cond = std::move(cond);
  s.block = std::move(body);
  return s;
}

}  // namespace

SimperProgram generate_cyk_simper(const PreprocessedGrammar& pg) {
  SimperProgram p;
  auto& top = p.statements;

  // The empty word is decided up front: the table covers spans of width >= 1
  // only, so epsilon membership is the preprocessed grammar's recorded fact.
  if (pg.nullable_start)
    top.push_back(if_then(eq(var("n"), nat(0)), {halt()}));

  // T := array[sn,sn,<symbols>](0) with sn = n+1, so spans run over
  // 0..n inclusive at both ends.
  top.push_back(assign(var("sn"), var("n")));
  top.push_back(inc("sn"));
  top.push_back(assign(
      var("T"),
      [&] {
        SimperValueExpr lit;
        lit.kind = ValueKind::ArrayLit;
        lit.args = {var("sn"), var("sn"),
                    nat(static_cast<std::uint64_t>(pg.symbol_count()))};
        lit.fill.push_back(nat(0));
        return lit;
      }()));

  // Initialization: every letter claims its own single-letter span,
  // T[i, i+1, <letter number>] := 1, dispatched on the letter.
  {
    SimperStatement dispatch;
    dispatch.kind = StmtKind::Switch;
    dispatch.value = indexed("input", {var("i")});
    for (const std::string& t : pg.terminals)
      dispatch.arms.emplace_back(
          sym(t), std::vector<SimperStatement>{assign(
                      table_cell(var("i"), var("si"), pg.number_of(t)),
                      nat(1))});

    top.push_back(assign(var("i"), nat(0)));
    top.push_back(assign(var("si"), nat(1)));
    top.push_back(while_loop(neq(var("i"), var("n")),
                             {std::move(dispatch), inc("i"), inc("si")}));
  }

  // Main widening loop.  Width starts at 1 so that the unary pass also
  // closes the single-letter spans the initialization just filled; the
  // binary pass is vacuous there because no split point exists.
  {
    std::vector<SimperStatement> binary_body;
    binary_body.push_back(assign(var("j"), var("i")));
    binary_body.push_back(inc("j"));
    std::vector<SimperStatement> split_body;
    for (const Production& prod : pg.binary)
      split_body.push_back(if_then(
          both(eq(table_cell(var("i"), var("j"),
                             pg.number_of(prod.rhs[0].name)),
                  nat(1)),
               eq(table_cell(var("j"), var("ik"),
                             pg.number_of(prod.rhs[1].name)),
                  nat(1))),
          {assign(table_cell(var("i"), var("ik"), pg.number_of(prod.lhs)),
                  nat(1))}));
    split_body.push_back(inc("j"));
    binary_body.push_back(
        while_loop(neq(var("j"), var("ik")), std::move(split_body)));
    binary_body.push_back(inc("i"));
    binary_body.push_back(inc("ik"));

    // The unary productions propagate within one span; repeating the whole
    // batch once per nonterminal covers the longest possible chain without
    // needing a change flag.
    std::vector<SimperStatement> round_body;
    for (const Production& prod : pg.unary)
      round_body.push_back(if_then(
          eq(table_cell(var("i"), var("ik"), pg.number_of(prod.rhs[0].name)),
             nat(1)),
          {assign(table_cell(var("i"), var("ik"), pg.number_of(prod.lhs)),
                  nat(1))}));
    round_body.push_back(inc("j"));
    std::vector<SimperStatement> unary_body;
    unary_body.push_back(assign(var("j"), nat(0)));
    unary_body.push_back(while_loop(
        neq(var("j"), nat(static_cast<std::uint64_t>(pg.nonterminals.size()))),
        std::move(round_body)));
    unary_body.push_back(inc("i"));
    unary_body.push_back(inc("ik"));

    std::vector<SimperStatement> width_body;
    width_body.push_back(assign(var("i"), nat(0)));
    width_body.push_back(assign(var("ik"), var("k")));
    width_body.push_back(
        while_loop(neq(var("ik"), var("sn")), std::move(binary_body)));
    width_body.push_back(assign(var("i"), nat(0)));
    width_body.push_back(assign(var("ik"), var("k")));
    width_body.push_back(
        while_loop(neq(var("ik"), var("sn")), std::move(unary_body)));
    width_body.push_back(inc("k"));

    top.push_back(assign(var("k"), nat(1)));
    top.push_back(
        while_loop(neq(var("k"), var("sn")), std::move(width_body)));
  }

  // Accept exactly when the start symbol spans the whole word.
  top.push_back(if_then(
      eq(table_cell(nat(0), var("n"), pg.number_of(pg.start)), nat(1)),
      {halt()}));
  return p;
}

}  // namespace submachine
