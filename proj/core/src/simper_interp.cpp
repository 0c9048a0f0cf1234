#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "submachine/simper.hpp"

namespace submachine {

namespace {

void collect_labels(const std::vector<SimperStatement>& body,
                    std::set<std::string>& out) {
  for (const SimperStatement& s : body) {
    if (s.kind == StmtKind::Label) out.insert(s.label);
    collect_labels(s.block, out);
    collect_labels(s.else_block, out);
    for (const auto& arm : s.arms) collect_labels(arm.second, out);
  }
}

class Desugarer {
 public:
  explicit Desugarer(const SimperProgram& p) { collect_labels(p.statements, used_); }

  std::vector<SimperStatement> rewrite(const std::vector<SimperStatement>& body) {
    std::vector<SimperStatement> out;
    for (const SimperStatement& s : body) rewrite_into(s, out);
    return out;
  }

 private:
  std::string fresh_label() {
    std::string name;
    do {
      name = "loop_" + std::to_string(++counter_);
    } while (used_.count(name));
    used_.insert(name);
    return name;
  }

  // while c { b }  becomes  head:  if c { b  goto head }
  void rewrite_while(const SimperStatement& s, std::vector<SimperStatement>& out) {
    std::string head = fresh_label();

    SimperStatement label;
    label.kind = StmtKind::Label;
    label.label = head;
    label.line = s.line;
    label.col = s.col;
    out.push_back(std::move(label));

    SimperStatement branch;
    branch.kind = StmtKind::If;
    branch.cond = s.cond;
    branch.block = rewrite(s.block);
    branch.line = s.line;
    branch.col = s.col;

    SimperStatement back;
    back.kind = StmtKind::Goto;
    back.label = head;
    back.line = s.line;
    back.col = s.col;
    branch.block.push_back(std::move(back));

    out.push_back(std::move(branch));
  }

  // switch v { a {B1} b {B2} ... }  becomes a first-match if/else chain:
  // if v == a { B1 } else { if v == b { B2 } else { ... } }
  void rewrite_switch(const SimperStatement& s, std::vector<SimperStatement>& out) {
    std::vector<SimperStatement> chain;
    for (auto it = s.arms.rbegin(); it != s.arms.rend(); ++it) {
      SimperStatement branch;
      branch.kind = StmtKind::If;
      branch.cond.kind = CondKind::Eq;
      branch.cond.operands = {s.value, it->first};
      branch.cond.line = it->first.line;
      branch.cond.col = it->first.col;
      branch.block = rewrite(it->second);
      branch.else_block = std::move(chain);
      branch.has_else = !branch.else_block.empty();
      branch.line = s.line;
      branch.col = s.col;
      chain.clear();
      chain.push_back(std::move(branch));
    }
    for (SimperStatement& st : chain) out.push_back(std::move(st));
  }

  void rewrite_into(const SimperStatement& s, std::vector<SimperStatement>& out) {
    switch (s.kind) {
      case StmtKind::While:
        rewrite_while(s, out);
        return;
      case StmtKind::Switch:
        rewrite_switch(s, out);
        return;
      case StmtKind::If: {
        SimperStatement copy = s;
        copy.block = rewrite(s.block);
        copy.else_block = rewrite(s.else_block);
        out.push_back(std::move(copy));
        return;
      }
      default:
        out.push_back(s);
        return;
    }
  }

  std::set<std::string> used_;
  int counter_ = 0;
};

// ---------------------------------------------------------------------------
// Execution.  The statement tree is flattened into a straight-line program of
// micro-operations so that goto and structured control flow share one program
// counter.  Branch falls through into its then-block and jumps to `jump` when
// the condition is false; the synthetic Jump that skips an else-block costs
// nothing, since the branch itself already paid the if-statement's step.
// ---------------------------------------------------------------------------

struct FlatOp {
  enum Kind { Goto, Assign, Inc, Dec, Halt, Branch, Jump } kind;
  const SimperValueExpr* target = nullptr;
  const SimperValueExpr* value = nullptr;
  const SimperCond* cond = nullptr;
  int jump = -1;
  int line = 0;
  int col = 0;
};

struct RuntimeFault {
  std::string message;
};

std::string at(int line, int col) {
  return "line " + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

std::uint64_t scalar_cells(const SimperValue& v) {
  if (v.kind != SimperValue::ArrayV) return 1;
  std::uint64_t n = v.elems.empty() ? 0 : scalar_cells(v.elems[0]);
  for (std::uint64_t d : v.dims) n *= d;
  return n;
}

class Flattener {
 public:
  std::vector<FlatOp> run(const std::vector<SimperStatement>& body) {
    emit_block(body);
    for (auto& [index, label] : pending_gotos_) {
      auto it = label_at_.find(label);
      if (it == label_at_.end())
        throw std::invalid_argument("interpret: goto to undefined label '" +
                                    label + "'");
      ops_[index].jump = it->second;
    }
    return std::move(ops_);
  }

 private:
  void emit_block(const std::vector<SimperStatement>& body) {
    for (const SimperStatement& s : body) emit(s);
  }

  void emit(const SimperStatement& s) {
    switch (s.kind) {
      case StmtKind::While:
      case StmtKind::Switch:
        throw std::invalid_argument(
            "interpret: program still contains while/switch sugar; run "
            "desugar first");
      case StmtKind::Label:
        label_at_[s.label] = static_cast<int>(ops_.size());
        return;
      case StmtKind::Goto: {
        pending_gotos_.emplace_back(static_cast<int>(ops_.size()), s.label);
        push(FlatOp::Goto, s);
        return;
      }
      case StmtKind::Halt:
        push(FlatOp::Halt, s);
        return;
      case StmtKind::Assign: {
        FlatOp& op = push(FlatOp::Assign, s);
        op.target = &s.target;
        op.value = &s.value;
        return;
      }
      case StmtKind::Inc:
      case StmtKind::Dec: {
        FlatOp& op = push(s.kind == StmtKind::Inc ? FlatOp::Inc : FlatOp::Dec, s);
        op.target = &s.target;
        return;
      }
      case StmtKind::If: {
        int branch_index = static_cast<int>(ops_.size());
        FlatOp& branch = push(FlatOp::Branch, s);
        branch.cond = &s.cond;
        emit_block(s.block);
        if (s.has_else || !s.else_block.empty()) {
          int skip_index = static_cast<int>(ops_.size());
          push(FlatOp::Jump, s);
          ops_[branch_index].jump = static_cast<int>(ops_.size());
          emit_block(s.else_block);
          ops_[skip_index].jump = static_cast<int>(ops_.size());
        } else {
          ops_[branch_index].jump = static_cast<int>(ops_.size());
        }
        return;
      }
    }
  }

  FlatOp& push(FlatOp::Kind kind, const SimperStatement& s) {
    FlatOp op;
    op.kind = kind;
    op.line = s.line;
    op.col = s.col;
    ops_.push_back(op);
    return ops_.back();
  }

  std::vector<FlatOp> ops_;
  std::map<std::string, int> label_at_;
  std::vector<std::pair<int, std::string>> pending_gotos_;
};

class Machine {
 public:
  Machine(std::vector<FlatOp> ops, const std::vector<std::string>& input,
          std::uint64_t fuel)
      : ops_(std::move(ops)), fuel_(fuel) {
    SimperValue word;
    word.kind = SimperValue::ArrayV;
    word.dims = {input.size()};
    for (const std::string& sym : input) {
      SimperValue cell;
      cell.kind = SimperValue::SymV;
      cell.sym = sym;
      word.elems.push_back(std::move(cell));
    }
    env_["input"] = std::move(word);
    SimperValue length;
    length.kind = SimperValue::NatV;
    length.nat = input.size();
    env_["n"] = std::move(length);
  }

  ExecOutcome run() {
    ExecOutcome out;
    try {
      out.status = loop();
    } catch (const RuntimeFault& fault) {
      out.status = ExecStatus::RuntimeError;
      out.error = fault.message;
    }
    out.steps = steps_;
    return out;
  }

  const std::map<std::string, SimperValue>& env() const { return env_; }

 private:
  ExecStatus loop() {
    int pc = 0;
    while (true) {
      if (pc < 0 || pc >= static_cast<int>(ops_.size()))
        return ExecStatus::StuckEnd;
      const FlatOp& op = ops_[pc];
      switch (op.kind) {
        case FlatOp::Jump:
          pc = op.jump;
          break;
        case FlatOp::Goto:
          if (!pay(1)) return ExecStatus::OutOfFuel;
          pc = op.jump;
          break;
        case FlatOp::Halt:
          if (!pay(1)) return ExecStatus::OutOfFuel;
          return ExecStatus::Halted;
        case FlatOp::Branch: {
          bool taken = eval_condition(*op.cond);
          if (!pay(1)) return ExecStatus::OutOfFuel;
          pc = taken ? pc + 1 : op.jump;
          break;
        }
        case FlatOp::Assign: {
          SimperValue v = eval(*op.value);
          std::uint64_t cost =
              op.value->kind == ValueKind::ArrayLit ? scalar_cells(v) : 1;
          if (!pay(cost)) return ExecStatus::OutOfFuel;
          store(*op.target, std::move(v));
          ++pc;
          break;
        }
        case FlatOp::Inc:
        case FlatOp::Dec: {
          SimperValue v = eval(*op.target);
          if (v.kind != SimperValue::NatV)
            throw RuntimeFault{at(op.line, op.col) +
                               "++/-- applied to a non-nat value"};
          if (op.kind == FlatOp::Inc)
            ++v.nat;
          else if (v.nat > 0)
            --v.nat;  // decrementing zero leaves zero
          if (!pay(1)) return ExecStatus::OutOfFuel;
          store(*op.target, std::move(v));
          ++pc;
          break;
        }
      }
    }
  }

  bool pay(std::uint64_t cost) {
    if (steps_ + cost > fuel_) return false;
    steps_ += cost;
    return true;
  }

  std::uint64_t eval_nat(const SimperValueExpr& e) {
    SimperValue v = eval(e);
    if (v.kind != SimperValue::NatV)
      throw RuntimeFault{at(e.line, e.col) + "expected a nat value"};
    return v.nat;
  }

  // Row-major offset of an index vector into an array value; faults when any
  // index is out of bounds.
  std::uint64_t offset_of(const SimperValueExpr& e, const SimperValue& array) {
    if (array.kind != SimperValue::ArrayV)
      throw RuntimeFault{at(e.line, e.col) + "'" + e.name +
                         "' is indexed but does not hold an array"};
    if (array.dims.size() != e.args.size())
      throw RuntimeFault{at(e.line, e.col) + "'" + e.name + "' has " +
                         std::to_string(array.dims.size()) +
                         " dimensions but is indexed with " +
                         std::to_string(e.args.size()) + " indices"};
    std::uint64_t offset = 0;
    for (size_t i = 0; i < e.args.size(); ++i) {
      std::uint64_t idx = eval_nat(e.args[i]);
      if (idx >= array.dims[i])
        throw RuntimeFault{at(e.args[i].line, e.args[i].col) + "index " +
                           std::to_string(idx) + " is out of bounds for '" +
                           e.name + "' (dimension " + std::to_string(i) +
                           " has size " + std::to_string(array.dims[i]) + ")"};
      offset = offset * array.dims[i] + idx;
    }
    return offset;
  }

  SimperValue& load(const SimperValueExpr& e) {
    auto it = env_.find(e.name);
    if (it == env_.end())
      throw RuntimeFault{at(e.line, e.col) + "'" + e.name +
                         "' is read before it is assigned"};
    return it->second;
  }

  SimperValue eval(const SimperValueExpr& e) {
    switch (e.kind) {
      case ValueKind::NatLit: {
        SimperValue v;
        v.kind = SimperValue::NatV;
        v.nat = e.nat;
        return v;
      }
      case ValueKind::SymLit: {
        SimperValue v;
        v.kind = SimperValue::SymV;
        v.sym = e.sym;
        return v;
      }
      case ValueKind::Var:
        return load(e);
      case ValueKind::Index: {
        const SimperValue& array = load(e);
        return array.elems[offset_of(e, array)];
      }
      case ValueKind::ArrayLit: {
        SimperValue v;
        v.kind = SimperValue::ArrayV;
        std::uint64_t total = 1;
        for (const SimperValueExpr& dim : e.args) {
          v.dims.push_back(eval_nat(dim));
          total *= v.dims.back();
        }
        SimperValue fill = eval(e.fill[0]);
        v.elems.assign(total, fill);
        return v;
      }
    }
    throw RuntimeFault{at(e.line, e.col) + "unsupported value expression"};
  }

  void store(const SimperValueExpr& target, SimperValue v) {
    if (target.kind == ValueKind::Var) {
      env_[target.name] = std::move(v);
      return;
    }
    SimperValue& array = load(target);
    array.elems[offset_of(target, array)] = std::move(v);
  }

  bool eval_condition(const SimperCond& c) {
    switch (c.kind) {
      case CondKind::And:
        return eval_condition(c.sub[0]) && eval_condition(c.sub[1]);
      case CondKind::Or:
        return eval_condition(c.sub[0]) || eval_condition(c.sub[1]);
      case CondKind::Eq:
      case CondKind::Neq: {
        SimperValue left = eval(c.operands[0]);
        SimperValue right = eval(c.operands[1]);
        if (left.kind == SimperValue::ArrayV ||
            right.kind == SimperValue::ArrayV)
          throw RuntimeFault{at(c.line, c.col) +
                             "arrays cannot be compared for equality"};
        if (left.kind != right.kind)
          throw RuntimeFault{at(c.line, c.col) +
                             "comparison of a nat with a sym"};
        bool equal = left.kind == SimperValue::NatV ? left.nat == right.nat
                                                    : left.sym == right.sym;
        return c.kind == CondKind::Eq ? equal : !equal;
      }
    }
    return false;
  }

  std::vector<FlatOp> ops_;
  std::map<std::string, SimperValue> env_;
  std::uint64_t fuel_;
  std::uint64_t steps_ = 0;
};

}  // namespace

SimperProgram desugar(const SimperProgram& p) {
  Desugarer d(p);
  SimperProgram out;
  out.statements = d.rewrite(p.statements);
  return out;
}

ExecOutcome interpret(const SimperProgram& p,
                      const std::vector<std::string>& input,
                      std::uint64_t fuel,
                      std::map<std::string, SimperValue>* final_env) {
  Flattener flattener;
  std::vector<FlatOp> ops = flattener.run(p.statements);
  Machine machine(std::move(ops), input, fuel);
  ExecOutcome out = machine.run();
  if (final_env != nullptr) *final_env = machine.env();
  return out;
}

}  // namespace submachine
