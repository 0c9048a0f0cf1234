#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "submachine/simper.hpp"

namespace submachine {

std::string SimperType::to_string() const {
  switch (kind) {
    case Nat:
      return "nat";
    case Sym:
      return "sym";
    case Array:
      return "array " + std::to_string(dims) + " " + elem[0].to_string();
  }
  return "?";
}

namespace {

std::string at(int line, int col) {
  return "line " + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

// One global type per variable, inferred to a fixed point and then checked
// in a single diagnostic pass (so repeated inference passes cannot duplicate
// findings).  Inference only ever adds bindings; a conflicting use keeps the
// first binding and is reported by the check pass.
class Checker {
 public:
  explicit Checker(const SimperProgram& p) : program_(p) {
    types_["input"] = array_type(1, sym_type());
    types_["n"] = nat_type();
    assigned_.insert("input");
    assigned_.insert("n");
  }

  TypeEnvironment run() {
    collect_labels(program_.statements);
    do {
      changed_ = false;
      walk(program_.statements);
    } while (changed_);
    emit_diagnostics_ = true;
    walk(program_.statements);
    finish();

    TypeEnvironment env;
    env.types = types_;
    env.diagnostics = std::move(diagnostics_);
    return env;
  }

 private:
  void diag(const std::string& subject, const std::string& message) {
    if (emit_diagnostics_) diagnostics_.push_back({subject, message});
  }

  void collect_labels(const std::vector<SimperStatement>& body) {
    for (const SimperStatement& s : body) {
      if (s.kind == StmtKind::Label && !labels_.insert(s.label).second)
        duplicate_labels_.push_back(&s);
      collect_labels(s.block);
      collect_labels(s.else_block);
      for (const auto& arm : s.arms) collect_labels(arm.second);
    }
  }

  std::optional<SimperType> lookup(const std::string& name) {
    auto it = types_.find(name);
    if (it == types_.end()) return std::nullopt;
    return it->second;
  }

  void bind(const std::string& name, const SimperType& t) {
    if (types_.emplace(name, t).second) changed_ = true;
  }

  // Computes the type of a value expression from current bindings; returns
  // nothing while some variable involved is still unknown.
  std::optional<SimperType> infer(const SimperValueExpr& v) {
    switch (v.kind) {
      case ValueKind::NatLit:
        return nat_type();
      case ValueKind::SymLit:
        return sym_type();
      case ValueKind::Var:
        mentioned_.insert(v.name);
        return lookup(v.name);
      case ValueKind::Index: {
        mentioned_.insert(v.name);
        for (const SimperValueExpr& idx : v.args) require(idx, nat_type());
        std::optional<SimperType> t = lookup(v.name);
        if (!t) return std::nullopt;
        if (t->kind != SimperType::Array) {
          diag(v.name, at(v.line, v.col) + "indexed, but its type is " +
                           t->to_string());
          return std::nullopt;
        }
        if (t->dims != static_cast<int>(v.args.size())) {
          diag(v.name, at(v.line, v.col) + "indexed with " +
                           std::to_string(v.args.size()) +
                           " indices, but its type is " + t->to_string());
          return std::nullopt;
        }
        return t->elem[0];
      }
      case ValueKind::ArrayLit: {
        for (const SimperValueExpr& dim : v.args) require(dim, nat_type());
        std::optional<SimperType> fill = infer(v.fill[0]);
        if (!fill) return std::nullopt;
        return array_type(static_cast<int>(v.args.size()), *fill);
      }
    }
    return std::nullopt;
  }

  // Pushes an expected type down into a value expression: binds unknown
  // variables during inference, reports mismatches during the check pass.
  void require(const SimperValueExpr& v, const SimperType& want) {
    switch (v.kind) {
      case ValueKind::NatLit:
        if (!(want == nat_type()))
          diag(std::to_string(v.nat),
               at(v.line, v.col) + "nat literal used where " +
                   want.to_string() + " is expected");
        return;
      case ValueKind::SymLit:
        if (!(want == sym_type()))
          diag("\"" + v.sym + "\"",
               at(v.line, v.col) + "sym literal used where " +
                   want.to_string() + " is expected");
        return;
      case ValueKind::Var: {
        mentioned_.insert(v.name);
        std::optional<SimperType> have = lookup(v.name);
        if (!have) {
          bind(v.name, want);
        } else if (!(*have == want)) {
          diag(v.name, at(v.line, v.col) + "has type " + have->to_string() +
                           " but is used as " + want.to_string());
        }
        return;
      }
      case ValueKind::Index: {
        mentioned_.insert(v.name);
        for (const SimperValueExpr& idx : v.args) require(idx, nat_type());
        std::optional<SimperType> have = lookup(v.name);
        SimperType want_array =
            array_type(static_cast<int>(v.args.size()), want);
        if (!have) {
          bind(v.name, want_array);
        } else if (!(*have == want_array)) {
          diag(v.name, at(v.line, v.col) + "has type " + have->to_string() +
                           " but is indexed as " + want_array.to_string());
        }
        return;
      }
      case ValueKind::ArrayLit: {
        for (const SimperValueExpr& dim : v.args) require(dim, nat_type());
        if (want.kind != SimperType::Array ||
            want.dims != static_cast<int>(v.args.size())) {
          diag("array literal",
               at(v.line, v.col) + "creates an array " +
                   std::to_string(v.args.size()) + "-dimensional value where " +
                   want.to_string() + " is expected");
          return;
        }
        require(v.fill[0], want.elem[0]);
        return;
      }
    }
  }

  void check_condition(const SimperCond& c) {
    if (c.kind == CondKind::And || c.kind == CondKind::Or) {
      check_condition(c.sub[0]);
      check_condition(c.sub[1]);
      return;
    }
    std::optional<SimperType> left = infer(c.operands[0]);
    std::optional<SimperType> right = infer(c.operands[1]);
    if (left)
      require(c.operands[1], *left);
    else if (right)
      require(c.operands[0], *right);
    const std::optional<SimperType>& known = left ? left : right;
    if (known && known->kind == SimperType::Array)
      diag("condition", at(c.line, c.col) +
                            "comparison operands have array type " +
                            known->to_string() +
                            "; only nat and sym values can be compared");
  }

  void check_write_target(const SimperValueExpr& target) {
    if (target.name == "input" || target.name == "n")
      diag(target.name,
           at(target.line, target.col) +
               "is read-only: it carries the word under test");
  }

  void walk(const std::vector<SimperStatement>& body) {
    for (const SimperStatement& s : body) walk(s);
  }

  void walk(const SimperStatement& s) {
    switch (s.kind) {
      case StmtKind::Label:
        return;
      case StmtKind::Goto:
        if (!labels_.count(s.label))
          diag(s.label, at(s.line, s.col) + "goto to an undefined label");
        return;
      case StmtKind::Halt:
        return;
      case StmtKind::Assign: {
        check_write_target(s.target);
        if (s.target.kind == ValueKind::Var)
          assigned_.insert(s.target.name);
        std::optional<SimperType> value_type = infer(s.value);
        if (value_type) {
          require(s.target, *value_type);
        } else {
          std::optional<SimperType> target_type = infer(s.target);
          if (target_type) require(s.value, *target_type);
        }
        return;
      }
      case StmtKind::Inc:
      case StmtKind::Dec:
        check_write_target(s.target);
        require(s.target, nat_type());
        return;
      case StmtKind::If:
        check_condition(s.cond);
        walk(s.block);
        walk(s.else_block);
        return;
      case StmtKind::While:
        check_condition(s.cond);
        walk(s.block);
        return;
      case StmtKind::Switch: {
        std::optional<SimperType> scrutinee = infer(s.value);
        for (const auto& arm : s.arms) {
          if (scrutinee)
            require(arm.first, *scrutinee);
          else if (std::optional<SimperType> t = infer(arm.first)) {
            require(s.value, *t);
            scrutinee = t;
          }
          walk(arm.second);
        }
        return;
      }
    }
  }

  void finish() {
    for (const SimperStatement* s : duplicate_labels_)
      diagnostics_.push_back(
          {s->label, at(s->line, s->col) + "duplicate label"});
    for (const std::string& name : mentioned_) {
      if (!assigned_.count(name))
        diagnostics_.push_back(
            {name, "is read but never assigned a value"});
      else if (!types_.count(name))
        diagnostics_.push_back({name, "type could not be inferred"});
    }
  }

  const SimperProgram& program_;
  std::map<std::string, SimperType> types_;
  std::set<std::string> mentioned_;
  std::set<std::string> assigned_;
  std::set<std::string> labels_;
  std::vector<const SimperStatement*> duplicate_labels_;
  std::vector<Diagnostic> diagnostics_;
  bool changed_ = false;
  bool emit_diagnostics_ = false;
};

}  // namespace

TypeEnvironment typecheck(const SimperProgram& p) { return Checker(p).run(); }

}  // namespace submachine
